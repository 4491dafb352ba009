use nalgebra::DVector;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rep::RepSpace;
use crate::C64;

/// Amplitudes below this fraction of the largest one are skipped when
/// choosing the phase reference.
const PHASE_REFERENCE_CUTOFF: f64 = 1e-10;

/// Complex amplitudes over the basis of a [`RepSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    j1: u32,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(rep: &RepSpace, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != rep.dim() {
            return Err(Error::DimensionMismatch { left: rep.dim(), right: amplitudes.len() });
        }
        Ok(Self { j1: rep.j1(), amplitudes })
    }

    pub(crate) fn from_parts(j1: u32, amplitudes: DVector<C64>) -> Self {
        Self { j1, amplitudes }
    }

    pub fn basis(rep: &RepSpace, idx: usize) -> Self {
        let mut v = DVector::zeros(rep.dim());
        v[idx] = C64::new(1.0, 0.0);
        Self { j1: rep.j1(), amplitudes: v }
    }

    pub fn zeros(rep: &RepSpace) -> Self {
        Self { j1: rep.j1(), amplitudes: DVector::zeros(rep.dim()) }
    }

    /// Normalized state with independent standard-normal real and imaginary parts.
    pub fn random<R: Rng + ?Sized>(rep: &RepSpace, rng: &mut R) -> Self {
        loop {
            let v = DVector::from_fn(rep.dim(), |_, _| C64::new(gaussian(rng), gaussian(rng)));
            if let Ok(s) = Self::from_parts(rep.j1(), v).normalized() {
                return s;
            }
        }
    }

    pub fn j1(&self) -> u32 {
        self.j1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, rep: &RepSpace, j2: u32, j3: u32) -> Option<C64> {
        rep.index_of_labels(j2, j3).map(|i| self.amplitudes[i])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NormZero);
        }
        Ok(Self { j1: self.j1, amplitudes: &self.amplitudes / C64::new(n, 0.0) })
    }

    /// Rotates the global phase so that the first non-negligible amplitude
    /// in basis order is real and positive.
    pub fn canonicalize_phase(&self) -> Self {
        let peak = self.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let reference = self.amplitudes.iter().find(|z| z.norm() > PHASE_REFERENCE_CUTOFF * peak);
        match reference {
            Some(z) if peak > 0.0 => {
                let phase = z.conj() / z.norm();
                Self { j1: self.j1, amplitudes: &self.amplitudes * phase }
            }
            _ => self.clone(),
        }
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same(other)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `min_phi || self - e^{i phi} other ||`, evaluated on the aligned
    /// difference vector rather than through `sqrt(2 - 2|<a|b>|)`.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let overlap = other.inner(self)?;
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
        Ok((&self.amplitudes - &other.amplitudes * phase).norm())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { j1: self.j1, amplitudes: &self.amplitudes * c }
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { j1: self.j1, amplitudes: &self.amplitudes + &other.amplitudes })
    }

    fn check_same(&self, other: &StateVector) -> Result<()> {
        if self.j1 != other.j1 {
            return Err(Error::RepMismatch { left: self.j1, right: other.j1 });
        }
        Ok(())
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; the (0, 1] draw keeps the logarithm finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
