//! su(3) coherent states: closed form in projective coordinates, the
//! displacement-operator construction, and the resolution of identity.
//!
//! The overcompleteness measure used here is the isotropic weight
//!
//! ```text
//! dmu = (j1+1)(j1+2) x1 / (1 + x1 + x1 x2)^3 dx1 dx2 dtheta1/2pi dtheta2/2pi,
//! ```
//!
//! with `x_s = |zeta_s|^2`, obtained from the Fubini-Study measure by the
//! change of variables `w1 = zeta1`, `w2 = zeta1 zeta2`. Its one-dimensional
//! reduction is the radial weight `h(x) = (j+1) / (1+x)^(j+2)`, whose
//! moments are `n! (j-n)! / j!`. The frequently quoted form with
//! `(1 + x^2)` in the denominator does not have these moments.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expm_anti_hermitian, max_abs};
use crate::quadrature::{angular_average, semi_infinite, QuadratureSpec};
use crate::rep::{generator, GeneratorId, RepSpace};
use crate::special::binomial;
use crate::state::StateVector;
use crate::C64;

/// Reconstruction distance accepted by [`extract_zeta`].
pub const EXTRACT_TOLERANCE: f64 = 1e-8;
/// Basepoint amplitudes at or below this are treated as zero.
pub const BASEPOINT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentParams {
    #[serde(serialize_with = "crate::serial::complex")]
    pub zeta1: C64,
    #[serde(serialize_with = "crate::serial::complex")]
    pub zeta2: C64,
}

impl CoherentParams {
    pub fn new(zeta1: C64, zeta2: C64) -> Self {
        Self { zeta1, zeta2 }
    }

    /// `1 + |zeta1|^2 + |zeta1|^2 |zeta2|^2`.
    pub fn norm_factor(&self) -> f64 {
        let x1 = self.zeta1.norm_sqr();
        1.0 + x1 + x1 * self.zeta2.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplacementParams {
    #[serde(serialize_with = "crate::serial::complex")]
    pub z1: C64,
    #[serde(serialize_with = "crate::serial::complex")]
    pub z2: C64,
}

impl DisplacementParams {
    pub fn new(z1: C64, z2: C64) -> Self {
        Self { z1, z2 }
    }
}

/// `sqrt(C(j1, j2) C(j2, j3))`, the multinomial weight of basis vector `(j2, j3)`.
pub fn basis_weight(j1: u32, j2: u32, j3: u32) -> f64 {
    (binomial(j1, j2) * binomial(j2, j3)).sqrt()
}

/// Closed-form coherent state in projective coordinates.
pub fn coherent_state(rep: &RepSpace, p: CoherentParams) -> StateVector {
    let j1 = rep.j1();
    let prefactor = p.norm_factor().powf(-(j1 as f64) / 2.0);
    let amps = DVector::from_fn(rep.dim(), |i, _| {
        let (j2, j3) = rep.labels(i);
        p.zeta1.powu(j2) * p.zeta2.powu(j3) * (prefactor * basis_weight(j1, j2, j3))
    });
    StateVector::from_parts(j1, amps)
}

/// `z1 f1 + z2 f3 - conj(z1) e1 - conj(z2) e3`, anti-Hermitian.
pub fn displacement_exponent(rep: &RepSpace, p: DisplacementParams) -> DMatrix<C64> {
    let g = |id| generator(rep, id).into_matrix();
    g(GeneratorId::F1) * p.z1 + g(GeneratorId::F3) * p.z2
        - g(GeneratorId::E1) * p.z1.conj()
        - g(GeneratorId::E3) * p.z2.conj()
}

pub fn displacement_operator(rep: &RepSpace, p: DisplacementParams) -> DMatrix<C64> {
    expm_anti_hermitian(&displacement_exponent(rep, p))
}

/// Displacement of the highest-weight vector `|j1, 0, 0>`.
pub fn displaced_state(rep: &RepSpace, p: DisplacementParams) -> StateVector {
    let d = displacement_operator(rep, p);
    StateVector::from_parts(rep.j1(), d.column(0).into_owned())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extraction {
    pub params: CoherentParams,
    /// Distance, up to global phase, between the input and the rebuilt state.
    pub distance: f64,
}

/// Recovers `(zeta1, zeta2)` from a state, validated by full reconstruction.
pub fn extract_zeta(state: &StateVector) -> Result<CoherentParams> {
    extract_zeta_with_distance(state).map(|e| e.params)
}

pub fn extract_zeta_with_distance(state: &StateVector) -> Result<Extraction> {
    let rep = RepSpace::new(state.j1());
    let psi = state.normalized()?;
    let j1 = rep.j1();
    let a00 = psi.amplitudes()[0];
    if a00.norm() <= BASEPOINT_THRESHOLD {
        // Every finite-zeta coherent state has a00 = N^(-j1/2) > 0; report
        // the distance to the zeta = 0 state.
        let d = psi.distance_up_to_phase(&rep.highest_weight())?;
        return Err(Error::NotCoherent { distance: d, tolerance: EXTRACT_TOLERANCE });
    }
    let params = if j1 == 0 {
        CoherentParams::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    } else {
        let a10 = psi.amplitude(&rep, 1, 0).expect("j1 >= 1");
        let a11 = psi.amplitude(&rep, 1, 1).expect("j1 >= 1");
        let zeta1 = a10 / (a00 * (j1 as f64).sqrt());
        let zeta2 = if a10.norm() > BASEPOINT_THRESHOLD {
            a11 / a10
        } else if a11.norm() <= BASEPOINT_THRESHOLD {
            C64::new(0.0, 0.0)
        } else {
            return Err(Error::ZeroLeadingAmplitude { at: (1, 0) });
        };
        CoherentParams::new(zeta1, zeta2)
    };
    let distance = psi.distance_up_to_phase(&coherent_state(&rep, params))?;
    if distance > EXTRACT_TOLERANCE {
        return Err(Error::NotCoherent { distance, tolerance: EXTRACT_TOLERANCE });
    }
    Ok(Extraction { params, distance })
}

/// Radial weight `h(x) = (j+1) (1+x)^-(j+2)` on `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeasureSpec {
    pub j: u32,
}

impl MeasureSpec {
    pub fn weight(&self, x: f64) -> f64 {
        (self.j as f64 + 1.0) * (1.0 + x).powi(-(self.j as i32 + 2))
    }

    /// `n! (j - n)! / j!`
    pub fn moment_target(&self, n: u32) -> f64 {
        1.0 / binomial(self.j, n)
    }
}

/// Agreement required between a rule and its doubled refinement.
const MOMENT_CONVERGENCE: f64 = 1e-12;

/// `|int x^n h(x) dx - n! (j-n)! / j!|` by mapped Gauss-Legendre.
pub fn moment_check(j: u32, n: u32) -> Result<f64> {
    if n > j {
        return Err(Error::InvalidArgument(format!("moment order n = {n} exceeds j = {j}")));
    }
    let spec = MeasureSpec { j };
    let nodes = (j as usize + 2).max(16);
    let integrate = |m: usize| semi_infinite(m).integrate(|x| x.powi(n as i32) * spec.weight(x));
    let coarse = integrate(nodes);
    let fine = integrate(2 * nodes);
    if (coarse - fine).abs() > MOMENT_CONVERGENCE * fine.abs().max(1.0) {
        return Err(Error::Quadrature(format!(
            "moment j={j} n={n}: {nodes} nodes give {coarse:e}, {} give {fine:e}",
            2 * nodes
        )));
    }
    Ok((fine - spec.moment_target(n)).abs())
}

/// Tensor-product quadrature of the coherent-state measure on a representation.
///
/// Radially, `x1 = t / (1 - t)` and `x2 = (1 + x1) / x1 * u` with
/// `u = t' / (1 - t')`; in these variables every diagonal integrand is a
/// polynomial in `(t, t')`, so Gauss-Legendre is exact once the node counts
/// exceed the polynomial degree and converges geometrically before that.
///
/// The integrand of every matrix element factorizes into a radial part and
/// two phases, so the angular trapezoid sums are taken once per phase
/// difference; the result equals the full four-dimensional tensor sum.
pub struct MeasureQuadrature<'a> {
    rep: &'a RepSpace,
    quad: QuadratureSpec,
}

impl<'a> MeasureQuadrature<'a> {
    pub fn new(rep: &'a RepSpace, quad: QuadratureSpec) -> Result<Self> {
        let need = 2 * rep.j1() as usize + 1;
        if quad.angular1 < need || quad.angular2 < need {
            return Err(Error::Quadrature(format!(
                "angular nodes {}x{} cannot resolve phases up to degree {} (need at least {need})",
                quad.angular1,
                quad.angular2,
                2 * rep.j1()
            )));
        }
        if quad.radial1 == 0 || quad.radial2 == 0 {
            return Err(Error::Quadrature("radial node count is zero".into()));
        }
        Ok(Self { rep, quad })
    }

    /// `G[k][l] = int conj(zeta^k) zeta^l N^-j1 dmu` over monomials
    /// `zeta^k = zeta1^j2 zeta2^j3` in basis order.
    pub fn monomial_gram(&self) -> DMatrix<C64> {
        let rep = self.rep;
        let j1 = rep.j1();
        let dim = rep.dim();
        let labels: Vec<(u32, u32)> = (0..dim).map(|i| rep.labels(i)).collect();
        let r1 = semi_infinite(self.quad.radial1);
        let r2 = semi_infinite(self.quad.radial2);
        let norm = (j1 as f64 + 1.0) * (j1 as f64 + 2.0);

        // Radial factor with exponents (e1, e2) in half-units of x1, x2.
        let max_e = 2 * j1 as usize + 1;
        let mut radial = vec![vec![0.0f64; max_e]; max_e];
        let mut terms: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); max_e]; max_e];
        for (&x1, &w1) in r1.nodes.iter().zip(&r1.weights) {
            let s1 = x1.sqrt();
            // x2 = scale * u puts the x2 decay at u ~ 1 for every x1.
            let scale = (1.0 + x1) / x1;
            for (&u, &w2) in r2.nodes.iter().zip(&r2.weights) {
                let (x2, w2) = (scale * u, scale * w2);
                let s2 = x2.sqrt();
                let n = 1.0 + x1 + x1 * x2;
                let base = w1 * w2 * norm * x1 * n.powi(-(j1 as i32 + 3));
                let mut p1 = base;
                for row in terms.iter_mut() {
                    let mut p = p1;
                    for cell in row.iter_mut() {
                        cell.push(p);
                        p *= s2;
                    }
                    p1 *= s1;
                }
            }
        }
        for (a, row) in terms.iter().enumerate() {
            for (b, cell) in row.iter().enumerate() {
                radial[a][b] = crate::quadrature::pairwise_sum(cell);
            }
        }

        let ang1: Vec<C64> = (-(j1 as i64)..=j1 as i64).map(|m| angular_average(m, self.quad.angular1)).collect();
        let ang2: Vec<C64> = (-(j1 as i64)..=j1 as i64).map(|m| angular_average(m, self.quad.angular2)).collect();
        let off = j1 as i64;
        DMatrix::from_fn(dim, dim, |k, l| {
            let (j2k, j3k) = labels[k];
            let (j2l, j3l) = labels[l];
            let rad = radial[(j2k + j2l) as usize][(j3k + j3l) as usize];
            let a1 = ang1[(j2l as i64 - j2k as i64 + off) as usize];
            let a2 = ang2[(j3l as i64 - j3k as i64 + off) as usize];
            a1 * a2 * rad
        })
    }

    /// `int |zeta><zeta| dmu` as a matrix in the Fock basis.
    pub fn resolution_matrix(&self) -> DMatrix<C64> {
        let rep = self.rep;
        let j1 = rep.j1();
        let g = self.monomial_gram();
        let w: Vec<f64> = (0..rep.dim())
            .map(|i| {
                let (j2, j3) = rep.labels(i);
                basis_weight(j1, j2, j3)
            })
            .collect();
        DMatrix::from_fn(rep.dim(), rep.dim(), |k, l| g[(l, k)] * (w[k] * w[l]))
    }
}

/// Max-abs deviation of the quadrature of `|zeta><zeta|` from the identity.
pub fn resolution_check(rep: &RepSpace, quad: QuadratureSpec) -> Result<f64> {
    let m = MeasureQuadrature::new(rep, quad)?.resolution_matrix();
    Ok(max_abs(&(m - DMatrix::<C64>::identity(rep.dim(), rep.dim()))))
}
