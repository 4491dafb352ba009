//! Fock-Bargmann realization: states as polynomials, generators as
//! first-order differential operators.
//!
//! The polynomial attached to `|j1-j2, j2-j3, j3>` is
//! `sqrt(C(j1,j2) C(j2,j3)) zeta1^j2 zeta2^j3`. Written in the affine
//! variables `u1 = zeta1`, `u2 = zeta1 zeta2` this monomial is
//! `u1^(j2-j3) u2^j3`, and it is in `(u1, u2)` that the generators take the
//! first-order forms below (`e1 = d/du1`, `f1 = j1 u1 - u1^2 d/du1 - u1 u2 d/du2`, ...).
//! Exponents `(a, b) = (j2 - j3, j3)` range over the simplex `a + b <= j1`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::coherent::{basis_weight, MeasureQuadrature};
use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::quadrature::QuadratureSpec;
use crate::rep::{generator, structure_residuals, GeneratorId, RepSpace, Residual};
use crate::state::StateVector;
use crate::C64;

/// Coefficients over the monomials `zeta1^j2 zeta2^j3`, `0 <= j3 <= j2 <= j1`,
/// stored in the representation's basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPolynomial {
    j1: u32,
    coeffs: DVector<C64>,
}

impl AnalyticPolynomial {
    pub fn new(rep: &RepSpace, coeffs: DVector<C64>) -> Result<Self> {
        if coeffs.len() != rep.dim() {
            return Err(Error::DimensionMismatch { left: rep.dim(), right: coeffs.len() });
        }
        Ok(Self { j1: rep.j1(), coeffs })
    }

    pub fn zeros(rep: &RepSpace) -> Self {
        Self { j1: rep.j1(), coeffs: DVector::zeros(rep.dim()) }
    }

    pub fn monomial(rep: &RepSpace, j2: u32, j3: u32) -> Option<Self> {
        let idx = rep.index_of_labels(j2, j3)?;
        let mut p = Self::zeros(rep);
        p.coeffs[idx] = C64::new(1.0, 0.0);
        Some(p)
    }

    pub fn j1(&self) -> u32 {
        self.j1
    }

    pub fn coeffs(&self) -> &DVector<C64> {
        &self.coeffs
    }

    pub fn coeff(&self, rep: &RepSpace, j2: u32, j3: u32) -> Option<C64> {
        rep.index_of_labels(j2, j3).map(|i| self.coeffs[i])
    }

    pub fn set_coeff(&mut self, rep: &RepSpace, j2: u32, j3: u32, value: C64) -> Result<()> {
        let idx = rep
            .index_of_labels(j2, j3)
            .ok_or_else(|| Error::InvalidArgument(format!("(j2, j3) = ({j2}, {j3}) outside the triangle")))?;
        self.coeffs[idx] = value;
        Ok(())
    }

    /// Evaluates the polynomial at `(zeta1, zeta2)`.
    pub fn eval(&self, rep: &RepSpace, zeta1: C64, zeta2: C64) -> C64 {
        (0..rep.dim())
            .map(|i| {
                let (j2, j3) = rep.labels(i);
                self.coeffs[i] * zeta1.powu(j2) * zeta2.powu(j3)
            })
            .sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { j1: self.j1, coeffs: &self.coeffs * c }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.j1 != other.j1 {
            return Err(Error::RepMismatch { left: self.j1, right: other.j1 });
        }
        Ok(Self { j1: self.j1, coeffs: &self.coeffs + &other.coeffs })
    }
}

fn weights(rep: &RepSpace) -> Vec<f64> {
    (0..rep.dim())
        .map(|i| {
            let (j2, j3) = rep.labels(i);
            basis_weight(rep.j1(), j2, j3)
        })
        .collect()
}

pub fn to_bargmann(state: &StateVector) -> AnalyticPolynomial {
    let rep = RepSpace::new(state.j1());
    let w = weights(&rep);
    let coeffs = DVector::from_fn(rep.dim(), |i, _| state.amplitudes()[i] * w[i]);
    AnalyticPolynomial { j1: rep.j1(), coeffs }
}

pub fn from_bargmann(poly: &AnalyticPolynomial) -> StateVector {
    let rep = RepSpace::new(poly.j1);
    let w = weights(&rep);
    let amps = DVector::from_fn(rep.dim(), |i, _| poly.coeffs[i] / w[i]);
    StateVector::from_parts(rep.j1(), amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Derivative {
    None,
    U1,
    U2,
}

/// One term `scalar * u1^p1 * u2^p2 * derivative`.
#[derive(Debug, Clone, Copy)]
struct Term {
    scalar: f64,
    p1: u32,
    p2: u32,
    derivative: Derivative,
}

const fn term(scalar: f64, p1: u32, p2: u32, derivative: Derivative) -> Term {
    Term { scalar, p1, p2, derivative }
}

fn differential_expression(j1: u32, id: GeneratorId) -> Vec<Term> {
    use Derivative::*;
    let j = j1 as f64;
    match id {
        GeneratorId::E1 => vec![term(1.0, 0, 0, U1)],
        GeneratorId::E3 => vec![term(1.0, 0, 0, U2)],
        GeneratorId::F1 => vec![term(j, 1, 0, None), term(-1.0, 2, 0, U1), term(-1.0, 1, 1, U2)],
        GeneratorId::F3 => vec![term(j, 0, 1, None), term(-1.0, 0, 2, U2), term(-1.0, 1, 1, U1)],
        GeneratorId::E2 => vec![term(1.0, 1, 0, U2)],
        GeneratorId::F2 => vec![term(1.0, 0, 1, U1)],
        GeneratorId::H1 => vec![term(j, 0, 0, None), term(-2.0, 1, 0, U1), term(-1.0, 0, 1, U2)],
        GeneratorId::H2 => vec![term(1.0, 1, 0, U1), term(-1.0, 0, 1, U2)],
        GeneratorId::H3 => {
            let mut t = differential_expression(j1, GeneratorId::H1);
            t.extend(differential_expression(j1, GeneratorId::H2));
            t
        }
    }
}

/// A generator realized on analytic polynomials, as its matrix over the
/// monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator {
    j1: u32,
    matrix: DMatrix<C64>,
    tag: GeneratorId,
}

impl DiffOperator {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn tag(&self) -> GeneratorId {
        self.tag
    }

    pub fn apply(&self, p: &AnalyticPolynomial) -> Result<AnalyticPolynomial> {
        if p.j1 != self.j1 {
            return Err(Error::RepMismatch { left: self.j1, right: p.j1 });
        }
        Ok(AnalyticPolynomial { j1: self.j1, coeffs: &self.matrix * &p.coeffs })
    }
}

/// Assembles the differential expression of `id` on every monomial.
///
/// # Panics
/// If a net nonzero coefficient lands outside the simplex `a + b <= j1`;
/// that would mean the realization does not preserve the representation.
pub fn diff_op(rep: &RepSpace, id: GeneratorId) -> DiffOperator {
    let j1 = rep.j1();
    let terms = differential_expression(j1, id);
    let dim = rep.dim();
    let mut matrix = DMatrix::<C64>::zeros(dim, dim);
    for col in 0..dim {
        let (j2, j3) = rep.labels(col);
        let (a, b) = ((j2 - j3) as i64, j3 as i64);
        let mut image: HashMap<(i64, i64), f64> = HashMap::new();
        for t in &terms {
            let (factor, da, db) = match t.derivative {
                Derivative::None => (1.0, 0, 0),
                Derivative::U1 => (a as f64, -1, 0),
                Derivative::U2 => (b as f64, 0, -1),
            };
            let c = t.scalar * factor;
            if c == 0.0 {
                continue;
            }
            let target = (a + da + t.p1 as i64, b + db + t.p2 as i64);
            *image.entry(target).or_insert(0.0) += c;
        }
        for ((ta, tb), c) in image {
            if c == 0.0 {
                continue;
            }
            let inside = ta >= 0 && tb >= 0 && ta + tb <= j1 as i64;
            assert!(inside, "{id}: monomial ({a},{b}) maps outside the simplex to ({ta},{tb}) with weight {c}");
            let row = rep.index_of_labels((ta + tb) as u32, tb as u32).expect("inside the triangle");
            matrix[(row, col)] += C64::new(c, 0.0);
        }
    }
    DiffOperator { j1, matrix, tag: id }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntertwineReport {
    pub j1: u32,
    /// `max |diff_op(G) T - T generator(G)|` with `T` the Bargmann map.
    pub intertwining: Vec<Residual>,
    /// Structure relations evaluated on the differential operators.
    pub algebra: Vec<Residual>,
}

impl IntertwineReport {
    pub fn max_intertwining(&self) -> f64 {
        self.intertwining.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn max_algebra(&self) -> f64 {
        self.algebra.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

pub fn verify_intertwine(rep: &RepSpace) -> IntertwineReport {
    let w = weights(rep);
    let t = DMatrix::<C64>::from_diagonal(&DVector::from_iterator(rep.dim(), w.iter().map(|&x| C64::new(x, 0.0))));
    let mut intertwining = Vec::new();
    let mut ops = HashMap::new();
    for id in GeneratorId::ALL {
        let d = diff_op(rep, id);
        let g = generator(rep, id);
        let residual = max_abs(&(d.matrix() * &t - &t * g.matrix()));
        intertwining.push(Residual { relation: format!("{id}: D T = T G"), residual });
        ops.insert(id, d.matrix);
    }
    IntertwineReport { j1: rep.j1(), intertwining, algebra: structure_residuals(&ops) }
}

/// `<p|q> = int conj(p) q dmu` with the coherent-state measure (including
/// the `N^-j1` factor that turns the resolution of identity into an
/// inner product on polynomials).
pub fn bargmann_inner(p: &AnalyticPolynomial, q: &AnalyticPolynomial, quad: QuadratureSpec) -> Result<C64> {
    if p.j1 != q.j1 {
        return Err(Error::RepMismatch { left: p.j1, right: q.j1 });
    }
    let rep = RepSpace::new(p.j1);
    let gram = MeasureQuadrature::new(&rep, quad)?.monomial_gram();
    Ok(p.coeffs.dotc(&(gram * &q.coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn images_of_basis_states() {
        let rep = RepSpace::new(4);
        let p = to_bargmann(&rep.highest_weight());
        assert_eq!(p, AnalyticPolynomial::monomial(&rep, 0, 0).unwrap());
        let s = StateVector::basis(&rep, rep.index_of_labels(1, 0).unwrap());
        let p = to_bargmann(&s);
        assert!((p.coeff(&rep, 1, 0).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        let corner = AnalyticPolynomial::monomial(&rep, 4, 4).unwrap();
        let s = from_bargmann(&corner);
        let idx = rep.index_of_labels(4, 4).unwrap();
        assert_eq!(s.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert!(s.amplitudes()[idx].re > 0.0);
    }

    #[test]
    fn round_trip_and_linearity() {
        let rep = RepSpace::new(5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let psi = StateVector::random(&rep, &mut rng);
        let back = from_bargmann(&to_bargmann(&psi));
        assert!(max_abs(&(back.amplitudes() - psi.amplitudes())) < 1e-14);
        let p = to_bargmann(&StateVector::random(&rep, &mut rng));
        let q = to_bargmann(&StateVector::random(&rep, &mut rng));
        let (a, b) = (c(0.3, -1.0), c(2.0, 0.5));
        let lhs = from_bargmann(&p.scale(a).add(&q.scale(b)).unwrap());
        let rhs = from_bargmann(&p).scale(a).add(&from_bargmann(&q).scale(b)).unwrap();
        assert!(max_abs(&(lhs.amplitudes() - rhs.amplitudes())) < 1e-13);
    }

    #[test]
    fn literal_differential_actions() {
        let rep = RepSpace::new(4);
        // e1 on u1^2 u2 -> 2 u1 u2; (a, b) = (2, 1) is (j2, j3) = (3, 1).
        let p = AnalyticPolynomial::monomial(&rep, 3, 1).unwrap();
        let out = diff_op(&rep, GeneratorId::E1).apply(&p).unwrap();
        assert_eq!(out.coeff(&rep, 2, 1).unwrap(), c(2.0, 0.0));
        // f1 on 1 -> j1 u1
        let one = AnalyticPolynomial::monomial(&rep, 0, 0).unwrap();
        let out = diff_op(&rep, GeneratorId::F1).apply(&one).unwrap();
        assert_eq!(out.coeff(&rep, 1, 0).unwrap(), c(4.0, 0.0));
        // h1 on u1^a u2^b -> (j1 - 2a - b)
        for i in 0..rep.dim() {
            let (j2, j3) = rep.labels(i);
            let (a, b) = ((j2 - j3) as f64, j3 as f64);
            let p = AnalyticPolynomial::monomial(&rep, j2, j3).unwrap();
            let out = diff_op(&rep, GeneratorId::H1).apply(&p).unwrap();
            assert_eq!(out.coeffs()[i], c(4.0 - 2.0 * a - b, 0.0));
        }
    }

    #[test]
    fn intertwining_small() {
        for j1 in 0..=6 {
            let r = verify_intertwine(&RepSpace::new(j1));
            assert!(r.max_intertwining() <= 1e-10, "j1={j1}: {:?}", r.intertwining);
            assert!(r.max_algebra() <= 1e-10, "j1={j1}: {:?}", r.algebra);
        }
        let r = verify_intertwine(&RepSpace::new(0));
        assert_eq!(r.max_intertwining(), 0.0);
        assert_eq!(r.max_algebra(), 0.0);
    }

    #[test]
    fn inner_product_matches_fock() {
        let quad = QuadratureSpec::default();
        let rep = RepSpace::new(3);
        let one = AnalyticPolynomial::monomial(&rep, 0, 0).unwrap();
        assert!((bargmann_inner(&one, &one, quad).unwrap() - 1.0).norm() < 1e-6);
        let m = AnalyticPolynomial::monomial(&rep, 2, 1).unwrap();
        assert!(bargmann_inner(&one, &m, quad).unwrap().norm() < 1e-12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let a = StateVector::random(&rep, &mut rng);
        let b = StateVector::random(&rep, &mut rng);
        let got = bargmann_inner(&to_bargmann(&a), &to_bargmann(&b), quad).unwrap();
        assert!((got - a.inner(&b).unwrap()).norm() < 1e-6);
        let back = bargmann_inner(&to_bargmann(&b), &to_bargmann(&a), quad).unwrap();
        assert!((back - got.conj()).norm() < 1e-12);
    }
}
