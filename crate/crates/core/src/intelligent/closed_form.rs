//! Closed-form intelligent-state coefficients in the Fock-Bargmann picture.
//!
//! With `w1 = zeta1`, `w2 = zeta1 zeta2` and exponents `(p, q)` of `w1^p w2^q`,
//! the eigenvalue equation becomes a three-term recursion along one chain
//! after rescaling the ladder variable by `r = sqrt(1 - alpha) / sqrt(1 + alpha)`
//! (pairs 1 and 3) or `1 / r` (pair 2). With `M` the chain length,
//! `k+- = (M +- lambda') / 2`, the solutions are the Krawtchouk polynomials
//!
//! ```text
//! pair 1:  a[p, q] = [eta^p] (1 - eta)^k- (1 + eta)^k+  = C(M, p) 2F1(-p, -k-; -M; 2),  M = j1 - q
//! pair 2:  b[p, q] = [x1^p x2^q] (x1 + x2)^k+ (x1 - x2)^k- = (-1)^k- C(K, p) 2F1(-p, -k-; -K; 2),  K = p + q
//! pair 3:  c[p, q] = C(M, q) 2F1(-q, -k-; -M; 2),  M = j1 - p
//! ```
//!
//! optionally times the block constant `Gamma(k+ + 1) Gamma(k- + 1) / Gamma(M + 2)`
//! that an Euler-integral normalization carries.

use nalgebra::DVector;

use super::{AlphaParam, PairIndex};
use crate::bargmann::AnalyticPolynomial;
use crate::coherent::basis_weight;
use crate::error::{Error, Result};
use crate::rep::RepSpace;
use crate::special::{binomial, gamma_ratio, hyp2f1_terminating, nearest_integer};
use crate::state::StateVector;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientFamily {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormSpec {
    pub pair: PairIndex,
    pub j1: u32,
    pub lambda_prime: f64,
    pub alpha: AlphaParam,
    /// Multiply each block by `Gamma(k+ + 1) Gamma(k- + 1) / Gamma(M + 2)`.
    pub gamma_prefactor: bool,
}

impl ClosedFormSpec {
    pub fn new(pair: PairIndex, j1: u32, lambda_prime: f64, alpha: AlphaParam) -> Self {
        Self { pair, j1, lambda_prime, alpha, gamma_prefactor: true }
    }

    pub fn family(&self) -> CoefficientFamily {
        match self.pair {
            PairIndex::One => CoefficientFamily::A,
            PairIndex::Two => CoefficientFamily::B,
            PairIndex::Three => CoefficientFamily::C,
        }
    }

    /// The factor whose powers turn rescaled coefficients into Bargmann ones.
    pub fn rescaling(&self) -> Result<C64> {
        self.alpha.require_nondegenerate()?;
        let r = self.alpha.ratio().expect("non-degenerate");
        Ok(match self.pair {
            PairIndex::Two => C64::new(1.0, 0.0) / r,
            _ => r,
        })
    }

    /// `(chain length, ladder position)` for exponents `(p, q)`.
    fn chain(&self, p: u32, q: u32) -> (u32, u32) {
        match self.pair {
            PairIndex::One => (self.j1 - q, p),
            PairIndex::Two => (p + q, p),
            PairIndex::Three => (self.j1 - p, q),
        }
    }

    /// Identifies the chain through `(p, q)`.
    fn chain_key(&self, p: u32, q: u32) -> u32 {
        match self.pair {
            PairIndex::One => q,
            PairIndex::Two => p + q,
            PairIndex::Three => p,
        }
    }

    /// `k-` when `lambda'` lies on the ladder of a chain of length `m`.
    pub fn k_minus(&self, m: u32) -> Option<u32> {
        let twice = nearest_integer(m as f64 - self.lambda_prime)?;
        (twice >= 0 && twice % 2 == 0 && twice <= 2 * m as i64).then_some((twice / 2) as u32)
    }

    /// Block labels (as in `solve_intelligent`) on which `lambda'` is admissible.
    pub fn admissible_blocks(&self) -> Vec<u32> {
        (0..=self.j1)
            .filter(|&label| {
                let m = match self.pair {
                    PairIndex::Two => label,
                    _ => self.j1 - label,
                };
                self.k_minus(m).is_some()
            })
            .collect()
    }
}

fn exponents(rep: &RepSpace, idx: usize) -> (u32, u32) {
    let (j2, j3) = rep.labels(idx);
    (j2 - j3, j3)
}

/// Rescaled coefficients over the triangle; zero on chains where `lambda'`
/// is not on the ladder.
pub fn closed_form_coeffs(spec: &ClosedFormSpec) -> Result<AnalyticPolynomial> {
    let rep = RepSpace::new(spec.j1);
    let mut coeffs = DVector::<C64>::zeros(rep.dim());
    for idx in 0..rep.dim() {
        let (p, q) = exponents(&rep, idx);
        let (m, pos) = spec.chain(p, q);
        let Some(km) = spec.k_minus(m) else { continue };
        let kp = m - km;
        let f = hyp2f1_terminating(-(pos as f64), -(km as f64), -(m as f64), 2.0)
            .map_err(|e| Error::NonTerminating(format!("coefficient at (p, q) = ({p}, {q}): {e}")))?;
        let mut value = binomial(m, pos) * f;
        if spec.pair == PairIndex::Two && km % 2 == 1 {
            value = -value;
        }
        if spec.gamma_prefactor {
            value *= gamma_ratio(&[kp as f64 + 1.0, km as f64 + 1.0], &[m as f64 + 2.0])?;
        }
        coeffs[idx] = C64::new(value, 0.0);
    }
    AnalyticPolynomial::new(&rep, coeffs)
}

/// Largest relative residual of the pair's three-term recursion over every
/// exponent pair; each equation is scaled by its largest term or the largest
/// coefficient on its chain, whichever is bigger.
pub fn recursion_residual(spec: &ClosedFormSpec, poly: &AnalyticPolynomial) -> Result<f64> {
    if poly.j1() != spec.j1 {
        return Err(Error::RepMismatch { left: spec.j1, right: poly.j1() });
    }
    let rep = RepSpace::new(spec.j1);
    let j1 = spec.j1 as i64;
    let get = |p: i64, q: i64| -> C64 {
        if p < 0 || q < 0 || p + q > j1 {
            return C64::new(0.0, 0.0);
        }
        poly.coeff(&rep, (p + q) as u32, q as u32).expect("inside the triangle")
    };
    let lp = spec.lambda_prime;
    let mut chain_max = std::collections::HashMap::<u32, f64>::new();
    for idx in 0..rep.dim() {
        let (p, q) = exponents(&rep, idx);
        let key = spec.chain_key(p, q);
        let e = chain_max.entry(key).or_insert(0.0);
        *e = e.max(poly.coeffs()[idx].norm());
    }
    let mut worst = 0.0f64;
    for idx in 0..rep.dim() {
        let (p, q) = exponents(&rep, idx);
        let (p, q) = (p as i64, q as i64);
        let terms = match spec.pair {
            PairIndex::One => {
                [get(p - 1, q) * (j1 - p - q + 1) as f64, -get(p, q) * lp, get(p + 1, q) * (p + 1) as f64]
            }
            PairIndex::Two => [get(p - 1, q + 1) * (q + 1) as f64, -get(p, q) * lp, get(p + 1, q - 1) * (p + 1) as f64],
            PairIndex::Three => {
                [get(p, q - 1) * (j1 - p - q + 1) as f64, -get(p, q) * lp, get(p, q + 1) * (q + 1) as f64]
            }
        };
        let scale = terms.iter().map(|t| t.norm()).fold(chain_max[&spec.chain_key(p as u32, q as u32)], f64::max);
        if scale > 0.0 {
            worst = worst.max(terms.iter().sum::<C64>().norm() / scale);
        }
    }
    Ok(worst)
}

/// Fock-basis state from rescaled coefficients: undo the rescaling, divide
/// by the Bargmann weights `sqrt(C(j1, j2) C(j2, j3))`, normalize and fix
/// the phase.
pub fn assemble_fock_expansion(spec: &ClosedFormSpec, poly: &AnalyticPolynomial) -> Result<StateVector> {
    if poly.j1() != spec.j1 {
        return Err(Error::RepMismatch { left: spec.j1, right: poly.j1() });
    }
    let rho = spec.rescaling()?;
    let rep = RepSpace::new(spec.j1);
    let amps = DVector::from_fn(rep.dim(), |idx, _| {
        let (j2, j3) = rep.labels(idx);
        let (p, q) = exponents(&rep, idx);
        let power = match spec.pair {
            PairIndex::One | PairIndex::Two => p,
            PairIndex::Three => q,
        };
        poly.coeffs()[idx] * rho.powu(power) / basis_weight(spec.j1, j2, j3)
    });
    Ok(StateVector::new(&rep, amps)?.normalized()?.canonicalize_phase())
}
