//! Moments of the pair quadratures, the Schrodinger-Robertson bound and the
//! squeezing classification.
//!
//! `c = {p - <p>, q - <q>}` is the full anticommutator, so the bound reads
//! `var_p var_q >= (<h>^2 + <c>^2) / 4` and `Delta = sqrt(<h>^2 + <c>^2) / 2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intelligent::{
    quadratures, solve_intelligent, AlphaParam, IntelligentState, PairIndex, Regime, UNIT_MODULUS_TOLERANCE,
};
use crate::rep::Operator;
use crate::state::StateVector;
use crate::C64;

/// `Delta` at or below this leaves the variance ordering undefined.
pub const DEGENERATE_DELTA: f64 = 1e-12;
/// Largest imaginary part tolerated in a Hermitian expectation value.
pub const HERMITIAN_IMAG_TOLERANCE: f64 = 1e-12;

pub fn expectation(state: &StateVector, op: &Operator) -> Result<C64> {
    if state.dim() != op.dim() {
        return Err(Error::DimensionMismatch { left: op.dim(), right: state.dim() });
    }
    let image = op.apply(state)?;
    state.inner(&image)
}

fn hermitian_expectation(state: &StateVector, op: &Operator) -> f64 {
    let z = expectation(state, op).expect("same representation");
    debug_assert!(
        z.im.abs() <= HERMITIAN_IMAG_TOLERANCE * z.norm().max(1.0),
        "<{}> has imaginary part {:e}",
        op.label(),
        z.im
    );
    z.re
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean_p: f64,
    pub mean_q: f64,
    pub var_p: f64,
    pub var_q: f64,
    /// Symmetrized covariance, `<c> / 2`.
    pub cov: f64,
    /// `<c>`, the expectation of the full anticommutator.
    pub cov_total: f64,
    pub mean_h: f64,
    pub delta: f64,
    pub sr_lhs: f64,
    pub sr_rhs: f64,
}

impl MomentReport {
    /// `sr_lhs - sr_rhs`; non-negative up to roundoff.
    pub fn sr_gap(&self) -> f64 {
        self.sr_lhs - self.sr_rhs
    }
}

/// Moments of `(p_i, q_i)` in a normalized state. Variances are computed as
/// `||(p - <p>) psi||^2`, which is non-negative by construction.
pub fn uncertainty_report(state: &StateVector, pair: PairIndex) -> MomentReport {
    let rep = crate::RepSpace::new(state.j1());
    let (p, q) = quadratures(&rep, pair);
    let h = pair.h(&rep);
    let psi = state.amplitudes();
    let mean_p = hermitian_expectation(state, &p);
    let mean_q = hermitian_expectation(state, &q);
    let dp = p.matrix() * psi - psi * C64::new(mean_p, 0.0);
    let dq = q.matrix() * psi - psi * C64::new(mean_q, 0.0);
    let var_p = dp.norm_squared();
    let var_q = dq.norm_squared();
    // <{P, Q}> = 2 Re <P psi | Q psi> for Hermitian centred P, Q.
    let cov_total = 2.0 * dp.dotc(&dq).re;
    let mean_h = hermitian_expectation(state, &h);
    let sr_rhs = 0.25 * (mean_h * mean_h + cov_total * cov_total);
    MomentReport {
        mean_p,
        mean_q,
        var_p,
        var_q,
        cov: 0.5 * cov_total,
        cov_total,
        mean_h,
        delta: 0.5 * (mean_h * mean_h + cov_total * cov_total).sqrt(),
        sr_lhs: var_p * var_q,
        sr_rhs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRelations {
    pub moments: MomentReport,
    /// `|sr_lhs - sr_rhs|`.
    pub sr_equality: f64,
    /// `|var_p - |alpha| Delta|`.
    pub var_p_relation: f64,
    /// `|var_q - Delta / |alpha||`; absent for `alpha = 0`.
    pub var_q_relation: Option<f64>,
    /// `|var_p var_q - Delta^2|`.
    pub product_relation: f64,
    /// Largest residual of `var_p = |alpha|^2 <h> / u`, `var_q = <h> / u`,
    /// `<c> = (v / u) <h>`; absent when `u = 0`.
    pub uv_form: Option<f64>,
    /// `Delta <= 1e-12`: every relation reduces to `0 = 0`.
    pub degenerate_delta: bool,
}

impl VarianceRelations {
    pub fn max_residual(&self) -> f64 {
        [
            Some(self.sr_equality),
            Some(self.var_p_relation),
            self.var_q_relation,
            Some(self.product_relation),
            self.uv_form,
        ]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
    }
}

pub fn verify_variance_relations(istate: &IntelligentState) -> VarianceRelations {
    let m = uncertainty_report(&istate.state, istate.pair);
    let a = istate.alpha.modulus();
    let (u, v) = (istate.alpha.u(), istate.alpha.v());
    let uv_form = (u != 0.0).then(|| {
        [(m.var_p - a * a * m.mean_h / u).abs(), (m.var_q - m.mean_h / u).abs(), (m.cov_total - v / u * m.mean_h).abs()]
            .into_iter()
            .fold(0.0, f64::max)
    });
    VarianceRelations {
        sr_equality: (m.sr_lhs - m.sr_rhs).abs(),
        var_p_relation: (m.var_p - a * m.delta).abs(),
        var_q_relation: (a != 0.0).then(|| (m.var_q - m.delta / a).abs()),
        product_relation: (m.var_p * m.var_q - m.delta * m.delta).abs(),
        uv_form,
        degenerate_delta: m.delta <= DEGENERATE_DELTA,
        moments: m,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub regime: Regime,
    /// Whether the variances are ordered as the regime requires.
    pub ordering_holds: bool,
}

/// Regime from `|alpha|`, cross-checked against the computed variances.
pub fn classify(istate: &IntelligentState) -> Result<Classification> {
    classify_moments(istate.alpha.modulus(), &uncertainty_report(&istate.state, istate.pair))
}

pub fn classify_moments(modulus: f64, m: &MomentReport) -> Result<Classification> {
    if m.delta <= DEGENERATE_DELTA {
        return Err(Error::DegenerateDelta(m.delta));
    }
    let tol = 1e-9 * m.delta.max(1.0);
    let (regime, ordering_holds) = if (modulus - 1.0).abs() <= UNIT_MODULUS_TOLERANCE {
        (Regime::Coherent, (m.var_p - m.delta).abs() <= tol && (m.var_q - m.delta).abs() <= tol)
    } else if modulus < 1.0 {
        (Regime::SqueezedP, m.var_p < m.delta && m.delta < m.var_q)
    } else {
        (Regime::SqueezedQ, m.var_q < m.delta && m.delta < m.var_p)
    };
    Ok(Classification { regime, ordering_holds })
}

/// Selects one eigenstate per `alpha`: a block and a `lambda'` on its ladder.
/// Defaults are the longest chain and the top of its ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Branch {
    pub block: Option<u32>,
    pub lambda_prime: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub modulus: f64,
    pub phase: f64,
    #[serde(serialize_with = "crate::serial::complex")]
    pub alpha: C64,
    pub block: u32,
    pub lambda_prime: i64,
    pub var_p: f64,
    pub var_q: f64,
    pub delta: f64,
    pub regime: Regime,
    pub ordering_holds: bool,
    /// `|var_p - |alpha| Delta|`.
    pub relation_residual: f64,
}

/// `steps` evenly spaced moduli from `from` to `to` inclusive.
pub fn modulus_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || from.is_nan() || to.is_nan() || from > to || from < 0.0 || (steps == 1 && from != to) {
        return Err(Error::InvalidArgument(format!(
            "empty or invalid modulus range {from}..{to} with {steps} step(s)"
        )));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps)
        .map(|k| {
            let t = k as f64 / (steps - 1) as f64;
            from * (1.0 - t) + to * t
        })
        .collect())
}

/// Follows one eigenstate branch across `alpha = modulus e^{i phase}`.
///
/// At `alpha = +-1` the branch is continued by the kernel vector of the
/// block, which is the limit of every eigenvector of the chain there.
pub fn sweep_alpha(
    rep: &crate::RepSpace,
    pair: PairIndex,
    moduli: &[f64],
    phase: f64,
    branch: Branch,
) -> Result<Vec<SweepRow>> {
    let blocks = crate::intelligent::blocks(rep, pair);
    let block = match branch.block {
        Some(b) => blocks
            .iter()
            .find(|x| x.label == b)
            .ok_or_else(|| Error::InvalidArgument(format!("block {b} does not exist for j1 = {}", rep.j1())))?,
        None => {
            blocks.iter().max_by_key(|b| (b.ladder_length(), std::cmp::Reverse(b.label))).expect("at least one block")
        }
    };
    let l = block.ladder_length() as i64;
    let lp = branch.lambda_prime.unwrap_or(l);
    if lp.abs() > l || (l - lp) % 2 != 0 {
        return Err(Error::InvalidArgument(format!("lambda' = {lp} is not on the ladder of block {}", block.label)));
    }
    moduli
        .iter()
        .map(|&modulus| {
            let alpha = AlphaParam::from_polar(modulus, phase)?;
            let sp = solve_intelligent(rep, pair, alpha)?;
            let st = sp
                .states
                .iter()
                .find(|s| s.block == block.label && s.lambda_prime.is_none_or(|z| (z.re - lp as f64).abs() < 1e-6))
                .ok_or_else(|| Error::Eigensolver(format!("no state with lambda' = {lp} in block {}", block.label)))?;
            let m = uncertainty_report(&st.state, pair);
            let cl = classify_moments(modulus, &m)?;
            Ok(SweepRow {
                modulus,
                phase,
                alpha: alpha.value(),
                block: block.label,
                lambda_prime: lp,
                var_p: m.var_p,
                var_q: m.var_q,
                delta: m.delta,
                regime: cl.regime,
                ordering_holds: cl.ordering_holds,
                relation_residual: (m.var_p - modulus * m.delta).abs(),
            })
        })
        .collect()
}
