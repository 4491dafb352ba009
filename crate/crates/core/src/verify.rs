//! Verification suites run by `su3cs verify`. Each check reports a measured
//! value against a tolerance; a suite passes when every row does.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytics::{modulus_grid, sweep_alpha, uncertainty_report, verify_variance_relations, Branch};
use crate::bargmann::{bargmann_inner, to_bargmann, verify_intertwine};
use crate::coherent::{
    displaced_state, extract_zeta_with_distance, moment_check, resolution_check, DisplacementParams,
};
use crate::error::{Error, Result};
use crate::intelligent::{
    assemble_fock_expansion, block_leakage, closed_form_coeffs, intelligent_operator, recursion_residual,
    solve_intelligent, spectrum_deviation, AlphaParam, ClosedFormSpec, PairIndex,
};
use crate::quadrature::QuadratureSpec;
use crate::rep::{check_structure, RepSpace};
use crate::state::StateVector;
use crate::C64;

/// Deviations at or below this count as converged when checking that the
/// resolution deviation shrinks under node doubling.
pub const RESOLUTION_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Structure,
    Coherent,
    Moments,
    Resolution,
    Bargmann,
    Intelligent,
    ClosedForm,
    Sr,
    Squeezing,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Structure,
        Suite::Coherent,
        Suite::Moments,
        Suite::Resolution,
        Suite::Bargmann,
        Suite::Intelligent,
        Suite::ClosedForm,
        Suite::Sr,
        Suite::Squeezing,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Coherent => "coherent",
            Suite::Moments => "moments",
            Suite::Resolution => "resolution",
            Suite::Bargmann => "bargmann",
            Suite::Intelligent => "intelligent",
            Suite::ClosedForm => "closed-form",
            Suite::Sr => "sr",
            Suite::Squeezing => "squeezing",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.as_str() == s.trim()).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(Suite::as_str).collect();
            Error::InvalidArgument(format!("unknown suite '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub structure: f64,
    pub extract: f64,
    pub moments: f64,
    pub resolution: f64,
    pub intertwine: f64,
    pub inner: f64,
    /// Relative to the spectral norm of the operator.
    pub eigen: f64,
    pub spectrum: f64,
    pub sr: f64,
    pub variance: f64,
    pub recursion: f64,
    pub projection: f64,
    pub squeezing: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structure: 1e-12,
            extract: 1e-8,
            moments: 1e-8,
            resolution: 1e-6,
            intertwine: 1e-10,
            inner: 1e-6,
            eigen: 1e-10,
            spectrum: 1e-9,
            sr: 1e-9,
            variance: 1e-9,
            recursion: 1e-9,
            projection: 1e-8,
            squeezing: 1e-9,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 13] = [
        "structure",
        "extract",
        "moments",
        "resolution",
        "intertwine",
        "inner",
        "eigen",
        "spectrum",
        "sr",
        "variance",
        "recursion",
        "projection",
        "squeezing",
    ];

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "structure" => &mut self.structure,
            "extract" => &mut self.extract,
            "moments" => &mut self.moments,
            "resolution" => &mut self.resolution,
            "intertwine" => &mut self.intertwine,
            "inner" => &mut self.inner,
            "eigen" => &mut self.eigen,
            "spectrum" => &mut self.spectrum,
            "sr" => &mut self.sr,
            "variance" => &mut self.variance,
            "recursion" => &mut self.recursion,
            "projection" => &mut self.projection,
            "squeezing" => &mut self.squeezing,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown tolerance '{other}' (expected one of {})",
                    Self::KEYS.join(", ")
                )))
            }
        };
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance {key} must be non-negative, got {value}")));
        }
        *slot = value;
        Ok(())
    }

    /// Sets every tolerance to `value`.
    pub fn all(value: f64) -> Self {
        let mut t = Self::default();
        for k in Self::KEYS {
            t.set(k, value).expect("known key");
        }
        t
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Largest `j1` exercised (suites cap it at their own ranges).
    pub j1_max: u32,
    /// Largest `j` for the moment grid.
    pub moment_j: u32,
    pub quad: QuadratureSpec,
    pub seed: u64,
    pub tol: Tolerances,
    /// Random displacement draws per `j1`.
    pub coherent_samples: usize,
    /// Random states per `(j1, pair)` for the SR inequality.
    pub sr_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            j1_max: 6,
            moment_j: 10,
            quad: QuadratureSpec::default(),
            seed: 0,
            tol: Tolerances::default(),
            coherent_samples: 25,
            sr_samples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRow {
    fn at_most(suite: Suite, name: String, value: f64, tolerance: f64) -> Self {
        Self { suite, name, value, tolerance, passed: value <= tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckRow>,
}

impl VerifyReport {
    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let mut out = format!("{:<12} {:<44} {:>12} {:>12}  result\n", "suite", "check", "value", "tolerance");
        for r in &self.checks {
            out.push_str(&format!(
                "{:<12} {:<44} {:>12.3e} {:>12.3e}  {}\n",
                r.suite.as_str(),
                r.name,
                r.value,
                r.tolerance,
                if r.passed { "PASS" } else { "FAIL" }
            ));
        }
        out
    }
}

/// The alpha grid `{0.3, 0.5, 1, 2.5} x {1, i, e^{i pi/4}}`.
pub fn alpha_grid() -> Vec<AlphaParam> {
    let mut out = Vec::new();
    for m in [0.3, 0.5, 1.0, 2.5] {
        for phase in [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)] {
            out.push(AlphaParam::new(phase * m).expect("finite"));
        }
    }
    out
}

pub fn run(suites: &[Suite], cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    for &s in suites {
        checks.extend(run_suite(s, cfg)?);
    }
    Ok(VerifyReport { passed: checks.iter().all(|c| c.passed), checks })
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    match suite {
        Suite::Structure => Ok(structure(cfg)),
        Suite::Coherent => coherent(cfg),
        Suite::Moments => moments(cfg),
        Suite::Resolution => resolution(cfg),
        Suite::Bargmann => bargmann(cfg),
        Suite::Intelligent => intelligent(cfg),
        Suite::ClosedForm => closed_form(cfg),
        Suite::Sr => sr(cfg),
        Suite::Squeezing => squeezing(cfg),
    }
}

fn structure(cfg: &VerifyConfig) -> Vec<CheckRow> {
    (0..=cfg.j1_max)
        .map(|j1| {
            let r = check_structure(&RepSpace::new(j1));
            CheckRow::at_most(
                Suite::Structure,
                format!("j1={j1} max relation residual"),
                r.max_residual(),
                cfg.tol.structure,
            )
        })
        .collect()
}

fn coherent(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for j1 in 1..=cfg.j1_max {
        let rep = RepSpace::new(j1);
        let mut worst = 0.0f64;
        for _ in 0..cfg.coherent_samples {
            let z = random_displacement(&mut rng);
            worst = worst.max(extract_zeta_with_distance(&displaced_state(&rep, z))?.distance);
        }
        rows.push(CheckRow::at_most(
            Suite::Coherent,
            format!("j1={j1} displaced-state extraction distance"),
            worst,
            cfg.tol.extract,
        ));
    }
    Ok(rows)
}

/// Largest displacement radius drawn; the chart `zeta = tan(rho) ...` needs
/// `rho < pi/2`, and this keeps `cos(rho)^j1` well above the basepoint threshold.
pub const MAX_DISPLACEMENT_RADIUS: f64 = 1.3;

/// Uniform draw from the ball `|z1|^2 + |z2|^2 <= MAX_DISPLACEMENT_RADIUS^2` by rejection.
pub fn random_displacement<R: Rng + ?Sized>(rng: &mut R) -> DisplacementParams {
    let r = MAX_DISPLACEMENT_RADIUS;
    loop {
        let z1 = C64::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
        let z2 = C64::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if z1.norm_sqr() + z2.norm_sqr() <= r * r {
            return DisplacementParams::new(z1, z2);
        }
    }
}

fn moments(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    (0..=cfg.moment_j)
        .map(|j| {
            let worst =
                (0..=j).map(|n| moment_check(j, n)).collect::<Result<Vec<f64>>>()?.into_iter().fold(0.0, f64::max);
            Ok(CheckRow::at_most(Suite::Moments, format!("j={j} max moment residual"), worst, cfg.tol.moments))
        })
        .collect()
}

/// Deviations on the node ladder `1, 2, 4, ..` up to `radial` nodes.
pub fn resolution_convergence(rep: &RepSpace, quad: QuadratureSpec) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    let mut n = 1;
    while n <= quad.radial1.max(quad.radial2) {
        let q = QuadratureSpec::new(n.min(quad.radial1), n.min(quad.radial2), quad.angular1, quad.angular2);
        out.push((n, resolution_check(rep, q)?));
        n *= 2;
    }
    Ok(out)
}

/// Largest ratio `d(2n) / d(n)` over doublings that start above the floor;
/// zero when every step starts converged.
pub fn worst_doubling_ratio(ladder: &[(usize, f64)]) -> f64 {
    ladder.windows(2).filter(|w| w[0].1 > RESOLUTION_FLOOR).map(|w| w[1].1 / w[0].1).fold(0.0, f64::max)
}

fn resolution(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for j1 in 0..=cfg.j1_max.min(3) {
        let rep = RepSpace::new(j1);
        rows.push(CheckRow::at_most(
            Suite::Resolution,
            format!("j1={j1} deviation at {}", cfg.quad),
            resolution_check(&rep, cfg.quad)?,
            cfg.tol.resolution,
        ));
        let ratio = worst_doubling_ratio(&resolution_convergence(&rep, cfg.quad)?);
        rows.push(CheckRow {
            suite: Suite::Resolution,
            name: format!("j1={j1} worst doubling ratio"),
            value: ratio,
            tolerance: 1.0,
            passed: ratio < 1.0,
        });
    }
    Ok(rows)
}

fn bargmann(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for j1 in 0..=cfg.j1_max {
        let rep = RepSpace::new(j1);
        let r = verify_intertwine(&rep);
        rows.push(CheckRow::at_most(
            Suite::Bargmann,
            format!("j1={j1} intertwining"),
            r.max_intertwining(),
            cfg.tol.intertwine,
        ));
        rows.push(CheckRow::at_most(
            Suite::Bargmann,
            format!("j1={j1} differential algebra"),
            r.max_algebra(),
            cfg.tol.intertwine,
        ));
        if j1 <= 4 {
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let a = StateVector::random(&rep, &mut rng);
                let b = StateVector::random(&rep, &mut rng);
                let got = bargmann_inner(&to_bargmann(&a), &to_bargmann(&b), cfg.quad)?;
                worst = worst.max((got - a.inner(&b)?).norm());
            }
            rows.push(CheckRow::at_most(
                Suite::Bargmann,
                format!("j1={j1} inner product vs Fock"),
                worst,
                cfg.tol.inner,
            ));
        }
    }
    Ok(rows)
}

fn intelligent(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for j1 in 0..=cfg.j1_max {
        let rep = RepSpace::new(j1);
        for pair in PairIndex::ALL {
            let (mut residual, mut spectrum, mut leakage) = (0.0f64, 0.0f64, 0.0f64);
            for alpha in alpha_grid() {
                let sp = solve_intelligent(&rep, pair, alpha)?;
                let scale = sp.operator_norm.max(f64::MIN_POSITIVE);
                for st in &sp.states {
                    residual = residual.max(st.residual(&rep) / scale);
                }
                spectrum = spectrum.max(spectrum_deviation(&rep, pair, alpha)? / sp.operator_norm.max(1.0));
                leakage = leakage.max(block_leakage(&rep, pair, &intelligent_operator(&rep, pair, alpha)));
            }
            let tag = format!("j1={j1} pair={pair}");
            rows.push(CheckRow::at_most(
                Suite::Intelligent,
                format!("{tag} eigen residual / |A|"),
                residual,
                cfg.tol.eigen,
            ));
            rows.push(CheckRow::at_most(
                Suite::Intelligent,
                format!("{tag} spectrum vs ladders"),
                spectrum,
                cfg.tol.spectrum,
            ));
            rows.push(CheckRow::at_most(Suite::Intelligent, format!("{tag} block leakage"), leakage, 0.0));
        }
    }
    Ok(rows)
}

fn closed_form(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for j1 in 0..=cfg.j1_max {
        let rep = RepSpace::new(j1);
        for pair in PairIndex::ALL {
            let (mut recursion, mut projection) = (0.0f64, 0.0f64);
            for alpha in alpha_grid().into_iter().filter(|a| !a.is_degenerate()) {
                let sp = solve_intelligent(&rep, pair, alpha)?;
                for lp in -(j1 as i64)..=j1 as i64 {
                    let spec = ClosedFormSpec::new(pair, j1, lp as f64, alpha);
                    let poly = closed_form_coeffs(&spec)?;
                    recursion = recursion.max(recursion_residual(&spec, &poly)?);
                    let v = assemble_fock_expansion(&spec, &poly)?;
                    let lambda = alpha.sqrt_one_minus_sq() * lp as f64;
                    let k = sp
                        .eigenspace_of(lambda)
                        .ok_or_else(|| Error::Eigensolver(format!("no numeric eigenspace for lambda' = {lp}")))?;
                    projection = projection.max(projection_residual(&v, &sp.eigenspace(k)));
                }
            }
            let tag = format!("j1={j1} pair={pair}");
            rows.push(CheckRow::at_most(
                Suite::ClosedForm,
                format!("{tag} recursion (relative)"),
                recursion,
                cfg.tol.recursion,
            ));
            rows.push(CheckRow::at_most(
                Suite::ClosedForm,
                format!("{tag} eigenspace projection"),
                projection,
                cfg.tol.projection,
            ));
        }
    }
    Ok(rows)
}

/// `||v - Q Q^+ v||` for an orthonormal basis `Q`.
pub fn projection_residual(v: &StateVector, basis: &[&StateVector]) -> f64 {
    let mut r = v.amplitudes().clone();
    for b in basis {
        let c = b.amplitudes().dotc(v.amplitudes());
        r -= b.amplitudes() * c;
    }
    r.norm()
}

fn sr(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for j1 in 0..=cfg.j1_max {
        let rep = RepSpace::new(j1);
        for pair in PairIndex::ALL {
            let (mut equality, mut variance) = (0.0f64, 0.0f64);
            for alpha in alpha_grid() {
                for st in solve_intelligent(&rep, pair, alpha)?.states {
                    let r = verify_variance_relations(&st);
                    equality = equality.max(r.sr_equality);
                    if !r.degenerate_delta {
                        variance = variance.max(r.max_residual());
                    }
                }
            }
            let tag = format!("j1={j1} pair={pair}");
            rows.push(CheckRow::at_most(
                Suite::Sr,
                format!("{tag} SR equality on intelligent states"),
                equality,
                cfg.tol.sr,
            ));
            rows.push(CheckRow::at_most(Suite::Sr, format!("{tag} variance relations"), variance, cfg.tol.variance));
            if j1 == 0 {
                continue;
            }
            let (mut lowest, mut widest) = (f64::INFINITY, 0.0f64);
            for _ in 0..cfg.sr_samples {
                let m = uncertainty_report(&StateVector::random(&rep, &mut rng), pair);
                lowest = lowest.min(m.sr_gap());
                widest = widest.max(m.sr_gap());
            }
            rows.push(CheckRow {
                suite: Suite::Sr,
                name: format!("{tag} min SR gap on random states"),
                value: lowest,
                tolerance: -cfg.tol.sr,
                passed: lowest >= -cfg.tol.sr,
            });
            rows.push(CheckRow {
                suite: Suite::Sr,
                name: format!("{tag} max SR gap on random states"),
                value: widest,
                tolerance: 1e-3,
                passed: widest > 1e-3,
            });
        }
    }
    Ok(rows)
}

fn squeezing(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let grid = modulus_grid(0.2, 2.0, 10)?;
    for j1 in 1..=cfg.j1_max {
        let rep = RepSpace::new(j1);
        for pair in PairIndex::ALL {
            for phase in [0.0, std::f64::consts::FRAC_PI_4] {
                let sweep = sweep_alpha(&rep, pair, &grid, phase, Branch::default())?;
                let unit = sweep
                    .iter()
                    .filter(|r| (r.modulus - 1.0).abs() <= 1e-12)
                    .map(|r| (r.var_p - r.var_q).abs().max((r.var_p - r.delta).abs()))
                    .fold(0.0, f64::max);
                let ordered = sweep.iter().filter(|r| r.ordering_holds).count();
                let tag = format!("j1={j1} pair={pair} phase={phase:.3}");
                rows.push(CheckRow {
                    suite: Suite::Squeezing,
                    name: format!("{tag} rows ordered"),
                    value: ordered as f64,
                    tolerance: sweep.len() as f64,
                    passed: ordered == sweep.len(),
                });
                rows.push(CheckRow::at_most(
                    Suite::Squeezing,
                    format!("{tag} |alpha|=1 balance"),
                    unit,
                    cfg.tol.squeezing,
                ));
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("structure", 1e-20).unwrap();
        assert_eq!(t.structure, 1e-20);
        assert!(t.set("nonsense", 1.0).is_err());
        assert!(t.set("sr", -1.0).is_err());
    }

    #[test]
    fn small_config_passes_and_faults_fail() {
        let cfg = VerifyConfig { j1_max: 2, moment_j: 3, sr_samples: 50, coherent_samples: 5, ..Default::default() };
        let report = run(&Suite::ALL, &cfg).unwrap();
        assert!(report.passed, "{}", report.table());
        let strict = VerifyConfig { tol: Tolerances::all(1e-20), ..cfg };
        let report = run(&[Suite::Bargmann, Suite::Sr], &strict).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn doubling_ratio_ignores_converged_steps() {
        assert_eq!(worst_doubling_ratio(&[(1, 0.5), (2, 0.1), (4, 1e-16), (8, 2e-16)]), 0.2);
        assert_eq!(worst_doubling_ratio(&[(1, 0.5), (2, 0.6)]), 1.2);
    }
}
