//! Acceptance run: eight criteria at their stated tolerances, one PASS/FAIL
//! line each. Runs without the libtest harness so the lines always print.

use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use su3cs::analytics::{modulus_grid, uncertainty_report, verify_variance_relations, Branch};
use su3cs::bargmann::{bargmann_inner, to_bargmann, verify_intertwine};
use su3cs::cli::sweep_report;
use su3cs::coherent::{displaced_state, extract_zeta_with_distance, moment_check, resolution_check};
use su3cs::intelligent::{
    assemble_fock_expansion, closed_form_coeffs, recursion_residual, solve_intelligent, spectrum_deviation,
    ClosedFormSpec, PairIndex,
};
use su3cs::quadrature::QuadratureSpec;
use su3cs::rep::check_structure;
use su3cs::verify::{
    alpha_grid, projection_residual, random_displacement, resolution_convergence, worst_doubling_ratio, Tolerances,
};
use su3cs::{RepSpace, Result, StateVector};

const SEED: u64 = 0;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn structure() -> Result<Outcome> {
    let r = worst((0..=10).map(|j1| check_structure(&RepSpace::new(j1)).max_residual()));
    Ok(Outcome { passed: r <= 1e-12, detail: format!("j1 0..=10, max residual {r:.2e} (tol 1e-12)") })
}

fn coherent_manifold() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut d = 0.0f64;
    for j1 in 1..=8 {
        let rep = RepSpace::new(j1);
        for _ in 0..25 {
            d = d.max(extract_zeta_with_distance(&displaced_state(&rep, random_displacement(&mut rng)))?.distance);
        }
    }
    Ok(Outcome { passed: d <= 1e-8, detail: format!("j1 1..=8 x 25 draws, max distance {d:.2e} (tol 1e-8)") })
}

fn measure() -> Result<Outcome> {
    let mut moment = 0.0f64;
    for j in 0..=10 {
        for n in 0..=j {
            moment = moment.max(moment_check(j, n)?);
        }
    }
    let quad = QuadratureSpec::default();
    let (mut deviation, mut ratio) = (0.0f64, 0.0f64);
    for j1 in 0..=3 {
        let rep = RepSpace::new(j1);
        deviation = deviation.max(resolution_check(&rep, quad)?);
        ratio = ratio.max(worst_doubling_ratio(&resolution_convergence(&rep, quad)?));
    }
    Ok(Outcome {
        passed: moment <= 1e-8 && deviation <= 1e-6 && ratio < 1.0,
        detail: format!(
            "moments {moment:.2e} (tol 1e-8); resolution at {quad} {deviation:.2e} (tol 1e-6); worst doubling ratio {ratio:.2e} (< 1)"
        ),
    })
}

fn bargmann() -> Result<Outcome> {
    let (mut inter, mut algebra) = (0.0f64, 0.0f64);
    for j1 in 0..=10 {
        let r = verify_intertwine(&RepSpace::new(j1));
        inter = inter.max(r.max_intertwining());
        algebra = algebra.max(r.max_algebra());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut inner = 0.0f64;
    for j1 in 0..=4 {
        let rep = RepSpace::new(j1);
        for _ in 0..10 {
            let a = StateVector::random(&rep, &mut rng);
            let b = StateVector::random(&rep, &mut rng);
            let got = bargmann_inner(&to_bargmann(&a), &to_bargmann(&b), QuadratureSpec::default())?;
            inner = inner.max((got - a.inner(&b)?).norm());
        }
    }
    Ok(Outcome {
        passed: inter <= 1e-10 && algebra <= 1e-10 && inner <= 1e-6,
        detail: format!(
            "intertwining {inter:.2e}, algebra {algebra:.2e} (tol 1e-10); inner product {inner:.2e} (tol 1e-6)"
        ),
    })
}

fn intelligent() -> Result<Outcome> {
    let (mut eigen, mut sr, mut variance, mut spectrum) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for j1 in 0..=6 {
        let rep = RepSpace::new(j1);
        for pair in PairIndex::ALL {
            for alpha in alpha_grid() {
                let sp = solve_intelligent(&rep, pair, alpha)?;
                let norm = sp.operator_norm;
                for st in &sp.states {
                    eigen = eigen.max(st.residual(&rep) / norm.max(f64::MIN_POSITIVE));
                    let rel = verify_variance_relations(st);
                    sr = sr.max(rel.sr_equality);
                    if !rel.degenerate_delta {
                        variance = variance.max(rel.max_residual());
                    }
                }
                spectrum = spectrum.max(spectrum_deviation(&rep, pair, alpha)? / norm.max(1.0));
            }
        }
    }
    Ok(Outcome {
        passed: eigen <= 1e-10 && sr <= 1e-9 && variance <= 1e-9 && spectrum <= 1e-9,
        detail: format!(
            "residual/|A| {eigen:.2e} (1e-10); SR equality {sr:.2e} (1e-9); variance relations {variance:.2e} (1e-9); spectrum vs dense {spectrum:.2e} (1e-9)"
        ),
    })
}

fn closed_form() -> Result<Outcome> {
    let (mut recursion, mut projection, mut count) = (0.0f64, 0.0f64, 0usize);
    for j1 in 0..=6u32 {
        let rep = RepSpace::new(j1);
        for pair in PairIndex::ALL {
            for alpha in alpha_grid().into_iter().filter(|a| !a.is_degenerate()) {
                let sp = solve_intelligent(&rep, pair, alpha)?;
                for lp in -(j1 as i64)..=j1 as i64 {
                    let spec = ClosedFormSpec::new(pair, j1, lp as f64, alpha);
                    if spec.admissible_blocks().is_empty() {
                        continue;
                    }
                    let poly = closed_form_coeffs(&spec)?;
                    recursion = recursion.max(recursion_residual(&spec, &poly)?);
                    let v = assemble_fock_expansion(&spec, &poly)?;
                    let k = sp.eigenspace_of(alpha.sqrt_one_minus_sq() * lp as f64).ok_or_else(|| {
                        su3cs::Error::Eigensolver(format!("j1={j1} pair={pair} lambda'={lp}: no numeric eigenspace"))
                    })?;
                    projection = projection.max(projection_residual(&v, &sp.eigenspace(k)));
                    count += 1;
                }
            }
        }
    }
    Ok(Outcome {
        passed: recursion <= 1e-9 && projection <= 1e-8,
        detail: format!("{count} cases; recursion {recursion:.2e} (1e-9 rel); projection {projection:.2e} (1e-8)"),
    })
}

fn sr_negative_control() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut lowest, mut weakest_margin) = (f64::INFINITY, f64::INFINITY);
    for j1 in 0..=6 {
        let rep = RepSpace::new(j1);
        for pair in PairIndex::ALL {
            let mut widest = 0.0f64;
            for _ in 0..1000 {
                let gap = uncertainty_report(&StateVector::random(&rep, &mut rng), pair).sr_gap();
                lowest = lowest.min(gap);
                widest = widest.max(gap);
            }
            // The one-dimensional j1 = 0 space has no state but the vacuum,
            // where both sides vanish; strictness is only meaningful above it.
            if j1 > 0 {
                weakest_margin = weakest_margin.min(widest);
            }
        }
    }
    Ok(Outcome {
        passed: lowest >= -1e-9 && weakest_margin > 1e-3,
        detail: format!(
            "1000 states per (j1 0..=6, pair): min gap {lowest:.2e} (>= -1e-9); weakest per-config max gap {weakest_margin:.2e} (> 1e-3, j1 >= 1)"
        ),
    })
}

fn squeezing() -> Result<Outcome> {
    let tol = Tolerances::default();
    let grid = modulus_grid(0.2, 2.0, 10)?;
    let (mut rows, mut misordered, mut balance) = (0usize, 0usize, 0.0f64);
    for j1 in 1..=6 {
        let rep = RepSpace::new(j1);
        for pair in PairIndex::ALL {
            for phase in [0.0, std::f64::consts::FRAC_PI_4] {
                for r in sweep_report(&rep, pair, &grid, phase, Branch::default(), &tol)?.rows {
                    rows += 1;
                    let ok = if r.modulus < 1.0 - 1e-12 {
                        r.var_p < r.delta && r.delta < r.var_q
                    } else if r.modulus > 1.0 + 1e-12 {
                        r.var_q < r.delta && r.delta < r.var_p
                    } else {
                        let b = (r.var_p - r.var_q).abs().max((r.var_p - r.delta).abs());
                        balance = balance.max(b);
                        b <= 1e-9
                    };
                    misordered += usize::from(!ok);
                }
            }
        }
    }
    Ok(Outcome {
        passed: misordered == 0,
        detail: format!("{rows} sweep rows, {misordered} misordered; balance at |alpha|=1 {balance:.2e} (1e-9)"),
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("structure relations", structure),
        ("coherent manifold", coherent_manifold),
        ("measure and resolution", measure),
        ("Fock-Bargmann realization", bargmann),
        ("intelligent states", intelligent),
        ("closed-form expansions", closed_form),
        ("SR inequality negative control", sr_negative_control),
        ("squeezing classification", squeezing),
    ];
    let start = Instant::now();
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= passed;
        println!(
            "{} [{}] {name}: {detail} [{:.2}s]",
            if passed { "PASS" } else { "FAIL" },
            k + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} in {:.2}s",
        if all { "all criteria pass" } else { "FAILURES" },
        start.elapsed().as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
