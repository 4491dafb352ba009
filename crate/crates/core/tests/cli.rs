use std::path::Path;
use std::process::{Command, Output};

use serde::Deserialize;
use serde_json::Value;

fn su3cs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_su3cs")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Runs a command expected to succeed and validates its JSON against the schema.
fn json_ok(name: &str, args: &[&str]) -> Value {
    let out = su3cs(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let s = schema(name);
    let validator = jsonschema::validator_for(&s).unwrap();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{name} output violates schema: {errors:#?}");
    v
}

fn complex(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

#[test]
fn schemas_are_valid_documents() {
    for name in ["rep-info", "verify", "intelligent", "sweep-alpha", "spectrum"] {
        assert!(jsonschema::meta::is_valid(&schema(name)), "{name}");
    }
}

#[test]
fn rep_info_dimensions() {
    assert_eq!(json_ok("rep-info", &["rep-info", "--j1", "4"])["dim"], 15);
    let trivial = json_ok("rep-info", &["rep-info", "--j1", "0"]);
    assert_eq!(trivial["dim"], 1);
    assert_eq!(trivial["passed"], true);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["rep-info", "--j1", "four"][..],
        &["rep-info"],
        &["no-such-command"],
        &["intelligent", "--j1", "2", "--pair", "4", "--alpha", "0.5"],
        &["intelligent", "--j1", "2", "--pair", "1", "--alpha", "0.5,x"],
        &["intelligent", "--j1", "2", "--pair", "1"],
        &["verify", "--suite", "everything"],
        &["rep-info", "--j1", "2", "--tol.structure", "-1"],
    ] {
        assert_eq!(code(&su3cs(args)), 2, "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&su3cs(&["--help"])), 0);
    assert_eq!(code(&su3cs(&["verify", "--help"])), 0);
}

#[test]
fn verify_default_passes_and_prints_table() {
    let v = json_ok("verify", &["verify"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 9);
    let out = su3cs(&["verify", "--suite", "structure"]);
    let table = stderr(&out);
    assert!(table.lines().next().unwrap().starts_with("suite"));
    assert!(table.contains("PASS") && !table.contains("FAIL"));
}

#[test]
fn injected_fault_fails() {
    let out = su3cs(&["verify", "--suite", "structure", "--tol.structure", "1e-20"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("FAIL"));
    let out = su3cs(&["rep-info", "--j1", "3", "--tol.structure", "1e-20"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn suite_filter_runs_only_moments() {
    let v = json_ok("verify", &["verify", "--suite", "moments", "--j", "10"]);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["suite"] == "moments"));
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "coherent,sr", "--j1", "3", "--seed", "7"];
    assert_eq!(su3cs(&args).stdout, su3cs(&args).stdout);
}

#[test]
fn intelligent_three_rows_for_spin_half_chain() {
    let v = json_ok("intelligent", &["intelligent", "--j1", "1", "--pair", "1", "--alpha", "0.5"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let mut lambdas: Vec<f64> = rows
        .iter()
        .map(|r| {
            let (re, im) = complex(&r["lambda"]);
            assert!(im.abs() < 1e-12);
            re
        })
        .collect();
    lambdas.sort_by(f64::total_cmp);
    let s = 0.75f64.sqrt();
    for (got, want) in lambdas.iter().zip([-s, 0.0, s]) {
        assert!((got - want).abs() < 1e-12, "{lambdas:?}");
    }
    assert_eq!(v["regime"], "squeezed_p");
}

#[test]
fn degenerate_alpha_warns() {
    let out = su3cs(&["intelligent", "--j1", "2", "--pair", "1", "--alpha", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("degenerate"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["nilpotent"], true);
    assert_eq!(v["regime"], "degenerate");
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["lambda_prime"].is_null()));
}

#[derive(Debug, Deserialize)]
struct IntelligentCsv {
    block: u32,
    eigenspace: usize,
    multiplicity: usize,
    lambda_re: f64,
    lambda_im: f64,
    lambda_prime_re: Option<f64>,
    lambda_prime_im: Option<f64>,
    mean_p: f64,
    mean_q: f64,
    var_p: f64,
    var_q: f64,
    mean_c: f64,
    mean_h: f64,
    delta: f64,
    regime: String,
    ordering_holds: Option<bool>,
    eigen_residual: f64,
    sr_residual: f64,
    variance_residual: f64,
}

#[test]
fn csv_round_trips_through_a_parser() {
    let args = ["intelligent", "--j1", "3", "--pair", "2", "--alpha", "0.3,0.4"];
    let json: Value = serde_json::from_slice(&su3cs(&args).stdout).unwrap();
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let out = su3cs(&csv_args);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header[..4], ["block", "eigenspace", "multiplicity", "lambda_re"]);
    let rows: Vec<IntelligentCsv> = reader.deserialize().collect::<Result<_, _>>().unwrap();
    let jrows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), jrows.len());
    assert_eq!(rows.len(), 10);
    for (c, j) in rows.iter().zip(jrows) {
        assert_eq!(c.block as u64, j["block"].as_u64().unwrap());
        assert_eq!(c.eigenspace as u64, j["eigenspace"].as_u64().unwrap());
        assert_eq!(c.multiplicity as u64, j["multiplicity"].as_u64().unwrap());
        assert_eq!((c.lambda_re, c.lambda_im), complex(&j["lambda"]));
        assert_eq!((c.lambda_prime_re.unwrap(), c.lambda_prime_im.unwrap()), complex(&j["lambda_prime"]));
        for (x, key) in [
            (c.mean_p, "mean_p"),
            (c.mean_q, "mean_q"),
            (c.var_p, "var_p"),
            (c.var_q, "var_q"),
            (c.mean_c, "mean_c"),
            (c.mean_h, "mean_h"),
            (c.delta, "delta"),
            (c.eigen_residual, "eigen_residual"),
            (c.sr_residual, "sr_residual"),
            (c.variance_residual, "variance_residual"),
        ] {
            assert_eq!(x, j[key].as_f64().unwrap(), "{key}");
        }
        assert_eq!(c.regime, j["regime"].as_str().unwrap());
        assert_eq!(c.ordering_holds, j["ordering_holds"].as_bool());
    }
}

#[derive(Debug, Deserialize)]
struct SweepCsv {
    modulus: f64,
    var_p: f64,
    var_q: f64,
    delta: f64,
    ordering_holds: bool,
    relation_residual: f64,
}

#[test]
fn sweep_traces_the_variance_line() {
    let out = su3cs(&[
        "sweep-alpha",
        "--j1",
        "2",
        "--pair",
        "1",
        "--from",
        "0.2",
        "--to",
        "2.0",
        "--steps",
        "10",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows: Vec<SweepCsv> =
        csv::Reader::from_reader(out.stdout.as_slice()).deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[9].modulus, 2.0);
    for w in rows.windows(2) {
        assert!(w[1].modulus > w[0].modulus);
        assert!(w[1].var_p >= w[0].var_p - 1e-12);
    }
    for r in &rows {
        assert!((r.var_p - r.modulus * r.delta).abs() <= 1e-9);
        assert!(r.relation_residual <= 1e-9);
        assert!(r.ordering_holds);
    }
    let unit = rows.iter().find(|r| (r.modulus - 1.0).abs() < 1e-12).expect("grid hits 1");
    assert!((unit.var_p - unit.var_q).abs() <= 1e-9);
    json_ok(
        "sweep-alpha",
        &["sweep-alpha", "--j1", "2", "--pair", "3", "--from", "0.5", "--to", "1.5", "--phase", "0.7"],
    );
}

#[test]
fn sweep_rejects_empty_range() {
    assert_eq!(code(&su3cs(&["sweep-alpha", "--j1", "2", "--pair", "1", "--from", "2", "--to", "1"])), 2);
    assert_eq!(
        code(&su3cs(&["sweep-alpha", "--j1", "2", "--pair", "1", "--from", "0.2", "--to", "2", "--steps", "0"])),
        2
    );
}

fn eigenvalues(v: &Value) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = v["eigenvalues"].as_array().unwrap().iter().map(complex).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[test]
fn general_spectrum_specializes_to_pair_one() {
    for j1 in ["1", "2", "4"] {
        let general = json_ok("spectrum", &["spectrum", "--j1", j1, "--general", "e1=1,f1=1"]);
        let pair = json_ok("spectrum", &["spectrum", "--j1", j1, "--pair", "1", "--alpha", "0"]);
        assert_eq!(general["mode"], "general");
        assert_eq!(pair["mode"], "pair");
        let (g, p) = (eigenvalues(&general), eigenvalues(&pair));
        assert_eq!(g.len(), p.len());
        for (a, b) in g.iter().zip(&p) {
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9, "{g:?} vs {p:?}");
        }
    }
}

#[test]
fn pair_three_ladders_per_block() {
    let v = json_ok("spectrum", &["spectrum", "--pair", "3", "--alpha", "0.5", "--j1", "3"]);
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 4);
    for b in blocks {
        let m = b["block"].as_i64().unwrap();
        let got: Vec<i64> = b["lambda_prime"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
        let want: Vec<i64> = (0..=3 - m).map(|k| -(3 - m) + 2 * k).collect();
        assert_eq!(got, want, "m = {m}");
    }
}

#[test]
fn unknown_generator_key_exits_two() {
    let out = su3cs(&["spectrum", "--j1", "2", "--general", "e1=1,g7=2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("g7"));
}

#[test]
fn config_file_with_flags_winning() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# shared settings\nj1 = 3\nformat = json\ntol.structure = 1e-3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(json_ok("rep-info", &["rep-info", "--config", cfg])["dim"], 10);
    let v = json_ok("rep-info", &["rep-info", "--config", cfg, "--j1", "4", "--tol.structure", "1e-11"]);
    assert_eq!(v["dim"], 15);
    assert_eq!(v["tolerance"], 1e-11);

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "j1 = 2\nwavelength = 3\n").unwrap();
    assert_eq!(code(&su3cs(&["rep-info", "--config", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&su3cs(&["rep-info", "--config", dir.path().join("missing").to_str().unwrap()])), 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let out = su3cs(&[
        "spectrum",
        "--j1",
        "2",
        "--pair",
        "2",
        "--alpha",
        "2.5,0",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("block,lambda_prime,lambda_re,lambda_im"));
    assert_eq!(lines.count(), 6);
}
