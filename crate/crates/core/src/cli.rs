//! Command-line driver: construction, solving, verification suites and
//! parameter sweeps with JSON or CSV output.
//!
//! Exit codes: 0 on success, 1 when a residual exceeds its tolerance or a
//! computation fails, 2 on a usage error. Every option may also be given in a
//! flat `key = value` file passed with `--config`; flags win over the file.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytics::{classify_moments, modulus_grid, sweep_alpha, verify_variance_relations, Branch, SweepRow};
use crate::intelligent::{
    blocks, general_algebra_eigenstates, solve_intelligent, spectrum_deviation, AlphaParam, GeneralCoefficients,
    PairIndex, Regime,
};
use crate::linalg::spectral_norm;
use crate::quadrature::QuadratureSpec;
use crate::rep::{check_structure, generator, GeneratorId};
use crate::verify::{self, Suite, Tolerances, VerifyConfig, VerifyReport};
use crate::{Error, RepSpace, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "su3cs",
    version,
    about = "su(3) coherent and intelligent states on symmetric bosonic representations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension, basis, generator norms and structure-relation residuals.
    RepInfo(CommonArgs),
    /// Run verification suites; the pass/fail table goes to stderr.
    Verify(VerifyArgs),
    /// All intelligent eigenstates with their moments at one (j1, pair, alpha).
    Intelligent(IntelligentArgs),
    /// Follow one eigenstate branch across a range of |alpha| at fixed phase.
    SweepAlpha(SweepArgs),
    /// Eigenvalue ladders per block, or the spectrum of a general combination.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat key=value file mirroring the long flags.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Representation label; for verify, the largest j1 checked.
    #[arg(long)]
    pub j1: Option<u32>,
    /// Output format [default: json].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for sampled checks [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Quadrature node counts: radial1,radial2,angular1,angular2.
    #[arg(long, value_name = "R1,R2,A1,A2")]
    pub nodes: Option<QuadratureSpec>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TolArgs {
    /// Every tolerance at once; the specific --tol.<key> flags win.
    #[arg(long = "tol.all", value_name = "TOL")]
    pub all: Option<f64>,
    #[arg(long = "tol.structure", value_name = "TOL")]
    pub structure: Option<f64>,
    #[arg(long = "tol.extract", value_name = "TOL")]
    pub extract: Option<f64>,
    #[arg(long = "tol.moments", value_name = "TOL")]
    pub moments: Option<f64>,
    #[arg(long = "tol.resolution", value_name = "TOL")]
    pub resolution: Option<f64>,
    #[arg(long = "tol.intertwine", value_name = "TOL")]
    pub intertwine: Option<f64>,
    #[arg(long = "tol.inner", value_name = "TOL")]
    pub inner: Option<f64>,
    /// Relative to the spectral norm of the operator.
    #[arg(long = "tol.eigen", value_name = "TOL")]
    pub eigen: Option<f64>,
    #[arg(long = "tol.spectrum", value_name = "TOL")]
    pub spectrum: Option<f64>,
    #[arg(long = "tol.sr", value_name = "TOL")]
    pub sr: Option<f64>,
    #[arg(long = "tol.variance", value_name = "TOL")]
    pub variance: Option<f64>,
    #[arg(long = "tol.recursion", value_name = "TOL")]
    pub recursion: Option<f64>,
    #[arg(long = "tol.projection", value_name = "TOL")]
    pub projection: Option<f64>,
    #[arg(long = "tol.squeezing", value_name = "TOL")]
    pub squeezing: Option<f64>,
}

impl TolArgs {
    fn specific(&self) -> [(&'static str, Option<f64>); 13] {
        [
            ("structure", self.structure),
            ("extract", self.extract),
            ("moments", self.moments),
            ("resolution", self.resolution),
            ("intertwine", self.intertwine),
            ("inner", self.inner),
            ("eigen", self.eigen),
            ("spectrum", self.spectrum),
            ("sr", self.sr),
            ("variance", self.variance),
            ("recursion", self.recursion),
            ("projection", self.projection),
            ("squeezing", self.squeezing),
        ]
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Suites to run (repeatable or comma-separated); all when absent.
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<Suite>,
    /// Largest j of the moment grid.
    #[arg(long)]
    pub j: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct IntelligentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// 1, 2 or 3.
    #[arg(long)]
    pub pair: Option<PairIndex>,
    /// "re,im" or "re".
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<AlphaParam>,
    /// Keep only states with this ladder value.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_prime: Option<i64>,
    /// Keep only states of this block.
    #[arg(long)]
    pub block: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// 1, 2 or 3.
    #[arg(long)]
    pub pair: Option<PairIndex>,
    /// Smallest |alpha|.
    #[arg(long)]
    pub from: Option<f64>,
    /// Largest |alpha|.
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of moduli, endpoints included [default: 10].
    #[arg(long)]
    pub steps: Option<usize>,
    /// Phase of alpha in radians [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Option<f64>,
    /// Block label; the longest chain when absent.
    #[arg(long)]
    pub block: Option<u32>,
    /// Ladder value; the top of the ladder when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_prime: Option<i64>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// 1, 2 or 3.
    #[arg(long, conflicts_with = "general")]
    pub pair: Option<PairIndex>,
    /// "re,im" or "re".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "general")]
    pub alpha: Option<AlphaParam>,
    /// Coefficients of a general combination, e.g. "e1=1,f1=1,h2=0.5-2i".
    #[arg(long)]
    pub general: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Failure(String),
    /// The reader of stdout went away; not an error for a filter.
    BrokenPipe,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
            CliError::BrokenPipe => EXIT_OK,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
            CliError::BrokenPipe => f.write_str("broken pipe"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::DegenerateAlpha { .. } => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Keys accepted in a config file besides `tol.<key>` and `tol.all`.
pub const CONFIG_KEYS: [&str; 16] = [
    "j1",
    "pair",
    "alpha",
    "lambda-prime",
    "block",
    "general",
    "suite",
    "j",
    "format",
    "out",
    "seed",
    "nodes",
    "from",
    "to",
    "steps",
    "phase",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config '{}': {e}", path.display())))?;
        text.parse()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Usage(format!("config key '{key}' = '{v}': {e}"))))
            .transpose()
    }
}

impl FromStr for ConfigFile {
    type Err = CliError;

    fn from_str(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
            let key = key.trim().trim_start_matches("--").to_string();
            let known = CONFIG_KEYS.contains(&key.as_str())
                || key == "tol.all"
                || key.strip_prefix("tol.").is_some_and(|k| Tolerances::KEYS.contains(&k));
            if !known {
                return Err(CliError::Usage(format!("config line {}: unknown key '{key}'", n + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }
}

fn pick<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> CliResult<Option<T>>
where
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.parsed(key),
    }
}

fn require<T>(value: Option<T>, key: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{key}")))
}

/// Options shared by every command after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub j1: Option<u32>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub quad: QuadratureSpec,
    pub tol: Tolerances,
}

impl RunConfig {
    fn resolve(args: &CommonArgs) -> CliResult<(Self, ConfigFile)> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let format = match args.format {
            Some(f) => f,
            None => match file.get("format") {
                Some(s) => {
                    Format::from_str(s, true).map_err(|e| CliError::Usage(format!("config key 'format': {e}")))?
                }
                None => Format::default(),
            },
        };
        let mut tol = Tolerances::default();
        let mut apply = |key: &str, v: f64| tol_set(&mut tol, key, v);
        if let Some(v) = file.parsed::<f64>("tol.all")? {
            apply("all", v)?;
        }
        for k in Tolerances::KEYS {
            if let Some(v) = file.parsed::<f64>(&format!("tol.{k}"))? {
                apply(k, v)?;
            }
        }
        if let Some(v) = args.tol.all {
            apply("all", v)?;
        }
        for (k, v) in args.tol.specific() {
            if let Some(v) = v {
                apply(k, v)?;
            }
        }
        let cfg = Self {
            j1: pick(args.j1, &file, "j1")?,
            format,
            out: pick(args.out.clone(), &file, "out")?,
            seed: pick(args.seed, &file, "seed")?.unwrap_or(0),
            quad: pick(args.nodes, &file, "nodes")?.unwrap_or_default(),
            tol,
        };
        Ok((cfg, file))
    }

    fn rep(&self) -> CliResult<RepSpace> {
        Ok(RepSpace::new(require(self.j1, "j1")?))
    }
}

fn tol_set(tol: &mut Tolerances, key: &str, value: f64) -> CliResult<()> {
    if key == "all" {
        if value.is_nan() || value < 0.0 {
            return Err(CliError::Usage(format!("tolerances must be non-negative, got {value}")));
        }
        *tol = Tolerances::all(value);
        return Ok(());
    }
    Ok(tol.set(key, value)?)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(CliError::BrokenPipe) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command; `Ok(false)` when a residual exceeded its tolerance.
pub fn execute(cli: &Cli) -> CliResult<bool> {
    match &cli.command {
        Command::RepInfo(a) => {
            let (cfg, _) = RunConfig::resolve(a)?;
            let report = rep_info(&cfg.rep()?, &cfg.tol);
            emit(&cfg, &report, &report.csv_rows())?;
            Ok(report.passed)
        }
        Command::Verify(a) => {
            let (cfg, file) = RunConfig::resolve(&a.common)?;
            let suites = if !a.suite.is_empty() {
                a.suite.clone()
            } else if let Some(s) = file.get("suite") {
                s.split(',').map(|x| x.trim().parse::<Suite>()).collect::<Result<Vec<_>, _>>()?
            } else {
                Suite::ALL.to_vec()
            };
            let defaults = VerifyConfig::default();
            let vcfg = VerifyConfig {
                j1_max: cfg.j1.unwrap_or(defaults.j1_max),
                moment_j: pick(a.j, &file, "j")?.unwrap_or(defaults.moment_j),
                quad: cfg.quad,
                seed: cfg.seed,
                tol: cfg.tol,
                ..defaults
            };
            let report = verify::run(&suites, &vcfg)?;
            eprint!("{}", report.table());
            let out = VerifyOutput { suites: suites.iter().map(Suite::as_str).collect(), seed: vcfg.seed, report };
            emit(&cfg, &out, &out.report.checks)?;
            Ok(out.report.passed)
        }
        Command::Intelligent(a) => {
            let (cfg, file) = RunConfig::resolve(&a.common)?;
            let pair = require(pick(a.pair, &file, "pair")?, "pair")?;
            let alpha = require(pick(a.alpha, &file, "alpha")?, "alpha")?;
            let filter = (pick(a.block, &file, "block")?, pick(a.lambda_prime, &file, "lambda-prime")?);
            warn_degenerate(alpha);
            let report = intelligent_report(&cfg.rep()?, pair, alpha, &cfg.tol, filter)?;
            emit(&cfg, &report, &report.csv_rows())?;
            Ok(report.passed)
        }
        Command::SweepAlpha(a) => {
            let (cfg, file) = RunConfig::resolve(&a.common)?;
            let pair = require(pick(a.pair, &file, "pair")?, "pair")?;
            let from = require(pick(a.from, &file, "from")?, "from")?;
            let to = require(pick(a.to, &file, "to")?, "to")?;
            let steps = pick(a.steps, &file, "steps")?.unwrap_or(10);
            let phase = pick(a.phase, &file, "phase")?.unwrap_or(0.0);
            let branch = Branch {
                block: pick(a.block, &file, "block")?,
                lambda_prime: pick(a.lambda_prime, &file, "lambda-prime")?,
            };
            let moduli = modulus_grid(from, to, steps)?;
            let report = sweep_report(&cfg.rep()?, pair, &moduli, phase, branch, &cfg.tol)?;
            let rows: Vec<SweepCsvRow> = report.rows.iter().map(SweepCsvRow::from).collect();
            emit(&cfg, &report, &rows)?;
            Ok(report.passed)
        }
        Command::Spectrum(a) => {
            let (cfg, file) = RunConfig::resolve(&a.common)?;
            let rep = cfg.rep()?;
            let general = match &a.general {
                Some(g) => Some(g.clone()),
                None if a.pair.is_none() && a.alpha.is_none() => file.get("general").map(str::to_string),
                None => None,
            };
            let report = match general {
                Some(g) => general_spectrum_report(&rep, &g, &cfg.tol)?,
                None => {
                    let pair = require(pick(a.pair, &file, "pair")?, "pair")?;
                    let alpha = require(pick(a.alpha, &file, "alpha")?, "alpha")?;
                    warn_degenerate(alpha);
                    pair_spectrum_report(&rep, pair, alpha, &cfg.tol)?
                }
            };
            emit(&cfg, &report, &report.csv_rows())?;
            Ok(report.passed)
        }
    }
}

fn warn_degenerate(alpha: AlphaParam) {
    if alpha.is_degenerate() {
        eprintln!(
            "warning: alpha = {alpha} is degenerate; the operator is nilpotent and only kernel vectors are reported"
        );
    }
}

/// A CSV record with a fixed column order.
pub trait CsvRow: Serialize {
    const HEADER: &'static [&'static str];
}

fn render<J: Serialize, R: CsvRow>(format: Format, json: &J, rows: &[R]) -> CliResult<Vec<u8>> {
    let fail = |e: &dyn Display| CliError::Failure(format!("serializing output: {e}"));
    match format {
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(json).map_err(|e| fail(&e))?;
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Csv => {
            let mut c = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            c.write_record(R::HEADER).map_err(|e| fail(&e))?;
            for r in rows {
                c.serialize(r).map_err(|e| fail(&e))?;
            }
            c.into_inner().map_err(|e| fail(&e))
        }
    }
}

fn emit<J: Serialize, R: CsvRow>(cfg: &RunConfig, json: &J, rows: &[R]) -> CliResult<()> {
    let bytes = render(cfg.format, json, rows)?;
    match &cfg.out {
        Some(p) => fs::write(p, &bytes).map_err(|e| CliError::Failure(format!("cannot write '{}': {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&bytes).and_then(|_| out.flush()).map_err(|e| match e.kind() {
                io::ErrorKind::BrokenPipe => CliError::BrokenPipe,
                _ => CliError::Failure(format!("writing output: {e}")),
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisRow {
    pub index: usize,
    pub j2: u32,
    pub j3: u32,
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorNorms {
    pub name: &'static str,
    pub frobenius_norm: f64,
    pub spectral_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationResidual {
    pub relation: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepInfoReport {
    pub j1: u32,
    pub dim: usize,
    pub basis: Vec<BasisRow>,
    pub generators: Vec<GeneratorNorms>,
    pub structure: Vec<RelationResidual>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepInfoCsvRow {
    pub j1: u32,
    pub dim: usize,
    pub kind: &'static str,
    pub name: String,
    pub value: f64,
}

impl CsvRow for RepInfoCsvRow {
    const HEADER: &'static [&'static str] = &["j1", "dim", "kind", "name", "value"];
}

impl RepInfoReport {
    pub fn csv_rows(&self) -> Vec<RepInfoCsvRow> {
        let row = |kind, name: String, value| RepInfoCsvRow { j1: self.j1, dim: self.dim, kind, name, value };
        let mut rows: Vec<_> = self
            .generators
            .iter()
            .flat_map(|g| {
                [
                    row("frobenius_norm", g.name.to_string(), g.frobenius_norm),
                    row("spectral_norm", g.name.to_string(), g.spectral_norm),
                ]
            })
            .collect();
        rows.extend(self.structure.iter().map(|r| row("structure_residual", r.relation.clone(), r.residual)));
        rows
    }
}

pub fn rep_info(rep: &RepSpace, tol: &Tolerances) -> RepInfoReport {
    let basis = (0..rep.dim())
        .map(|index| {
            let b = rep.state(index);
            BasisRow { index, j2: b.j2(), j3: b.j3(), n1: b.n1, n2: b.n2, n3: b.n3 }
        })
        .collect();
    let generators = GeneratorId::ALL
        .iter()
        .map(|&id| {
            let g = generator(rep, id);
            GeneratorNorms {
                name: id.as_str(),
                frobenius_norm: g.frobenius_norm(),
                spectral_norm: spectral_norm(g.matrix()),
            }
        })
        .collect();
    let structure = check_structure(rep);
    let max_residual = structure.max_residual();
    RepInfoReport {
        j1: rep.j1(),
        dim: rep.dim(),
        basis,
        generators,
        structure: structure
            .residuals
            .into_iter()
            .map(|r| RelationResidual { relation: r.relation, residual: r.residual })
            .collect(),
        max_residual,
        tolerance: tol.structure,
        passed: max_residual <= tol.structure,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutput {
    pub suites: Vec<&'static str>,
    pub seed: u64,
    #[serde(flatten)]
    pub report: VerifyReport,
}

impl CsvRow for verify::CheckRow {
    const HEADER: &'static [&'static str] = &["suite", "name", "value", "tolerance", "passed"];
}

#[derive(Debug, Clone, Serialize)]
pub struct IntelligentRow {
    pub block: u32,
    pub eigenspace: usize,
    pub multiplicity: usize,
    #[serde(serialize_with = "crate::serial::complex")]
    pub lambda: C64,
    #[serde(serialize_with = "crate::serial::complex_opt")]
    pub lambda_prime: Option<C64>,
    pub mean_p: f64,
    pub mean_q: f64,
    pub var_p: f64,
    pub var_q: f64,
    /// Full anticommutator expectation `<c>`.
    pub mean_c: f64,
    pub mean_h: f64,
    pub delta: f64,
    pub regime: Regime,
    /// Absent when `Delta` vanishes.
    pub ordering_holds: Option<bool>,
    pub eigen_residual: f64,
    pub sr_residual: f64,
    pub variance_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntelligentReport {
    pub j1: u32,
    pub pair: PairIndex,
    pub alpha: AlphaParam,
    pub regime: Regime,
    pub nilpotent: bool,
    pub branch_cut: bool,
    pub operator_norm: f64,
    pub passed: bool,
    pub rows: Vec<IntelligentRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntelligentCsvRow {
    pub block: u32,
    pub eigenspace: usize,
    pub multiplicity: usize,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub lambda_prime_re: Option<f64>,
    pub lambda_prime_im: Option<f64>,
    pub mean_p: f64,
    pub mean_q: f64,
    pub var_p: f64,
    pub var_q: f64,
    pub mean_c: f64,
    pub mean_h: f64,
    pub delta: f64,
    pub regime: Regime,
    pub ordering_holds: Option<bool>,
    pub eigen_residual: f64,
    pub sr_residual: f64,
    pub variance_residual: f64,
}

impl CsvRow for IntelligentCsvRow {
    const HEADER: &'static [&'static str] = &[
        "block",
        "eigenspace",
        "multiplicity",
        "lambda_re",
        "lambda_im",
        "lambda_prime_re",
        "lambda_prime_im",
        "mean_p",
        "mean_q",
        "var_p",
        "var_q",
        "mean_c",
        "mean_h",
        "delta",
        "regime",
        "ordering_holds",
        "eigen_residual",
        "sr_residual",
        "variance_residual",
    ];
}

impl IntelligentReport {
    pub fn csv_rows(&self) -> Vec<IntelligentCsvRow> {
        self.rows
            .iter()
            .map(|r| IntelligentCsvRow {
                block: r.block,
                eigenspace: r.eigenspace,
                multiplicity: r.multiplicity,
                lambda_re: r.lambda.re,
                lambda_im: r.lambda.im,
                lambda_prime_re: r.lambda_prime.map(|z| z.re),
                lambda_prime_im: r.lambda_prime.map(|z| z.im),
                mean_p: r.mean_p,
                mean_q: r.mean_q,
                var_p: r.var_p,
                var_q: r.var_q,
                mean_c: r.mean_c,
                mean_h: r.mean_h,
                delta: r.delta,
                regime: r.regime,
                ordering_holds: r.ordering_holds,
                eigen_residual: r.eigen_residual,
                sr_residual: r.sr_residual,
                variance_residual: r.variance_residual,
            })
            .collect()
    }
}

/// Eigenstates at `(pair, alpha)`, optionally restricted to one block and/or
/// one ladder value. Residuals are checked against `eigen` (relative to the
/// operator norm), `sr` and `variance`.
pub fn intelligent_report(
    rep: &RepSpace,
    pair: PairIndex,
    alpha: AlphaParam,
    tol: &Tolerances,
    (block, lambda_prime): (Option<u32>, Option<i64>),
) -> CliResult<IntelligentReport> {
    let sp = solve_intelligent(rep, pair, alpha)?;
    let scale = sp.operator_norm.max(1.0);
    let mut passed = true;
    let rows: Vec<IntelligentRow> = sp
        .states
        .iter()
        .filter(|s| block.is_none_or(|b| s.block == b))
        .filter(|s| lambda_prime.is_none_or(|l| s.lambda_prime.is_some_and(|z| (z.re - l as f64).abs() < 1e-6)))
        .map(|s| {
            let rel = verify_variance_relations(s);
            let m = &rel.moments;
            let eigen_residual = s.residual(rep) / scale;
            let variance_residual = if rel.degenerate_delta { 0.0 } else { rel.max_residual() };
            passed &= eigen_residual <= tol.eigen && rel.sr_equality <= tol.sr && variance_residual <= tol.variance;
            IntelligentRow {
                block: s.block,
                eigenspace: s.eigenspace,
                multiplicity: s.multiplicity,
                lambda: s.lambda,
                lambda_prime: s.lambda_prime,
                mean_p: m.mean_p,
                mean_q: m.mean_q,
                var_p: m.var_p,
                var_q: m.var_q,
                mean_c: m.cov_total,
                mean_h: m.mean_h,
                delta: m.delta,
                regime: alpha.regime(),
                ordering_holds: classify_moments(alpha.modulus(), m).ok().map(|c| c.ordering_holds),
                eigen_residual,
                sr_residual: rel.sr_equality,
                variance_residual,
            }
        })
        .collect();
    if rows.is_empty() {
        return Err(CliError::Usage("no eigenstate matches the --block/--lambda-prime filter".into()));
    }
    Ok(IntelligentReport {
        j1: rep.j1(),
        pair,
        alpha,
        regime: alpha.regime(),
        nilpotent: sp.nilpotent,
        branch_cut: alpha.on_branch_cut(),
        operator_norm: sp.operator_norm,
        passed,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub j1: u32,
    pub pair: PairIndex,
    pub phase: f64,
    pub passed: bool,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCsvRow {
    pub modulus: f64,
    pub phase: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub block: u32,
    pub lambda_prime: i64,
    pub var_p: f64,
    pub var_q: f64,
    pub delta: f64,
    pub regime: Regime,
    pub ordering_holds: bool,
    pub relation_residual: f64,
}

impl CsvRow for SweepCsvRow {
    const HEADER: &'static [&'static str] = &[
        "modulus",
        "phase",
        "alpha_re",
        "alpha_im",
        "block",
        "lambda_prime",
        "var_p",
        "var_q",
        "delta",
        "regime",
        "ordering_holds",
        "relation_residual",
    ];
}

impl From<&SweepRow> for SweepCsvRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            modulus: r.modulus,
            phase: r.phase,
            alpha_re: r.alpha.re,
            alpha_im: r.alpha.im,
            block: r.block,
            lambda_prime: r.lambda_prime,
            var_p: r.var_p,
            var_q: r.var_q,
            delta: r.delta,
            regime: r.regime,
            ordering_holds: r.ordering_holds,
            relation_residual: r.relation_residual,
        }
    }
}

/// Rows are computed on scoped threads and returned in input order.
pub fn sweep_report(
    rep: &RepSpace,
    pair: PairIndex,
    moduli: &[f64],
    phase: f64,
    branch: Branch,
    tol: &Tolerances,
) -> crate::Result<SweepReport> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(moduli.len()).max(1);
    let chunk = moduli.len().div_ceil(workers);
    let parts: Vec<crate::Result<Vec<SweepRow>>> = std::thread::scope(|s| {
        let handles: Vec<_> =
            moduli.chunks(chunk).map(|ms| s.spawn(move || sweep_alpha(rep, pair, ms, phase, branch))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut rows = Vec::with_capacity(moduli.len());
    for p in parts {
        rows.extend(p?);
    }
    let passed = rows.iter().all(|r| r.ordering_holds && r.relation_residual <= tol.squeezing);
    Ok(SweepReport { j1: rep.j1(), pair, phase, passed, rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockLadder {
    pub block: u32,
    pub ladder_length: u32,
    /// Empty for degenerate alpha, where the ladder collapses.
    pub lambda_prime: Vec<i64>,
    #[serde(serialize_with = "crate::serial::complex_vec")]
    pub lambda: Vec<C64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenspaceSummary {
    #[serde(serialize_with = "crate::serial::complex")]
    pub value: C64,
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub j1: u32,
    /// `pair` or `general`.
    pub mode: &'static str,
    pub pair: Option<PairIndex>,
    pub alpha: Option<AlphaParam>,
    pub coefficients: Option<String>,
    pub operator_norm: f64,
    /// Full multiset, one entry per algebraic multiplicity.
    #[serde(serialize_with = "crate::serial::complex_vec")]
    pub eigenvalues: Vec<C64>,
    pub blocks: Vec<BlockLadder>,
    pub eigenspaces: Vec<EigenspaceSummary>,
    pub defective: bool,
    /// Pair mode: distance to a dense eigensolver. General mode: worst
    /// eigenvector residual. Both relative to `max(norm, 1)`.
    pub check_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumCsvRow {
    pub block: Option<u32>,
    pub lambda_prime: Option<i64>,
    pub lambda_re: f64,
    pub lambda_im: f64,
}

impl CsvRow for SpectrumCsvRow {
    const HEADER: &'static [&'static str] = &["block", "lambda_prime", "lambda_re", "lambda_im"];
}

impl SpectrumReport {
    pub fn csv_rows(&self) -> Vec<SpectrumCsvRow> {
        if self.blocks.is_empty() {
            return self
                .eigenvalues
                .iter()
                .map(|z| SpectrumCsvRow { block: None, lambda_prime: None, lambda_re: z.re, lambda_im: z.im })
                .collect();
        }
        self.blocks
            .iter()
            .flat_map(|b| {
                b.lambda.iter().enumerate().map(|(k, z)| SpectrumCsvRow {
                    block: Some(b.block),
                    lambda_prime: b.lambda_prime.get(k).copied(),
                    lambda_re: z.re,
                    lambda_im: z.im,
                })
            })
            .collect()
    }
}

pub fn pair_spectrum_report(
    rep: &RepSpace,
    pair: PairIndex,
    alpha: AlphaParam,
    tol: &Tolerances,
) -> CliResult<SpectrumReport> {
    let sp = solve_intelligent(rep, pair, alpha)?;
    let zero = C64::new(0.0, 0.0);
    let ladders: Vec<BlockLadder> = blocks(rep, pair)
        .into_iter()
        .map(|b| {
            let l = b.ladder_length();
            if sp.nilpotent {
                return BlockLadder {
                    block: b.label,
                    ladder_length: l,
                    lambda_prime: vec![],
                    lambda: vec![zero; l as usize + 1],
                };
            }
            let states: Vec<_> = sp.states.iter().filter(|s| s.block == b.label).collect();
            BlockLadder {
                block: b.label,
                ladder_length: l,
                lambda_prime: states.iter().map(|s| s.lambda_prime.map_or(0, |z| z.re.round() as i64)).collect(),
                lambda: states.iter().map(|s| s.lambda).collect(),
            }
        })
        .collect();
    let mut spaces: BTreeMap<usize, EigenspaceSummary> = BTreeMap::new();
    for s in &sp.states {
        let e = spaces.entry(s.eigenspace).or_insert(EigenspaceSummary { value: s.lambda, algebraic: 0, geometric: 0 });
        e.geometric += 1;
        e.algebraic = if sp.nilpotent { rep.dim() } else { s.multiplicity };
    }
    let scale = sp.operator_norm.max(1.0);
    let check_residual = spectrum_deviation(rep, pair, alpha)? / scale;
    Ok(SpectrumReport {
        j1: rep.j1(),
        mode: "pair",
        pair: Some(pair),
        alpha: Some(alpha),
        coefficients: None,
        operator_norm: sp.operator_norm,
        eigenvalues: ladders.iter().flat_map(|b| b.lambda.iter().copied()).collect(),
        eigenspaces: spaces.into_values().collect(),
        defective: sp.nilpotent && rep.dim() > 1,
        blocks: ladders,
        check_residual,
        tolerance: tol.spectrum,
        passed: check_residual <= tol.spectrum,
    })
}

pub fn general_spectrum_report(rep: &RepSpace, coefficients: &str, tol: &Tolerances) -> CliResult<SpectrumReport> {
    let coeffs: GeneralCoefficients = coefficients.parse()?;
    let sp = general_algebra_eigenstates(rep, &coeffs)?;
    let m = coeffs.operator(rep).into_matrix();
    let scale = sp.operator_norm.max(1.0);
    let check_residual = sp
        .eigenspaces
        .iter()
        .flat_map(|e| e.vectors.iter().map(|v| (&m * v.amplitudes() - v.amplitudes() * e.value).norm()))
        .fold(0.0, f64::max)
        / scale;
    Ok(SpectrumReport {
        j1: rep.j1(),
        mode: "general",
        pair: None,
        alpha: None,
        coefficients: Some(coefficients.to_string()),
        operator_norm: sp.operator_norm,
        eigenvalues: sp.eigenspaces.iter().flat_map(|e| std::iter::repeat_n(e.value, e.algebraic)).collect(),
        blocks: vec![],
        eigenspaces: sp
            .eigenspaces
            .iter()
            .map(|e| EigenspaceSummary { value: e.value, algebraic: e.algebraic, geometric: e.vectors.len() })
            .collect(),
        defective: sp.defective,
        check_residual,
        tolerance: tol.eigen,
        passed: check_residual <= tol.eigen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("su3cs").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn config_file_parses_and_rejects_unknown_keys() {
        let c: ConfigFile = "# comment\nj1 = 3\ntol.structure=1e-3\n\nalpha = -0.5,0.25 # trailing".parse().unwrap();
        assert_eq!(c.get("j1"), Some("3"));
        assert_eq!(c.get("alpha"), Some("-0.5,0.25"));
        assert!("tol.bogus = 1".parse::<ConfigFile>().is_err());
        assert!("colour = blue".parse::<ConfigFile>().is_err());
        assert!("j1 3".parse::<ConfigFile>().is_err());
    }

    #[test]
    fn specific_tolerance_beats_all() {
        let cli = parse(&["rep-info", "--j1", "1", "--tol.all", "1e-3", "--tol.structure", "1e-20"]);
        let Command::RepInfo(a) = cli.command else { panic!() };
        let (cfg, _) = RunConfig::resolve(&a).unwrap();
        assert_eq!(cfg.tol.structure, 1e-20);
        assert_eq!(cfg.tol.sr, 1e-3);
    }

    #[test]
    fn negative_alpha_is_accepted() {
        let cli = parse(&["intelligent", "--j1", "1", "--pair", "2", "--alpha", "-0.5,0.1"]);
        let Command::Intelligent(a) = cli.command else { panic!() };
        assert_eq!(a.alpha.unwrap().value(), C64::new(-0.5, 0.1));
    }

    #[test]
    fn rep_info_dimension() {
        let r = rep_info(&RepSpace::new(4), &Tolerances::default());
        assert_eq!(r.dim, 15);
        assert!(r.passed);
        assert_eq!(r.basis.len(), 15);
    }

    #[test]
    fn pair_three_ladders() {
        let alpha = AlphaParam::real(0.5).unwrap();
        let r = pair_spectrum_report(&RepSpace::new(3), PairIndex::Three, alpha, &Tolerances::default()).unwrap();
        assert!(r.passed);
        for b in &r.blocks {
            let l = 3 - b.block as i64;
            let want: Vec<i64> = (0..=l).map(|k| -l + 2 * k).collect();
            assert_eq!(b.lambda_prime, want, "block m = {}", b.block);
        }
    }

    #[test]
    fn unknown_generator_is_a_usage_error() {
        let e = general_spectrum_report(&RepSpace::new(1), "e4=1", &Tolerances::default()).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
    }
}
