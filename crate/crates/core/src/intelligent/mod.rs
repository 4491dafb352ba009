//! Robertson intelligent states: eigenstates of `(1 + alpha) e_i + (1 - alpha) f_i`
//! for the three Weyl pairs, and the general eigenproblem over the whole algebra.
//!
//! Each pair splits the representation into invariant chains on which
//! `e_i` and `f_i` act as an su(2) ladder. On a chain with ladder length `L`
//! the diagonal similarity `D = diag(r^k)`, `r = sqrt(1 - alpha) / sqrt(1 + alpha)`,
//! turns the operator into `s T` with `s = sqrt(1 - alpha) sqrt(1 + alpha)`
//! and `T` real symmetric tridiagonal with spectrum `{-L, -L + 2, ..., L}`.

mod closed_form;

pub use closed_form::{
    assemble_fock_expansion, closed_form_coeffs, recursion_residual, ClosedFormSpec, CoefficientFamily,
};

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{eigen_general, eigenvalues_general, gram_schmidt, spectral_norm, symmetric_tridiagonal_eigen};
use crate::rep::{generator, GeneratorId, OpTag, Operator, RepSpace};
use crate::state::StateVector;
use crate::C64;

/// `alpha` within this distance of `+-1` is treated as degenerate.
pub const DEGENERATE_ALPHA_TOLERANCE: f64 = 1e-12;
/// `||alpha| - 1|` at or below this counts as unit modulus.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-12;
/// Eigenvalues closer than this multiple of `||A||` share an eigenspace.
pub const MERGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairIndex {
    One,
    Two,
    Three,
}

impl PairIndex {
    pub const ALL: [PairIndex; 3] = [PairIndex::One, PairIndex::Two, PairIndex::Three];

    pub fn number(self) -> u8 {
        match self {
            PairIndex::One => 1,
            PairIndex::Two => 2,
            PairIndex::Three => 3,
        }
    }

    /// `(e_i, f_i, h_i)`; `h_3 = [e_3, f_3]`.
    pub fn generators(self) -> (GeneratorId, GeneratorId, GeneratorId) {
        match self {
            PairIndex::One => (GeneratorId::E1, GeneratorId::F1, GeneratorId::H1),
            PairIndex::Two => (GeneratorId::E2, GeneratorId::F2, GeneratorId::H2),
            PairIndex::Three => (GeneratorId::E3, GeneratorId::F3, GeneratorId::H3),
        }
    }

    pub fn h(self, rep: &RepSpace) -> Operator {
        generator(rep, self.generators().2)
    }

    /// What the block label counts: `j3`, `j2` or `j2 - j3`.
    pub fn block_label_name(self) -> &'static str {
        match self {
            PairIndex::One => "j3",
            PairIndex::Two => "j2",
            PairIndex::Three => "j2-j3",
        }
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for PairIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(PairIndex::One),
            "2" => Ok(PairIndex::Two),
            "3" => Ok(PairIndex::Three),
            other => Err(Error::InvalidArgument(format!("pair must be 1, 2 or 3, got '{other}'"))),
        }
    }
}

impl TryFrom<u8> for PairIndex {
    type Error = Error;

    fn try_from(i: u8) -> Result<Self> {
        i.to_string().parse()
    }
}

impl Serialize for PairIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Coherent,
    SqueezedP,
    SqueezedQ,
    Degenerate,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Coherent => "coherent",
            Regime::SqueezedP => "squeezed_p",
            Regime::SqueezedQ => "squeezed_q",
            Regime::Degenerate => "degenerate",
        })
    }
}

/// The squeezing parameter `alpha`, with `u = 2 Re alpha`, `v = 2 Im alpha`.
///
/// `alpha = 0` is admitted: it gives the Hermitian operator `sqrt(2) p_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParam {
    value: C64,
}

impl AlphaParam {
    pub fn new(value: C64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::InvalidArgument(format!("alpha must be finite, got {value}")));
        }
        // -0.0 would select the other side of the square-root cuts.
        let clean = |x: f64| if x == 0.0 { 0.0 } else { x };
        Ok(Self { value: C64::new(clean(value.re), clean(value.im)) })
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(C64::new(re, 0.0))
    }

    pub fn from_polar(modulus: f64, phase: f64) -> Result<Self> {
        Self::new(C64::from_polar(modulus, phase))
    }

    pub fn value(&self) -> C64 {
        self.value
    }

    pub fn u(&self) -> f64 {
        2.0 * self.value.re
    }

    pub fn v(&self) -> f64 {
        2.0 * self.value.im
    }

    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    pub fn is_degenerate(&self) -> bool {
        (self.value - 1.0).norm() <= DEGENERATE_ALPHA_TOLERANCE
            || (self.value + 1.0).norm() <= DEGENERATE_ALPHA_TOLERANCE
    }

    pub fn regime(&self) -> Regime {
        let m = self.modulus();
        if self.is_degenerate() {
            Regime::Degenerate
        } else if (m - 1.0).abs() <= UNIT_MODULUS_TOLERANCE {
            Regime::Coherent
        } else if m < 1.0 {
            Regime::SqueezedP
        } else {
            Regime::SqueezedQ
        }
    }

    /// Real `alpha` with `|alpha| > 1` puts `1 - alpha` or `1 + alpha` on the
    /// negative real axis, where the principal square root is discontinuous.
    pub fn on_branch_cut(&self) -> bool {
        self.value.im == 0.0 && self.value.re.abs() > 1.0
    }

    /// `sqrt(1 - alpha) sqrt(1 + alpha)`, each root principal.
    pub fn sqrt_one_minus_sq(&self) -> C64 {
        (C64::new(1.0, 0.0) - self.value).sqrt() * (C64::new(1.0, 0.0) + self.value).sqrt()
    }

    /// `sqrt(1 - alpha) / sqrt(1 + alpha)`; `None` when degenerate.
    pub fn ratio(&self) -> Option<C64> {
        if self.is_degenerate() {
            return None;
        }
        Some((C64::new(1.0, 0.0) - self.value).sqrt() / (C64::new(1.0, 0.0) + self.value).sqrt())
    }

    pub fn require_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            return Err(Error::DegenerateAlpha { re: self.value.re, im: self.value.im });
        }
        Ok(())
    }
}

impl fmt::Display for AlphaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.value.re, self.value.im)
    }
}

/// Parses `"re,im"` or a bare real part.
impl FromStr for AlphaParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("alpha must be 're,im' or 're', got '{s}'"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let (re, im) = match parts.as_slice() {
            [re] => (re.parse().map_err(|_| bad())?, 0.0),
            [re, im] => (re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        Self::new(C64::new(re, im))
    }
}

impl Serialize for AlphaParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serial::complex(&self.value, s)
    }
}

/// `p = (e + f) / sqrt(2)`, `q = (e - f) / (i sqrt(2))`.
pub fn quadratures(rep: &RepSpace, pair: PairIndex) -> (Operator, Operator) {
    let (e, f, _) = pair.generators();
    let (e, f) = (generator(rep, e), generator(rep, f));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let p = e.add(&f).expect("same rep").scale(C64::new(s, 0.0)).with_tag(OpTag::Derived(format!("p{pair}")));
    let q = e.sub(&f).expect("same rep").scale(C64::new(0.0, -s)).with_tag(OpTag::Derived(format!("q{pair}")));
    for op in [&p, &q] {
        assert!(
            crate::linalg::max_abs(&(op.matrix() - op.matrix().adjoint())) <= 1e-14,
            "{} is not Hermitian",
            op.label()
        );
    }
    (p, q)
}

pub fn intelligent_operator(rep: &RepSpace, pair: PairIndex, alpha: AlphaParam) -> Operator {
    let (e, f, _) = pair.generators();
    let one = C64::new(1.0, 0.0);
    let a = alpha.value();
    let m = generator(rep, e).matrix() * (one + a) + generator(rep, f).matrix() * (one - a);
    Operator::from_parts(rep.j1(), m, OpTag::Derived(format!("(1+a)e{pair}+(1-a)f{pair}")))
}

/// An invariant chain of a pair, ordered from the state annihilated by `e_i`
/// (position 0) downwards; `e_i` maps position `k` to `k - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub label: u32,
    pub indices: Vec<usize>,
}

impl Block {
    pub fn ladder_length(&self) -> u32 {
        self.indices.len() as u32 - 1
    }
}

pub fn blocks(rep: &RepSpace, pair: PairIndex) -> Vec<Block> {
    let j1 = rep.j1();
    let idx = |j2, j3| rep.index_of_labels(j2, j3).expect("inside the triangle");
    (0..=j1)
        .map(|label| {
            let indices = match pair {
                PairIndex::One => (label..=j1).map(|j2| idx(j2, label)).collect(),
                PairIndex::Two => (0..=label).map(|j3| idx(label, j3)).collect(),
                PairIndex::Three => (0..=j1 - label).map(|j3| idx(label + j3, j3)).collect(),
            };
            Block { label, indices }
        })
        .collect()
}

/// Largest entry of `op` coupling two different blocks of `pair`.
pub fn block_leakage(rep: &RepSpace, pair: PairIndex, op: &Operator) -> f64 {
    let mut owner = vec![0u32; rep.dim()];
    for b in blocks(rep, pair) {
        for &i in &b.indices {
            owner[i] = b.label;
        }
    }
    let m = op.matrix();
    let mut worst = 0.0f64;
    for r in 0..rep.dim() {
        for c in 0..rep.dim() {
            if owner[r] != owner[c] {
                worst = worst.max(m[(r, c)].norm());
            }
        }
    }
    worst
}

/// Ladder coefficients `eps_k = <k-1| e_i |k>` for `k = 1..=L`.
fn ladder(rep: &RepSpace, pair: PairIndex, block: &Block) -> Vec<f64> {
    let e = generator(rep, pair.generators().0);
    block
        .indices
        .windows(2)
        .map(|w| {
            let z = e.matrix()[(w[0], w[1])];
            assert!(z.im == 0.0 && z.re > 0.0, "ladder coefficient {z} is not real positive");
            z.re
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct IntelligentState {
    /// Normalized, canonical phase.
    pub state: StateVector,
    pub pair: PairIndex,
    pub alpha: AlphaParam,
    pub lambda: C64,
    /// `lambda / sqrt(1 - alpha^2)`; absent for degenerate alpha.
    pub lambda_prime: Option<C64>,
    pub block: u32,
    /// Index of the eigenspace this state belongs to, in ascending `lambda'`.
    pub eigenspace: usize,
    /// Dimension of that eigenspace.
    pub multiplicity: usize,
}

impl IntelligentState {
    /// `||(A - lambda) v||` for the normalized state.
    pub fn residual(&self, rep: &RepSpace) -> f64 {
        let a = intelligent_operator(rep, self.pair, self.alpha);
        (a.matrix() * self.state.amplitudes() - self.state.amplitudes() * self.lambda).norm()
    }
}

#[derive(Debug, Clone)]
pub struct IntelligentSpectrum {
    pub pair: PairIndex,
    pub alpha: AlphaParam,
    /// Ordered by block label, then by `lambda'` within the block.
    pub states: Vec<IntelligentState>,
    /// Set for `alpha = +-1`: only kernel vectors are returned.
    pub nilpotent: bool,
    pub operator_norm: f64,
}

impl IntelligentSpectrum {
    /// Orthonormal basis of the eigenspace with index `k`.
    pub fn eigenspace(&self, k: usize) -> Vec<&StateVector> {
        self.states.iter().filter(|s| s.eigenspace == k).map(|s| &s.state).collect()
    }

    /// Eigenspace whose eigenvalue is within the merge tolerance of `lambda`.
    pub fn eigenspace_of(&self, lambda: C64) -> Option<usize> {
        let tol = MERGE_TOLERANCE * self.operator_norm.max(1.0);
        self.states.iter().find(|s| (s.lambda - lambda).norm() <= tol).map(|s| s.eigenspace)
    }
}

pub fn solve_intelligent(rep: &RepSpace, pair: PairIndex, alpha: AlphaParam) -> Result<IntelligentSpectrum> {
    let operator_norm = spectral_norm(intelligent_operator(rep, pair, alpha).matrix());
    let dim = rep.dim();
    let embed = |block: &Block, local: &[C64]| {
        let mut v = DVector::<C64>::zeros(dim);
        for (&i, &z) in block.indices.iter().zip(local) {
            v[i] = z;
        }
        v
    };
    // (block, lambda', vector)
    let mut raw: Vec<(u32, Option<f64>, DVector<C64>)> = Vec::new();
    let nilpotent = alpha.is_degenerate();
    for block in blocks(rep, pair) {
        let n = block.indices.len();
        if nilpotent {
            // 2 e_i kills the top of each chain, 2 f_i the bottom.
            let mut local = vec![C64::new(0.0, 0.0); n];
            local[if alpha.value().re > 0.0 { 0 } else { n - 1 }] = C64::new(1.0, 0.0);
            raw.push((block.label, None, embed(&block, &local)));
            continue;
        }
        let eps = ladder(rep, pair, &block);
        let tri = symmetric_tridiagonal_eigen(&vec![0.0; n], &eps)?;
        let r = alpha.ratio().expect("non-degenerate");
        for (c, &lp) in tri.values.iter().enumerate() {
            let mut scale = C64::new(1.0, 0.0);
            let local: Vec<C64> = (0..n)
                .map(|k| {
                    let z = scale * tri.vectors[(k, c)];
                    scale *= r;
                    z
                })
                .collect();
            raw.push((block.label, Some(lp), embed(&block, &local)));
        }
    }

    let s = alpha.sqrt_one_minus_sq();
    let lambda_of = |lp: Option<f64>| lp.map_or(C64::new(0.0, 0.0), |x| s * x);

    // Eigenspaces: cluster by lambda in ascending lambda' order, blocks ascending.
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (raw[a].1.unwrap_or(0.0), raw[b].1.unwrap_or(0.0));
        la.total_cmp(&lb).then(raw[a].0.cmp(&raw[b].0))
    });
    let tol = MERGE_TOLERANCE * operator_norm.max(1.0);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        let li = lambda_of(raw[i].1);
        match groups.iter_mut().find(|g| (lambda_of(raw[g[0]].1) - li).norm() <= tol) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }

    let mut states: Vec<IntelligentState> = Vec::with_capacity(raw.len());
    for (gid, g) in groups.iter().enumerate() {
        let vectors: Vec<DVector<C64>> = g.iter().map(|&i| raw[i].2.clone()).collect();
        let ortho = gram_schmidt(&vectors, 1e-12);
        if ortho.len() != vectors.len() {
            return Err(Error::Eigensolver(format!(
                "eigenspace {gid} lost {} vector(s) to linear dependence",
                vectors.len() - ortho.len()
            )));
        }
        for (&i, v) in g.iter().zip(ortho) {
            let (block, lp, _) = &raw[i];
            states.push(IntelligentState {
                state: StateVector::from_parts(rep.j1(), v).canonicalize_phase(),
                pair,
                alpha,
                lambda: lambda_of(*lp),
                lambda_prime: lp.map(|x| C64::new(x, 0.0)),
                block: *block,
                eigenspace: gid,
                multiplicity: g.len(),
            });
        }
    }
    states.sort_by(|a, b| {
        a.block
            .cmp(&b.block)
            .then(a.lambda_prime.map_or(0.0, |z| z.re).total_cmp(&b.lambda_prime.map_or(0.0, |z| z.re)))
    });
    Ok(IntelligentSpectrum { pair, alpha, states, nilpotent, operator_norm })
}

/// `sqrt(1 - alpha^2)` times the union of the block ladders `{-L, ..., L}`.
pub fn predicted_spectrum(rep: &RepSpace, pair: PairIndex, alpha: AlphaParam) -> Vec<C64> {
    let s = alpha.sqrt_one_minus_sq();
    let s = if alpha.is_degenerate() { C64::new(0.0, 0.0) } else { s };
    blocks(rep, pair)
        .iter()
        .flat_map(|b| {
            let l = b.ladder_length() as i64;
            (0..=l).map(move |k| s * (2 * k - l) as f64)
        })
        .collect()
}

/// Largest distance between the dense-solver eigenvalues of the intelligent
/// operator and the predicted ladder spectrum, matched greedily as multisets.
pub fn spectrum_deviation(rep: &RepSpace, pair: PairIndex, alpha: AlphaParam) -> Result<f64> {
    let dense = eigenvalues_general(intelligent_operator(rep, pair, alpha).matrix())?;
    Ok(multiset_distance(&dense, &predicted_spectrum(rep, pair, alpha)))
}

pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pool: Vec<C64> = b.to_vec();
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = pool
            .iter()
            .enumerate()
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        worst = worst.max(d);
        pool.swap_remove(k);
    }
    worst
}

/// Coefficients of `sum_i (a_i^+ e_i + a_i^- f_i) + a_1^0 h_1 + a_2^0 h_2`,
/// including the composite pair `e_3`, `f_3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeneralCoefficients {
    pub e1: C64,
    pub e2: C64,
    pub e3: C64,
    pub f1: C64,
    pub f2: C64,
    pub f3: C64,
    pub h1: C64,
    pub h2: C64,
}

impl GeneralCoefficients {
    pub fn terms(&self) -> [(GeneratorId, C64); 8] {
        [
            (GeneratorId::E1, self.e1),
            (GeneratorId::E2, self.e2),
            (GeneratorId::E3, self.e3),
            (GeneratorId::F1, self.f1),
            (GeneratorId::F2, self.f2),
            (GeneratorId::F3, self.f3),
            (GeneratorId::H1, self.h1),
            (GeneratorId::H2, self.h2),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.terms().iter().all(|(_, c)| *c == C64::new(0.0, 0.0))
    }

    pub fn operator(&self, rep: &RepSpace) -> Operator {
        let mut m = DMatrix::<C64>::zeros(rep.dim(), rep.dim());
        for (id, c) in self.terms() {
            if c != C64::new(0.0, 0.0) {
                m += generator(rep, id).matrix() * c;
            }
        }
        Operator::from_parts(rep.j1(), m, OpTag::Derived("general".into()))
    }
}

/// Parses `key=value` pairs separated by commas, e.g. `e1=1,f1=1,h2=0.5-2i`.
impl FromStr for GeneralCoefficients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Self::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got '{item}'")))?;
            let value: C64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse coefficient '{value}'")))?;
            let slot = match key.trim() {
                "e1" => &mut out.e1,
                "e2" => &mut out.e2,
                "e3" => &mut out.e3,
                "f1" => &mut out.f1,
                "f2" => &mut out.f2,
                "f3" => &mut out.f3,
                "h1" => &mut out.h1,
                "h2" => &mut out.h2,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown generator '{other}' (expected e1, e2, e3, f1, f2, f3, h1, h2)"
                    )))
                }
            };
            *slot += value;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct GeneralEigenspace {
    pub value: C64,
    /// Computed eigenvalues merged into this one.
    pub algebraic: usize,
    pub vectors: Vec<StateVector>,
}

#[derive(Debug, Clone)]
pub struct GeneralSpectrum {
    pub eigenspaces: Vec<GeneralEigenspace>,
    /// Fewer eigenvectors than the dimension: the combination has Jordan blocks.
    pub defective: bool,
    pub operator_norm: f64,
}

pub fn general_algebra_eigenstates(rep: &RepSpace, coeffs: &GeneralCoefficients) -> Result<GeneralSpectrum> {
    if coeffs.is_zero() {
        return Err(Error::InvalidArgument("at least one coefficient must be nonzero".into()));
    }
    let m = coeffs.operator(rep).into_matrix();
    let norm = spectral_norm(&m);
    let eig = eigen_general(&m, MERGE_TOLERANCE * norm.max(1.0), 1e-8 * norm.max(1.0))?;
    let eigenspaces = eig
        .clusters
        .into_iter()
        .map(|c| GeneralEigenspace {
            value: c.value,
            algebraic: c.algebraic,
            vectors: c.basis.into_iter().map(|v| StateVector::from_parts(rep.j1(), v).canonicalize_phase()).collect(),
        })
        .collect();
    Ok(GeneralSpectrum { eigenspaces, defective: eig.defective, operator_norm: norm })
}
