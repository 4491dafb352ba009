//! Symmetric su(3) representations on three bosonic modes.
//!
//! The space with `j1` total quanta is spanned by `|n1, n2, n3>` with
//! `n1 + n2 + n3 = j1`. Basis vectors are labelled by `(j2, j3)` through
//! `n1 = j1 - j2`, `n2 = j2 - j3`, `n3 = j3`, and ordered lexicographically
//! in `(j2, j3)`. The highest-weight vector `|j1, 0, 0>` therefore sits at
//! index 0, and every raising generator `e_i` is strictly upper triangular.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::state::StateVector;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BasisState {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
}

impl BasisState {
    pub fn from_labels(j1: u32, j2: u32, j3: u32) -> Self {
        debug_assert!(j3 <= j2 && j2 <= j1);
        Self { n1: j1 - j2, n2: j2 - j3, n3: j3 }
    }

    pub fn j1(&self) -> u32 {
        self.n1 + self.n2 + self.n3
    }

    pub fn j2(&self) -> u32 {
        self.n2 + self.n3
    }

    pub fn j3(&self) -> u32 {
        self.n3
    }

    pub fn occupation(&self, mode: usize) -> u32 {
        match mode {
            0 => self.n1,
            1 => self.n2,
            2 => self.n3,
            _ => panic!("mode index {mode} out of range"),
        }
    }

    fn with_occupation(mut self, mode: usize, n: u32) -> Self {
        match mode {
            0 => self.n1 = n,
            1 => self.n2 = n,
            2 => self.n3 = n,
            _ => panic!("mode index {mode} out of range"),
        }
        self
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{},{}>", self.n1, self.n2, self.n3)
    }
}

/// Restricted three-mode Fock space at fixed total quanta.
#[derive(Debug, Clone)]
pub struct RepSpace {
    j1: u32,
    basis: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl PartialEq for RepSpace {
    fn eq(&self, other: &Self) -> bool {
        self.j1 == other.j1
    }
}

impl RepSpace {
    pub fn new(j1: u32) -> Self {
        let mut basis = Vec::with_capacity(Self::dim_for(j1));
        for j2 in 0..=j1 {
            for j3 in 0..=j2 {
                basis.push(BasisState::from_labels(j1, j2, j3));
            }
        }
        let index = basis.iter().enumerate().map(|(i, b)| (*b, i)).collect();
        Self { j1, basis, index }
    }

    pub fn dim_for(j1: u32) -> usize {
        let j = j1 as usize;
        (j + 1) * (j + 2) / 2
    }

    pub fn j1(&self) -> u32 {
        self.j1
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn state(&self, idx: usize) -> BasisState {
        self.basis[idx]
    }

    pub fn index_of(&self, b: &BasisState) -> Option<usize> {
        self.index.get(b).copied()
    }

    /// Position of the label pair `(j2, j3)`; `None` outside the triangle.
    pub fn index_of_labels(&self, j2: u32, j3: u32) -> Option<usize> {
        if j3 > j2 || j2 > self.j1 {
            return None;
        }
        Some((j2 as usize) * (j2 as usize + 1) / 2 + j3 as usize)
    }

    pub fn labels(&self, idx: usize) -> (u32, u32) {
        let b = self.basis[idx];
        (b.j2(), b.j3())
    }

    pub fn highest_weight(&self) -> StateVector {
        StateVector::basis(self, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorId {
    E1,
    E2,
    E3,
    F1,
    F2,
    F3,
    H1,
    H2,
    H3,
}

impl GeneratorId {
    pub const ALL: [GeneratorId; 9] = [
        GeneratorId::E1,
        GeneratorId::E2,
        GeneratorId::E3,
        GeneratorId::F1,
        GeneratorId::F2,
        GeneratorId::F3,
        GeneratorId::H1,
        GeneratorId::H2,
        GeneratorId::H3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorId::E1 => "e1",
            GeneratorId::E2 => "e2",
            GeneratorId::E3 => "e3",
            GeneratorId::F1 => "f1",
            GeneratorId::F2 => "f2",
            GeneratorId::F3 => "f3",
            GeneratorId::H1 => "h1",
            GeneratorId::H2 => "h2",
            GeneratorId::H3 => "h3",
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorId::ALL
            .iter()
            .copied()
            .find(|g| g.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown generator '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpTag {
    Generator(GeneratorId),
    Derived(String),
}

/// A dense complex matrix acting on a [`RepSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    j1: u32,
    matrix: DMatrix<C64>,
    tag: OpTag,
}

impl Operator {
    pub fn new(rep: &RepSpace, matrix: DMatrix<C64>, tag: OpTag) -> Result<Self> {
        if matrix.nrows() != rep.dim() || matrix.ncols() != rep.dim() {
            return Err(Error::DimensionMismatch { left: rep.dim(), right: matrix.nrows() });
        }
        Ok(Self { j1: rep.j1(), matrix, tag })
    }

    pub(crate) fn from_parts(j1: u32, matrix: DMatrix<C64>, tag: OpTag) -> Self {
        Self { j1, matrix, tag }
    }

    pub fn identity(rep: &RepSpace) -> Self {
        Self::from_parts(rep.j1(), DMatrix::identity(rep.dim(), rep.dim()), OpTag::Derived("1".into()))
    }

    pub fn j1(&self) -> u32 {
        self.j1
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn tag(&self) -> &OpTag {
        &self.tag
    }

    pub fn with_tag(mut self, tag: OpTag) -> Self {
        self.tag = tag;
        self
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.j1 != other.j1 {
            return Err(Error::RepMismatch { left: self.j1, right: other.j1 });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Operator {
        Self::from_parts(self.j1, self.matrix.adjoint(), OpTag::Derived(format!("({})^+", self.label())))
    }

    pub fn label(&self) -> String {
        match &self.tag {
            OpTag::Generator(g) => g.to_string(),
            OpTag::Derived(s) => s.clone(),
        }
    }

    pub fn scale(&self, c: C64) -> Operator {
        Self::from_parts(self.j1, &self.matrix * c, OpTag::Derived(format!("{c}*{}", self.label())))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Self::from_parts(
            self.j1,
            &self.matrix + &other.matrix,
            OpTag::Derived(format!("{}+{}", self.label(), other.label())),
        ))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Self::from_parts(
            self.j1,
            &self.matrix - &other.matrix,
            OpTag::Derived(format!("{}-{}", self.label(), other.label())),
        ))
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Self::from_parts(
            self.j1,
            &self.matrix * &other.matrix,
            OpTag::Derived(format!("{}*{}", self.label(), other.label())),
        ))
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.j1() != self.j1 {
            return Err(Error::RepMismatch { left: self.j1, right: v.j1() });
        }
        Ok(StateVector::from_parts(self.j1, &self.matrix * v.amplitudes()))
    }

    /// Max-abs distance between two operators on the same space.
    pub fn distance(&self, other: &Operator) -> Result<f64> {
        self.check_same(other)?;
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }

    /// Largest singular value estimate via the Frobenius norm (upper bound).
    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }
}

/// `a_create^+ a_annihilate^-` restricted to the representation. With
/// `create == annihilate` this is the number operator of that mode.
pub fn mode_bilinear(rep: &RepSpace, create: usize, annihilate: usize) -> Operator {
    let dim = rep.dim();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for (col, b) in rep.basis().iter().enumerate() {
        if create == annihilate {
            m[(col, col)] = C64::new(b.occupation(create) as f64, 0.0);
            continue;
        }
        let nl = b.occupation(annihilate);
        if nl == 0 {
            continue;
        }
        let nk = b.occupation(create);
        let target = b.with_occupation(annihilate, nl - 1).with_occupation(create, nk + 1);
        let row = rep.index_of(&target).expect("bilinear stays in the total-quanta sector");
        m[(row, col)] = C64::new((((nk + 1) * nl) as f64).sqrt(), 0.0);
    }
    let name =
        if create == annihilate { format!("N{}", create + 1) } else { format!("a{}+a{}-", create + 1, annihilate + 1) };
    Operator::from_parts(rep.j1(), m, OpTag::Derived(name))
}

pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.check_same(b)?;
    let m = &a.matrix * &b.matrix - &b.matrix * &a.matrix;
    Ok(Operator::from_parts(a.j1, m, OpTag::Derived(format!("[{},{}]", a.label(), b.label()))))
}

/// Generator matrix. `e3`, `f3` and `h3` are built as commutators of the
/// elementary generators: `e3 = [e1, e2]`, `f3 = [f2, f1]`, `h3 = [e3, f3]`.
pub fn generator(rep: &RepSpace, id: GeneratorId) -> Operator {
    let tagged = |op: Operator| op.with_tag(OpTag::Generator(id));
    let diff = |a: Operator, b: Operator| a.sub(&b).expect("same space");
    let comm = |a: Operator, b: Operator| commutator(&a, &b).expect("same space");
    tagged(match id {
        GeneratorId::E1 => mode_bilinear(rep, 0, 1),
        GeneratorId::F1 => mode_bilinear(rep, 1, 0),
        GeneratorId::E2 => mode_bilinear(rep, 1, 2),
        GeneratorId::F2 => mode_bilinear(rep, 2, 1),
        GeneratorId::H1 => diff(mode_bilinear(rep, 0, 0), mode_bilinear(rep, 1, 1)),
        GeneratorId::H2 => diff(mode_bilinear(rep, 1, 1), mode_bilinear(rep, 2, 2)),
        GeneratorId::E3 => comm(generator(rep, GeneratorId::E1), generator(rep, GeneratorId::E2)),
        GeneratorId::F3 => comm(generator(rep, GeneratorId::F2), generator(rep, GeneratorId::F1)),
        GeneratorId::H3 => comm(generator(rep, GeneratorId::E3), generator(rep, GeneratorId::F3)),
    })
}

/// Cartan matrix of su(3).
pub const CARTAN: [[f64; 2]; 2] = [[2.0, -1.0], [-1.0, 2.0]];

#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub relation: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub j1: u32,
    pub dim: usize,
    pub residuals: Vec<Residual>,
}

impl StructureReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Max-abs residuals of the defining relations (Chevalley, Cartan, Serre)
/// evaluated on any family of nine operators indexed like [`GeneratorId::ALL`].
pub(crate) fn structure_residuals(ops: &HashMap<GeneratorId, DMatrix<C64>>) -> Vec<Residual> {
    use GeneratorId::*;
    let g = |id: GeneratorId| &ops[&id];
    let comm = |a: &DMatrix<C64>, b: &DMatrix<C64>| a * b - b * a;
    let e = [g(E1), g(E2)];
    let f = [g(F1), g(F2)];
    let h = [g(H1), g(H2)];
    let dim = e[0].nrows();
    let zero = DMatrix::<C64>::zeros(dim, dim);
    let mut out = Vec::new();
    let mut push = |relation: String, m: DMatrix<C64>| out.push(Residual { relation, residual: max_abs(&m) });

    #[allow(clippy::needless_range_loop)]
    for i in 0..2 {
        for j in 0..2 {
            let target = if i == j { h[j].clone() } else { zero.clone() };
            push(format!("[e{},f{}] = d_ij h{}", i + 1, j + 1, j + 1), comm(e[i], f[j]) - target);
        }
    }
    for i in 0..2 {
        for j in 0..2 {
            let a = C64::new(CARTAN[i][j], 0.0);
            push(format!("[h{},e{}] = a_ij e{}", i + 1, j + 1, j + 1), comm(h[i], e[j]) - e[j] * a);
            push(format!("[h{},f{}] = -a_ij f{}", i + 1, j + 1, j + 1), comm(h[i], f[j]) + f[j] * a);
        }
    }
    // No index pair with |i - j| > 1 exists in rank 2.
    push("[e_i,e_j] = 0 for |i-j| > 1 (vacuous in rank 2)".into(), DMatrix::zeros(0, 0));
    push("[h1,h2] = 0".into(), comm(h[0], h[1]));
    let two = C64::new(2.0, 0.0);
    for (i, k) in [(0usize, 1usize), (1, 0)] {
        let serre_e = e[i] * e[i] * e[k] - e[i] * e[k] * e[i] * two + e[k] * e[i] * e[i];
        push(format!("serre e{0}^2 e{1}", i + 1, k + 1), serre_e);
        let serre_f = f[i] * f[i] * f[k] - f[i] * f[k] * f[i] * two + f[k] * f[i] * f[i];
        push(format!("serre f{0}^2 f{1}", i + 1, k + 1), serre_f);
    }
    push("[e1,e2] = e3".into(), comm(e[0], e[1]) - g(E3));
    push("[f2,f1] = f3".into(), comm(f[1], f[0]) - g(F3));
    push("[e3,f3] = h1 + h2".into(), comm(g(E3), g(F3)) - h[0] - h[1]);
    push("h3 = h1 + h2".into(), g(H3) - h[0] - h[1]);
    out
}

pub fn check_structure(rep: &RepSpace) -> StructureReport {
    let ops: HashMap<_, _> = GeneratorId::ALL.iter().map(|&id| (id, generator(rep, id).into_matrix())).collect();
    let mut residuals = structure_residuals(&ops);
    // Cross-check the commutator-built Weyl elements against direct bilinears.
    let e3 = mode_bilinear(rep, 0, 2).into_matrix();
    let f3 = mode_bilinear(rep, 2, 0).into_matrix();
    residuals.push(Residual { relation: "e3 = a1+ a3-".into(), residual: max_abs(&(&ops[&GeneratorId::E3] - e3)) });
    residuals.push(Residual { relation: "f3 = a1- a3+".into(), residual: max_abs(&(&ops[&GeneratorId::F3] - f3)) });
    StructureReport { j1: rep.j1(), dim: rep.dim(), residuals }
}
