//! Small dense linear-algebra kernels.

use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::C64;

pub fn max_abs<R: Dim, C: Dim, S: RawStorage<C64, R, C>>(m: &Matrix<C64, R, C, S>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(x)` for anti-Hermitian `x`, through the eigendecomposition of the
/// Hermitian matrix `i x`. The result is unitary to roundoff.
pub fn expm_anti_hermitian(x: &DMatrix<C64>) -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    let h = x * i;
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -l)));
    v * phases * v.adjoint()
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, aligned with `values`.
    pub vectors: DMatrix<f64>,
}

/// Implicit QL iteration with Wilkinson shifts.
///
/// `diag` has length `n`, `off` has length `n - 1` (`off[i]` couples rows
/// `i` and `i + 1`).
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagonalEigen { values: vec![], vectors: DMatrix::zeros(0, 0) });
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch { left: n - 1, right: off.len() });
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut z = DMatrix::<f64>::identity(n, n);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Eigensolver(format!("QL iteration did not converge at row {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| z[(r, order[c])]);
    Ok(TridiagonalEigen { values, vectors })
}

/// Orthonormal basis of the numerical null space: right singular vectors
/// whose singular value is at most `tol`.
pub fn null_space(m: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    let n = m.ncols();
    if n == 0 {
        return vec![];
    }
    // Pad to square so every right singular vector is produced.
    let padded = if m.nrows() < n {
        let mut p = DMatrix::<C64>::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= tol).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    idx.iter().map(|&i| v_t.row(i).adjoint()).collect()
}

/// Modified Gram-Schmidt in the given order; vectors whose residual norm
/// falls below `drop_tol` are discarded.
pub fn gram_schmidt(vectors: &[DVector<C64>], drop_tol: f64) -> Vec<DVector<C64>> {
    let mut out: Vec<DVector<C64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for q in &out {
            let c = q.dotc(&w);
            w -= q * c;
        }
        let nrm = w.norm();
        if nrm > drop_tol {
            out.push(w / C64::new(nrm, 0.0));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct EigenCluster {
    pub value: C64,
    /// Number of computed eigenvalues merged into this cluster.
    pub algebraic: usize,
    /// Orthonormal eigenvectors spanning the computed eigenspace.
    pub basis: Vec<DVector<C64>>,
}

#[derive(Debug, Clone)]
pub struct GeneralEigen {
    pub clusters: Vec<EigenCluster>,
    /// True when the eigenvectors found do not span the whole space.
    pub defective: bool,
}

impl GeneralEigen {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.clusters.iter().flat_map(|c| std::iter::repeat_n(c.value, c.algebraic)).collect()
    }
}

/// Complex Schur eigenvalues of a general square matrix.
///
/// Exactly triangular input is read off its diagonal, as a deflating QR
/// sweep would; the Hessenberg reduction would otherwise perturb a
/// nilpotent matrix into eigenvalues of size `eps^(1/n)`.
pub fn eigenvalues_general(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { left: m.nrows(), right: m.ncols() });
    }
    if m.nrows() == 0 {
        return Ok(vec![]);
    }
    let mut values = Vec::with_capacity(m.nrows());
    for comp in coupled_components(m) {
        let sub = DMatrix::from_fn(comp.len(), comp.len(), |r, c| m[(comp[r], comp[c])]);
        values.extend(component_eigenvalues(&sub)?);
    }
    Ok(values)
}

/// Index sets of the connected components of the symmetrized nonzero pattern.
/// Permuting to these blocks is an exact similarity.
fn coupled_components(m: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut label = vec![usize::MAX; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        label[start] = id;
        let mut head = 0;
        while head < members.len() {
            let i = members[head];
            head += 1;
            for j in 0..n {
                if label[j] == usize::MAX && (m[(i, j)] != C64::new(0.0, 0.0) || m[(j, i)] != C64::new(0.0, 0.0)) {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

fn component_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    let n = m.nrows();
    let upper = (0..n).all(|r| (0..r).all(|c| m[(r, c)] == zero));
    let lower = (0..n).all(|r| (r + 1..n).all(|c| m[(r, c)] == zero));
    if upper || lower {
        return Ok(m.diagonal().iter().copied().collect());
    }
    // Deflation is relative to neighbouring diagonal entries, so clustered
    // zero eigenvalues can stall it; a scalar shift restores a scale.
    let scale = spectral_norm(m).max(f64::MIN_POSITIVE);
    for shift in [zero, C64::new(scale, 0.0), C64::new(0.5 * scale, 0.5 * scale)] {
        let shifted = m + DMatrix::<C64>::identity(n, n) * shift;
        if let Some(schur) = Schur::try_new(shifted, f64::EPSILON, 2_000) {
            let (_, t) = schur.unpack();
            return Ok(t.diagonal().iter().map(|z| z - shift).collect());
        }
    }
    Err(Error::Eigensolver("Schur iteration did not converge".into()))
}

/// Eigenvalues with eigenspace bases for a general complex matrix.
///
/// Eigenvalues within `cluster_tol` of each other are merged; each cluster's
/// eigenspace is the numerical null space of `m - value` at threshold
/// `null_tol`. Eigenvectors that are numerically dependent on vectors of an
/// earlier cluster (the signature of a Jordan block split by roundoff) fold
/// that cluster into the earlier one.
pub fn eigen_general(m: &DMatrix<C64>, cluster_tol: f64, null_tol: f64) -> Result<GeneralEigen> {
    let n = m.nrows();
    let mut values = eigenvalues_general(m)?;
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let mut groups: Vec<Vec<C64>> = Vec::new();
    for v in values {
        match groups.iter_mut().find(|g| g.iter().any(|w| (w - v).norm() <= cluster_tol)) {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }

    let mut clusters: Vec<EigenCluster> = Vec::new();
    let mut accepted: Vec<DVector<C64>> = Vec::new();
    for g in groups {
        let value = g.iter().sum::<C64>() / C64::new(g.len() as f64, 0.0);
        let shifted = m - DMatrix::<C64>::identity(n, n) * value;
        let mut basis = null_space(&shifted, null_tol);
        basis.truncate(g.len());

        let mut fresh = Vec::new();
        let mut absorbed_by: Option<usize> = None;
        for v in basis {
            let mut w = v.clone();
            for q in &accepted {
                let c = q.dotc(&w);
                w -= q * c;
            }
            if w.norm() > 1e-6 {
                accepted.push(&w / C64::new(w.norm(), 0.0));
                fresh.push(v);
            } else if absorbed_by.is_none() {
                absorbed_by = clusters
                    .iter()
                    .enumerate()
                    .max_by(|(_, a), (_, b)| overlap(a, &v).total_cmp(&overlap(b, &v)))
                    .map(|(i, _)| i);
            }
        }
        match absorbed_by {
            Some(i) => {
                let target = &mut clusters[i];
                let total = target.algebraic + g.len();
                target.value = (target.value * C64::new(target.algebraic as f64, 0.0)
                    + value * C64::new(g.len() as f64, 0.0))
                    / C64::new(total as f64, 0.0);
                target.algebraic = total;
                target.basis.extend(fresh);
                target.basis = gram_schmidt(&target.basis, 1e-10);
            }
            None => clusters.push(EigenCluster { value, algebraic: g.len(), basis: gram_schmidt(&fresh, 1e-10) }),
        }
    }
    let found: usize = clusters.iter().map(|c| c.basis.len()).sum();
    Ok(GeneralEigen { clusters, defective: found < n })
}

fn overlap(c: &EigenCluster, v: &DVector<C64>) -> f64 {
    c.basis.iter().map(|q| q.dotc(v).norm()).sum()
}
