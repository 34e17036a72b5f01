//! Dense complex matrices and the handful of kernels the rest of the crate needs.
//!
//! Basis convention used everywhere: for `n` qubits, the basis state
//! `|b_0 b_1 ... b_{n-1}>` (qubit 0 leftmost) has index `sum_i b_i * 2^(n-1-i)`,
//! so qubit 0 is the most significant bit.

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Max entrywise deviation from Hermiticity accepted by the Hermitian kernels.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything lower is an error.
pub const PSD_TOL: f64 = 1e-10;
/// Cyclic Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the full Frobenius norm.
pub const JACOBI_OFF_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues at or below this multiple of `eps * max|lambda|` are treated as
/// exact zeros before taking square roots (Jacobi round-off otherwise shows up
/// as `sqrt(1e-17) ~ 3e-9` contributions).
const SQRT_FLOOR_ULPS: f64 = 64.0;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major data. Fails if the length is not a square.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch(dim * dim, data.len()));
        }
        Ok(CMatrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(dim, row.len()));
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(dim, data)
    }

    /// `|psi><psi|` for a (not necessarily normalized) vector.
    pub fn outer(psi: &[C64]) -> Self {
        let dim = psi.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn qubits(&self) -> Option<usize> {
        self.dim.is_power_of_two().then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        CMatrix { dim: n, data: out }
    }

    /// `self * rhs - rhs * self`
    pub fn commutator(&self, rhs: &CMatrix) -> CMatrix {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The diagonal as reals, if every other entry is exactly zero.
    pub fn real_diagonal(&self) -> Option<Vec<f64>> {
        let n = self.dim;
        let mut diag = Vec::with_capacity(n);
        for (i, row) in self.data.chunks_exact(n).enumerate() {
            if row[i].im != 0.0 || row[..i].iter().chain(&row[i + 1..]).any(|z| *z != ZERO) {
                return None;
            }
            diag.push(row[i].re);
        }
        Some(diag)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max entrywise `|m_ij - conj(m_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm_sqr());
            }
        }
        worst.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    fn require_hermitian(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let r = self.hermiticity_residual();
        if r > HERMITIAN_TOL {
            return Err(Error::NotHermitian(r));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Eigenvalues (ascending) and the unitary whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigDecomposition {
    /// Column `r` of the eigenvector matrix.
    pub fn vector(&self, r: usize) -> Vec<C64> {
        let n = self.eigenvectors.dim();
        (0..n).map(|i| self.eigenvectors[(i, r)]).collect()
    }

    /// `V f(diag(lambda)) V^dagger`
    pub fn reconstruct_with<F: Fn(f64) -> C64>(&self, f: F) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        // (V diag(w)) V^dagger; matmul skips the zeros this leaves behind
        let mut scaled = v.clone();
        for i in 0..n {
            for (r, w) in weights.iter().enumerate() {
                scaled[(i, r)] *= w;
            }
        }
        scaled.matmul(&v.adjoint())
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|l| C64::new(l, 0.0))
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Sweeps run over `(p, q)` pairs in row order, so the output is a
/// deterministic function of the input.
pub fn hermitian_eig(m: &CMatrix) -> Result<EigDecomposition> {
    m.require_hermitian()?;
    let n = m.dim();
    let mut a = m.clone();
    // symmetrize so round-off in the input does not leak into the rotations
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }

    // Rotations never couple indices in different connected components of the
    // nonzero pattern, so each component is diagonalized on its own.
    let mut values = vec![0.0; n];
    let mut v = CMatrix::zeros(n);
    let blocks = coupled_blocks(&a);
    if blocks.len() == 1 {
        let (d, w) = jacobi(a);
        values = d;
        v = w;
    } else {
        for idx in &blocks {
            if let [i] = idx[..] {
                values[i] = a[(i, i)].re;
                v[(i, i)] = ONE;
                continue;
            }
            let mut sub = CMatrix::zeros(idx.len());
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    sub[(r, c)] = a[(i, j)];
                }
            }
            let (d, w) = jacobi(sub);
            for (c, &col) in idx.iter().enumerate() {
                values[col] = d[c];
                for (r, &row) in idx.iter().enumerate() {
                    v[(row, col)] = w[(r, c)];
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = values.iter().copied().zip(0..n).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut vectors = CMatrix::zeros(n);
    for (col, &(_, src)) in pairs.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = v[(i, src)];
        }
    }
    Ok(EigDecomposition {
        eigenvalues: pairs.into_iter().map(|(l, _)| l).collect(),
        eigenvectors: vectors,
    })
}

/// Index sets of the connected components of the graph with an edge wherever
/// `a[i][j] != 0`, each sorted, ordered by smallest member.
fn coupled_blocks(a: &CMatrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    let mut label = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for root in 0..n {
        if label[root] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        label[root] = id;
        let mut members = vec![root];
        let mut next = 0;
        while next < members.len() {
            let i = members[next];
            next += 1;
            for j in 0..n {
                if label[j] == usize::MAX && a[(i, j)] != ZERO {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// Diagonal (unsorted) and accumulated rotations of a symmetrized matrix.
fn jacobi(mut a: CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.dim();
    let mut v = CMatrix::identity(n);

    let scale = a.frobenius_norm();
    let mut polished = false;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= JACOBI_OFF_TOL * scale || off == 0.0 {
            // one extra sweep takes the quadratic tail down to round-off
            if polished || off == 0.0 {
                break;
            }
            polished = true;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == ZERO {
                    continue;
                }
                let g = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if sweep > 3 && app.abs() + 100.0 * g == app.abs() && aqq.abs() + 100.0 * g == aqq.abs() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, g);
            }
        }
    }

    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with `G = diag(1, conj(e)) * R(theta)` acting on the `(p, q)` plane.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, apq: C64, g: f64) {
    let n = a.dim();
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();

    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * pc * s;
        a[(k, q)] = akp * s + akq * pc * c;
    }
    // A <- G^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * g, 0.0);
    a[(q, q)] = C64::new(aqq + t * g, 0.0);
    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * pc * s;
        v[(k, q)] = vkp * s + vkq * pc * c;
    }
}

pub(crate) fn sqrt_floor(eigenvalues: &[f64]) -> f64 {
    let top = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    SQRT_FLOOR_ULPS * f64::EPSILON * top
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPsd(min));
    }
    let floor = sqrt_floor(&eig.eigenvalues);
    Ok(eig.reconstruct_with(|l| if l <= floor { ZERO } else { C64::new(l.sqrt(), 0.0) }))
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.is_hermitian(HERMITIAN_TOL) {
        let eig = hermitian_eig(m)?;
        return Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum());
    }
    let gram = m.adjoint().matmul(m);
    let eig = hermitian_eig(&gram)?;
    let floor = sqrt_floor(&eig.eigenvalues);
    Ok(eig.eigenvalues.iter().filter(|&&l| l > floor).map(|l| l.sqrt()).sum())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = CMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Offsets into the full basis index for every assignment of the given qubits,
/// enumerated with the first listed qubit as the most significant bit.
fn basis_offsets(qubits: &[usize], n: usize) -> Vec<usize> {
    let m = qubits.len();
    (0..1usize << m)
        .map(|local| {
            qubits.iter().enumerate().fold(0usize, |acc, (j, &q)| {
                if local >> (m - 1 - j) & 1 == 1 {
                    acc | 1 << (n - 1 - q)
                } else {
                    acc
                }
            })
        })
        .collect()
}

fn qubit_count(m: &CMatrix) -> Result<usize> {
    m.qubits()
        .ok_or_else(|| Error::InvalidState(format!("dimension {} is not a power of two", m.dim())))
}

/// Reduced matrix on the qubits in `keep`, ordered by ascending qubit index.
pub fn partial_trace(rho: &CMatrix, keep: SubsetMask) -> Result<CMatrix> {
    let n = qubit_count(rho)?;
    if keep.is_empty() {
        return Err(Error::EmptySubset);
    }
    if !keep.is_subset_of(SubsetMask::full(n)) {
        let index = keep.qubits().max().unwrap_or(0);
        return Err(Error::QubitOutOfRange { index, n });
    }
    let kept: Vec<usize> = keep.qubits().collect();
    let traced: Vec<usize> = SubsetMask::full(n).without(keep).qubits().collect();
    let kept_off = basis_offsets(&kept, n);
    let traced_off = basis_offsets(&traced, n);
    let dk = kept_off.len();
    let d = rho.dim();
    let mut out = vec![ZERO; dk * dk];
    // kept and traced bits are disjoint, so ro | t == ro + t
    for &t in &traced_off {
        for (r, &ro) in kept_off.iter().enumerate() {
            let src = &rho.data[(ro + t) * d + t..];
            let dst = &mut out[r * dk..(r + 1) * dk];
            for (o, &co) in dst.iter_mut().zip(&kept_off) {
                *o += src[co];
            }
        }
    }
    let out = CMatrix { dim: dk, data: out };
    Ok(out)
}

/// `e^{-i h t}`
pub fn propagator(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.reconstruct_with(|l| C64::from_polar(1.0, -l * t)))
}

fn check_targets(targets: &[usize], n: usize, op_dim: usize) -> Result<()> {
    for (i, &q) in targets.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        if targets[..i].contains(&q) {
            return Err(Error::InvalidPartition(format!("qubit {q} targeted twice")));
        }
    }
    if op_dim != 1 << targets.len() {
        return Err(Error::DimensionMismatch(1 << targets.len(), op_dim));
    }
    Ok(())
}

/// `(op on targets) * m`, without materializing the embedded operator.
fn apply_left(op: &CMatrix, targets: &[usize], m: &CMatrix, n: usize) -> CMatrix {
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let target_off = basis_offsets(targets, n);
    let rest_off = basis_offsets(&rest, n);
    let k = target_off.len();
    let dim = m.dim();
    let mut out = CMatrix::zeros(dim);
    let mut gathered = vec![ZERO; k];
    for col in 0..dim {
        for &base in &rest_off {
            for (x, &o) in target_off.iter().enumerate() {
                gathered[x] = m[(base | o, col)];
            }
            for (y, &o) in target_off.iter().enumerate() {
                let mut acc = ZERO;
                for (x, g) in gathered.iter().enumerate() {
                    acc += op[(y, x)] * g;
                }
                out[(base | o, col)] = acc;
            }
        }
    }
    out
}

/// `O rho O^dagger` with `O` acting on `targets` (first target = most significant).
pub fn conjugate_local(rho: &CMatrix, op: &CMatrix, targets: &[usize]) -> Result<CMatrix> {
    let n = qubit_count(rho)?;
    check_targets(targets, n, op.dim())?;
    let left = apply_left(op, targets, rho, n);
    // (O (O rho)^dagger)^dagger = (O rho) O^dagger
    Ok(apply_left(op, targets, &left.adjoint(), n).adjoint())
}

/// Full `2^n`-dimensional matrix of `op` acting on `targets`.
pub fn embed_operator(op: &CMatrix, targets: &[usize], n: usize) -> Result<CMatrix> {
    check_targets(targets, n, op.dim())?;
    Ok(apply_left(op, targets, &CMatrix::identity(1 << n), n))
}

/// Applies the single-qubit channel `rho -> sum_k K rho K^dagger` on `target`.
pub fn apply_kraus(rho: &CMatrix, kraus: &[CMatrix], target: usize) -> Result<CMatrix> {
    let n = qubit_count(rho)?;
    if target >= n {
        return Err(Error::QubitOutOfRange { index: target, n });
    }
    let mut completeness = CMatrix::zeros(2);
    for k in kraus {
        if k.dim() != 2 {
            return Err(Error::DimensionMismatch(2, k.dim()));
        }
        completeness = &completeness + &k.adjoint().matmul(k);
    }
    let deviation = completeness.max_abs_diff(&CMatrix::identity(2));
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotTracePreserving(deviation));
    }
    let mut out = CMatrix::zeros(rho.dim());
    for k in kraus {
        out = &out + &conjugate_local(rho, k, &[target])?;
    }
    Ok(out)
}
