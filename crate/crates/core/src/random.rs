//! Seeded random states, unitaries, channels and circuits for property tests,
//! Monte-Carlo audits and benchmarks.

use crate::linalg::{self, CMatrix, C64};
use crate::resource::{Circuit, GateSpec};
use crate::states::DensityMatrix;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut g = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = gaussian(rng);
        }
    }
    g
}

/// Hermitian matrix with Gaussian entries (GUE-like, unit scale).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Full-rank random state on `n` qubits: a Wishart draw mixed with 10% of the
/// maximally mixed state, so every eigenvalue is at least `0.1 / 2^n`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1usize << n;
    let g = ginibre(dim, rng);
    let w = g.matmul(&g.adjoint());
    let w = w.scale_real(0.9 / w.trace().re);
    let id = CMatrix::identity(dim).scale_real(0.1 / dim as f64);
    DensityMatrix::from_trusted(&w + &id)
}

/// Random pure state on `n` qubits.
pub fn random_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1usize << n;
    let mut psi: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut psi {
        *z /= norm;
    }
    DensityMatrix::from_trusted(CMatrix::outer(&psi))
}

/// Columns of `g` orthonormalized left to right (modified Gram-Schmidt).
fn orthonormal_columns(g: &CMatrix, rows: usize, cols: usize) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v: Vec<C64> = (0..rows).map(|i| g[(i, j)]).collect();
        for u in &out {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        out.push(v);
    }
    out
}

/// Haar-random unitary.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let cols = orthonormal_columns(&ginibre(dim, rng), dim, dim);
    let mut u = CMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Random single-qubit channel with two to four Kraus operators, cut from a
/// random isometry `C^2 -> C^{2r}`.
pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R) -> Vec<CMatrix> {
    let r = rng.random_range(2..=4usize);
    let rows = 2 * r;
    let g = ginibre(rows, rng);
    let cols = orthonormal_columns(&g, rows, 2);
    (0..r)
        .map(|block| {
            let mut k = CMatrix::zeros(2);
            for (j, col) in cols.iter().enumerate() {
                for i in 0..2 {
                    k[(i, j)] = col[2 * block + i];
                }
            }
            k
        })
        .collect()
}

/// Circuit of `gates` random gates on `n` qubits, each acting on one or two
/// distinct qubits with a Gaussian Hermitian generator and duration in `(0, pi]`.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, gates: usize, rng: &mut R) -> Circuit {
    let specs = (0..gates)
        .map(|_| {
            let k = if n >= 2 { rng.random_range(1..=2usize) } else { 1 };
            let targets = sample(rng, n, k).into_vec();
            let hamiltonian = random_hermitian(1 << k, rng);
            // (0, pi]: reflect the half-open [0, pi) draw
            let duration = PI - rng.random_range(0.0..PI);
            GateSpec {
                targets,
                hamiltonian,
                duration,
            }
        })
        .collect();
    Circuit { n, gates: specs }
}

/// Tensor product of independent Haar single-qubit unitaries, one per qubit.
pub fn random_local_unitaries<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<CMatrix> {
    (0..n).map(|_| random_unitary(2, rng)).collect()
}

/// `rho` conjugated by `ops[0] ⊗ ops[1] ⊗ ...`.
pub fn apply_local_unitaries(rho: &DensityMatrix, ops: &[CMatrix]) -> DensityMatrix {
    let mut out = rho.matrix().clone();
    for (q, op) in ops.iter().enumerate() {
        out = linalg::conjugate_local(&out, op, &[q]).expect("valid qubit");
    }
    DensityMatrix::from_trusted(out)
}
