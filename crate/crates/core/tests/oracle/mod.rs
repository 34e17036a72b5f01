//! Reference computations that share no code with the library: state vectors
//! are built bit by bit, marginals are explicit basis sums, fidelities go
//! through nalgebra's Hermitian eigensolver with the `sqrt(sqrt(rho) sigma sqrt(rho))`
//! form, and partitions are enumerated recursively.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;

pub type M = DMatrix<Complex64>;

pub fn from_library(m: &weighted_bures::CMatrix) -> M {
    M::from_row_slice(m.dim(), m.dim(), m.as_slice())
}

pub fn ghz_vector(n: usize, a: f64, b: f64) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    psi[0] = a.into();
    psi[(1 << n) - 1] += b;
    psi
}

pub fn dicke_vector(n: usize, k: usize) -> Vec<Complex64> {
    let support: Vec<usize> = (0..1usize << n).filter(|x| x.count_ones() as usize == k).collect();
    let amp = 1.0 / (support.len() as f64).sqrt();
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    for x in support {
        psi[x] = amp.into();
    }
    psi
}

pub fn projector(psi: &[Complex64]) -> M {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}

/// Bit of qubit `q` in basis index `x` (qubit 0 is the most significant).
fn bit(x: usize, q: usize, n: usize) -> usize {
    (x >> (n - 1 - q)) & 1
}

/// Reduced state on `qubits` (in increasing order) by summing matching basis entries.
pub fn marginal(rho: &M, n: usize, qubits: &[usize]) -> M {
    let dk = 1usize << qubits.len();
    let key = |x: usize| qubits.iter().fold(0usize, |acc, &q| (acc << 1) | bit(x, q, n));
    let rest: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
    let same_rest = |x: usize, y: usize| rest.iter().all(|&q| bit(x, q, n) == bit(y, q, n));
    let mut out = M::zeros(dk, dk);
    for x in 0..1usize << n {
        for y in 0..1usize << n {
            if same_rest(x, y) {
                out[(key(x), key(y))] += rho[(x, y)];
            }
        }
    }
    out
}

/// Eigenvalues this far below the largest are solver noise and count as zero;
/// their square roots would otherwise add up to ~1e-8 per entry.
const NOISE: f64 = 1e-13;

fn denoised(values: &nalgebra::DVector<f64>) -> Vec<f64> {
    let top = values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    values.iter().map(|&l| if l > NOISE * top { l } else { 0.0 }).collect()
}

fn psd_sqrt(m: &M) -> M {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let roots: Vec<Complex64> = denoised(&eig.eigenvalues)
        .iter()
        .map(|l| Complex64::new(l.sqrt(), 0.0))
        .collect();
    let roots = nalgebra::DVector::from_vec(roots);
    &eig.eigenvectors * M::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

pub fn fidelity(rho: &M, sigma: &M) -> f64 {
    let s = psd_sqrt(rho);
    let inner = &s * sigma * &s;
    let inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let f: f64 = denoised(&inner.symmetric_eigen().eigenvalues)
        .iter()
        .map(|l| l.sqrt())
        .sum();
    f.min(1.0)
}

pub fn bures(rho: &M, sigma: &M) -> f64 {
    fidelity(rho, sigma).acos()
}

/// All set partitions of `items`, by placing the first item with every subset of the rest.
fn partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for pick in 0..1usize << rest.len() {
        let mut block = vec![first];
        let mut left = Vec::new();
        for (i, &x) in rest.iter().enumerate() {
            if pick >> i & 1 == 1 {
                block.push(x);
            } else {
                left.push(x);
            }
        }
        for mut tail in partitions(&left) {
            tail.insert(0, block.clone());
            out.push(tail);
        }
    }
    out
}

pub fn count_partitions(n: usize) -> usize {
    partitions(&(0..n).collect::<Vec<_>>()).len()
}

/// Weighted Bures length by exhaustive search, with `length` mapping a fidelity to a length.
pub fn weighted_with(rho: &M, sigma: &M, n: usize, length: impl Fn(f64) -> f64) -> f64 {
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut best = f64::NEG_INFINITY;
    for p in partitions(&(0..n).collect::<Vec<_>>()) {
        let mut total = 0.0;
        for block in p {
            let b = *cache
                .entry(block.clone())
                .or_insert_with(|| length(fidelity(&marginal(rho, n, &block), &marginal(sigma, n, &block))));
            total += b / block.len() as f64;
        }
        best = best.max(total);
    }
    best
}

pub fn weighted(rho: &M, sigma: &M, n: usize) -> f64 {
    weighted_with(rho, sigma, n, f64::acos)
}
