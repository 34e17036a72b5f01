//! Density matrices and the named many-qubit states used throughout the crate.

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, kron, CMatrix, C64, ZERO};
use crate::mask::SubsetMask;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MAX_QUBITS: usize = 12;
pub const STATE_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Wraps `mat` after checking that it is a valid state.
    pub fn new(mat: CMatrix) -> Result<Self> {
        let n = mat
            .qubits()
            .ok_or_else(|| Error::InvalidState(format!("dimension {} is not a power of two", mat.dim())))?;
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let report = validate_matrix(&mat);
        if !report.passes {
            return Err(Error::InvalidState(report.to_string()));
        }
        Ok(DensityMatrix { n, mat })
    }

    /// Wraps `mat` without validation. The caller guarantees it is a state on
    /// a power-of-two dimension.
    pub(crate) fn from_trusted(mat: CMatrix) -> Self {
        let n = mat.qubits().expect("power-of-two dimension");
        DensityMatrix { n, mat }
    }

    /// Pure state `|psi><psi|`; `psi` must be normalized.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        Self::new(CMatrix::outer(psi))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            n: self.n + other.n,
            mat: kron(&self.mat, &other.mat),
        }
    }

    /// Reduced state on the qubits of `keep`, in ascending qubit order.
    pub fn marginal(&self, keep: SubsetMask) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(linalg::partial_trace(&self.mat, keep)?))
    }

    /// `U rho U^dagger` for a unitary on `targets`.
    pub fn conjugate(&self, op: &CMatrix, targets: &[usize]) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(linalg::conjugate_local(
            &self.mat, op, targets,
        )?))
    }

    pub fn apply_kraus(&self, kraus: &[CMatrix], target: usize) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(linalg::apply_kraus(
            &self.mat, kraus, target,
        )?))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_matrix(&self.mat)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.mat.serialize(s)
    }
}

/// One tensor factor of a [`StateSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Factor {
    /// Computational basis state, e.g. `"0110"`.
    Basis {
        bits: String,
    },
    /// `a|0...0> + b|1...1>` on `k` qubits.
    Ghz {
        k: usize,
        #[serde(with = "crate::serde_complex")]
        a: C64,
        #[serde(with = "crate::serde_complex")]
        b: C64,
    },
    /// `|a|^2 |0...0><0...0| + |b|^2 |1...1><1...1|` on `k` qubits.
    Class {
        k: usize,
        #[serde(with = "crate::serde_complex")]
        a: C64,
        #[serde(with = "crate::serde_complex")]
        b: C64,
    },
    /// Dicke state with `k` excitations on `n` qubits.
    Dicke {
        n: usize,
        k: usize,
    },
    /// Maximally mixed state on `k` qubits.
    Mixed {
        k: usize,
    },
    Raw {
        matrix: CMatrix,
    },
}

impl Factor {
    pub fn qubits(&self) -> Result<usize> {
        match self {
            Factor::Basis { bits } => Ok(bits.len()),
            Factor::Ghz { k, .. } | Factor::Class { k, .. } | Factor::Mixed { k } => Ok(*k),
            Factor::Dicke { n, .. } => Ok(*n),
            Factor::Raw { matrix } => matrix.qubits().ok_or_else(|| {
                Error::InvalidFactor(format!("raw matrix dimension {} is not a power of two", matrix.dim()))
            }),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            Factor::Basis { bits } => {
                if bits.is_empty() || !bits.chars().all(|ch| ch == '0' || ch == '1') {
                    return Err(Error::InvalidFactor(format!("basis bits {bits:?}")));
                }
            }
            Factor::Ghz { k, a, b } | Factor::Class { k, a, b } => {
                if *k == 0 {
                    return Err(Error::InvalidFactor("k must be at least 1".into()));
                }
                check_amplitudes(*a, *b)?;
            }
            Factor::Dicke { n, k } => {
                if *n == 0 || k > n {
                    return Err(Error::InvalidFactor(format!("dicke(n={n}, k={k})")));
                }
            }
            Factor::Mixed { k } => {
                if *k == 0 {
                    return Err(Error::InvalidFactor("k must be at least 1".into()));
                }
            }
            Factor::Raw { matrix } => {
                self.qubits()?;
                let report = validate_matrix(matrix);
                if !report.passes {
                    return Err(Error::InvalidFactor(format!("raw matrix: {report}")));
                }
            }
        }
        Ok(())
    }

    fn build(&self) -> Result<DensityMatrix> {
        self.check()?;
        Ok(match self {
            Factor::Basis { bits } => basis(bits)?,
            Factor::Ghz { k, a, b } => ghz(*k, *a, *b)?,
            Factor::Class { k, a, b } => class(*k, *a, *b)?,
            Factor::Dicke { n, k } => dicke(*n, *k)?,
            Factor::Mixed { k } => mixed(*k),
            Factor::Raw { matrix } => DensityMatrix::from_trusted(matrix.clone()),
        })
    }
}

/// Declarative description of a product state: factors in qubit order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub factors: Vec<Factor>,
}

impl StateSpec {
    pub fn new(factors: Vec<Factor>) -> Self {
        StateSpec { factors }
    }

    pub fn qubits(&self) -> Result<usize> {
        self.factors.iter().map(Factor::qubits).sum()
    }
}

pub fn build_state(spec: &StateSpec) -> Result<DensityMatrix> {
    build_state_with_limit(spec, DEFAULT_MAX_QUBITS)
}

pub fn build_state_with_limit(spec: &StateSpec, max_qubits: usize) -> Result<DensityMatrix> {
    if spec.factors.is_empty() {
        return Err(Error::InvalidFactor("state spec has no factors".into()));
    }
    let total = spec.qubits()?;
    if total > max_qubits {
        return Err(Error::DimensionTooLarge {
            qubits: total,
            max: max_qubits,
        });
    }
    let mut factors = spec.factors.iter();
    let mut state = factors.next().expect("nonempty").build()?;
    for f in factors {
        state = state.tensor(&f.build()?);
    }
    Ok(state)
}

fn check_amplitudes(a: C64, b: C64) -> Result<()> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidAmplitudes(norm));
    }
    Ok(())
}

pub fn basis(bits: &str) -> Result<DensityMatrix> {
    if bits.is_empty() || !bits.chars().all(|ch| ch == '0' || ch == '1') {
        return Err(Error::InvalidFactor(format!("basis bits {bits:?}")));
    }
    let index = usize::from_str_radix(bits, 2).expect("checked binary");
    let mut m = CMatrix::zeros(1 << bits.len());
    m[(index, index)] = linalg::ONE;
    Ok(DensityMatrix::from_trusted(m))
}

/// `|0>^k`
pub fn zeros(k: usize) -> DensityMatrix {
    basis(&"0".repeat(k)).expect("k >= 1")
}

pub fn ghz(k: usize, a: C64, b: C64) -> Result<DensityMatrix> {
    if k == 0 {
        return Err(Error::InvalidFactor("k must be at least 1".into()));
    }
    check_amplitudes(a, b)?;
    let mut psi = vec![ZERO; 1 << k];
    let last = psi.len() - 1;
    psi[0] = a;
    psi[last] += b;
    Ok(DensityMatrix::from_trusted(CMatrix::outer(&psi)))
}

/// Classically correlated counterpart of [`ghz`]: the GHZ matrix with its
/// off-diagonal corners removed.
pub fn class(k: usize, a: C64, b: C64) -> Result<DensityMatrix> {
    if k == 0 {
        return Err(Error::InvalidFactor("k must be at least 1".into()));
    }
    check_amplitudes(a, b)?;
    let mut m = CMatrix::zeros(1 << k);
    let last = m.dim() - 1;
    // same arithmetic as the outer product so dephased GHZ matches bit for bit
    m[(0, 0)] = a * a.conj();
    m[(last, last)] = b * b.conj();
    Ok(DensityMatrix::from_trusted(m))
}

pub fn dicke(n: usize, k: usize) -> Result<DensityMatrix> {
    if n == 0 || k > n {
        return Err(Error::InvalidFactor(format!("dicke(n={n}, k={k})")));
    }
    let dim = 1usize << n;
    let support: Vec<usize> = (0..dim).filter(|i| i.count_ones() as usize == k).collect();
    let amp = C64::new(1.0 / (support.len() as f64).sqrt(), 0.0);
    let mut psi = vec![ZERO; dim];
    for i in support {
        psi[i] = amp;
    }
    Ok(DensityMatrix::from_trusted(CMatrix::outer(&psi)))
}

pub fn mixed(k: usize) -> DensityMatrix {
    let dim = 1usize << k;
    DensityMatrix::from_trusted(CMatrix::identity(dim).scale_real(1.0 / dim as f64))
}

/// Numerical health of a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_residual: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub passes: bool,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "hermiticity residual {:e}, trace deviation {:e}, min eigenvalue {:e}",
            self.hermiticity_residual, self.trace_deviation, self.min_eigenvalue
        )
    }
}

pub fn validate(rho: &DensityMatrix) -> ValidationReport {
    validate_matrix(rho.matrix())
}

pub fn validate_matrix(m: &CMatrix) -> ValidationReport {
    let hermiticity_residual = m.hermiticity_residual();
    let trace = m.trace();
    let trace_deviation = (trace - linalg::ONE).norm();
    let min_eigenvalue = if hermiticity_residual <= linalg::HERMITIAN_TOL {
        hermitian_eig(m).map(|e| e.eigenvalues[0]).unwrap_or(f64::NEG_INFINITY)
    } else {
        f64::NAN
    };
    let passes = hermiticity_residual <= STATE_TOL && trace_deviation <= STATE_TOL && min_eigenvalue >= -STATE_TOL;
    ValidationReport {
        hermiticity_residual,
        trace_deviation,
        min_eigenvalue,
        passes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn basis_projector() {
        let s = build_state(&StateSpec::new(vec![Factor::Basis { bits: "00".into() }])).unwrap();
        assert_eq!(s.matrix(), &CMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]));
        let s = basis("01").unwrap();
        assert_eq!(s.matrix()[(1, 1)], linalg::ONE);
    }

    #[test]
    fn ghz_corners() {
        let (a, b) = (0.6, 0.8);
        let s = ghz(2, r(a), r(b)).unwrap();
        let m = s.matrix();
        assert!((m[(0, 0)].re - a * a).abs() < 1e-15);
        assert!((m[(0, 3)].re - a * b).abs() < 1e-15);
        assert!((m[(3, 0)].re - a * b).abs() < 1e-15);
        assert!((m[(3, 3)].re - b * b).abs() < 1e-15);
        let nonzero = m.as_slice().iter().filter(|z| **z != ZERO).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn ghz_complex_amplitudes() {
        let a = C64::new(0.6, 0.0);
        let b = C64::from_polar(0.8, 0.3);
        let m = ghz(1, a, b).unwrap();
        assert!((m.matrix()[(0, 1)] - a * b.conj()).norm() < 1e-15);
    }

    #[test]
    fn class_is_dephased_ghz_exactly() {
        for k in 1..=4 {
            let (a, b) = (C64::new(0.6, 0.0), C64::from_polar(0.8, 1.1));
            let g = ghz(k, a, b).unwrap();
            let mut dephased = g.matrix().clone();
            let last = dephased.dim() - 1;
            if last > 0 {
                dephased[(0, last)] = ZERO;
                dephased[(last, 0)] = ZERO;
            }
            assert_eq!(&dephased, class(k, a, b).unwrap().matrix());
        }
    }

    #[test]
    fn dicke_three_one() {
        let s = dicke(3, 1).unwrap();
        let m = s.matrix();
        for i in [1usize, 2, 4] {
            for j in [1usize, 2, 4] {
                assert!((m[(i, j)].re - 1.0 / 3.0).abs() < 1e-15);
            }
        }
        let nonzero = m.as_slice().iter().filter(|z| **z != ZERO).count();
        assert_eq!(nonzero, 9);
    }

    #[test]
    fn dicke_marginals() {
        for n in 2..=6 {
            for k in 0..=n {
                let s = dicke(n, k).unwrap();
                let p = k as f64 / n as f64;
                for q in 0..n {
                    let m = s.marginal(SubsetMask::from_qubits([q])).unwrap();
                    let expected = CMatrix::from_real_diagonal(&[1.0 - p, p]);
                    assert!(m.matrix().max_abs_diff(&expected) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tensor_order_follows_spec() {
        let spec = StateSpec::new(vec![
            Factor::Basis { bits: "1".into() },
            Factor::Basis { bits: "0".into() },
        ]);
        let s = build_state(&spec).unwrap();
        // |10> has index 2
        assert_eq!(s.matrix()[(2, 2)], linalg::ONE);
        assert_eq!(s.n(), 2);
    }

    #[test]
    fn rejects_bad_specs() {
        let bad_amp = StateSpec::new(vec![Factor::Ghz {
            k: 2,
            a: r(0.6),
            b: r(0.6),
        }]);
        assert!(matches!(build_state(&bad_amp), Err(Error::InvalidAmplitudes(_))));
        let big = StateSpec::new(vec![Factor::Mixed { k: 13 }]);
        assert!(matches!(
            build_state(&big),
            Err(Error::DimensionTooLarge { qubits: 13, max: 12 })
        ));
        let dk = StateSpec::new(vec![Factor::Dicke { n: 2, k: 3 }]);
        assert!(build_state(&dk).is_err());
        let bits = StateSpec::new(vec![Factor::Basis { bits: "0a".into() }]);
        assert!(build_state(&bits).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&mixed(2)).passes);
        let short = CMatrix::from_real_diagonal(&[0.45, 0.45]);
        let report = validate_matrix(&short);
        assert!(!report.passes);
        assert!((report.trace_deviation - 0.1).abs() < 1e-12);
        let g = ghz(3, r(0.6), r(0.8)).unwrap();
        let report = validate(&g);
        assert!(report.passes && report.min_eigenvalue >= -1e-10);
    }

    #[test]
    fn json_schema_roundtrip() {
        let text = r#"{"factors":[{"type":"ghz","k":2,"a":[0.6,0.0],"b":[0.8,0.0]},{"type":"basis","bits":"00"}]}"#;
        let spec: StateSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.qubits().unwrap(), 4);
        assert_eq!(serde_json::to_string(&spec).unwrap(), text);
        let raw = r#"{"factors":[{"type":"raw","matrix":[[[0.5,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]}]}"#;
        let spec: StateSpec = serde_json::from_str(raw).unwrap();
        assert_eq!(build_state(&spec).unwrap(), mixed(1));
    }

    #[test]
    fn build_is_deterministic() {
        let spec = StateSpec::new(vec![
            Factor::Dicke { n: 3, k: 2 },
            Factor::Class {
                k: 2,
                a: r(0.6),
                b: r(0.8),
            },
        ]);
        assert_eq!(build_state(&spec).unwrap(), build_state(&spec).unwrap());
    }
}
