//! Unweighted distances and speeds on the state manifold: Uhlmann fidelity,
//! Bures length, the Fisher speed of a state derivative, Hamiltonian variance
//! and the halved spectral semi-norm.

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, psd_sqrt, trace_norm, CMatrix, C64};
use crate::states::DensityMatrix;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Denominators below this are treated as zero in the Fisher speed.
pub const FISHER_DENOM_TOL: f64 = 1e-12;
/// A skipped Fisher term must have a numerator below this, otherwise the
/// derivative leaves the current rank stratum.
pub const FISHER_NUMERATOR_TOL: f64 = 1e-18;
/// Lengths below this are recomputed from a matrix difference instead of
/// `arccos F`, which loses half the digits as `F -> 1`.
pub const SHORT_LENGTH: f64 = 0.1;
/// Smallest `mu_min / mu_max` of `M^dagger M` for which the polar factor of
/// `M = sqrt(rho) sqrt(sigma)` is formed.
const POLAR_CONDITION: f64 = 1e-10;

/// Fidelity together with its Bures length `arccos(F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BuresValue {
    pub fidelity: f64,
    pub length: f64,
}

impl BuresValue {
    pub fn from_fidelity(fidelity: f64) -> Self {
        let fidelity = fidelity.clamp(0.0, 1.0);
        BuresValue {
            fidelity,
            length: fidelity.acos(),
        }
    }

    /// Largest possible Bures length, reached by orthogonal states.
    pub const MAX: f64 = FRAC_PI_2;
}

/// How a fidelity is turned into a length.
///
/// `Root` is `arccos F` with the square-root fidelity `F = ||sqrt(rho) sqrt(sigma)||_1`
/// and is what every routine in the crate uses. `Squared` is `arccos F^2`, kept
/// only to report values under the other common fidelity convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityConvention {
    #[default]
    Root,
    Squared,
}

impl FidelityConvention {
    pub fn length(self, fidelity: f64) -> f64 {
        let f = fidelity.clamp(0.0, 1.0);
        match self {
            FidelityConvention::Root => f.acos(),
            FidelityConvention::Squared => (f * f).acos(),
        }
    }

    /// Length of an already computed [`BuresValue`]; `Root` keeps its
    /// (possibly refined) length.
    pub fn length_of(self, v: &BuresValue) -> f64 {
        match self {
            FidelityConvention::Root => v.length,
            FidelityConvention::Squared => self.length(v.fidelity),
        }
    }
}

fn same_shape(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok(())
}

/// `F = || sqrt(rho) sqrt(sigma) ||_1`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_shape(rho, sigma)?;
    if rho.matrix() == sigma.matrix() {
        // F(rho, rho) = Tr rho
        return Ok(1.0);
    }
    if let (Some(p), Some(q)) = (rho.matrix().real_diagonal(), sigma.matrix().real_diagonal()) {
        // commuting diagonal states: the trace norm collapses to sum sqrt(p q)
        let f: f64 = p.iter().zip(&q).map(|(x, y)| (x.max(0.0) * y.max(0.0)).sqrt()).sum();
        return Ok(f.clamp(0.0, 1.0));
    }
    let product = psd_sqrt(rho.matrix())?.matmul(&psd_sqrt(sigma.matrix())?);
    Ok(trace_norm(&product)?.clamp(0.0, 1.0))
}

/// `arccos F` together with `F`.
///
/// Short lengths are taken from the Bures chord `d^2 = 2 - 2F` evaluated
/// without cancellation: `sum (sqrt p - sqrt q)^2` for diagonal pairs, and
/// `||sqrt(rho) - sqrt(sigma) W^dagger||_F^2` otherwise, where `W` is the
/// unitary polar factor of `sqrt(rho) sqrt(sigma)`. Both assume unit traces,
/// so trace round-off no longer shows up as a spurious `sqrt(eps)` length.
pub fn bures_length(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BuresValue> {
    same_shape(rho, sigma)?;
    if rho.matrix() == sigma.matrix() {
        return Ok(BuresValue::from_fidelity(1.0));
    }
    if let (Some(p), Some(q)) = (rho.matrix().real_diagonal(), sigma.matrix().real_diagonal()) {
        let (p, q): (Vec<f64>, Vec<f64>) = (
            p.iter().map(|x| x.max(0.0)).collect(),
            q.iter().map(|x| x.max(0.0)).collect(),
        );
        let value = BuresValue::from_fidelity(p.iter().zip(&q).map(|(x, y)| (x * y).sqrt()).sum());
        if value.length > SHORT_LENGTH {
            return Ok(value);
        }
        // sqrt(x) - sqrt(y) = (x - y) / (sqrt(x) + sqrt(y)), and x - y is exact for close x, y
        let chord = p
            .iter()
            .zip(&q)
            .map(|(&x, &y)| {
                let s = x.sqrt() + y.sqrt();
                if s == 0.0 {
                    0.0
                } else {
                    ((x - y) / s).powi(2)
                }
            })
            .sum::<f64>()
            .sqrt();
        return Ok(BuresValue {
            length: chord_angle(chord),
            ..value
        });
    }

    let sr = psd_sqrt(rho.matrix())?;
    let ss = psd_sqrt(sigma.matrix())?;
    let m = sr.matmul(&ss);
    let gram = hermitian_eig(&m.adjoint().matmul(&m))?;
    let floor = linalg::sqrt_floor(&gram.eigenvalues);
    let f: f64 = gram
        .eigenvalues
        .iter()
        .filter(|&&mu| mu > floor)
        .map(|mu| mu.sqrt())
        .sum();
    let value = BuresValue::from_fidelity(f);
    let mu_min = gram.eigenvalues.first().copied().unwrap_or(0.0);
    let mu_max = gram.eigenvalues.last().copied().unwrap_or(0.0);
    if value.length > SHORT_LENGTH || mu_min <= POLAR_CONDITION * mu_max {
        return Ok(value);
    }
    // M = W P with P = (M^dagger M)^(1/2), so W = M P^-1
    let w = m.matmul(&gram.reconstruct_with(|mu| C64::new(1.0 / mu.sqrt(), 0.0)));
    let x = &sr - &ss.matmul(&w.adjoint());
    Ok(BuresValue {
        length: chord_angle(x.frobenius_norm()),
        ..value
    })
}

/// Angle subtended by a chord of length `d` on the unit circle.
fn chord_angle(d: f64) -> f64 {
    2.0 * (d / 2.0).min(1.0).asin()
}

/// `-i [h, rho]`, the derivative of `rho` under the Hamiltonian `h`.
pub fn unitary_derivative(h: &CMatrix, rho: &CMatrix) -> CMatrix {
    h.commutator(rho).scale(C64::new(0.0, -1.0))
}

/// Fisher (Bures) speed `||rho_dot||_F` at `rho`.
///
/// In the eigenbasis `{|r>}` of `rho` the squared speed is
/// `sum_r rho_dot_rr^2 / (4 lambda_r) + sum_{r<s} |rho_dot_rs|^2 / (lambda_r + lambda_s)`.
pub fn fisher_speed(rho: &DensityMatrix, rho_dot: &CMatrix) -> Result<f64> {
    if rho_dot.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), rho_dot.dim()));
    }
    let residual = rho_dot.hermiticity_residual();
    if residual > linalg::HERMITIAN_TOL {
        return Err(Error::NotHermitian(residual));
    }
    let tr = rho_dot.trace().norm();
    if tr > linalg::HERMITIAN_TOL {
        return Err(Error::InvalidState(format!("derivative has trace {tr:e}")));
    }
    let eig = hermitian_eig(rho.matrix())?;
    let v = &eig.eigenvectors;
    let rotated = v.adjoint().matmul(rho_dot).matmul(v);
    let lambda = &eig.eigenvalues;
    let dim = lambda.len();

    let mut speed_sq = 0.0;
    for r in 0..dim {
        let num = rotated[(r, r)].re.powi(2);
        if lambda[r] < FISHER_DENOM_TOL {
            if num >= FISHER_NUMERATOR_TOL {
                return Err(Error::SingularDirection { numerator: num });
            }
            continue;
        }
        speed_sq += num / (4.0 * lambda[r]);
    }
    for r in 0..dim {
        for s in r + 1..dim {
            let num = rotated[(r, s)].norm_sqr();
            let denom = lambda[r] + lambda[s];
            if denom < FISHER_DENOM_TOL {
                if num >= FISHER_NUMERATOR_TOL {
                    return Err(Error::SingularDirection { numerator: num });
                }
                continue;
            }
            speed_sq += num / denom;
        }
    }
    Ok(speed_sq.max(0.0).sqrt())
}

/// `Tr{h^2 rho} - Tr{h rho}^2`, clamped at zero.
pub fn hamiltonian_variance(h: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), h.dim()));
    }
    let residual = h.hermiticity_residual();
    if residual > linalg::HERMITIAN_TOL {
        return Err(Error::NotHermitian(residual));
    }
    let h_rho = h.matmul(rho.matrix());
    let mean = h_rho.trace().re;
    let second = h.matmul(&h_rho).trace().re;
    Ok((second - mean * mean).max(0.0))
}

/// Half the spectral spread `(lambda_max - lambda_min) / 2`.
pub fn seminorm(h: &CMatrix) -> Result<f64> {
    let eig = hermitian_eig(h)?;
    let lo = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let hi = eig.eigenvalues.last().copied().unwrap_or(0.0);
    Ok((hi - lo) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_hermitian};
    use crate::states::{basis, class, ghz, mixed, zeros};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)]).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let (a, b) = (0.6, 0.8);
        let rho = ghz(3, r(a), r(b)).unwrap();
        assert_eq!(uhlmann_fidelity(&rho, &rho).unwrap(), 1.0);
        let f = uhlmann_fidelity(&zeros(1), &class(1, r(a), r(b)).unwrap()).unwrap();
        assert!((f - a).abs() < 1e-14);
        for n in 2..=4 {
            let f = uhlmann_fidelity(&class(n, r(a), r(b)).unwrap(), &ghz(n, r(a), r(b)).unwrap()).unwrap();
            assert!((f - (a.powi(4) + b.powi(4)).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let x = random_density(2, &mut rng);
            let y = random_density(2, &mut rng);
            let f1 = uhlmann_fidelity(&x, &y).unwrap();
            let f2 = uhlmann_fidelity(&y, &x).unwrap();
            assert!((f1 - f2).abs() < 1e-10);
            assert!((0.0..=1.0).contains(&f1));
        }
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        assert!(matches!(
            uhlmann_fidelity(&zeros(1), &zeros(2)),
            Err(Error::DimensionMismatch(2, 4))
        ));
    }

    #[test]
    fn bures_examples() {
        let a = 0.6f64;
        for n in 1..=4 {
            for k in 1..=n {
                let flipped = format!("{}{}", "1".repeat(k), "0".repeat(n - k));
                let v = bures_length(&zeros(n), &basis(&flipped).unwrap()).unwrap();
                assert_eq!(v.fidelity, 0.0);
                assert_eq!(v.length, BuresValue::MAX);
            }
        }
        let rho = mixed(2);
        assert_eq!(bures_length(&rho, &rho).unwrap().length, 0.0);
        // |0>^N vs ghz_l^{⊗k} ⊗ |0>^{N-kl}
        let (l, k, n) = (2usize, 2usize, 5usize);
        let g = ghz(l, r(a), r(0.8)).unwrap();
        let sigma = g.tensor(&g).tensor(&zeros(n - k * l));
        let v = bures_length(&zeros(n), &sigma).unwrap();
        assert!((v.length - a.powi(k as i32).acos()).abs() < 1e-12);
    }

    #[test]
    fn bures_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_density(2, &mut rng);
        let y = random_density(2, &mut rng);
        let u = linalg::propagator(&random_hermitian(4, &mut rng), 0.9).unwrap();
        let ux = x.conjugate(&u, &[0, 1]).unwrap();
        let uy = y.conjugate(&u, &[0, 1]).unwrap();
        let before = bures_length(&x, &y).unwrap().length;
        let after = bures_length(&ux, &uy).unwrap().length;
        assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn fisher_zero_derivative() {
        let rho = mixed(1);
        assert_eq!(fisher_speed(&rho, &CMatrix::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn fisher_pure_plus_state() {
        let h = CMatrix::from_real_diagonal(&[1.0, -1.0]);
        let rho = plus();
        let dot = unitary_derivative(&h, rho.matrix());
        let v = fisher_speed(&rho, &dot).unwrap();
        assert!((v - 1.0).abs() < 1e-12);

        // finite-difference oracle
        let dt = 1e-5;
        let later = rho.conjugate(&linalg::propagator(&h, dt).unwrap(), &[0]).unwrap();
        let fd = bures_length(&rho, &later).unwrap().length / dt;
        assert!((fd - v).abs() / v < 1e-4);
    }

    #[test]
    fn fisher_classical_path() {
        let (p, q) = (0.3, 0.2);
        let rho = DensityMatrix::new(CMatrix::from_real_diagonal(&[p, 1.0 - p])).unwrap();
        let dot = CMatrix::from_real_diagonal(&[q, -q]);
        let v = fisher_speed(&rho, &dot).unwrap();
        let expected = q * q / 4.0 * (1.0 / p + 1.0 / (1.0 - p));
        assert!((v * v - expected).abs() < 1e-14);
    }

    #[test]
    fn fisher_singular_direction() {
        // pushing population into an empty level is not a finite-speed direction
        let rho = zeros(1);
        let dot = CMatrix::from_real_diagonal(&[-0.1, 0.1]);
        assert!(matches!(fisher_speed(&rho, &dot), Err(Error::SingularDirection { .. })));
    }

    #[test]
    fn variance_examples() {
        let h = CMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(hamiltonian_variance(&h, &zeros(1)).unwrap().abs() < 1e-15);
        assert!((hamiltonian_variance(&h, &plus()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn variance_bounds_fisher_speed() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let h = random_hermitian(4, &mut rng);
            let rho = random_density(2, &mut rng);
            let v = fisher_speed(&rho, &unitary_derivative(&h, rho.matrix())).unwrap();
            let var = hamiltonian_variance(&h, &rho).unwrap();
            assert!(var >= v * v - 1e-9);
            let e = seminorm(&h).unwrap();
            assert!(e * e >= var - 1e-12);
        }
    }

    #[test]
    fn seminorm_examples() {
        let x = 0.37;
        assert!((seminorm(&CMatrix::from_real_diagonal(&[x, -x])).unwrap() - x).abs() < 1e-15);
        assert_eq!(seminorm(&CMatrix::identity(4)).unwrap(), 0.0);
    }

    #[test]
    fn contractive_under_local_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let x = random_density(2, &mut rng);
            let y = random_density(2, &mut rng);
            let kraus = crate::random::random_kraus(&mut rng);
            let before = bures_length(&x, &y).unwrap().length;
            let after = bures_length(&x.apply_kraus(&kraus, 1).unwrap(), &y.apply_kraus(&kraus, 1).unwrap())
                .unwrap()
                .length;
            assert!(after <= before + 1e-9);
        }
    }

    #[test]
    fn short_lengths_keep_full_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let u = crate::random::random_unitary(2, &mut rng);
        for delta in [1e-10, 1e-7, 1e-4, 1e-2] {
            let rho = DensityMatrix::new(CMatrix::from_real_diagonal(&[0.5 + delta, 0.5 - delta])).unwrap();
            let half = 0.5f64.sqrt();
            // sqrt(p) - sqrt(1/2) without cancellation; p - 1/2 is exact in floating point
            let (p0, p1) = (0.5 + delta, 0.5 - delta);
            let up = (p0 - 0.5) / (p0.sqrt() + half);
            let down = (p1 - 0.5) / (p1.sqrt() + half);
            let exact = 2.0 * ((up * up + down * down).sqrt() / 2.0).asin();
            let got = bures_length(&rho, &mixed(1)).unwrap().length;
            assert!(
                (got / exact - 1.0).abs() < 1e-12,
                "diagonal, delta {delta}: {got} vs {exact}"
            );

            let rotated = rho.conjugate(&u, &[0]).unwrap();
            let other = DensityMatrix::new(CMatrix::from_real_diagonal(&[0.5 + 2.0 * delta, 0.5 - 2.0 * delta]))
                .unwrap()
                .conjugate(&u, &[0])
                .unwrap();
            let reference = bures_length(
                &rho,
                &DensityMatrix::new(CMatrix::from_real_diagonal(&[0.5 + 2.0 * delta, 0.5 - 2.0 * delta])).unwrap(),
            )
            .unwrap()
            .length;
            // a dense pair carries absolute round-off of a few eps
            let got = bures_length(&rotated, &other).unwrap().length;
            assert!(
                (got - reference).abs() < 1e-14,
                "rotated, delta {delta}: {got} vs {reference}"
            );
        }
    }

    #[test]
    fn trace_round_off_does_not_create_length() {
        let a = DensityMatrix::new(CMatrix::from_real_diagonal(&[1.0 - 2.0 * f64::EPSILON, 0.0])).unwrap();
        assert!(bures_length(&a, &zeros(1)).unwrap().length < 1e-15);
    }
}
