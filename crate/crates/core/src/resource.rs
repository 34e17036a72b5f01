//! Gate-sequence cost model and the audit of cost against weighted Bures length.
//!
//! A gate `l` runs the time-independent Hamiltonian `H_l` on `k_l` qubits for a
//! time `T_l` (units with hbar = 1). Its cost is `k_l * E_l * T_l` with `E_l`
//! half the spectral spread of `H_l`; the circuit cost is the sum over gates.
//! For every unitary circuit the cost is at least the weighted Bures length
//! between input and output.

use crate::distances::{bures_length, seminorm};
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, CMatrix, EigDecomposition};
use crate::par::{map_indexed, Execution};
use crate::states::DensityMatrix;
use crate::weighted::{weighted_distance, Partition};
use serde::{Deserialize, Serialize};

/// Slack allowed when checking the cost bound.
pub const BOUND_TOL: f64 = 1e-9;
/// Eigenvalue gaps below this mark the eigenbasis of `rho` as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub targets: Vec<usize>,
    #[serde(rename = "h")]
    pub hamiltonian: CMatrix,
    #[serde(rename = "t")]
    pub duration: f64,
}

impl GateSpec {
    pub fn size(&self) -> usize {
        self.targets.len()
    }

    pub fn unitary(&self) -> Result<CMatrix> {
        linalg::propagator(&self.hamiltonian, self.duration)
    }

    fn check(&self, index: usize, n: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidGate { index, reason });
        if self.targets.is_empty() {
            return bad("no target qubits".into());
        }
        for (i, &q) in self.targets.iter().enumerate() {
            if q >= n {
                return bad(format!("target {q} outside {n} qubits"));
            }
            if self.targets[..i].contains(&q) {
                return bad(format!("target {q} repeated"));
            }
        }
        if self.hamiltonian.dim() != 1 << self.targets.len() {
            return bad(format!(
                "hamiltonian dimension {} does not match {} targets",
                self.hamiltonian.dim(),
                self.targets.len()
            ));
        }
        if !self.hamiltonian.is_finite() {
            return bad("hamiltonian has non-finite entries".into());
        }
        let residual = self.hamiltonian.hermiticity_residual();
        if residual > linalg::HERMITIAN_TOL {
            return bad(format!("hamiltonian not Hermitian (residual {residual:e})"));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad(format!("duration {} must be positive", self.duration));
        }
        Ok(())
    }
}

/// Gates applied first to last on an `n`-qubit register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<GateSpec>,
}

impl Circuit {
    pub fn empty(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().enumerate().try_for_each(|(i, g)| g.check(i, self.n))
    }
}

/// Cost breakdown of one gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateCost {
    pub k: usize,
    pub energy: f64,
    pub duration: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceCost {
    pub total: f64,
    pub per_gate: Vec<GateCost>,
}

/// `sum_l k_l * E_l * T_l`.
pub fn resource_cost(c: &Circuit) -> Result<ResourceCost> {
    c.validate()?;
    let per_gate = c
        .gates
        .iter()
        .map(|g| {
            let energy = seminorm(&g.hamiltonian)?;
            Ok(GateCost {
                k: g.size(),
                energy,
                duration: g.duration,
                cost: g.size() as f64 * energy * g.duration,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = per_gate.iter().map(|g| g.cost).sum();
    Ok(ResourceCost { total, per_gate })
}

fn check_register(c: &Circuit, rho0: &DensityMatrix) -> Result<()> {
    if c.n != rho0.n() {
        return Err(Error::DimensionMismatch(c.n, rho0.n()));
    }
    c.validate()
}

/// Input state followed by the state after each gate.
pub fn simulate_trajectory(c: &Circuit, rho0: &DensityMatrix) -> Result<Vec<DensityMatrix>> {
    check_register(c, rho0)?;
    let mut states = Vec::with_capacity(c.gates.len() + 1);
    states.push(rho0.clone());
    for g in &c.gates {
        let u = g.unitary()?;
        let next = states.last().expect("nonempty").conjugate(&u, &g.targets)?;
        states.push(next);
    }
    Ok(states)
}

pub fn simulate_circuit(c: &Circuit, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(simulate_trajectory(c, rho0)?.pop().expect("nonempty"))
}

/// Endpoint of the classical (eigenvalue-only) step from `rho` towards `sigma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauSplit {
    pub tau: DensityMatrix,
    /// Some eigenvalue gap of `rho` is below [`DEGENERACY_GAP`], so the
    /// eigenbasis of `tau` is one of several valid choices.
    pub degenerate: bool,
}

/// Eigenvalues of `sigma` placed on the eigenvectors of `rho`, both sorted by
/// descending eigenvalue and paired in order.
pub fn intermediate_tau(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<TauSplit> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let er = hermitian_eig(rho.matrix())?;
    let es = hermitian_eig(sigma.matrix())?;
    let degenerate = er.eigenvalues.windows(2).any(|w| (w[1] - w[0]).abs() < DEGENERACY_GAP);
    // both lists are ascending, so pairing index-by-index pairs the descending orders too
    let tau = EigDecomposition {
        eigenvalues: es.eigenvalues,
        eigenvectors: er.eigenvectors,
    }
    .reconstruct();
    Ok(TauSplit {
        tau: DensityMatrix::from_trusted(tau),
        degenerate,
    })
}

/// Cost of one gate next to the Bures length it actually covered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateAudit {
    pub k: usize,
    pub energy: f64,
    pub duration: f64,
    pub cost: f64,
    /// Bures length between the states before and after the gate.
    pub step_bures: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub r_u: f64,
    /// Weighted Bures length between input and output.
    pub d_b: f64,
    /// Weighted Bures length between `tau` and the output (general-process form).
    pub d_b_general: f64,
    pub tau: DensityMatrix,
    pub tau_degenerate: bool,
    pub margin: f64,
    pub holds: bool,
    pub partition: Partition,
    pub per_gate: Vec<GateAudit>,
}

/// Simulates `c` on `rho0` and compares its cost with the weighted Bures
/// length between input and output.
pub fn audit_bound(c: &Circuit, rho0: &DensityMatrix) -> Result<BoundReport> {
    let states = simulate_trajectory(c, rho0)?;
    let cost = resource_cost(c)?;
    let sigma = states.last().expect("nonempty");
    let weighted = weighted_distance(rho0, sigma)?;
    let split = intermediate_tau(rho0, sigma)?;
    let general = weighted_distance(&split.tau, sigma)?;
    let per_gate = cost
        .per_gate
        .iter()
        .zip(states.windows(2))
        .map(|(g, pair)| {
            Ok(GateAudit {
                k: g.k,
                energy: g.energy,
                duration: g.duration,
                cost: g.cost,
                step_bures: bures_length(&pair[0], &pair[1])?.length,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let margin = cost.total - weighted.value;
    Ok(BoundReport {
        r_u: cost.total,
        d_b: weighted.value,
        d_b_general: general.value,
        tau: split.tau,
        tau_degenerate: split.degenerate,
        margin,
        holds: cost.total >= weighted.value - BOUND_TOL,
        partition: weighted.argmax_partition,
        per_gate,
    })
}

/// Audits independent `(circuit, input)` pairs, possibly concurrently; the
/// output order matches the input order.
pub fn audit_batch(jobs: &[(Circuit, DensityMatrix)], exec: Execution) -> Vec<Result<BoundReport>> {
    map_indexed(jobs.len(), exec, |i| audit_bound(&jobs[i].0, &jobs[i].1))
}
