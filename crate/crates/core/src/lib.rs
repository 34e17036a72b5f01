//! Weighted Bures length between many-qubit states.
//!
//! The weighted distance between two `n`-qubit states is the largest value,
//! over all ways of splitting the qubits into blocks, of the sum of block-wise
//! Bures lengths each divided by its block size. This crate computes it exactly
//! with a dynamic program over subset masks, and audits the cost of unitary
//! circuits against it.
//!
//! ```
//! use weighted_bures::states::{basis, zeros};
//! use weighted_bures::weighted::weighted_distance;
//!
//! let r = weighted_distance(&zeros(3), &basis("110").unwrap()).unwrap();
//! assert!((r.value - std::f64::consts::PI).abs() < 1e-12);
//! ```

pub mod distances;
pub mod error;
pub mod linalg;
mod mask;
pub mod par;
pub mod random;
pub mod resource;
mod serde_complex;
pub mod states;
pub mod table1;
pub mod weighted;

pub use distances::{bures_length, fisher_speed, uhlmann_fidelity, BuresValue, FidelityConvention};
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use par::Execution;
pub use resource::{audit_bound, BoundReport, Circuit, GateSpec};
pub use states::{DensityMatrix, Factor, StateSpec};
pub use weighted::{weighted_distance, Partition, SubsetMask, WeightedResult};
