//! Scalable multiqubit Bell inequalities built from paired CHSH partitions.
//!
//! - [`bell`]: expression construction, canonical settings and sign.
//! - [`lhv`]: exact classical bound by enumeration of deterministic strategies.
//! - [`quantum`]: state vectors, Pauli sums, expectation values, eigenvalues.
//! - [`entanglement`]: four-tangle, thresholds, α scans.
//! - [`optimizer`]: settings search and sign calibration.
//! - [`cli`]: the `scalable-bell` command-line front end.

pub mod bell;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod lhv;
pub mod optimizer;
pub mod quantum;

pub use error::{Error, Result};
