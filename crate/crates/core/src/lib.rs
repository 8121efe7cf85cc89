//! Fock-space simulation of linear optics with photon-count postselection.
//!
//! The crate covers the full pipeline from basis bookkeeping to experiments:
//!
//! - [`fock`]: occupation vectors, fixed-photon-number sectors and state vectors.
//! - [`optics`]: mode unitaries, permanents and the lift of a mode unitary to a sector.
//! - [`postselect`]: photon-number projections on subsets of modes.
//! - [`gates`]: the nonlinear sign shift (NS) and conditional sign shift (CS) targets,
//!   postselected circuits and the proportionality check.
//! - [`bounds`]: the two-photon and three-mode protocols, the randomized check that
//!   single-photon linear-optics states never hold more than one photon per mode on
//!   average, and the expectation-to-probability bound.
//! - [`search`]: direct-search optimization of postselected circuits.

pub mod bounds;
pub mod error;
pub mod fock;
pub mod gates;
pub mod optics;
pub mod postselect;
pub mod search;
mod serde_complex;

pub use error::{Error, Result};
pub use fock::{LogicalMode, OccupationVector, SectorBasis, StateVector};
pub use gates::{GateCheckResult, GateSpec, PostselectedCircuit};
pub use optics::{BeamSplitterParams, ModeUnitary};
pub use postselect::{PostselectionOutcome, PostselectionPattern};

pub use num_complex::Complex64;

/// Default tolerance for normalization and equality checks.
pub const DEFAULT_TOL: f64 = 1e-10;
