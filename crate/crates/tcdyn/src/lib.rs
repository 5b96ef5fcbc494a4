//! Resonant Tavis-Cummings dynamics of `N_q` two-level systems coupled to a
//! single quantized field mode.
//!
//! The library provides
//!
//! - [`hilbert`]: state construction (coherent, Dicke, spin coherent states),
//!   tensor embedding and partial traces,
//! - [`dynamics`]: exact interaction-picture time evolution via per-excitation
//!   block eigendecomposition, plus the closed-form one-qubit solution,
//! - [`largen`]: the large mean-photon-number analytic machinery (component
//!   decompositions, attractor states, basins of attraction, revival and
//!   attractor times, dipole moments, spin cat decompositions),
//! - [`measures`]: entanglement and phase-space diagnostics (rescaled entropy,
//!   tangle/concurrence, 3-tangle, field and spin Q functions, revival
//!   detection),
//! - [`experiment`]: a deterministic experiment runner with named presets,
//!   backing the `tcdyn` command line tool.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod hilbert;
pub mod largen;
pub mod measures;

pub use error::{Error, Result};
pub use hilbert::{
    CoherentField, DensityMatrix, DickeState, JointState, ModelConfig, QubitState, C64,
};
