//! Tilted-measurement two-state quantum key distribution.
//!
//! The measurement layer builds a one-parameter family of three-outcome
//! POVMs that interpolates between unambiguous discrimination and the
//! minimum-error projective measurement of two pure qubit signal states.
//! On top of it sit key-rate analysis (asymptotic, finite-key, and
//! composable), tilt-angle optimization with baseline comparisons, and a
//! seeded Monte Carlo protocol simulator with a unitary-dilation sampler.
//!
//! The `phiqkd` binary exposes everything on the command line; see the
//! crate README for usage.

pub mod cli;
pub mod error;
pub mod gsd;
pub mod keyrate;
mod numeric;
pub mod optimizer;
pub mod qmath;
pub mod simulator;

pub use error::{Error, Result};
pub use gsd::{DiscriminationMetrics, OutcomeProbs, SignalPair, TiltAngle, TiltedPovm};
pub use keyrate::{FiniteKeyParams, KeyRateReport};
pub use optimizer::{OptimumResult, RateMode, ThetaSweepRow};
pub use simulator::{SimulationConfig, SimulationSummary};
