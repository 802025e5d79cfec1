//! Monte Carlo simulation of optical centroid measurements.
//!
//! The crate samples correlated N-photon detection events from analytic
//! position-space densities (NOON, jointly Gaussian, and correlated coherent
//! cat states), models finite-size detector arrays, recovers the centroid
//! probability distribution from the discretized events, and quantifies the
//! recovery error and multiphoton-absorption statistics.
//!
//! Positions are measured in units of the transverse wavelength throughout.
//!
//! The typical pipeline is:
//!
//! 1. build a [`StateModel`],
//! 2. [`sampler::sample_events`] to draw an [`EventBatch`],
//! 3. [`detection::run_plan`] to discretize and histogram centroids,
//! 4. [`analysis::recover`] to scale-fit against the analytic reference and
//!    compute the weighted rms deviation.

pub mod analysis;
pub mod detection;
pub mod error;
pub mod sampler;
pub mod states;

pub use analysis::{CloseEventReport, RecoveryPoint, RecoveryReport};
pub use detection::{CentroidHistogram, DetectorArray, Method, ShiftPlan};
pub use error::{Error, Result};
pub use sampler::{EventBatch, TabulatedInverseCdf, TransformMatrix};
pub use states::{CatState, JgScalars, JointGaussianState, NoonState, StateModel};
