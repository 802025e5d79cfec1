//! Correlated N-photon event generation.
//!
//! Events are drawn by transforming to coordinates in which the joint density
//! factorizes: an orthogonal matrix whose first row is (1,..,1)/sqrt(N) maps
//! the photon positions to one centroid-direction coordinate plus N-1
//! independent Gaussian coordinates. The centroid-direction coordinate is
//! drawn from a tabulated inverse CDF where the density carries the fringe
//! modulation, and directly as a Gaussian for jointly Gaussian states.

mod events;
mod inverse_cdf;
mod transform;

pub use events::{sample_events, EventBatch, RowSampler};
pub use inverse_cdf::TabulatedInverseCdf;
pub use transform::{transform_matrix, TransformMatrix};
