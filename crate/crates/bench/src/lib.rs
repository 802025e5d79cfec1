//! Shared fixtures for the pipeline benchmarks.

use centroid_core::states::{default_noon_sigma, JointGaussianState, NoonState, StateModel};

pub fn noon(n: usize) -> StateModel {
    StateModel::Noon(NoonState::new(n, default_noon_sigma()).expect("valid NOON state"))
}

pub fn jg(n: usize, b: f64, beta: f64) -> StateModel {
    StateModel::Jg(JointGaussianState::new(n, b, beta).expect("valid JG state"))
}
