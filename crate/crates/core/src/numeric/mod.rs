//! Master-equation route: steady states of the signed-gain generator,
//! equal-time and delayed correlations, and truncation certification.

mod certify;
mod evolve;
mod observables;
mod state;
mod steady;

pub use certify::{truncation_certify, CertifyOptions, CertifyReport, CertifyStep};
pub use evolve::{evolve, evolve_sampled, EvolveOptions, EvolveStats};
pub use observables::{correlations, delayed_g2, DelayedMode};
pub use state::DensityMatrix;
pub use steady::{steady_state, SteadyStateMethod, SteadyStateOptions, SteadyStateResult};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("runaway growth at t = {t:.6e}: trace = {trace:.6e}, norm = {norm:.6e}")]
    Runaway { t: f64, trace: f64, norm: f64 },
    #[error("steady state not converged (residual {residual:.3e})")]
    NotConverged { residual: f64 },
    #[error("truncation certification failed: {mode} cutoff reached cap {cap} without convergence (last change {change:.3e})")]
    CertificationFailed {
        mode: &'static str,
        cap: usize,
        change: f64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
