//! Closed-form steady-state amplitudes in the two-photon truncation, the
//! amplitude ODE used as an independent check, PT eigenvalues and the
//! double-passive and unequal-detuning variants.

mod amplitudes;
mod correlations;
mod dips;
mod oracle;
mod passive;
mod phase;

pub use amplitudes::{optimal_detuning, pt_amplitudes, stationary_amplitudes, unequal_detuning_c20, BlockadeTarget};
pub use correlations::{correlations_from_amplitudes, AnalyticCorrelations, CorrelationForm};
pub use dips::{grid_local_minima, refine_minimum};
pub use oracle::{schrodinger_ode_amplitudes, AmplitudeOdeOptions};
pub use passive::{passive_amplitudes, passive_blockade_condition_check, PassiveBlockadeReport, RootCheck};
pub use phase::{cpb_dip_locations, pt_eigenvalues, PhaseClass, PtPhase, Subspace};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::LinalgError;

/// Denominators below this magnitude are treated as singular.
pub const SINGULAR_FLOOR: f64 = 1e-30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("singular parameter point: {factor} vanishes")]
    Singular { factor: &'static str },
    #[error("closed form requires delta1 = delta2 and kappa1 = kappa2")]
    NotPtSymmetric,
    #[error("closed form requires kappa1 = kappa2")]
    NotBalanced,
    #[error("{correlation} is undefined: one-photon amplitude is zero but the two-photon amplitude is not")]
    DivisionByZero { correlation: &'static str },
    #[error("all amplitudes are zero")]
    NoExcitation,
    #[error("amplitude ODE did not settle: relative drift {drift:.3e}")]
    NonConvergence { drift: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Steady-state amplitudes of `|1,0⟩, |0,1⟩, |2,0⟩, |1,1⟩, |0,2⟩` with the
/// vacuum amplitude pinned to 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeSet {
    pub c10: Complex64,
    pub c01: Complex64,
    pub c20: Complex64,
    pub c11: Complex64,
    pub c02: Complex64,
}

impl AmplitudeSet {
    pub fn zero() -> Self {
        Self::from_array([Complex64::new(0.0, 0.0); 5])
    }

    /// Order: c10, c01, c20, c11, c02.
    pub fn as_array(&self) -> [Complex64; 5] {
        [self.c10, self.c01, self.c20, self.c11, self.c02]
    }

    pub fn from_array(c: [Complex64; 5]) -> Self {
        Self {
            c10: c[0],
            c01: c[1],
            c20: c[2],
            c11: c[3],
            c02: c[4],
        }
    }

    pub fn one_photon_max(&self) -> f64 {
        self.c10.norm().max(self.c01.norm())
    }

    pub fn two_photon_max(&self) -> f64 {
        self.c20.norm().max(self.c11.norm()).max(self.c02.norm())
    }

    /// Probabilities of one photon and of two photons in cavity 1,
    /// `|C₁₀|²` and `|C₂₀|²`.
    pub fn cavity1_probabilities(&self) -> (f64, f64) {
        (self.c10.norm_sqr(), self.c20.norm_sqr())
    }
}
