use num_complex::Complex64;

use super::{AmplitudeSet, AnalyticError, SINGULAR_FLOOR};
use crate::model::SystemParams;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn check(z: Complex64, factor: &'static str) -> Result<Complex64, AnalyticError> {
    if z.norm() < SINGULAR_FLOOR || !z.is_finite() {
        Err(AnalyticError::Singular { factor })
    } else {
        Ok(z)
    }
}

/// Closed-form amplitudes when both cavities decay at rate `κ₁` (signed
/// `κ₂ = −κ₁`), with `Δ₂ = Δ₁`. `κ₂` and `Δ₂` of `p` are not read.
///
/// The `C₁₁` prefactor is `−8J`; this is the sign the linear amplitude
/// equations produce.
pub fn passive_amplitudes(p: &SystemParams) -> Result<AmplitudeSet, AnalyticError> {
    let (d, k, wm, g, j, e) = (p.delta1, p.kappa1, p.omega_m, p.g, p.tunneling, p.drive);
    let g2 = g * g;
    let x = Complex64::new(2.0 * d, -k);
    let x2 = x * x;
    let den = check(2.0 * g2 * x - wm * (x2 - 4.0 * j * j), "single-excitation denominator")?;
    let second = check(
        4.0 * g2 * g2 * x - g2 * wm * (5.0 * x2 - 8.0 * j * j) + wm * wm * x * (x2 - 4.0 * j * j),
        "two-excitation factor",
    )?;
    let m = den * second;
    let e2 = e * e;
    let w2 = wm * wm;
    let shared = 2.0 * g2 - wm * x;
    Ok(AmplitudeSet {
        c10: 2.0 * wm * e * x / den,
        c01: -4.0 * j * wm * e / den,
        c20: 2.0 * SQRT2 * w2 * e2 * x2 * (g2 - wm * x) / m,
        c11: -8.0 * j * w2 * e2 * x * shared / m,
        c02: 8.0 * SQRT2 * j * j * w2 * e2 * shared / m,
    })
}

/// Evaluation of the two `C₂₀ = 0` conditions of the double-passive model
/// at one candidate root of the second.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCheck {
    pub delta1: f64,
    /// `12Δ₁² − 4Δ₁g²/ω_m`, which must equal `κ₁²`.
    pub first_lhs: f64,
    pub kappa1_sq: f64,
    pub first_satisfied: bool,
    /// `4Δ₁(g² − 4Δ₁ω_m)²`, which must vanish.
    pub second_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PassiveBlockadeReport {
    /// Set when the input is outside the model (non-decaying cavity 1).
    pub out_of_scope: Option<String>,
    pub roots: Vec<RootCheck>,
    pub jointly_solvable: bool,
}

/// Checks `12Δ₁² − 4Δ₁g²/ω_m = κ₁²` at the roots `Δ₁ = 0` and
/// `Δ₁ = g²/(4ω_m)` of `4Δ₁(g² − 4Δ₁ω_m)² = 0`.
pub fn passive_blockade_condition_check(p: &SystemParams) -> PassiveBlockadeReport {
    if !(p.kappa1 > 0.0) || !(p.omega_m > 0.0) {
        return PassiveBlockadeReport {
            out_of_scope: Some(format!(
                "passive cavity must decay (kappa1 = {}) and omega_m must be positive ({})",
                p.kappa1, p.omega_m
            )),
            roots: Vec::new(),
            jointly_solvable: false,
        };
    }
    let (g2, wm) = (p.g * p.g, p.omega_m);
    let k2 = p.kappa1 * p.kappa1;
    let roots: Vec<RootCheck> = [0.0, g2 / (4.0 * wm)]
        .into_iter()
        .map(|d| {
            let first_lhs = 12.0 * d * d - 4.0 * d * g2 / wm;
            RootCheck {
                delta1: d,
                first_lhs,
                kappa1_sq: k2,
                first_satisfied: (first_lhs - k2).abs() <= 1e-12 * k2.max(1.0),
                second_residual: 4.0 * d * (g2 - 4.0 * d * wm).powi(2),
            }
        })
        .collect();
    let jointly_solvable = roots.iter().any(|r| r.first_satisfied);
    PassiveBlockadeReport {
        out_of_scope: None,
        roots,
        jointly_solvable,
    }
}
