use num_complex::Complex64;

use super::{AmplitudeSet, AnalyticError, SINGULAR_FLOOR};
use crate::linalg::{solve_dense, ComplexMatrix};
use crate::model::SystemParams;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn ci(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check(z: Complex64, factor: &'static str) -> Result<Complex64, AnalyticError> {
    if z.norm() < SINGULAR_FLOOR || !z.is_finite() {
        Err(AnalyticError::Singular { factor })
    } else {
        Ok(z)
    }
}

/// Closed-form amplitudes for the balanced gain-loss configuration
/// (`Δ₂ = Δ₁`, `κ₂ = κ₁`), dropping the `E*C₂₀` and `E*C₁₁` feedback.
pub fn pt_amplitudes(p: &SystemParams) -> Result<AmplitudeSet, AnalyticError> {
    if !p.is_pt_symmetric() {
        return Err(AnalyticError::NotPtSymmetric);
    }
    let (d, k, wm, g, j, e) = (p.delta1, p.kappa1, p.omega_m, p.g, p.tunneling, p.drive);
    let g2 = g * g;
    let x = ci(2.0 * d, k);
    let poly = 4.0 * d * d + k * k - 4.0 * j * j;
    let den = check(2.0 * g2 * x - wm * poly, "single-excitation denominator")?;
    let second = check(
        4.0 * g2 * g2 * x + 2.0 * d * wm * wm * poly
            - g2 * wm * ci(20.0 * d * d + k * k - 8.0 * j * j, 8.0 * d * k),
        "two-excitation factor",
    )?;
    let m = den * second;
    let e2 = e * e;
    let w2 = wm * wm;
    Ok(AmplitudeSet {
        c10: 2.0 * wm * e * x / den,
        c01: -4.0 * j * wm * e / den,
        c20: 2.0 * SQRT2 * w2 * e2 * x * x * (g2 - 2.0 * d * wm) / m,
        c11: 16.0 * j * w2 * e2 * x * (d * wm - g2) / m,
        c02: 16.0 * SQRT2 * j * j * w2 * e2 * (g2 - d * wm) / m,
    })
}

/// Coefficient matrix `A` and source `s` of the amplitude equations
/// `i dC/dt = A C + s` for `C = (C₁₀, C₀₁, C₂₀, C₁₁, C₀₂)` with `C₀₀ = 1`.
///
/// General detunings and signed `κ₂`; `keep_conjugate_drive` retains the
/// `√2 E* C₂₀` and `E* C₁₁` terms.
pub(crate) fn amplitude_system(p: &SystemParams, keep_conjugate_drive: bool) -> (ComplexMatrix, [Complex64; 5]) {
    let q = p.kerr();
    let d1 = ci(p.delta1, -p.kappa1 / 2.0);
    let d2 = ci(p.delta2, p.kappa2 / 2.0);
    let e = p.drive;
    let ec = if keep_conjugate_drive { e.conj() } else { ci(0.0, 0.0) };
    let j = ci(p.tunneling, 0.0);
    let z = ci(0.0, 0.0);
    let s = SQRT2;
    let rows = [
        [d1 - q, j, s * ec, z, z],
        [j, d2, z, ec, z],
        [s * e, z, 2.0 * d1 - 4.0 * q, s * j, z],
        [z, e, s * j, d1 + d2 - q, s * j],
        [z, z, z, s * j, 2.0 * d2],
    ];
    let a = ComplexMatrix::from_fn(5, 5, |r, c| rows[r][c]);
    (a, [e, z, z, z, z])
}

/// Steady state of the amplitude equations by a direct 5×5 solve. Valid for
/// any detunings and any sign of `κ₂`; with `keep_conjugate_drive = false`
/// it reproduces every closed form in this module.
pub fn stationary_amplitudes(p: &SystemParams, keep_conjugate_drive: bool) -> Result<AmplitudeSet, AnalyticError> {
    let (a, src) = amplitude_system(p, keep_conjugate_drive);
    let rhs: Vec<Complex64> = src.iter().map(|v| -v).collect();
    let x = solve_dense(&a, &rhs).map_err(|_| AnalyticError::Singular {
        factor: "amplitude system determinant",
    })?;
    Ok(AmplitudeSet::from_array([x[0], x[1], x[2], x[3], x[4]]))
}

/// `C₂₀` for unequal detunings with balanced rates `κ₂ = κ₁`; zero on the
/// line `Δ₁ + Δ₂ = g²/ω_m`.
pub fn unequal_detuning_c20(p: &SystemParams) -> Result<Complex64, AnalyticError> {
    if (p.kappa1 - p.kappa2).abs() > 1e-12 * p.kappa1.abs().max(1.0) {
        return Err(AnalyticError::NotBalanced);
    }
    let (d1, d2, k, wm, g, j, e) = (p.delta1, p.delta2, p.kappa1, p.omega_m, p.g, p.tunneling, p.drive);
    let g2 = g * g;
    let y = ci(2.0 * d2, k);
    let x = ci(2.0 * d1, -k);
    let sum = d1 + d2;
    let first = 4.0 * j * j * wm + y * (2.0 * g2 - wm * x);
    let second = 4.0 * j * j * wm * (2.0 * g2 - wm * sum) + y * (g2 - wm * sum) * (4.0 * g2 - wm * x);
    let den = check(first * second, "unequal-detuning denominator")?;
    Ok(2.0 * SQRT2 * wm * wm * e * e * y * y * (g2 - wm * sum) / den)
}

/// Which blockade condition to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockadeTarget {
    /// `C₂₀ = 0`: `Δ₁ = g²/(2ω_m)`.
    Cavity1,
    /// `C₁₁ = C₀₂ = 0`: `Δ₁ = g²/ω_m`.
    Cavity2AndCross,
}

pub fn optimal_detuning(target: BlockadeTarget, g: f64, omega_m: f64) -> f64 {
    match target {
        BlockadeTarget::Cavity1 => g * g / (2.0 * omega_m),
        BlockadeTarget::Cavity2AndCross => g * g / omega_m,
    }
}
