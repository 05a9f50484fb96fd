use super::{AmplitudeSet, AnalyticError};
use crate::correlation::{CorrelationRecord, Occupations};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationForm {
    /// Denominators include the two-photon populations.
    Exact,
    /// Leading order: `2|C₂₀|²/|C₁₀|⁴`, `2|C₀₂|²/|C₀₁|⁴`,
    /// `|C₁₁|²/(|C₁₀|²|C₀₁|²)`.
    Approximate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticCorrelations {
    pub record: CorrelationRecord,
    /// `2|C₀₂|²/|C₀₁|⁴`, the alternative leading-order expression for g12.
    pub g12_from_c02: Option<f64>,
    /// Whether the approximate g12 and `2|C₀₂|²/|C₀₁|⁴` agree to 1e-10
    /// relative. They coincide for balanced-gain closed-form amplitudes
    /// but not for arbitrary amplitude sets.
    pub g12_identity_holds: bool,
}

fn quotient(num: f64, den: f64, name: &'static str) -> Result<Option<f64>, AnalyticError> {
    if den > 0.0 {
        Ok(Some(num / den))
    } else if num == 0.0 {
        Ok(None)
    } else {
        Err(AnalyticError::DivisionByZero { correlation: name })
    }
}

pub fn correlations_from_amplitudes(
    amps: &AmplitudeSet,
    form: CorrelationForm,
) -> Result<AnalyticCorrelations, AnalyticError> {
    if amps.as_array().iter().all(|z| z.norm() == 0.0) {
        return Err(AnalyticError::NoExcitation);
    }
    let p10 = amps.c10.norm_sqr();
    let p01 = amps.c01.norm_sqr();
    let p20 = amps.c20.norm_sqr();
    let p11 = amps.c11.norm_sqr();
    let p02 = amps.c02.norm_sqr();
    let (n1, n2) = match form {
        CorrelationForm::Exact => (p10 + p11 + 2.0 * p20, p01 + p11 + 2.0 * p02),
        CorrelationForm::Approximate => (p10, p01),
    };
    let g1 = quotient(2.0 * p20, n1 * n1, "g1")?;
    let g2 = quotient(2.0 * p02, n2 * n2, "g2")?;
    let g12 = quotient(p11, n1 * n2, "g12")?;
    let g12_from_c02 = quotient(2.0 * p02, p01 * p01, "g12")?;
    let approx_g12 = quotient(p11, p10 * p01, "g12")?;
    let g12_identity_holds = match (approx_g12, g12_from_c02) {
        (Some(a), Some(b)) => (a - b).abs() <= 1e-10 * b.abs().max(f64::MIN_POSITIVE) || a == b,
        (None, None) => true,
        _ => false,
    };
    Ok(AnalyticCorrelations {
        record: CorrelationRecord {
            g1,
            g2,
            g12,
            occupations: Occupations { n1, n2, nm: None },
            params: None,
        },
        g12_from_c02,
        g12_identity_holds,
    })
}
