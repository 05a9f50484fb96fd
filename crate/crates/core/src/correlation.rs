//! Equal-time second-order correlations shared by both solver routes.

use crate::model::SystemParams;

/// Occupations below this are treated as empty and the correlations that
/// divide by them are reported as undefined.
pub const OCCUPATION_FLOOR: f64 = 1e-12;

/// Mean photon/phonon numbers. The amplitude route has no mechanics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Occupations {
    pub n1: f64,
    pub n2: f64,
    pub nm: Option<f64>,
}

/// `g₁⁽²⁾(0)`, `g₂⁽²⁾(0)`, `g₁₂⁽²⁾(0)`; `None` marks an undefined quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationRecord {
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub g12: Option<f64>,
    pub occupations: Occupations,
    pub params: Option<SystemParams>,
}

impl CorrelationRecord {
    /// Builds a record from raw numerators and occupations, applying
    /// [`OCCUPATION_FLOOR`].
    pub fn from_moments(pair1: f64, pair2: f64, cross: f64, occupations: Occupations) -> Self {
        let (n1, n2) = (occupations.n1, occupations.n2);
        let ok1 = n1.abs() > OCCUPATION_FLOOR;
        let ok2 = n2.abs() > OCCUPATION_FLOOR;
        Self {
            g1: ok1.then(|| pair1 / (n1 * n1)),
            g2: ok2.then(|| pair2 / (n2 * n2)),
            g12: (ok1 && ok2).then(|| cross / (n1 * n2)),
            occupations,
            params: None,
        }
    }

    pub fn with_params(mut self, p: &SystemParams) -> Self {
        self.params = Some(p.clone());
        self
    }

    /// The three values in the order g1, g2, g12.
    pub fn values(&self) -> [Option<f64>; 3] {
        [self.g1, self.g2, self.g12]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_marks_undefined() {
        let occ = Occupations {
            n1: 1e-13,
            n2: 0.5,
            nm: None,
        };
        let r = CorrelationRecord::from_moments(0.0, 0.25, 0.0, occ);
        assert_eq!(r.g1, None);
        assert_eq!(r.g2, Some(1.0));
        assert_eq!(r.g12, None);
    }
}
