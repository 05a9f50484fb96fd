use num_complex::Complex64;

use crate::model::SystemParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseClass {
    Unbroken,
    ExceptionalPoint,
    Broken,
}

impl PhaseClass {
    pub fn name(self) -> &'static str {
        match self {
            PhaseClass::Unbroken => "unbroken",
            PhaseClass::ExceptionalPoint => "exceptional_point",
            PhaseClass::Broken => "broken",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtPhase {
    pub classification: PhaseClass,
    /// `(ε₊, ε₋)`.
    pub eigenvalues: [Complex64; 2],
    /// The square root separating the pair, `√(J² − (κ₁/2)²)` in the
    /// balanced case.
    pub splitting: Complex64,
}

/// Which 2×2 block to diagonalize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subspace {
    /// Linear mode matrix, Kerr term dropped.
    Linear,
    /// Single-excitation block `{|1,0⟩, |0,1⟩}`; the Kerr shift is split
    /// evenly in the balanced closed form.
    SingleExcitation,
}

/// Eigenvalues of the non-Hermitian mode matrix. At balanced gain and loss
/// the closed forms `Δ₁ ± √(J² − κ₁²/4)` (linear) and
/// `Δ₁ − g²/(2ω_m) ± √(J² − κ₁²/4)` (single excitation) are used; otherwise
/// the 2×2 matrix is diagonalized exactly.
pub fn pt_eigenvalues(p: &SystemParams, subspace: Subspace) -> PtPhase {
    let tol = 1e-12 * p.kappa1.abs().max(f64::MIN_POSITIVE);
    let (eigenvalues, splitting) = if p.is_pt_symmetric() {
        let root = Complex64::new(p.tunneling.powi(2) - (p.kappa1 / 2.0).powi(2), 0.0).sqrt();
        let centre = match subspace {
            Subspace::Linear => p.delta1,
            Subspace::SingleExcitation => p.delta1 - p.kerr() / 2.0,
        };
        let c = Complex64::new(centre, 0.0);
        ([c + root, c - root], root)
    } else {
        let shift = match subspace {
            Subspace::Linear => 0.0,
            Subspace::SingleExcitation => p.kerr(),
        };
        let a = Complex64::new(p.delta1 - shift, -p.kappa1 / 2.0);
        let d = Complex64::new(p.delta2, p.kappa2 / 2.0);
        let half = (a - d) / 2.0;
        let root = (half * half + p.tunneling * p.tunneling).sqrt();
        let mean = (a + d) / 2.0;
        ([mean + root, mean - root], root)
    };
    let classification = if p.is_pt_symmetric() && (p.tunneling - p.kappa1 / 2.0).abs() < tol {
        PhaseClass::ExceptionalPoint
    } else if eigenvalues.iter().all(|e| e.im.abs() < tol) {
        PhaseClass::Unbroken
    } else {
        PhaseClass::Broken
    };
    PtPhase {
        classification,
        eigenvalues,
        splitting,
    }
}

/// Detunings where a single-excitation eigenvalue is resonant with the
/// drive, `Δ₁ = g²/(2ω_m) ∓ √(J² − κ₁²/4)`, in ascending order. Empty
/// unless `J > κ₁/2`.
pub fn cpb_dip_locations(p: &SystemParams) -> Vec<f64> {
    let half = p.kappa1 / 2.0;
    if !(p.tunneling > half) {
        return Vec::new();
    }
    let r = (p.tunneling * p.tunneling - half * half).sqrt();
    let c = p.kerr() / 2.0;
    vec![c - r, c + r]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at_j(j: f64) -> SystemParams {
        let mut p = SystemParams::reference();
        p.tunneling = j;
        p
    }

    #[test]
    fn exceptional_point_is_degenerate_and_real() {
        let ph = pt_eigenvalues(&at_j(0.5), Subspace::Linear);
        assert_eq!(ph.classification, PhaseClass::ExceptionalPoint);
        assert!((ph.eigenvalues[0] - ph.eigenvalues[1]).norm() < 1e-12);
        assert!(ph.eigenvalues[0].im.abs() < 1e-12);
    }

    #[test]
    fn unbroken_and_broken_values() {
        let ph = pt_eigenvalues(&at_j(0.7), Subspace::Linear);
        assert_eq!(ph.classification, PhaseClass::Unbroken);
        assert!((ph.eigenvalues[0].re - 0.24f64.sqrt()).abs() < 1e-15);
        assert!((ph.eigenvalues[0].re - 0.4899).abs() < 1e-4);

        let ph = pt_eigenvalues(&at_j(0.4), Subspace::Linear);
        assert_eq!(ph.classification, PhaseClass::Broken);
        assert!((ph.eigenvalues[0] - Complex64::new(0.0, 0.3)).norm() < 1e-15);
        assert!((ph.eigenvalues[1] - Complex64::new(0.0, -0.3)).norm() < 1e-15);
    }

    #[test]
    fn single_excitation_shift() {
        let ph = pt_eigenvalues(&at_j(0.7).with_detuning(0.1), Subspace::SingleExcitation);
        assert!((ph.eigenvalues[1].re - (0.1 - 0.045 - 0.24f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn general_matrix_agrees_with_closed_form_near_symmetry() {
        let mut p = at_j(0.8);
        let sym = pt_eigenvalues(&p, Subspace::Linear);
        p.delta2 = 1e-9;
        let gen = pt_eigenvalues(&p, Subspace::Linear);
        assert!((sym.eigenvalues[0] - gen.eigenvalues[0]).norm() < 1e-8);
    }

    #[test]
    fn dip_locations() {
        assert!(cpb_dip_locations(&at_j(0.5)).is_empty());
        assert!(cpb_dip_locations(&at_j(0.4)).is_empty());
        let d = cpb_dip_locations(&at_j(0.7));
        assert!((d[0] + 0.4449).abs() < 1e-4 && (d[1] - 0.5349).abs() < 1e-4);
        let mut p = at_j(1.0);
        p.g = 0.0;
        let d = cpb_dip_locations(&p);
        assert!((d[1] - 3f64.sqrt() / 2.0).abs() < 1e-15 && (d[0] + d[1]).abs() < 1e-15);
    }
}
