use num_complex::Complex64;

use super::ModelError;

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Physical rates, detunings and couplings of the driven double-cavity
/// optomechanical system, all in units of the passive-cavity decay rate.
///
/// `kappa2` is signed: positive is gain on cavity 2 (the balanced
/// gain-loss configuration uses `kappa2 = kappa1`), negative turns cavity 2
/// into a second lossy cavity with decay `|kappa2|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    pub delta1: f64,
    pub delta2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub omega_m: f64,
    pub gamma_m: f64,
    pub g: f64,
    pub tunneling: f64,
    pub drive: Complex64,
    pub n_th: f64,
}

impl SystemParams {
    /// Caption parameter set of the detuning sweeps: ω_m = 100, γ_m = ω_m/10⁶,
    /// J = 0.5, g = 3, E = 0.01, balanced gain, n_th at 1 mK with
    /// κ₁ = 2π MHz. Detunings start at zero.
    pub fn reference() -> Self {
        let omega_m = 100.0;
        Self {
            delta1: 0.0,
            delta2: 0.0,
            kappa1: 1.0,
            kappa2: 1.0,
            omega_m,
            gamma_m: omega_m / 1e6,
            g: 3.0,
            tunneling: 0.5,
            drive: Complex64::new(0.01, 0.0),
            n_th: thermal_occupation(1e-3, omega_m * 2.0 * std::f64::consts::PI * 1e6),
        }
    }

    /// Same detuning on both cavities.
    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.delta1 = delta;
        self.delta2 = delta;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("omega_m", self.omega_m),
            ("gamma_m", self.gamma_m),
            ("g", self.g),
            ("J", self.tunneling),
            ("E", self.drive.re),
            ("E_im", self.drive.im),
            ("n_th", self.n_th),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(ModelError::Invalid {
                    field: name,
                    reason: format!("{v} is not finite"),
                });
            }
        }
        let positive = |field: &'static str, v: f64| {
            if v > 0.0 {
                Ok(())
            } else {
                Err(ModelError::Invalid {
                    field,
                    reason: format!("must be > 0, got {v}"),
                })
            }
        };
        let nonneg = |field: &'static str, v: f64| {
            if v >= 0.0 {
                Ok(())
            } else {
                Err(ModelError::Invalid {
                    field,
                    reason: format!("must be >= 0, got {v}"),
                })
            }
        };
        positive("kappa1", self.kappa1)?;
        positive("omega_m", self.omega_m)?;
        nonneg("gamma_m", self.gamma_m)?;
        nonneg("J", self.tunneling)?;
        nonneg("n_th", self.n_th)
    }

    /// g/ω_m; the reduced Kerr description assumes this is small.
    pub fn coupling_ratio(&self) -> f64 {
        self.g / self.omega_m
    }

    /// Kerr strength g²/ω_m of the polaron-reduced model.
    pub fn kerr(&self) -> f64 {
        self.g * self.g / self.omega_m
    }

    /// Δ₁ = Δ₂ and κ₂ = κ₁ (to relative precision `1e-12`).
    pub fn is_pt_symmetric(&self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        close(self.delta1, self.delta2) && close(self.kappa1, self.kappa2)
    }

    /// κ₂ = −κ₁: both cavities lossy with equal rates.
    pub fn is_double_passive(&self) -> bool {
        (self.kappa2 + self.kappa1).abs() <= 1e-12 * self.kappa1.abs().max(1.0)
    }
}

/// Fock-space cutoffs: mode `k` keeps occupations `0..=nk_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncationSpec {
    pub n1_max: usize,
    pub n2_max: usize,
    pub nm_max: usize,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self {
            n1_max: 3,
            n2_max: 3,
            nm_max: 4,
        }
    }
}

impl TruncationSpec {
    pub fn new(n1_max: usize, n2_max: usize, nm_max: usize) -> Self {
        Self { n1_max, n2_max, nm_max }
    }

    /// Each cutoff must hold the two-photon states |2,0⟩, |0,2⟩.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, v) in [("n1_max", self.n1_max), ("n2_max", self.n2_max), ("nm_max", self.nm_max)] {
            if v < 2 {
                return Err(ModelError::Invalid {
                    field,
                    reason: format!("cutoff must be >= 2, got {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.n1_max + 1, self.n2_max + 1, self.nm_max + 1]
    }

    pub fn dimension(&self) -> usize {
        self.dims().iter().product()
    }

    /// Basis index of |n1, n2, nm⟩ (cavity 1 most significant).
    pub fn index(&self, n1: usize, n2: usize, nm: usize) -> usize {
        let [_, d2, dm] = self.dims();
        (n1 * d2 + n2) * dm + nm
    }

    /// Inverse of [`TruncationSpec::index`].
    pub fn occupations(&self, index: usize) -> (usize, usize, usize) {
        let [_, d2, dm] = self.dims();
        (index / (d2 * dm), (index / dm) % d2, index % dm)
    }
}

/// Bose–Einstein occupation `1/(exp(ħω/k_BT) − 1)` for temperature in
/// kelvin and angular frequency in rad/s. Zero temperature gives zero.
pub fn thermal_occupation(temperature_kelvin: f64, omega_rad_per_s: f64) -> f64 {
    if temperature_kelvin <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega_rad_per_s / (BOLTZMANN * temperature_kelvin);
    1.0 / x.exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_thermal_occupation() {
        // ħω/k_BT = 4.7993 for ω = 2π·100 MHz at 1 mK
        let n = SystemParams::reference().n_th;
        let x: f64 = HBAR * 2.0 * std::f64::consts::PI * 1e8 / (BOLTZMANN * 1e-3);
        assert!((x - 4.7993).abs() < 1e-3);
        assert!((n - 0.008300).abs() < 1e-5, "n_th = {n}");
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut p = SystemParams::reference();
        assert!(p.validate().is_ok());
        p.kappa1 = 0.0;
        assert!(p.validate().is_err());
        let mut p = SystemParams::reference();
        p.tunneling = -0.1;
        assert!(p.validate().is_err());
        let mut p = SystemParams::reference();
        p.delta1 = f64::NAN;
        assert!(p.validate().is_err());
    }

    #[test]
    fn truncation_indexing_round_trips() {
        let t = TruncationSpec::new(3, 2, 4);
        assert!(t.validate().is_ok());
        assert_eq!(t.dimension(), 4 * 3 * 5);
        for i in 0..t.dimension() {
            let (a, b, c) = t.occupations(i);
            assert_eq!(t.index(a, b, c), i);
        }
        assert!(TruncationSpec::new(1, 3, 3).validate().is_err());
    }

    #[test]
    fn symmetry_predicates() {
        let p = SystemParams::reference().with_detuning(0.3);
        assert!(p.is_pt_symmetric());
        let mut q = p.clone();
        q.kappa2 = -1.0;
        assert!(q.is_double_passive());
        assert!(!q.is_pt_symmetric());
    }
}
