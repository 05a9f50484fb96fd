//! Steady state of the master equation.
//!
//! The default method solves `L(ρ) = 0, Tr ρ = 1` directly as the bordered
//! system `L(ρ) + v·Tr ρ = v` with `v` the vacuum projector, by GMRES right
//! preconditioned with the exact inverse of the jump-free part
//! `ρ ↦ Aρ + ρA†` (a Sylvester solve through the Schur form of `A`).
//!
//! Long-time integration is kept as an alternative. With balanced gain the
//! truncated generator has eigenvalues in the right half-plane, so
//! integration from vacuum drifts away from the stationary point and is
//! reported as not converged.

use num_complex::Complex64;

use super::evolve::{evolve, EvolveOptions};
use super::{DensityMatrix, NumericError};
use crate::linalg::{gmres, ComplexMatrix, GmresOptions, SchurSylvester};
use crate::model::{GainModel, Liouvillian, OperatorSet, SystemParams, TruncationSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyStateMethod {
    Stationary,
    Evolution,
}

impl SteadyStateMethod {
    pub fn name(self) -> &'static str {
        match self {
            SteadyStateMethod::Stationary => "stationary",
            SteadyStateMethod::Evolution => "evolution",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "stationary" => Some(SteadyStateMethod::Stationary),
            "evolution" => Some(SteadyStateMethod::Evolution),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateOptions {
    pub method: SteadyStateMethod,
    /// Converged when `‖L(ρ)‖_F / ‖ρ‖_F` falls below this.
    pub residual_tol: f64,
    /// Integration cap for [`SteadyStateMethod::Evolution`], in `1/κ₁`.
    pub t_max: f64,
    /// Residual check spacing for [`SteadyStateMethod::Evolution`].
    pub check_interval: f64,
    pub gain_model: GainModel,
    pub gmres: GmresOptions,
    pub evolve: EvolveOptions,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            method: SteadyStateMethod::Stationary,
            residual_tol: 1e-7,
            t_max: 2000.0,
            check_interval: 10.0,
            gain_model: GainModel::SignedLoss,
            gmres: GmresOptions {
                rel_tol: 1e-13,
                restart: 60,
                max_iterations: 400,
            },
            evolve: EvolveOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    pub converged: bool,
    /// Integration time reached; `None` for the stationary solve.
    pub t_reached: Option<f64>,
    /// `‖L(ρ)‖_F / ‖ρ‖_F` of the returned state.
    pub residual: f64,
    /// Gershgorin lower bound on the smallest eigenvalue of `ρ`.
    pub min_eig_bound: f64,
    /// GMRES iterations (stationary) or accepted integrator steps.
    pub iterations: usize,
    pub method: SteadyStateMethod,
}

fn residual_of(l: &Liouvillian, rho: &ComplexMatrix) -> f64 {
    l.apply_matrix(rho).frobenius_norm() / rho.frobenius_norm().max(f64::MIN_POSITIVE)
}

fn finish(
    l: &Liouvillian,
    mut m: ComplexMatrix,
    dims: TruncationSpec,
    opts: &SteadyStateOptions,
    solver_ok: bool,
    t_reached: Option<f64>,
    iterations: usize,
) -> SteadyStateResult {
    let tr = m.trace().expect("square");
    if tr.norm() > 0.0 && tr.is_finite() {
        m = m.scale(tr.inv());
    }
    m.symmetrize();
    let residual = residual_of(l, &m);
    let rho = DensityMatrix::new(m, dims);
    SteadyStateResult {
        min_eig_bound: rho.min_eig_bound(),
        converged: solver_ok && residual < opts.residual_tol && residual.is_finite(),
        rho,
        t_reached,
        residual,
        iterations,
        method: opts.method,
    }
}

/// Solves the bordered stationary system for a prepared generator.
pub(crate) fn stationary_solve(
    l: &Liouvillian,
    dims: TruncationSpec,
    opts: &SteadyStateOptions,
) -> Result<SteadyStateResult, NumericError> {
    let n = l.dim();
    let schur = SchurSylvester::new(l.a_effective())?;
    let mut b = vec![Complex64::new(0.0, 0.0); n * n];
    b[0] = Complex64::new(1.0, 0.0);
    let apply = |x: &[Complex64], out: &mut [Complex64]| {
        l.apply(x, out);
        let tr: Complex64 = (0..n).map(|i| x[i * n + i]).sum();
        out[0] += tr;
    };
    let prec = |x: &[Complex64], out: &mut [Complex64]| schur.solve(x, out);
    let outcome = gmres(apply, prec, &b, None, &opts.gmres);
    let m = ComplexMatrix::from_vec(n, n, outcome.x)?;
    Ok(finish(l, m, dims, opts, outcome.converged || outcome.relative_residual < 1e-9, None, outcome.iterations))
}

fn evolution_solve(
    l: &Liouvillian,
    dims: TruncationSpec,
    opts: &SteadyStateOptions,
) -> Result<SteadyStateResult, NumericError> {
    let mut rho = DensityMatrix::vacuum(dims);
    let mut t = 0.0;
    let mut steps = 0;
    loop {
        let r = residual_of(l, &rho.matrix);
        if r < opts.residual_tol || t >= opts.t_max {
            return Ok(finish(l, rho.matrix, dims, opts, true, Some(t), steps));
        }
        let dt = opts.check_interval.min(opts.t_max - t);
        match evolve(&rho, l, dt, &opts.evolve) {
            Ok((next, stats)) => {
                rho = next;
                t += dt;
                steps += stats.ode.accepted;
            }
            Err(NumericError::Runaway { t: t_fail, .. }) => {
                return Ok(finish(l, rho.matrix, dims, opts, false, Some(t + t_fail), steps));
            }
            Err(NumericError::Linalg(crate::linalg::LinalgError::NonFinite { t: t_fail })) => {
                return Ok(finish(l, rho.matrix, dims, opts, false, Some(t + t_fail), steps));
            }
            Err(e) => return Err(e),
        }
    }
}

/// Steady state of the master equation for `p` on truncation `trunc`.
/// Non-convergence is reported through [`SteadyStateResult::converged`].
pub fn steady_state(
    p: &SystemParams,
    trunc: TruncationSpec,
    opts: &SteadyStateOptions,
) -> Result<SteadyStateResult, NumericError> {
    p.validate()?;
    trunc.validate()?;
    if !(opts.residual_tol > 0.0) {
        return Err(NumericError::InvalidInput("residual_tol must be positive".into()));
    }
    let ops = OperatorSet::new(trunc);
    let l = Liouvillian::new(p, &ops, opts.gain_model);
    match opts.method {
        SteadyStateMethod::Stationary => stationary_solve(&l, trunc, opts),
        SteadyStateMethod::Evolution => evolution_solve(&l, trunc, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::correlations;

    #[test]
    fn undriven_point_is_vacuum() {
        let mut p = SystemParams::reference();
        p.drive = Complex64::new(0.0, 0.0);
        p.n_th = 0.0;
        for method in [SteadyStateMethod::Stationary, SteadyStateMethod::Evolution] {
            let opts = SteadyStateOptions {
                method,
                ..Default::default()
            };
            let r = steady_state(&p, TruncationSpec::default(), &opts).unwrap();
            assert!(r.converged);
            assert!((r.rho.matrix[(0, 0)].re - 1.0).abs() < 1e-10);
            if method == SteadyStateMethod::Evolution {
                assert_eq!(r.t_reached, Some(0.0));
            }
        }
    }

    #[test]
    fn caption_point_converges_with_small_occupations() {
        let p = SystemParams::reference().with_detuning(0.045);
        let r = steady_state(&p, TruncationSpec::default(), &SteadyStateOptions::default()).unwrap();
        assert!(r.converged, "residual {}", r.residual);
        let (n1, n2, nm) = r.rho.occupations();
        // Photon-number noise heats the slowly damped mechanics to ~0.1.
        assert!(n1 < 0.05 && n2 < 0.05 && nm < 0.2, "{n1} {n2} {nm}");
        assert!((r.rho.trace().re - 1.0).abs() < 1e-12);
        assert!(r.iterations < 100);
    }

    #[test]
    fn double_passive_methods_agree() {
        // Mechanics damped fast enough for integration to settle quickly.
        let mut p = SystemParams::reference().with_detuning(0.045);
        p.kappa2 = -1.0;
        p.omega_m = 10.0;
        p.g = 1.0;
        p.gamma_m = 0.5;
        let dims = TruncationSpec::new(2, 2, 2);
        let stat = steady_state(&p, dims, &SteadyStateOptions::default()).unwrap();
        let evo = steady_state(
            &p,
            dims,
            &SteadyStateOptions {
                method: SteadyStateMethod::Evolution,
                residual_tol: 1e-8,
                check_interval: 5.0,
                evolve: EvolveOptions {
                    rel_tol: 1e-11,
                    abs_tol: 1e-14,
                    ..Default::default()
                },
                ..Default::default()
            },
        )
        .unwrap();
        assert!(stat.converged && evo.converged);
        let diff = stat.rho.matrix.sub(&evo.rho.matrix).unwrap().frobenius_norm();
        assert!(diff < 1e-6, "{diff}");
        let ops = OperatorSet::new(dims);
        let a = correlations(&stat.rho, &ops).g1.unwrap();
        let b = correlations(&evo.rho, &ops).g1.unwrap();
        assert!((a - b).abs() < 1e-4 * a);
    }

    #[test]
    fn balanced_gain_evolution_does_not_settle() {
        let mut p = SystemParams::reference().with_detuning(0.045);
        p.omega_m = 10.0;
        p.g = 1.0;
        p.gamma_m = 0.5;
        let dims = TruncationSpec::new(2, 2, 2);
        let opts = SteadyStateOptions {
            method: SteadyStateMethod::Evolution,
            t_max: 200.0,
            ..Default::default()
        };
        let r = steady_state(&p, dims, &opts).unwrap();
        assert!(!r.converged);
        assert!(r.residual > 1e-3);
        assert!(r.t_reached.unwrap() > 0.0);
        // The stationary point itself exists and is found directly.
        assert!(steady_state(&p, dims, &SteadyStateOptions::default()).unwrap().converged);
    }
}
