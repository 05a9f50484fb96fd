use num_complex::Complex64;

use super::{DensityMatrix, NumericError};
use crate::linalg::{ComplexMatrix, OdeIntegrator, OdeOptions, OdeStats};
use crate::model::Liouvillian;

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Abort when the Frobenius norm of the state exceeds this multiple of
    /// its initial norm.
    pub norm_growth_limit: f64,
    /// Debug fallback: fixed integrator step.
    pub fixed_step: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            norm_growth_limit: 1e8,
            fixed_step: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvolveStats {
    pub ode: OdeStats,
    /// Largest `‖ρ − ρ†‖_F` seen before per-step re-symmetrization.
    pub max_hermiticity_defect: f64,
    /// Largest `|Tr ρ(t) − Tr ρ(0)|` over accepted steps.
    pub max_trace_drift: f64,
}

fn frob(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn symmetrize_in_place(v: &mut [Complex64], n: usize) -> f64 {
    let mut defect = 0.0;
    for i in 0..n {
        let d = v[i * n + i];
        defect += 4.0 * d.im * d.im;
        v[i * n + i] = Complex64::new(d.re, 0.0);
        for j in (i + 1)..n {
            let (a, b) = (v[i * n + j], v[j * n + i]);
            defect += 2.0 * (a - b.conj()).norm_sqr();
            let avg = (a + b.conj()) * 0.5;
            v[i * n + j] = avg;
            v[j * n + i] = avg.conj();
        }
    }
    defect.sqrt()
}

/// Integrates `dρ/dt = L(ρ)` from `rho0` and returns the state at each time
/// of `times` (ascending, `≥ 0`). The Hermitian part is restored after every
/// accepted step. The input need not have unit trace.
pub fn evolve_sampled(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<(Vec<DensityMatrix>, EvolveStats), NumericError> {
    let n = rho0.dimension();
    if l.dim() != n {
        return Err(NumericError::InvalidInput(format!(
            "state dimension {n} does not match generator dimension {}",
            l.dim()
        )));
    }
    let ode = OdeIntegrator::new(OdeOptions {
        fixed_step: opts.fixed_step,
        ..OdeOptions::with_tolerances(opts.rel_tol, opts.abs_tol)
    });
    let trace0 = rho0.trace().re;
    let limit = opts.norm_growth_limit * rho0.matrix.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut max_defect: f64 = 0.0;
    let mut max_drift: f64 = 0.0;
    let (outs, ode_stats) = ode.solve(
        |_, y, out| l.apply(y, out),
        rho0.matrix.as_slice(),
        0.0,
        times,
        |t, y| {
            max_defect = max_defect.max(symmetrize_in_place(y, n));
            let tr: f64 = (0..n).map(|i| y[i * n + i].re).sum();
            max_drift = max_drift.max((tr - trace0).abs());
            let norm = frob(y);
            if !(norm <= limit) {
                return Err(NumericError::Runaway { t, trace: tr, norm });
            }
            Ok(())
        },
    )?;
    let states = outs
        .into_iter()
        .map(|v| DensityMatrix::new(ComplexMatrix::from_vec(n, n, v).expect("square"), rho0.dims))
        .collect();
    Ok((
        states,
        EvolveStats {
            ode: ode_stats,
            max_hermiticity_defect: max_defect,
            max_trace_drift: max_drift,
        },
    ))
}

/// `ρ(t)` for a single end time.
pub fn evolve(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    t: f64,
    opts: &EvolveOptions,
) -> Result<(DensityMatrix, EvolveStats), NumericError> {
    if !(t >= 0.0) {
        return Err(NumericError::InvalidInput(format!("t = {t} must be >= 0")));
    }
    let (mut states, stats) = evolve_sampled(rho0, l, &[t], opts)?;
    Ok((states.pop().expect("one time requested"), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_liouvillian, OperatorSet, SystemParams, TruncationSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn passive_no_coupling() -> SystemParams {
        let mut p = SystemParams::reference();
        p.g = 0.0;
        p.tunneling = 0.0;
        p.drive = Complex64::new(0.0, 0.0);
        p.kappa2 = -1.0;
        p
    }

    #[test]
    fn undriven_vacuum_is_stationary() {
        let dims = TruncationSpec::new(2, 2, 2);
        let ops = OperatorSet::new(dims);
        let mut p = SystemParams::reference();
        p.drive = Complex64::new(0.0, 0.0);
        p.n_th = 0.0;
        let l = make_liouvillian(&p, &ops);
        let v = DensityMatrix::vacuum(dims);
        let (rho, _) = evolve(&v, &l, 5.0, &EvolveOptions::default()).unwrap();
        assert!(rho.matrix.sub(&v.matrix).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn photon_number_decays() {
        let dims = TruncationSpec::new(2, 2, 2);
        let ops = OperatorSet::new(dims);
        let l = make_liouvillian(&passive_no_coupling(), &ops);
        let start = DensityMatrix::fock(dims, 1, 0, 0);
        let times = [0.25, 1.0, 2.5];
        let (states, stats) = evolve_sampled(&start, &l, &times, &EvolveOptions::default()).unwrap();
        for (t, s) in times.iter().zip(&states) {
            assert!((s.occupations().0 - (-t).exp()).abs() < 1e-7);
        }
        assert!(stats.max_trace_drift < 1e-8);
    }

    #[test]
    fn short_time_matches_generator() {
        let dims = TruncationSpec::new(2, 2, 2);
        let ops = OperatorSet::new(dims);
        let mut p = SystemParams::reference().with_detuning(0.1);
        p.omega_m = 2.0;
        p.gamma_m = 0.2;
        p.drive = Complex64::new(0.3, 0.0);
        let l = make_liouvillian(&p, &ops);
        let n = dims.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut r = m.matmul(&m.dagger()).unwrap();
        let tr = r.trace().unwrap();
        r = r.scale(tr.inv());
        let rho0 = DensityMatrix::new(r.clone(), dims);
        let dt = 1e-4;
        let opts = EvolveOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            ..Default::default()
        };
        let (rho, _) = evolve(&rho0, &l, dt, &opts).unwrap();
        let mut lin = r.clone();
        lin.axpy(Complex64::new(dt, 0.0), &l.apply_matrix(&r)).unwrap();
        let err = rho.matrix.sub(&lin).unwrap().frobenius_norm();
        let scale = l.apply_matrix(&l.apply_matrix(&r)).frobenius_norm();
        assert!(err < dt * dt * scale, "{err} vs {}", dt * dt * scale);
    }

    #[test]
    fn runaway_is_reported() {
        let dims = TruncationSpec::new(2, 2, 2);
        let ops = OperatorSet::new(dims);
        let mut p = passive_no_coupling();
        p.kappa2 = 4.0;
        let l = make_liouvillian(&p, &ops);
        let start = DensityMatrix::fock(dims, 0, 1, 0);
        let opts = EvolveOptions {
            norm_growth_limit: 100.0,
            ..Default::default()
        };
        match evolve(&start, &l, 50.0, &opts) {
            Err(NumericError::Runaway { t, .. }) => assert!(t > 0.0 && t < 50.0),
            other => panic!("expected runaway, got {other:?}"),
        }
    }
}
