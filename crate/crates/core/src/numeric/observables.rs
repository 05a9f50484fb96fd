use num_complex::Complex64;

use super::evolve::evolve_sampled;
use super::steady::stationary_solve;
use super::{DensityMatrix, NumericError, SteadyStateOptions};
use crate::correlation::{CorrelationRecord, Occupations, OCCUPATION_FLOOR};
use crate::linalg::{ComplexMatrix, SparseOperator};
use crate::model::{Liouvillian, OperatorSet, SystemParams, TruncationSpec};

/// Equal-time correlations `⟨a†a†aa⟩/⟨a†a⟩²` for each cavity and
/// `⟨a₁†a₂†a₂a₁⟩/(⟨a₁†a₁⟩⟨a₂†a₂⟩)`. All three operators are diagonal in the
/// Fock basis, so only the populations of `rho` are read.
pub fn correlations(rho: &DensityMatrix, ops: &OperatorSet) -> CorrelationRecord {
    let dims = ops.dims;
    assert_eq!(dims, rho.dims, "state and operators use different truncations");
    let (mut pair1, mut pair2, mut cross) = (0.0, 0.0, 0.0);
    for i in 0..dims.dimension() {
        let (a, b, _) = dims.occupations(i);
        let (a, b) = (a as f64, b as f64);
        let p = rho.matrix[(i, i)].re;
        pair1 += a * (a - 1.0) * p;
        pair2 += b * (b - 1.0) * p;
        cross += a * b * p;
    }
    let (n1, n2, nm) = rho.occupations();
    CorrelationRecord::from_moments(pair1, pair2, cross, Occupations { n1, n2, nm: Some(nm) })
}

/// Which delayed correlation to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayedMode {
    Cavity1,
    Cavity2,
    /// Condition on a cavity-1 photon, probe cavity 2.
    Cross,
}

impl DelayedMode {
    pub fn name(self) -> &'static str {
        match self {
            DelayedMode::Cavity1 => "g1",
            DelayedMode::Cavity2 => "g2",
            DelayedMode::Cross => "g12",
        }
    }
}

/// `g⁽²⁾(τ)` by evolving the conditional operator `a ρ_s a†` under the same
/// generator: `Tr(n_probe e^{Lτ}[a ρ_s a†]) / (⟨n_cond⟩⟨n_probe⟩)`.
///
/// `tau_grid` must be ascending and non-negative. Entries are `None` when
/// an occupation is below the floor.
pub fn delayed_g2(
    p: &SystemParams,
    trunc: TruncationSpec,
    mode: DelayedMode,
    tau_grid: &[f64],
    opts: &SteadyStateOptions,
) -> Result<Vec<(f64, Option<f64>)>, NumericError> {
    p.validate()?;
    trunc.validate()?;
    if tau_grid.iter().any(|t| !(*t >= 0.0)) || tau_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(NumericError::InvalidInput("tau grid must be ascending and non-negative".into()));
    }
    let ops = OperatorSet::new(trunc);
    let l = Liouvillian::new(p, &ops, opts.gain_model);
    let ss = stationary_solve(&l, trunc, opts)?;
    if !ss.converged {
        return Err(NumericError::NotConverged { residual: ss.residual });
    }
    let (n1, n2, _) = ss.rho.occupations();
    let (cond, cond_n, probe_n) = match mode {
        DelayedMode::Cavity1 => (&ops.a1, n1, n1),
        DelayedMode::Cavity2 => (&ops.a2, n2, n2),
        DelayedMode::Cross => (&ops.a1, n1, n2),
    };
    let probe_index = match mode {
        DelayedMode::Cavity1 => 0,
        _ => 1,
    };
    let n = trunc.dimension();
    let mut conditioned = ComplexMatrix::zeros(n, n);
    SparseOperator::from_dense(cond).sandwich_acc(Complex64::new(1.0, 0.0), ss.rho.matrix.as_slice(), conditioned.as_mut_slice());
    let start = DensityMatrix::new(conditioned, trunc);
    let defined = cond_n > OCCUPATION_FLOOR && probe_n > OCCUPATION_FLOOR;
    let (states, _) = evolve_sampled(&start, &l, tau_grid, &opts.evolve)?;
    Ok(tau_grid
        .iter()
        .zip(&states)
        .map(|(&tau, s)| {
            let occ = s.occupations();
            let probe = if probe_index == 0 { occ.0 } else { occ.1 };
            (tau, defined.then(|| probe / (cond_n * probe_n)))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::steady_state;

    #[test]
    fn vacuum_is_undefined() {
        let dims = TruncationSpec::default();
        let r = correlations(&DensityMatrix::vacuum(dims), &OperatorSet::new(dims));
        assert_eq!(r.values(), [None, None, None]);
    }

    #[test]
    fn single_photon_cannot_pair() {
        let dims = TruncationSpec::default();
        let r = correlations(&DensityMatrix::fock(dims, 1, 0, 0), &OperatorSet::new(dims));
        assert_eq!(r.g1, Some(0.0));
        assert_eq!(r.g2, None);
    }

    #[test]
    fn coherent_state_is_poissonian() {
        let dims = TruncationSpec::new(6, 2, 2);
        let rho = DensityMatrix::coherent_cavity1(dims, Complex64::new(0.15, 0.1));
        let g1 = correlations(&rho, &OperatorSet::new(dims)).g1.unwrap();
        assert!((g1 - 1.0).abs() < 1e-3, "{g1}");
    }

    #[test]
    fn delayed_value_at_zero_matches_equal_time() {
        let mut p = SystemParams::reference().with_detuning(0.045);
        p.kappa2 = -1.0;
        let dims = TruncationSpec::new(2, 2, 2);
        let opts = SteadyStateOptions::default();
        let ss = steady_state(&p, dims, &opts).unwrap();
        let eq = correlations(&ss.rho, &OperatorSet::new(dims));
        for (mode, want) in [
            (DelayedMode::Cavity1, eq.g1),
            (DelayedMode::Cavity2, eq.g2),
            (DelayedMode::Cross, eq.g12),
        ] {
            let v = delayed_g2(&p, dims, mode, &[0.0, 1.0], &opts).unwrap();
            let (a, b) = (v[0].1.unwrap(), want.unwrap());
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{mode:?}: {a} vs {b}");
        }
    }
}
