use super::observables::correlations;
use super::steady::stationary_solve;
use super::{NumericError, SteadyStateOptions};
use crate::model::{Liouvillian, OperatorSet, SystemParams, TruncationSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyOptions {
    /// No cutoff may grow beyond this.
    pub max_cutoff: usize,
    /// Relative changes are measured against `max(|old|, floor)` so that
    /// values near a blockade zero do not demand absurd precision.
    pub floor: f64,
    pub steady: SteadyStateOptions,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            max_cutoff: 8,
            floor: 0.01,
            steady: SteadyStateOptions::default(),
        }
    }
}

/// One round: correlations at `trunc` and the largest change caused by
/// raising each cutoff by one.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifyStep {
    pub trunc: TruncationSpec,
    pub values: [Option<f64>; 3],
    /// Per mode (cavity 1, cavity 2, mechanics).
    pub changes: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyReport {
    pub certified: TruncationSpec,
    pub values: [Option<f64>; 3],
    pub steps: Vec<CertifyStep>,
}

const MODE_NAMES: [&str; 3] = ["n1_max", "n2_max", "nm_max"];

fn bumped(t: TruncationSpec, mode: usize) -> TruncationSpec {
    let mut t = t;
    match mode {
        0 => t.n1_max += 1,
        1 => t.n2_max += 1,
        _ => t.nm_max += 1,
    }
    t
}

fn cutoff(t: TruncationSpec, mode: usize) -> usize {
    [t.n1_max, t.n2_max, t.nm_max][mode]
}

fn values_at(p: &SystemParams, t: TruncationSpec, opts: &CertifyOptions) -> Result<[Option<f64>; 3], NumericError> {
    let ops = OperatorSet::new(t);
    let l = Liouvillian::new(p, &ops, opts.steady.gain_model);
    let ss = stationary_solve(&l, t, &opts.steady)?;
    if !ss.converged {
        return Err(NumericError::NotConverged { residual: ss.residual });
    }
    Ok(correlations(&ss.rho, &ops).values())
}

fn change(old: &[Option<f64>; 3], new: &[Option<f64>; 3], floor: f64) -> f64 {
    old.iter()
        .zip(new)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => (b - a).abs() / a.abs().max(floor),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Raises cutoffs one level at a time until raising any single cutoff moves
/// every correlation by less than `observable_tol` (relative, with the
/// floor of [`CertifyOptions::floor`]).
pub fn truncation_certify(
    p: &SystemParams,
    base: TruncationSpec,
    observable_tol: f64,
    opts: &CertifyOptions,
) -> Result<CertifyReport, NumericError> {
    p.validate()?;
    base.validate()?;
    if !(observable_tol > 0.0) {
        return Err(NumericError::InvalidInput("observable_tol must be positive".into()));
    }
    let mut current = base;
    let mut values = values_at(p, current, opts)?;
    let mut steps = Vec::new();
    loop {
        let mut changes = [0.0; 3];
        for (mode, slot) in changes.iter_mut().enumerate() {
            let trial = bumped(current, mode);
            *slot = change(&values, &values_at(p, trial, opts)?, opts.floor);
        }
        steps.push(CertifyStep {
            trunc: current,
            values,
            changes,
        });
        if changes.iter().all(|c| *c < observable_tol) {
            return Ok(CertifyReport {
                certified: current,
                values,
                steps,
            });
        }
        for mode in 0..3 {
            if changes[mode] >= observable_tol {
                if cutoff(current, mode) + 1 > opts.max_cutoff {
                    return Err(NumericError::CertificationFailed {
                        mode: MODE_NAMES[mode],
                        cap: opts.max_cutoff,
                        change: changes[mode],
                    });
                }
                current = bumped(current, mode);
            }
        }
        values = values_at(p, current, opts)?;
    }
}
