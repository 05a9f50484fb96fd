use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::table::{format_number, Cell, ResultTable};
use crate::analytic::{
    correlations_from_amplitudes, passive_amplitudes, pt_amplitudes, pt_eigenvalues, stationary_amplitudes,
    AmplitudeSet, AnalyticError, CorrelationForm, Subspace,
};
use crate::correlation::CorrelationRecord;
use crate::model::{OperatorSet, SystemParams, TruncationSpec};
use crate::numeric::{correlations, steady_state, SteadyStateOptions};

/// A swept quantity. `DetuningPair` moves Δ₁ and sets `Δ₂ = Δ₁ + offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepParameter {
    Delta1,
    Delta2,
    DetuningPair { offset: f64 },
    Kappa1,
    Kappa2,
    OmegaM,
    GammaM,
    G,
    J,
    E,
    NTh,
}

impl SweepParameter {
    pub const NAMES: [&'static str; 10] =
        ["delta1", "delta2", "kappa1", "kappa2", "omega_m", "gamma_m", "g", "J", "E", "n_th"];

    /// Config name; the pair is keyed by Δ₁.
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Delta1 | SweepParameter::DetuningPair { .. } => "delta1",
            SweepParameter::Delta2 => "delta2",
            SweepParameter::Kappa1 => "kappa1",
            SweepParameter::Kappa2 => "kappa2",
            SweepParameter::OmegaM => "omega_m",
            SweepParameter::GammaM => "gamma_m",
            SweepParameter::G => "g",
            SweepParameter::J => "J",
            SweepParameter::E => "E",
            SweepParameter::NTh => "n_th",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "delta1" => SweepParameter::Delta1,
            "delta2" => SweepParameter::Delta2,
            "kappa1" => SweepParameter::Kappa1,
            "kappa2" => SweepParameter::Kappa2,
            "omega_m" => SweepParameter::OmegaM,
            "gamma_m" => SweepParameter::GammaM,
            "g" => SweepParameter::G,
            "J" => SweepParameter::J,
            "E" => SweepParameter::E,
            "n_th" => SweepParameter::NTh,
            _ => return None,
        })
    }

    pub fn apply(self, p: &mut SystemParams, v: f64) {
        match self {
            SweepParameter::Delta1 => p.delta1 = v,
            SweepParameter::Delta2 => p.delta2 = v,
            SweepParameter::DetuningPair { offset } => {
                p.delta1 = v;
                p.delta2 = v + offset;
            }
            SweepParameter::Kappa1 => p.kappa1 = v,
            SweepParameter::Kappa2 => p.kappa2 = v,
            SweepParameter::OmegaM => p.omega_m = v,
            SweepParameter::GammaM => p.gamma_m = v,
            SweepParameter::G => p.g = v,
            SweepParameter::J => p.tunneling = v,
            SweepParameter::E => p.drive = Complex64::new(v, p.drive.im),
            SweepParameter::NTh => p.n_th = v,
        }
    }

    fn columns(self) -> Vec<&'static str> {
        match self {
            SweepParameter::DetuningPair { .. } => vec!["delta1", "delta2"],
            other => vec![other.name()],
        }
    }

    fn cells(self, p: &SystemParams) -> Vec<Cell> {
        match self {
            SweepParameter::DetuningPair { .. } => vec![p.delta1.into(), p.delta2.into()],
            SweepParameter::Delta1 => vec![p.delta1.into()],
            SweepParameter::Delta2 => vec![p.delta2.into()],
            SweepParameter::Kappa1 => vec![p.kappa1.into()],
            SweepParameter::Kappa2 => vec![p.kappa2.into()],
            SweepParameter::OmegaM => vec![p.omega_m.into()],
            SweepParameter::GammaM => vec![p.gamma_m.into()],
            SweepParameter::G => vec![p.g.into()],
            SweepParameter::J => vec![p.tunneling.into()],
            SweepParameter::E => vec![p.drive.re.into()],
            SweepParameter::NTh => vec![p.n_th.into()],
        }
    }
}

/// Evenly spaced grid from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(parameter: SweepParameter, start: f64, stop: f64, points: usize) -> Self {
        Self {
            parameter,
            start,
            stop,
            points,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.start];
        }
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                let t = i as f64 / last;
                self.start * (1.0 - t) + self.stop * t
            })
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points.max(2) - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Analytic,
    Numeric,
    Both,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Analytic => "analytic",
            Route::Numeric => "numeric",
            Route::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(Route::Analytic),
            "numeric" => Some(Route::Numeric),
            "both" => Some(Route::Both),
            _ => None,
        }
    }

    pub fn analytic(self) -> bool {
        matches!(self, Route::Analytic | Route::Both)
    }

    pub fn numeric(self) -> bool {
        matches!(self, Route::Numeric | Route::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Observable {
    G1,
    G2,
    G12,
    Occupations,
    Amplitudes,
    Eigenvalues,
    Phase,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::G1 => "g1",
            Observable::G2 => "g2",
            Observable::G12 => "g12",
            Observable::Occupations => "occupations",
            Observable::Amplitudes => "amplitudes",
            Observable::Eigenvalues => "eigenvalues",
            Observable::Phase => "phase",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "g1" => Observable::G1,
            "g2" => Observable::G2,
            "g12" => Observable::G12,
            "occupations" => Observable::Occupations,
            "amplitudes" => Observable::Amplitudes,
            "eigenvalues" => Observable::Eigenvalues,
            "phase" => Observable::Phase,
            _ => return None,
        })
    }

    fn needs_amplitudes(self) -> bool {
        matches!(
            self,
            Observable::G1 | Observable::G2 | Observable::G12 | Observable::Occupations | Observable::Amplitudes
        )
    }

    fn needs_state(self) -> bool {
        matches!(self, Observable::G1 | Observable::G2 | Observable::G12 | Observable::Occupations)
    }
}

/// A 1-D sweep, or a 2-D grid when `secondary` is set (rows run over the
/// secondary axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub primary: Axis,
    pub secondary: Option<Axis>,
    pub route: Route,
    /// Sorted, without duplicates.
    pub observables: Vec<Observable>,
}

impl SweepSpec {
    pub fn new(primary: Axis, route: Route, observables: &[Observable]) -> Self {
        let mut obs = observables.to_vec();
        obs.sort();
        obs.dedup();
        Self {
            primary,
            secondary: None,
            route,
            observables: obs,
        }
    }

    pub fn with_secondary(mut self, axis: Axis) -> Self {
        self.secondary = Some(axis);
        self
    }

    pub fn total_points(&self) -> usize {
        self.primary.points * self.secondary.map_or(1, |a| a.points)
    }

    /// Parameter sets in row order.
    pub fn points(&self, base: &SystemParams) -> Vec<SystemParams> {
        let inner = self.secondary.map(|a| a.values());
        let mut out = Vec::with_capacity(self.total_points());
        for x in self.primary.values() {
            let mut p = base.clone();
            self.primary.parameter.apply(&mut p, x);
            match (&inner, self.secondary) {
                (Some(ys), Some(ax)) => {
                    for &y in ys {
                        let mut q = p.clone();
                        ax.parameter.apply(&mut q, y);
                        out.push(q);
                    }
                }
                _ => out.push(p),
            }
        }
        out
    }
}

/// Solver choices that are part of the reproducible configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSettings {
    pub steady: SteadyStateOptions,
    pub analytic_form: CorrelationForm,
    pub certify_tol: f64,
    pub certify_max_cutoff: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            steady: SteadyStateOptions::default(),
            analytic_form: CorrelationForm::Exact,
            certify_tol: 0.01,
            certify_max_cutoff: 8,
        }
    }
}

pub fn form_name(f: CorrelationForm) -> &'static str {
    match f {
        CorrelationForm::Exact => "exact",
        CorrelationForm::Approximate => "approximate",
    }
}

pub fn parse_form(s: &str) -> Option<CorrelationForm> {
    match s {
        "exact" => Some(CorrelationForm::Exact),
        "approximate" => Some(CorrelationForm::Approximate),
        _ => None,
    }
}

/// Worker pool size; `None` uses all available cores. Ignored without the
/// `parallel` feature.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Threads(pub Option<usize>);

/// Two-photon amplitudes for any parameter point: the balanced closed form,
/// the double-passive closed form, or the linear amplitude system.
pub fn analytic_amplitudes(p: &SystemParams) -> Result<(AmplitudeSet, &'static str), AnalyticError> {
    let same_detuning = (p.delta1 - p.delta2).abs() <= 1e-12 * p.delta1.abs().max(1.0);
    if p.is_pt_symmetric() {
        Ok((pt_amplitudes(p)?, "balanced_closed_form"))
    } else if p.is_double_passive() && same_detuning {
        Ok((passive_amplitudes(p)?, "passive_closed_form"))
    } else {
        Ok((stationary_amplitudes(p, false)?, "linear_solve"))
    }
}

/// Values below which relative disagreement is not meaningful.
pub const DISAGREEMENT_FLOOR: f64 = 0.01;

const G_NAMES: [&str; 3] = ["g1", "g2", "g12"];

fn columns_for(spec: &SweepSpec) -> Vec<String> {
    let mut cols = vec!["index".to_string()];
    cols.extend(spec.primary.parameter.columns().iter().map(|s| s.to_string()));
    if let Some(ax) = spec.secondary {
        cols.extend(ax.parameter.columns().iter().map(|s| s.to_string()));
    }
    let routes: Vec<&str> = [
        spec.route.analytic().then_some("analytic"),
        spec.route.numeric().then_some("numeric"),
    ]
    .into_iter()
    .flatten()
    .collect();
    for &obs in &spec.observables {
        match obs {
            Observable::G1 | Observable::G2 | Observable::G12 => {
                for r in &routes {
                    cols.push(format!("{}_{r}", obs.name()));
                }
            }
            Observable::Occupations => {
                for r in &routes {
                    cols.push(format!("n1_{r}"));
                    cols.push(format!("n2_{r}"));
                }
                if spec.route.numeric() {
                    cols.push("nm_numeric".into());
                }
            }
            Observable::Amplitudes => {
                for c in ["c10", "c01", "c20", "c11", "c02"] {
                    cols.push(format!("abs2_{c}"));
                }
            }
            Observable::Eigenvalues => {
                for c in ["eig_plus_re", "eig_plus_im", "eig_minus_re", "eig_minus_im"] {
                    cols.push(c.into());
                }
            }
            Observable::Phase => cols.push("phase".into()),
        }
    }
    if spec.route.numeric() && spec.observables.iter().any(|o| o.needs_state()) {
        cols.push("residual_numeric".into());
        cols.push("min_eig_bound_numeric".into());
    }
    cols.push("status".into());
    cols
}

struct RouteValues {
    record: Option<CorrelationRecord>,
}

impl RouteValues {
    fn g(&self, obs: Observable) -> Option<f64> {
        let r = self.record.as_ref()?;
        match obs {
            Observable::G1 => r.g1,
            Observable::G2 => r.g2,
            _ => r.g12,
        }
    }
}

fn evaluate(
    index: usize,
    p: &SystemParams,
    spec: &SweepSpec,
    trunc: TruncationSpec,
    ops: Option<&OperatorSet>,
    settings: &RunSettings,
) -> Vec<Cell> {
    let mut status = Vec::new();
    let mut cells: Vec<Cell> = vec![index.into()];
    cells.extend(spec.primary.parameter.cells(p));
    if let Some(ax) = spec.secondary {
        cells.extend(ax.parameter.cells(p));
    }

    let wants_amps = spec.observables.iter().any(|o| o.needs_amplitudes());
    let mut amps = None;
    let mut analytic = RouteValues { record: None };
    if spec.route.analytic() && wants_amps {
        match analytic_amplitudes(p) {
            Ok((a, _)) => {
                amps = Some(a);
                match correlations_from_amplitudes(&a, settings.analytic_form) {
                    Ok(c) => analytic.record = Some(c.record),
                    Err(e) => status.push(format!("analytic_failed: {e}")),
                }
            }
            Err(e) => status.push(format!("analytic_failed: {e}")),
        }
    }

    let wants_state = spec.observables.iter().any(|o| o.needs_state());
    let mut numeric = RouteValues { record: None };
    let mut diagnostics = (None, None);
    if spec.route.numeric() && wants_state {
        match steady_state(p, trunc, &settings.steady) {
            Ok(ss) => {
                if !ss.converged {
                    status.push(format!("numeric_not_converged: residual {:.3e}", ss.residual));
                }
                let ops = ops.expect("operators built for numeric routes");
                numeric.record = Some(correlations(&ss.rho, ops));
                diagnostics = (Some(ss.residual), Some(ss.min_eig_bound));
            }
            Err(e) => status.push(format!("numeric_failed: {e}")),
        }
    }

    for &obs in &spec.observables {
        match obs {
            Observable::G1 | Observable::G2 | Observable::G12 => {
                if spec.route.analytic() {
                    cells.push(analytic.g(obs).into());
                }
                if spec.route.numeric() {
                    cells.push(numeric.g(obs).into());
                }
            }
            Observable::Occupations => {
                for (on, rv) in [(spec.route.analytic(), &analytic), (spec.route.numeric(), &numeric)] {
                    if on {
                        let occ = rv.record.as_ref().map(|r| r.occupations);
                        cells.push(occ.map(|o| o.n1).into());
                        cells.push(occ.map(|o| o.n2).into());
                    }
                }
                if spec.route.numeric() {
                    cells.push(numeric.record.as_ref().and_then(|r| r.occupations.nm).into());
                }
            }
            Observable::Amplitudes => {
                let a = amps.map(|a| a.as_array());
                for k in 0..5 {
                    cells.push(a.map(|a| a[k].norm_sqr()).into());
                }
            }
            Observable::Eigenvalues => {
                let ph = pt_eigenvalues(p, Subspace::Linear);
                let [ep, em] = ph.eigenvalues;
                for v in [ep.re, ep.im, em.re, em.im] {
                    cells.push(v.into());
                }
            }
            Observable::Phase => {
                cells.push(pt_eigenvalues(p, Subspace::Linear).classification.name().into());
            }
        }
    }
    if spec.route.numeric() && wants_state {
        cells.push(diagnostics.0.into());
        cells.push(diagnostics.1.into());
    }
    let status = if status.is_empty() { "ok".to_string() } else { status.join("; ") };
    cells.push(status.into());
    cells
}

fn evaluate_all(
    pts: &[SystemParams],
    spec: &SweepSpec,
    trunc: TruncationSpec,
    settings: &RunSettings,
    threads: Threads,
) -> Vec<Vec<Cell>> {
    let ops = spec.route.numeric().then(|| OperatorSet::new(trunc));
    let eval = |(i, p): (usize, &SystemParams)| evaluate(i, p, spec, trunc, ops.as_ref(), settings);
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.0.unwrap_or(0))
            .build()
            .expect("thread pool");
        // indexed collect keeps grid order
        pool.install(|| pts.par_iter().enumerate().map(eval).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        pts.iter().enumerate().map(eval).collect()
    }
}

/// Largest relative gap between paired `_analytic` and `_numeric` columns
/// over values above [`DISAGREEMENT_FLOOR`], and the largest absolute gap
/// below it.
pub fn disagreement(table: &ResultTable) -> (Option<f64>, Option<f64>) {
    let (mut rel, mut abs): (Option<f64>, Option<f64>) = (None, None);
    for name in G_NAMES {
        let (Some(a), Some(n)) = (
            table.numbers(&format!("{name}_analytic")),
            table.numbers(&format!("{name}_numeric")),
        ) else {
            continue;
        };
        for (a, n) in a.into_iter().zip(n) {
            let (Some(a), Some(n)) = (a, n) else { continue };
            if a.abs() > DISAGREEMENT_FLOOR {
                let r = (n - a).abs() / a.abs();
                rel = Some(rel.map_or(r, |m| m.max(r)));
            } else {
                let d = (n - a).abs();
                abs = Some(abs.map_or(d, |m| m.max(d)));
            }
        }
    }
    (rel, abs)
}

/// Evaluates every grid point. Failed points keep their row with a
/// non-`ok` status. Metadata holds the resolved configuration.
pub fn run_sweep(
    spec: &SweepSpec,
    params: &SystemParams,
    trunc: TruncationSpec,
    settings: &RunSettings,
    threads: Threads,
) -> ResultTable {
    let pts = spec.points(params);
    let mut table = ResultTable::new(columns_for(spec));
    table.metadata = super::config::echo(params, trunc, Some(spec), settings);
    for row in evaluate_all(&pts, spec, trunc, settings, threads) {
        table.push_row(row);
    }
    if spec.route == Route::Both {
        let (rel, abs) = disagreement(&table);
        let f = |v: Option<f64>| v.map(format_number).unwrap_or_else(|| "none".into());
        table.set_meta("max_rel_disagreement", f(rel));
        table.set_meta("max_abs_disagreement_below_floor", f(abs));
        table.set_meta("disagreement_floor", format_number(DISAGREEMENT_FLOOR));
    }
    table.set_meta("failed_points", table.failures().to_string());
    table
}
