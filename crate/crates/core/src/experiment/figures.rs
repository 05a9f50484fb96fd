//! Preset sweeps for each figure, written one file per panel.

use std::io;
use std::path::{Path, PathBuf};

use super::config::echo;
use super::sweep::{run_sweep, Axis, Observable, Route, RunSettings, SweepParameter, SweepSpec, Threads};
use super::table::{emit, Cell, OutputFormat, ResultTable};
use crate::analytic::cpb_dip_locations;
use crate::model::{SystemParams, TruncationSpec};
use crate::numeric::{delayed_g2, DelayedMode};

pub const ANALYTIC_POINTS: usize = 2001;
pub const NUMERIC_POINTS: usize = 201;
pub const GRID_POINTS: usize = 201;
pub const TAU_MAX: f64 = 20.0;
pub const TAU_POINTS: usize = 201;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7a,
    Fig7b,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig2,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7a,
        FigureId::Fig7b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7a => "fig7a",
            FigureId::Fig7b => "fig7b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Clone, Debug)]
pub enum PanelJob {
    Sweep { spec: SweepSpec, params: SystemParams },
    Delayed { params: SystemParams, mode: DelayedMode },
    Lines(ResultTable),
}

#[derive(Clone, Debug)]
pub struct Panel {
    pub name: String,
    pub job: PanelJob,
}

fn pair(lo: f64, hi: f64, points: usize) -> Axis {
    Axis::new(SweepParameter::DetuningPair { offset: 0.0 }, lo, hi, points)
}

fn sweep(name: impl Into<String>, params: &SystemParams, spec: SweepSpec) -> Panel {
    Panel {
        name: name.into(),
        job: PanelJob::Sweep {
            spec,
            params: params.clone(),
        },
    }
}

/// `0.4` → `0p4`, `-1` → `m1`.
fn tag(x: f64) -> String {
    format!("{x}").replace('-', "m").replace('.', "p")
}

fn lines_table(columns: &[&str], rows: impl Iterator<Item = Vec<Cell>>) -> ResultTable {
    let mut t = ResultTable::new(columns.iter().map(|s| s.to_string()).collect());
    t.metadata = echo(&SystemParams::reference(), TruncationSpec::default(), None, &RunSettings::default());
    for (i, mut r) in rows.enumerate() {
        r.insert(0, i.into());
        t.push_row(r);
    }
    t
}

fn g_observables() -> [Observable; 4] {
    [Observable::G1, Observable::G2, Observable::G12, Observable::Occupations]
}

fn fig2() -> Vec<Panel> {
    let p = SystemParams::reference();
    let mut out = vec![
        sweep(
            "fig2_sweep_analytic",
            &p,
            SweepSpec::new(pair(-0.1, 0.2, ANALYTIC_POINTS), Route::Analytic, &g_observables()),
        ),
        sweep(
            "fig2_sweep_numeric",
            &p,
            SweepSpec::new(pair(-0.1, 0.2, NUMERIC_POINTS), Route::Both, &g_observables()),
        ),
    ];
    // g = 0 at Δ = 0 is the bare exceptional point, where the response
    // diverges; the g axis starts at 0.025.
    for obs in [Observable::G1, Observable::G2, Observable::G12] {
        let spec = SweepSpec::new(pair(-0.1, 0.3, GRID_POINTS), Route::Analytic, &[obs])
            .with_secondary(Axis::new(SweepParameter::G, 0.025, 5.0, GRID_POINTS));
        out.push(sweep(format!("fig2_grid_{}", obs.name()), &p, spec));
    }
    let g = Axis::new(SweepParameter::G, 0.0, 5.0, GRID_POINTS);
    let line = lines_table(
        &["index", "g", "delta1_opt_g1", "delta1_opt_g2_g12"],
        g.values().into_iter().map(|g| {
            let k = g * g / p.omega_m;
            vec![g.into(), (k / 2.0).into(), k.into()]
        }),
    );
    out.push(Panel {
        name: "fig2_optimal_line".into(),
        job: PanelJob::Lines(line),
    });
    out
}

fn fig4() -> Vec<Panel> {
    let p = SystemParams::reference();
    let k = p.kerr();
    let mut passive = p.clone().with_detuning(k / 2.0);
    passive.kappa2 = -passive.kappa1;
    let delayed = |name: &str, params: SystemParams, mode| Panel {
        name: name.into(),
        job: PanelJob::Delayed { params, mode },
    };
    vec![
        delayed("fig4_g1_tau", p.clone().with_detuning(k / 2.0), DelayedMode::Cavity1),
        delayed("fig4_g2_tau", p.clone().with_detuning(k), DelayedMode::Cavity2),
        delayed("fig4_g12_tau", p.clone().with_detuning(k), DelayedMode::Cross),
        delayed("fig4_passive_control", passive, DelayedMode::Cavity1),
    ]
}

fn detuning_pair_panels(prefix: &str, p: &SystemParams, analytic_obs: &[Observable]) -> Vec<Panel> {
    vec![
        sweep(
            format!("{prefix}_analytic"),
            p,
            SweepSpec::new(pair(-0.8, 0.8, ANALYTIC_POINTS), Route::Analytic, analytic_obs),
        ),
        sweep(
            format!("{prefix}_numeric"),
            p,
            SweepSpec::new(pair(-0.8, 0.8, NUMERIC_POINTS), Route::Both, &[Observable::G1]),
        ),
    ]
}

fn with_j(j: f64) -> SystemParams {
    let mut p = SystemParams::reference();
    p.tunneling = j;
    p
}

fn fig5() -> Vec<Panel> {
    let mut out = detuning_pair_panels("fig5a", &with_j(0.4), &[Observable::G1]);
    out.extend(detuning_pair_panels("fig5b", &with_j(0.7), &[Observable::G1]));
    let spec = SweepSpec::new(pair(-0.8, 0.8, GRID_POINTS), Route::Analytic, &[Observable::G1, Observable::Phase])
        .with_secondary(Axis::new(SweepParameter::J, 0.0, 1.0, GRID_POINTS));
    out.push(sweep("fig5c_grid", &SystemParams::reference(), spec));
    let js = Axis::new(SweepParameter::J, 0.0, 1.0, GRID_POINTS);
    let lines = lines_table(
        &["index", "J", "cpb_dip_minus", "cpb_dip_plus", "upb_dip"],
        js.values().into_iter().map(|j| {
            let p = with_j(j);
            let dips = cpb_dip_locations(&p);
            vec![
                j.into(),
                dips.first().copied().into(),
                dips.last().copied().into(),
                (p.kerr() / 2.0).into(),
            ]
        }),
    );
    out.push(Panel {
        name: "fig5c_lines".into(),
        job: PanelJob::Lines(lines),
    });
    out.push(sweep(
        "fig5d_probabilities",
        &with_j(0.7),
        SweepSpec::new(pair(-0.8, 0.8, ANALYTIC_POINTS), Route::Analytic, &[Observable::Amplitudes]),
    ));
    out
}

fn fig6() -> Vec<Panel> {
    [0.0, 0.1, 0.4, 0.6]
        .into_iter()
        .flat_map(|j| detuning_pair_panels(&format!("fig6_J{}", tag(j)), &with_j(j), &[Observable::G1]))
        .collect()
}

fn fig7a() -> Vec<Panel> {
    [(1.0, "balanced"), (-1.0, "double_passive"), (0.5, "gain0p5"), (0.8, "gain0p8")]
        .into_iter()
        .map(|(k2, label)| {
            let mut p = SystemParams::reference();
            p.kappa2 = k2;
            sweep(
                format!("fig7a_{label}"),
                &p,
                SweepSpec::new(pair(-0.1, 0.2, NUMERIC_POINTS), Route::Both, &[Observable::G1]),
            )
        })
        .collect()
}

fn fig7b() -> Vec<Panel> {
    let p = SystemParams::reference();
    let k = p.kerr();
    let spec = |param| SweepSpec::new(Axis::new(param, -0.1, 0.2, NUMERIC_POINTS), Route::Both, &[Observable::G1]);
    let mut out = vec![
        sweep("fig7b_linked", &p, spec(SweepParameter::DetuningPair { offset: 0.0 })),
        sweep("fig7b_shifted", &p, spec(SweepParameter::DetuningPair { offset: k })),
    ];
    for d2 in [-0.05, 0.1] {
        let mut q = p.clone();
        q.delta2 = d2;
        out.push(sweep(format!("fig7b_delta2_{}", tag(d2)), &q, spec(SweepParameter::Delta1)));
    }
    out
}

pub fn figure_panels(id: FigureId) -> Vec<Panel> {
    match id {
        FigureId::Fig2 => fig2(),
        FigureId::Fig4 => fig4(),
        FigureId::Fig5 => fig5(),
        FigureId::Fig6 => fig6(),
        FigureId::Fig7a => fig7a(),
        FigureId::Fig7b => fig7b(),
    }
}

/// `g⁽²⁾(τ)` on `[0, TAU_MAX]` as a table. A failed run keeps every row
/// with the error in `status`.
pub fn run_delayed(
    params: &SystemParams,
    trunc: TruncationSpec,
    mode: DelayedMode,
    taus: &[f64],
    settings: &RunSettings,
) -> ResultTable {
    let col = format!("{}_numeric", mode.name());
    let mut t = ResultTable::new(vec!["index".into(), "tau".into(), col, "status".into()]);
    t.metadata = echo(params, trunc, None, settings);
    t.set_meta("delayed_mode", mode.name());
    match delayed_g2(params, trunc, mode, taus, &settings.steady) {
        Ok(vals) => {
            for (i, (tau, g)) in vals.into_iter().enumerate() {
                t.push_row(vec![i.into(), tau.into(), g.into(), "ok".into()]);
            }
        }
        Err(e) => {
            for (i, &tau) in taus.iter().enumerate() {
                t.push_row(vec![i.into(), tau.into(), None.into(), format!("numeric_failed: {e}").into()]);
            }
        }
    }
    t.set_meta("failed_points", t.failures().to_string());
    t
}

pub fn tau_grid() -> Vec<f64> {
    Axis::new(SweepParameter::J, 0.0, TAU_MAX, TAU_POINTS).values()
}

pub fn run_panel(panel: &Panel, trunc: TruncationSpec, settings: &RunSettings, threads: Threads) -> ResultTable {
    let mut t = match &panel.job {
        PanelJob::Sweep { spec, params } => run_sweep(spec, params, trunc, settings, threads),
        PanelJob::Delayed { params, mode } => run_delayed(params, trunc, *mode, &tau_grid(), settings),
        PanelJob::Lines(t) => t.clone(),
    };
    t.set_meta("panel", panel.name.clone());
    t
}

#[derive(Clone, Debug, PartialEq)]
pub struct PanelOutput {
    pub path: PathBuf,
    pub rows: usize,
    pub failures: usize,
}

/// Runs every panel of `id` and writes `<out_dir>/<panel>.<ext>`.
pub fn reproduce_figure(
    id: FigureId,
    out_dir: &Path,
    format: OutputFormat,
    threads: Threads,
) -> io::Result<Vec<PanelOutput>> {
    std::fs::create_dir_all(out_dir)?;
    let trunc = TruncationSpec::default();
    let settings = RunSettings::default();
    let mut out = Vec::new();
    for panel in figure_panels(id) {
        let mut t = run_panel(&panel, trunc, &settings, threads);
        t.set_meta("figure", id.name());
        let path = out_dir.join(format!("{}.{}", panel.name, format.extension()));
        emit(&t, format, &path)?;
        out.push(PanelOutput {
            path,
            rows: t.rows.len(),
            failures: t.failures(),
        });
    }
    Ok(out)
}
