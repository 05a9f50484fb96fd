//! Configuration, sweeps over both solver routes, figure presets and
//! table output.

mod certify;
mod config;
mod figures;
mod sweep;
mod table;

pub use certify::certify_table;
pub use config::{echo, echo_text, parse_config, parse_config_str, parse_overrides, ConfigError, ExperimentConfig, Origin, KNOWN_KEYS};
pub use figures::{
    figure_panels, reproduce_figure, run_delayed, run_panel, tau_grid, FigureId, Panel, PanelJob, PanelOutput,
    ANALYTIC_POINTS, GRID_POINTS, NUMERIC_POINTS, TAU_MAX, TAU_POINTS,
};
pub use sweep::{
    analytic_amplitudes, disagreement, form_name, parse_form, run_sweep, Axis, Observable, Route, RunSettings,
    SweepParameter, SweepSpec, Threads, DISAGREEMENT_FLOOR,
};
pub use table::{emit, format_number, parse_csv, render, Cell, OutputFormat, ResultTable};
