use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optoblock::experiment::{
    certify_table, emit, parse_config, parse_overrides, render, reproduce_figure, run_sweep, Axis, ConfigError,
    ExperimentConfig, FigureId, Observable, OutputFormat, ResultTable, Route, RunSettings, SweepParameter, SweepSpec,
    Threads,
};
use optoblock::model::{SystemParams, TruncationSpec};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_POINTS: u8 = 3;

#[derive(Parser)]
#[command(name = "optoblock", version, about = "Photon-blockade sweeps for the gain-loss double-cavity optomechanical model")]
struct Cli {
    /// Worker threads for sweep points (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; defaults to the output file extension, else csv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file. Trailing `--key value`
    /// pairs override file settings.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "OVERRIDES")]
        overrides: Vec<String>,
    },
    /// Write every panel of a figure preset into a directory.
    Figure {
        id: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Raise Fock cutoffs until the correlations stop moving.
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "OVERRIDES")]
        overrides: Vec<String>,
    },
    /// Eigenvalues and PT phase over a tunneling range `start:stop:points`.
    Phase {
        #[arg(long = "J", value_name = "START:STOP:POINTS")]
        j: String,
        /// Other parameters; the reference set if omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Config(String),
    Other(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn output_format(output: &Output) -> Result<OutputFormat, Failure> {
    match &output.format {
        Some(f) => OutputFormat::parse(f).ok_or_else(|| Failure::Config(format!("unknown format `{f}` (csv or json)"))),
        None => Ok(output.out.as_deref().map_or(OutputFormat::Csv, OutputFormat::for_path)),
    }
}

fn write_table(table: &ResultTable, output: &Output) -> Result<(), Failure> {
    let format = output_format(output)?;
    match &output.out {
        Some(path) => emit(table, format, path).map_err(|e| Failure::Other(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(render(table, format).as_bytes())
            .map_err(|e| Failure::Other(e.to_string())),
    }
}

/// Trailing arguments may still carry `--threads`, `--out` and `--format`;
/// they are taken out before the rest are read as config overrides.
fn split_cli_flags(args: Vec<String>, output: &mut Output, threads: &mut Threads) -> Result<Vec<String>, Failure> {
    let mut rest = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let (flag, inline) = match a.split_once('=') {
            Some((f, v)) => (f.to_string(), Some(v.to_string())),
            None => (a.clone(), None),
        };
        if !matches!(flag.as_str(), "--threads" | "--out" | "--format") {
            rest.push(a);
            continue;
        }
        let value = match inline.or_else(|| it.next()) {
            Some(v) => v,
            None => return Err(Failure::Config(format!("{flag}: missing value"))),
        };
        match flag.as_str() {
            "--threads" => {
                let n = value
                    .parse::<usize>()
                    .map_err(|_| Failure::Config(format!("--threads: expected a count, got `{value}`")))?;
                threads.0 = Some(n);
            }
            "--out" => output.out = Some(PathBuf::from(value)),
            _ => output.format = Some(value),
        }
    }
    Ok(rest)
}

fn load(config: &Path, overrides: &[String]) -> Result<ExperimentConfig, Failure> {
    let overrides = parse_overrides(overrides)?;
    Ok(parse_config(config, &overrides)?)
}

fn points_status(table: &ResultTable) -> u8 {
    let failed = table.failures();
    if failed > 0 {
        eprintln!("{failed} of {} points failed; see the status column", table.rows.len());
        EXIT_POINTS
    } else {
        0
    }
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), Failure> {
    let bad = || Failure::Config(format!("--J: expected START:STOP:POINTS, got `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let (a, b) = (a.parse::<f64>().map_err(|_| bad())?, b.parse::<f64>().map_err(|_| bad())?);
    let n = n.parse::<usize>().map_err(|_| bad())?;
    if n < 2 || !(a < b) || a < 0.0 {
        return Err(Failure::Config(format!("--J: need 0 <= START < STOP and POINTS >= 2, got `{s}`")));
    }
    Ok((a, b, n))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut threads = Threads(cli.threads);
    match cli.command {
        Command::Sweep {
            config,
            mut output,
            overrides,
        } => {
            let overrides = split_cli_flags(overrides, &mut output, &mut threads)?;
            let cfg = load(&config, &overrides)?;
            let spec = cfg
                .sweep
                .as_ref()
                .ok_or(ConfigError::Missing {
                    key: "sweep.parameter".into(),
                })?;
            output_format(&output)?;
            let table = run_sweep(spec, &cfg.params, cfg.trunc, &cfg.settings, threads);
            write_table(&table, &output)?;
            Ok(points_status(&table))
        }
        Command::Figure { id, out, format } => {
            let fig = FigureId::parse(&id).ok_or_else(|| {
                let names: Vec<&str> = FigureId::ALL.iter().map(|f| f.name()).collect();
                Failure::Config(format!("unknown figure `{id}` (expected one of {})", names.join(", ")))
            })?;
            let format =
                OutputFormat::parse(&format).ok_or_else(|| Failure::Config(format!("unknown format `{format}`")))?;
            let outputs = reproduce_figure(fig, &out, format, threads)
                .map_err(|e| Failure::Other(format!("{}: {e}", out.display())))?;
            let mut failed = 0;
            for o in &outputs {
                eprintln!("{} ({} rows, {} failed)", o.path.display(), o.rows, o.failures);
                failed += o.failures;
            }
            Ok(if failed > 0 { EXIT_POINTS } else { 0 })
        }
        Command::Certify {
            config,
            mut output,
            overrides,
        } => {
            let overrides = split_cli_flags(overrides, &mut output, &mut threads)?;
            let cfg = load(&config, &overrides)?;
            output_format(&output)?;
            match certify_table(&cfg.params, cfg.trunc, &cfg.settings) {
                Ok((report, table)) => {
                    write_table(&table, &output)?;
                    let c = report.certified;
                    eprintln!("certified truncation: n1_max={} n2_max={} nm_max={}", c.n1_max, c.n2_max, c.nm_max);
                    Ok(0)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(EXIT_POINTS)
                }
            }
        }
        Command::Phase { j, config, output } => {
            let (start, stop, points) = parse_range(&j)?;
            let (params, trunc, settings) = match config {
                Some(path) => {
                    let cfg = load(&path, &[])?;
                    (cfg.params, cfg.trunc, cfg.settings)
                }
                None => (SystemParams::reference(), TruncationSpec::default(), RunSettings::default()),
            };
            output_format(&output)?;
            let spec = SweepSpec::new(
                Axis::new(SweepParameter::J, start, stop, points),
                Route::Analytic,
                &[Observable::Eigenvalues, Observable::Phase],
            );
            let table = run_sweep(&spec, &params, trunc, &settings, threads);
            write_table(&table, &output)?;
            Ok(points_status(&table))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
