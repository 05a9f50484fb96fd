//! Flat `key = value` configuration with `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use super::sweep::{form_name, parse_form, Axis, Observable, Route, RunSettings, SweepParameter, SweepSpec};
use super::table::format_number;
use crate::model::{thermal_occupation, GainModel, ModelError, SystemParams, TruncationSpec};
use crate::numeric::SteadyStateMethod;

pub const KNOWN_KEYS: &[&str] = &[
    "delta1",
    "delta2",
    "kappa1",
    "kappa2",
    "omega_m",
    "gamma_m",
    "g",
    "J",
    "E",
    "E_im",
    "n_th",
    "temperature_mK",
    "omega_m_2pi_MHz",
    "n1_max",
    "n2_max",
    "nm_max",
    "gain_model",
    "steady_method",
    "residual_tol",
    "t_max",
    "analytic_form",
    "certify_tol",
    "certify_max_cutoff",
    "sweep.parameter",
    "sweep.start",
    "sweep.stop",
    "sweep.points",
    "sweep.route",
    "sweep.observables",
];

const REQUIRED: &[&str] = &["delta1", "delta2", "kappa2", "omega_m", "gamma_m", "g", "J", "E"];

/// Where a setting came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    CommandLine,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::CommandLine => write!(f, "command line"),
            Origin::Default => write!(f, "default"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{origin}: key `{key}`: {message}")]
    Invalid { origin: Origin, key: String, message: String },
    #[error("missing required key `{key}`")]
    Missing { key: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl ConfigError {
    /// The offending key, if one is known.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { key, .. } | ConfigError::Missing { key } => Some(key),
            ConfigError::Io { .. } => None,
        }
    }
}

/// Fully resolved configuration. `sweep` is present when `sweep.parameter`
/// is set.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub params: SystemParams,
    /// `Some(offset)` when the file sets `delta2 = delta1 + offset`.
    pub delta2_offset: Option<f64>,
    pub trunc: TruncationSpec,
    pub sweep: Option<SweepSpec>,
    pub settings: RunSettings,
}

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    origin: Origin,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn invalid(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            origin: self.0.get(key).map_or(Origin::Default, |e| e.origin),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|e| e.value.as_str())
    }

    fn num(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Some(x)),
            Ok(_) => Err(self.invalid(key, format!("`{v}` is not a finite number"))),
            Err(_) => Err(self.invalid(key, format!("unparsable number `{v}`"))),
        }
    }

    fn num_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.num(key)?.unwrap_or(default))
    }

    fn required(&self, key: &str) -> Result<f64, ConfigError> {
        self.num(key)?.ok_or_else(|| ConfigError::Missing { key: key.to_string() })
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        let Some(v) = self.raw(key) else { return Ok(default) };
        v.parse::<usize>()
            .map_err(|_| self.invalid(key, format!("unparsable non-negative integer `{v}`")))
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.num_or(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.invalid(key, format!("must be > 0, got {v}")))
        }
    }
}

fn insert(map: &mut BTreeMap<String, Entry>, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
    let err = |message: String| ConfigError::Invalid {
        origin,
        key: key.to_string(),
        message,
    };
    if !KNOWN_KEYS.contains(&key) {
        return Err(err("unknown key".into()));
    }
    if value.is_empty() {
        return Err(err("empty value".into()));
    }
    if let (Origin::Line(_), Some(prev)) = (origin, map.get(key)) {
        return Err(err(format!("duplicate key, first set on {}", prev.origin)));
    }
    map.insert(
        key.to_string(),
        Entry {
            value: value.to_string(),
            origin,
        },
    );
    Ok(())
}

/// `delta2` is a number or `delta1`, optionally `± offset`.
fn parse_delta2(v: &str) -> Option<Result<f64, ()>> {
    let compact: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    let rest = compact.strip_prefix("delta1")?;
    if rest.is_empty() {
        return Some(Ok(0.0));
    }
    let (sign, num) = match rest.split_at(1) {
        ("+", n) => (1.0, n),
        ("-", n) => (-1.0, n),
        _ => return Some(Err(())),
    };
    Some(num.parse::<f64>().ok().filter(|x| x.is_finite()).map(|x| sign * x).ok_or(()))
}

fn model_error(entries: &Entries, e: ModelError) -> ConfigError {
    let ModelError::Invalid { field, reason } = e;
    entries.invalid(field, reason)
}

/// Parses config text with command-line overrides applied on top.
pub fn parse_config_str(text: &str, overrides: &[(String, String)]) -> Result<ExperimentConfig, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let origin = Origin::Line(i + 1);
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(ConfigError::Invalid {
                origin,
                key: body.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        insert(&mut map, k.trim(), v.trim(), origin)?;
    }
    for (k, v) in overrides {
        insert(&mut map, k, v.trim(), Origin::CommandLine)?;
    }
    resolve(&Entries(map))
}

pub fn parse_config(path: &Path, overrides: &[(String, String)]) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text, overrides)
}

/// Splits `--key value` / `--key=value` pairs.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let bad = |message: &str| ConfigError::Invalid {
            origin: Origin::CommandLine,
            key: a.clone(),
            message: message.into(),
        };
        let Some(flag) = a.strip_prefix("--") else {
            return Err(bad("expected `--key value`"));
        };
        let (k, v) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| bad("missing value"))?;
                (flag.to_string(), v.clone())
            }
        };
        if !KNOWN_KEYS.contains(&k.as_str()) {
            return Err(ConfigError::Invalid {
                origin: Origin::CommandLine,
                key: k,
                message: "unknown key".into(),
            });
        }
        out.push((k, v));
    }
    Ok(out)
}

fn resolve(e: &Entries) -> Result<ExperimentConfig, ConfigError> {
    for key in REQUIRED {
        if !e.has(key) {
            return Err(ConfigError::Missing { key: key.to_string() });
        }
    }
    let delta1 = e.required("delta1")?;
    let raw_d2 = e.raw("delta2").expect("checked above");
    let (delta2, delta2_offset) = match parse_delta2(raw_d2) {
        Some(Ok(off)) => (delta1 + off, Some(off)),
        Some(Err(())) => {
            return Err(e.invalid("delta2", format!("expected a number or `delta1 [+|- offset]`, got `{raw_d2}`")))
        }
        None => (e.required("delta2")?, None),
    };

    let block = ["temperature_mK", "omega_m_2pi_MHz"];
    let n_th = match (e.num("n_th")?, block.iter().find(|k| e.has(k))) {
        (Some(_), Some(k)) => return Err(e.invalid(k, "conflicts with `n_th`; set one or the other")),
        (Some(n), None) => n,
        (None, Some(_)) => {
            let t = e.required("temperature_mK")?;
            let f = e.required("omega_m_2pi_MHz")?;
            if t < 0.0 {
                return Err(e.invalid("temperature_mK", format!("must be >= 0, got {t}")));
            }
            if f <= 0.0 {
                return Err(e.invalid("omega_m_2pi_MHz", format!("must be > 0, got {f}")));
            }
            thermal_occupation(t * 1e-3, f * 2.0 * std::f64::consts::PI * 1e6)
        }
        (None, None) => return Err(ConfigError::Missing { key: "n_th".into() }),
    };

    let params = SystemParams {
        delta1,
        delta2,
        kappa1: e.num_or("kappa1", 1.0)?,
        kappa2: e.required("kappa2")?,
        omega_m: e.required("omega_m")?,
        gamma_m: e.required("gamma_m")?,
        g: e.required("g")?,
        tunneling: e.required("J")?,
        drive: Complex64::new(e.required("E")?, e.num_or("E_im", 0.0)?),
        n_th,
    };
    params.validate().map_err(|m| model_error(e, m))?;

    let defaults = TruncationSpec::default();
    let trunc = TruncationSpec::new(
        e.count("n1_max", defaults.n1_max)?,
        e.count("n2_max", defaults.n2_max)?,
        e.count("nm_max", defaults.nm_max)?,
    );
    trunc.validate().map_err(|m| model_error(e, m))?;

    let mut settings = RunSettings::default();
    if let Some(v) = e.raw("gain_model") {
        settings.steady.gain_model =
            GainModel::parse(v).ok_or_else(|| e.invalid("gain_model", format!("expected signed_loss or incoherent, got `{v}`")))?;
    }
    if let Some(v) = e.raw("steady_method") {
        settings.steady.method = SteadyStateMethod::parse(v)
            .ok_or_else(|| e.invalid("steady_method", format!("expected stationary or evolution, got `{v}`")))?;
    }
    if let Some(v) = e.raw("analytic_form") {
        settings.analytic_form =
            parse_form(v).ok_or_else(|| e.invalid("analytic_form", format!("expected exact or approximate, got `{v}`")))?;
    }
    settings.steady.residual_tol = e.positive("residual_tol", settings.steady.residual_tol)?;
    settings.steady.t_max = e.positive("t_max", settings.steady.t_max)?;
    settings.certify_tol = e.positive("certify_tol", settings.certify_tol)?;
    settings.certify_max_cutoff = e.count("certify_max_cutoff", settings.certify_max_cutoff)?;

    let sweep = resolve_sweep(e, &params, delta2_offset)?;
    Ok(ExperimentConfig {
        params,
        delta2_offset,
        trunc,
        sweep,
        settings,
    })
}

fn resolve_sweep(
    e: &Entries,
    base: &SystemParams,
    delta2_offset: Option<f64>,
) -> Result<Option<SweepSpec>, ConfigError> {
    let Some(name) = e.raw("sweep.parameter") else {
        if let Some(k) = KNOWN_KEYS.iter().find(|k| k.starts_with("sweep.") && e.has(k)) {
            return Err(e.invalid(k, "sweep settings given without `sweep.parameter`"));
        }
        return Ok(None);
    };
    let mut parameter = SweepParameter::parse(name).ok_or_else(|| {
        e.invalid(
            "sweep.parameter",
            format!("`{name}` is not sweepable; expected one of {}", SweepParameter::NAMES.join(", ")),
        )
    })?;
    match (parameter, delta2_offset) {
        (SweepParameter::Delta1, Some(offset)) => parameter = SweepParameter::DetuningPair { offset },
        (SweepParameter::Delta2, Some(_)) => {
            return Err(e.invalid("sweep.parameter", "delta2 is linked to delta1; sweep delta1 instead"))
        }
        _ => {}
    }
    let start = e.num("sweep.start")?.ok_or(ConfigError::Missing { key: "sweep.start".into() })?;
    let stop = e.num("sweep.stop")?.ok_or(ConfigError::Missing { key: "sweep.stop".into() })?;
    let points = e.count("sweep.points", 0)?;
    if !e.has("sweep.points") {
        return Err(ConfigError::Missing { key: "sweep.points".into() });
    }
    if points < 2 {
        return Err(e.invalid("sweep.points", format!("must be >= 2, got {points}")));
    }
    if !(start < stop) {
        return Err(e.invalid("sweep.stop", format!("must exceed sweep.start ({start}), got {stop}")));
    }
    for (key, v) in [("sweep.start", start), ("sweep.stop", stop)] {
        let mut p = base.clone();
        parameter.apply(&mut p, v);
        if let Err(ModelError::Invalid { field, reason }) = p.validate() {
            return Err(e.invalid(key, format!("{field} {reason}")));
        }
    }
    let route = match e.raw("sweep.route") {
        Some(v) => Route::parse(v)
            .ok_or_else(|| e.invalid("sweep.route", format!("expected analytic, numeric or both, got `{v}`")))?,
        None => Route::Both,
    };
    let observables = match e.raw("sweep.observables") {
        Some(v) => {
            let mut obs = Vec::new();
            for item in v.split(',').map(str::trim) {
                obs.push(
                    Observable::parse(item)
                        .ok_or_else(|| e.invalid("sweep.observables", format!("unknown observable `{item}`")))?,
                );
            }
            obs
        }
        None => vec![Observable::G1, Observable::G2, Observable::G12],
    };
    if observables.contains(&Observable::Amplitudes) && !route.analytic() {
        return Err(e.invalid("sweep.observables", "amplitudes need route analytic or both"));
    }
    Ok(Some(SweepSpec::new(Axis::new(parameter, start, stop, points), route, &observables)))
}

/// The configuration as `key = value` pairs that parse back to the same
/// values. Swept parameters are echoed at their base value.
pub fn echo(
    params: &SystemParams,
    trunc: TruncationSpec,
    sweep: Option<&SweepSpec>,
    settings: &RunSettings,
) -> Vec<(String, String)> {
    let n = |x: f64| format_number(x);
    let linked = sweep.and_then(|s| match s.primary.parameter {
        SweepParameter::DetuningPair { offset } => Some(offset),
        _ => None,
    });
    let delta2 = match linked {
        Some(off) if off < 0.0 => format!("delta1 - {}", n(-off)),
        Some(off) => format!("delta1 + {}", n(off)),
        None => n(params.delta2),
    };
    let mut out: Vec<(String, String)> = vec![
        ("tool".into(), "optoblock".into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("delta1".into(), n(params.delta1)),
        ("delta2".into(), delta2),
        ("kappa1".into(), n(params.kappa1)),
        ("kappa2".into(), n(params.kappa2)),
        ("omega_m".into(), n(params.omega_m)),
        ("gamma_m".into(), n(params.gamma_m)),
        ("g".into(), n(params.g)),
        ("J".into(), n(params.tunneling)),
        ("E".into(), n(params.drive.re)),
        ("E_im".into(), n(params.drive.im)),
        ("n_th".into(), n(params.n_th)),
        ("n1_max".into(), trunc.n1_max.to_string()),
        ("n2_max".into(), trunc.n2_max.to_string()),
        ("nm_max".into(), trunc.nm_max.to_string()),
        ("gain_model".into(), settings.steady.gain_model.name().into()),
        ("steady_method".into(), settings.steady.method.name().into()),
        ("residual_tol".into(), n(settings.steady.residual_tol)),
        ("t_max".into(), n(settings.steady.t_max)),
        ("analytic_form".into(), form_name(settings.analytic_form).into()),
        ("certify_tol".into(), n(settings.certify_tol)),
        ("certify_max_cutoff".into(), settings.certify_max_cutoff.to_string()),
    ];
    if let Some(s) = sweep {
        let axes = std::iter::once(("sweep", s.primary)).chain(s.secondary.map(|a| ("sweep2", a)));
        for (prefix, a) in axes {
            out.push((format!("{prefix}.parameter"), a.parameter.name().into()));
            out.push((format!("{prefix}.start"), n(a.start)));
            out.push((format!("{prefix}.stop"), n(a.stop)));
            out.push((format!("{prefix}.points"), a.points.to_string()));
        }
        out.push(("sweep.route".into(), s.route.name().into()));
        let obs: Vec<&str> = s.observables.iter().map(|o| o.name()).collect();
        out.push(("sweep.observables".into(), obs.join(",")));
    }
    out
}

/// [`echo`] rendered as config text, skipping the keys that are not
/// settings.
pub fn echo_text(entries: &[(String, String)]) -> String {
    entries
        .iter()
        .filter(|(k, _)| KNOWN_KEYS.contains(&k.as_str()))
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAPTION: &str = "\
# balanced gain, caption parameters
delta1 = 0.0
delta2 = delta1
kappa1 = 1
kappa2 = 1.0   # gain
omega_m = 100
gamma_m = 1e-4
g = 3
J = 0.5
E = 0.01
temperature_mK = 1
omega_m_2pi_MHz = 100
sweep.parameter = delta1
sweep.start = -0.1
sweep.stop = 0.2
sweep.points = 201
";

    fn err(text: &str) -> ConfigError {
        parse_config_str(text, &[]).unwrap_err()
    }

    #[test]
    fn caption_file_resolves() {
        let c = parse_config_str(CAPTION, &[]).unwrap();
        assert_eq!(c.params.kappa2, 1.0);
        assert!(c.params.is_pt_symmetric());
        assert!((c.params.n_th - SystemParams::reference().n_th).abs() < 1e-15);
        let s = c.sweep.unwrap();
        assert_eq!(s.primary.parameter, SweepParameter::DetuningPair { offset: 0.0 });
        assert_eq!(s.route, Route::Both);
        assert_eq!(s.observables, vec![Observable::G1, Observable::G2, Observable::G12]);
    }

    #[test]
    fn flag_overrides_file() {
        let c = parse_config_str(CAPTION, &[("J".into(), "0.7".into())]).unwrap();
        assert_eq!(c.params.tunneling, 0.7);
        let meta = echo(&c.params, c.trunc, c.sweep.as_ref(), &c.settings);
        let j = meta.iter().find(|(k, _)| k == "J").unwrap();
        assert_eq!(j.1, "6.9999999999999996e-1");
    }

    #[test]
    fn missing_omega_m_names_the_key() {
        let text = CAPTION.replace("omega_m = 100\n", "");
        let e = err(&text);
        assert_eq!(e, ConfigError::Missing { key: "omega_m".into() });
        assert!(e.to_string().contains("omega_m"));
    }

    #[test]
    fn unknown_key_names_line_and_key() {
        let e = err(&format!("{CAPTION}kappa3 = 1\n"));
        assert_eq!(e.key(), Some("kappa3"));
        assert!(e.to_string().starts_with("line 17: key `kappa3`"), "{e}");
    }

    #[test]
    fn unparsable_number_names_line_and_key() {
        let e = err(&CAPTION.replace("g = 3", "g = three"));
        assert_eq!(e.to_string(), "line 8: key `g`: unparsable number `three`");
    }

    #[test]
    fn invariant_violations_name_the_key() {
        let e = err(&CAPTION.replace("sweep.stop = 0.2", "sweep.stop = -0.2"));
        assert_eq!(e.key(), Some("sweep.stop"));
        let e = err(&CAPTION.replace("sweep.points = 201", "sweep.points = 1"));
        assert_eq!(e.key(), Some("sweep.points"));
        let e = err(&CAPTION.replace("omega_m = 100", "omega_m = -1"));
        assert!(e.to_string().starts_with("line 6: key `omega_m`"), "{e}");
        let e = parse_config_str(CAPTION, &[("n1_max".into(), "1".into())]).unwrap_err();
        assert!(e.to_string().starts_with("command line: key `n1_max`"), "{e}");
        let e = err(&format!("{CAPTION}n_th = 0.1\n"));
        assert_eq!(e.key(), Some("temperature_mK"));
        let e = err(&format!("{CAPTION}J = 0.1\n"));
        assert!(e.to_string().contains("duplicate key, first set on line 9"), "{e}");
    }

    #[test]
    fn linked_detuning_offset() {
        let c = parse_config_str(&CAPTION.replace("delta2 = delta1", "delta2 = delta1 + 0.09"), &[]).unwrap();
        assert_eq!(c.delta2_offset, Some(0.09));
        assert_eq!(c.params.delta2, 0.09);
        let e = err(&CAPTION.replace("delta2 = delta1", "delta2 = delta1 * 2"));
        assert_eq!(e.key(), Some("delta2"));
        let e = parse_config_str(&CAPTION.replace("delta2 = delta1", "delta2 = delta1 - 0.05"), &[("sweep.parameter".into(), "delta2".into())]);
        assert_eq!(e.unwrap_err().key(), Some("sweep.parameter"));
    }

    #[test]
    fn echo_parses_back() {
        let c = parse_config_str(&CAPTION.replace("delta2 = delta1", "delta2 = delta1 - 0.03"), &[("E".into(), "0.003".into())]).unwrap();
        let text = echo_text(&echo(&c.params, c.trunc, c.sweep.as_ref(), &c.settings));
        let back = parse_config_str(&text, &[]).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn overrides_split() {
        let args: Vec<String> = ["--J", "0.7", "--delta1=0.2"].iter().map(|s| s.to_string()).collect();
        assert_eq!(
            parse_overrides(&args).unwrap(),
            vec![("J".into(), "0.7".into()), ("delta1".into(), "0.2".into())]
        );
        assert!(parse_overrides(&["--bogus".to_string(), "1".to_string()]).is_err());
        assert!(parse_overrides(&["--J".to_string()]).is_err());
    }
}
