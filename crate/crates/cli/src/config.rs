//! Run configuration: flat `section.key=value` text or the same structure
//! as JSON, merged over preset and built-in defaults.

use crate::error::CliError;
use crate::presets::Preset;
use heraldsim::defaults::{self, Numerics};
use serde::Deserialize;

/// Pump-strength specification for a single report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpSpec {
    KappaL(f64),
    TargetH(f64),
    Unset,
}

/// Filter specification after merging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterSpec {
    Fixed {
        b: f64,
        t: f64,
    },
    /// B fixed, T picked by the optimizer under the heralding floor.
    AutoT {
        b: f64,
    },
    /// No-filtering reference configuration.
    Unfiltered,
    Unset,
}

/// Output encoding for the tabular subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::config(format!(
                "output.format must be csv or json, got {other:?}"
            ))),
        }
    }
}

/// Scan grids, in sigma units.
#[derive(Debug, Clone)]
pub struct Grids {
    pub b_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
}

/// Fully resolved configuration for one command invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub preset: Option<&'static str>,
    pub mu_s: f64,
    pub mu_i: f64,
    pub eta: f64,
    pub sigma_hz: Option<f64>,
    pub pump: PumpSpec,
    pub filter: FilterSpec,
    pub numerics: Numerics,
    pub grids: Grids,
    pub h_floor: f64,
    pub target_h: f64,
    pub out_dir: std::path::PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn source(&self, kappa_l: f64) -> Result<heraldsim::SourceParams, CliError> {
        heraldsim::SourceParams::in_sigma_units(self.mu_s, self.mu_i, kappa_l, self.eta)
            .map_err(CliError::from)
    }

    /// The filter block, required to be fully specified.
    pub fn fixed_filter(&self) -> Result<(f64, f64), CliError> {
        match self.filter {
            FilterSpec::Fixed { b, t } => Ok((b, t)),
            FilterSpec::AutoT { .. } => Err(CliError::config(
                "filter.t=auto is not resolved yet (internal error)".into(),
            )),
            FilterSpec::Unfiltered => Err(CliError::config(
                "this command needs an explicit filter block, not the unfiltered preset".into(),
            )),
            FilterSpec::Unset => Err(CliError::config(
                "missing filter block: set filter.b and filter.t (or t=auto)".into(),
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Raw (pre-merge) configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub source: RawSource,
    #[serde(default)]
    pub filter: RawFilter,
    #[serde(default)]
    pub numerics: RawNumerics,
    #[serde(default)]
    pub output: RawOutput,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSource {
    pub sigma_hz: Option<f64>,
    pub mu_s: Option<f64>,
    pub mu_i: Option<f64>,
    pub eta: Option<f64>,
    pub kappa_l: Option<f64>,
    pub target_h: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFilter {
    pub b: Option<f64>,
    pub t: Option<TValue>,
    pub unfiltered: Option<bool>,
}

/// `filter.t` accepts a number or the string "auto".
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TValue {
    Num(f64),
    Word(String),
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNumerics {
    pub nodes: Option<usize>,
    pub window: Option<f64>,
    pub tol: Option<f64>,
    pub m_cap: Option<usize>,
    pub b_start: Option<f64>,
    pub b_stop: Option<f64>,
    pub b_step: Option<f64>,
    pub t_start: Option<f64>,
    pub t_stop: Option<f64>,
    pub t_step: Option<f64>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub kappa_points: Option<usize>,
    pub h_floor: Option<f64>,
    pub target_h: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    pub dir: Option<String>,
    pub format: Option<String>,
}

impl RawConfig {
    /// Parse a config document: JSON if it starts with `{`, flat
    /// `section.key=value` lines otherwise.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::config(format!("JSON config: {e}")))
        } else {
            Self::parse_flat(text)
        }
    }

    fn parse_flat(text: &str) -> Result<Self, CliError> {
        let mut cfg = RawConfig::default();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let n = lineno + 1;
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {n}: expected key=value, got {line:?}"))
            })?;
            let key = key.trim();
            let value = value.trim();
            cfg.set(key, value)
                .map_err(|msg| CliError::config(format!("line {n}, field {key:?}: {msg}")))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn f(v: &str) -> Result<f64, String> {
            v.parse::<f64>().map_err(|_| format!("not a number: {v:?}"))
        }
        fn u(v: &str) -> Result<usize, String> {
            v.parse::<usize>()
                .map_err(|_| format!("not a count: {v:?}"))
        }
        match key {
            "source.sigma_hz" => self.source.sigma_hz = Some(f(value)?),
            "source.mu_s" => self.source.mu_s = Some(f(value)?),
            "source.mu_i" => self.source.mu_i = Some(f(value)?),
            "source.eta" => self.source.eta = Some(f(value)?),
            "source.kappa_l" => self.source.kappa_l = Some(f(value)?),
            "source.target_h" => self.source.target_h = Some(f(value)?),
            "filter.b" => self.filter.b = Some(f(value)?),
            "filter.t" => {
                self.filter.t = Some(if value == "auto" {
                    TValue::Word("auto".into())
                } else {
                    TValue::Num(f(value)?)
                })
            }
            "filter.unfiltered" => {
                self.filter.unfiltered = Some(
                    value
                        .parse::<bool>()
                        .map_err(|_| format!("not a bool: {value:?}"))?,
                )
            }
            "numerics.nodes" => self.numerics.nodes = Some(u(value)?),
            "numerics.window" => self.numerics.window = Some(f(value)?),
            "numerics.tol" => self.numerics.tol = Some(f(value)?),
            "numerics.m_cap" => self.numerics.m_cap = Some(u(value)?),
            "numerics.b_start" => self.numerics.b_start = Some(f(value)?),
            "numerics.b_stop" => self.numerics.b_stop = Some(f(value)?),
            "numerics.b_step" => self.numerics.b_step = Some(f(value)?),
            "numerics.t_start" => self.numerics.t_start = Some(f(value)?),
            "numerics.t_stop" => self.numerics.t_stop = Some(f(value)?),
            "numerics.t_step" => self.numerics.t_step = Some(f(value)?),
            "numerics.kappa_min" => self.numerics.kappa_min = Some(f(value)?),
            "numerics.kappa_max" => self.numerics.kappa_max = Some(f(value)?),
            "numerics.kappa_points" => self.numerics.kappa_points = Some(u(value)?),
            "numerics.h_floor" => self.numerics.h_floor = Some(f(value)?),
            "numerics.target_h" => self.numerics.target_h = Some(f(value)?),
            "output.dir" => self.output.dir = Some(value.to_string()),
            "output.format" => self.output.format = Some(value.to_string()),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }
}

/// Command-line overrides that take precedence over the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out_dir: Option<std::path::PathBuf>,
    pub format: Option<OutputFormat>,
    pub nodes: Option<usize>,
    pub window: Option<f64>,
}

/// Merge defaults <- preset <- config file <- CLI flags.
pub fn resolve(
    preset: Option<&Preset>,
    raw: &RawConfig,
    over: &Overrides,
) -> Result<RunConfig, CliError> {
    let mu_s = raw.source.mu_s.or(preset.map(|p| p.mu_s)).unwrap_or(0.0);
    let mu_i = raw.source.mu_i.or(preset.map(|p| p.mu_i)).unwrap_or(0.0);
    let eta = raw.source.eta.unwrap_or(0.1);

    let pump = match (raw.source.kappa_l, raw.source.target_h) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "fields source.kappa_l and source.target_h are mutually exclusive".into(),
            ))
        }
        (Some(k), None) => PumpSpec::KappaL(k),
        (None, Some(h)) => PumpSpec::TargetH(h),
        (None, None) => PumpSpec::Unset,
    };

    let preset_unfiltered = preset.map(|p| p.unfiltered).unwrap_or(false);
    let unfiltered = raw.filter.unfiltered.unwrap_or(preset_unfiltered);
    let filter = if unfiltered {
        FilterSpec::Unfiltered
    } else {
        match (raw.filter.b, &raw.filter.t) {
            (Some(b), Some(TValue::Num(t))) => FilterSpec::Fixed { b, t: *t },
            (Some(b), Some(TValue::Word(w))) if w == "auto" => FilterSpec::AutoT { b },
            (Some(_), Some(TValue::Word(w))) => {
                return Err(CliError::config(format!(
                    "field filter.t: expected a number or \"auto\", got {w:?}"
                )))
            }
            (Some(b), None) => FilterSpec::AutoT { b },
            (None, Some(_)) => {
                return Err(CliError::config(
                    "field filter.b missing while filter.t is set".into(),
                ))
            }
            (None, None) => FilterSpec::Unset,
        }
    };

    let numerics = Numerics {
        nodes: over.nodes.or(raw.numerics.nodes).unwrap_or(defaults::NODES),
        window: over
            .window
            .or(raw.numerics.window)
            .unwrap_or(defaults::WINDOW),
        tol: raw.numerics.tol.unwrap_or(defaults::PROLATE_TOL),
        m_cap: raw.numerics.m_cap.unwrap_or(defaults::M_CAP),
    };

    let b_start = raw.numerics.b_start.unwrap_or(defaults::B_SCAN_START);
    let b_stop = raw.numerics.b_stop.unwrap_or(defaults::B_SCAN_STOP);
    let b_step = raw.numerics.b_step.unwrap_or(defaults::B_SCAN_STEP);
    let t_start = raw.numerics.t_start.unwrap_or(defaults::T_SCAN_START);
    let t_stop = raw.numerics.t_stop.unwrap_or(defaults::T_SCAN_STOP);
    let t_step = raw.numerics.t_step.unwrap_or(defaults::T_SCAN_STEP);
    let kappa_min = raw.numerics.kappa_min.unwrap_or(defaults::KAPPA_GRID_MIN);
    let kappa_max = raw.numerics.kappa_max.unwrap_or(defaults::KAPPA_GRID_MAX);
    let kappa_points = raw
        .numerics
        .kappa_points
        .unwrap_or(defaults::KAPPA_GRID_POINTS);
    for (name, ok) in [
        ("b grid", b_stop > b_start && b_step > 0.0),
        ("t grid", t_stop > t_start && t_step > 0.0),
        (
            "kappa grid",
            kappa_max > kappa_min && kappa_min > 0.0 && kappa_points >= 2,
        ),
    ] {
        if !ok {
            return Err(CliError::config(format!("invalid {name} specification")));
        }
    }
    let grids = Grids {
        b_grid: defaults::linear_grid(b_start, b_stop, b_step),
        t_grid: defaults::linear_grid(t_start, t_stop, t_step),
        kappa_grid: defaults::log_grid(kappa_min, kappa_max, kappa_points),
    };

    let format = match (&over.format, &raw.output.format) {
        (Some(f), _) => *f,
        (None, Some(s)) => OutputFormat::parse(s)?,
        (None, None) => OutputFormat::Csv,
    };
    let out_dir = over
        .out_dir
        .clone()
        .or_else(|| raw.output.dir.as_ref().map(std::path::PathBuf::from))
        .unwrap_or_else(|| std::path::PathBuf::from("."));

    Ok(RunConfig {
        preset: preset.map(|p| p.name),
        mu_s,
        mu_i,
        eta,
        sigma_hz: raw.source.sigma_hz,
        pump,
        filter,
        numerics,
        grids,
        h_floor: raw.numerics.h_floor.unwrap_or(defaults::H_FLOOR),
        target_h: raw.numerics.target_h.unwrap_or(defaults::TARGET_H),
        out_dir,
        format,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_parse_round_trip() {
        let text = "\
# comment
source.mu_s = 10
source.eta=0.2
filter.b = 0.6
filter.t = auto
numerics.nodes = 48
output.format = json
";
        let raw = RawConfig::parse(text).unwrap();
        let cfg = resolve(None, &raw, &Overrides::default()).unwrap();
        assert_eq!(cfg.mu_s, 10.0);
        assert_eq!(cfg.eta, 0.2);
        assert_eq!(cfg.filter, FilterSpec::AutoT { b: 0.6 });
        assert_eq!(cfg.numerics.nodes, 48);
        assert_eq!(cfg.format, OutputFormat::Json);
    }

    #[test]
    fn json_parse() {
        let text = r#"{"source": {"mu_s": 2.6, "kappa_l": 0.1}, "filter": {"b": 0.85, "t": 1.2}}"#;
        let raw = RawConfig::parse(text).unwrap();
        let cfg = resolve(None, &raw, &Overrides::default()).unwrap();
        assert_eq!(cfg.pump, PumpSpec::KappaL(0.1));
        assert_eq!(cfg.filter, FilterSpec::Fixed { b: 0.85, t: 1.2 });
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let err = RawConfig::parse("source.mu_s = ten").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
        assert!(msg.contains("source.mu_s"), "{msg}");
        let err = RawConfig::parse("nonsense.key = 3").unwrap_err();
        assert!(err.to_string().contains("unknown key"), "{err}");
        let err = RawConfig::parse("just a line").unwrap_err();
        assert!(err.to_string().contains("key=value"), "{err}");
    }

    #[test]
    fn kappa_and_target_h_are_exclusive() {
        let raw = RawConfig::parse("source.kappa_l=0.1\nsource.target_h=0.95").unwrap();
        assert!(resolve(None, &raw, &Overrides::default()).is_err());
    }

    #[test]
    fn cli_flags_take_precedence() {
        let raw = RawConfig::parse("numerics.nodes = 48\nnumerics.window = 5").unwrap();
        let over = Overrides {
            nodes: Some(96),
            ..Overrides::default()
        };
        let cfg = resolve(None, &raw, &over).unwrap();
        assert_eq!(cfg.numerics.nodes, 96);
        assert_eq!(cfg.numerics.window, 5.0);
    }
}
