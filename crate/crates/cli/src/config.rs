//! Experiment configuration: a TOML file plus `--set key=value` overrides.
//!
//! ```toml
//! device = "pairgen"
//! engine = "gaussian"
//!
//! [params]
//! g_k = 0.4
//!
//! [sweep]
//! axis = "delta_k"
//! start = -0.2
//! stop = 0.2
//! points = 81
//!
//! [output]
//! path = "i_vs_delta.csv"
//! format = "csv"
//! ```
//!
//! A bare `--set` key (`g_k=0.4`) addresses `[params]`; dotted keys
//! (`sweep.points=11`) address any table.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    Pairgen,
    Convert,
    Ptsym,
    Modes,
}

impl Device {
    pub fn name(&self) -> &'static str {
        match self {
            Device::Pairgen => "pairgen",
            Device::Convert => "convert",
            Device::Ptsym => "ptsym",
            Device::Modes => "modes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    /// Include `stop` in a start/stop grid (default true).
    pub endpoint: Option<bool>,
    /// Explicit grid; overrides start/stop/points.
    pub values: Option<Vec<f64>>,
    /// Grid points re-evaluated with the Fock engine (pairgen only).
    pub spot_checks: Option<usize>,
}

/// A default grid for one sweep axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDefault {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub endpoint: bool,
}

impl SweepSpec {
    pub fn grid(&self, d: GridDefault) -> CliResult<Vec<f64>> {
        if let Some(v) = &self.values {
            if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                return Err(CliError::Validation(format!("sweep.values: non-finite entry {bad}")));
            }
            return Ok(v.clone());
        }
        let start = self.start.unwrap_or(d.start);
        let stop = self.stop.unwrap_or(d.stop);
        let points = self.points.unwrap_or(d.points);
        let endpoint = self.endpoint.unwrap_or(d.endpoint);
        if !start.is_finite() || !stop.is_finite() {
            return Err(CliError::Validation("sweep.start and sweep.stop must be finite".into()));
        }
        Ok(linspace(start, stop, points, endpoint))
    }
}

pub fn linspace(start: f64, stop: f64, points: usize, endpoint: bool) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => {
            let div = if endpoint { n - 1 } else { n } as f64;
            (0..n).map(|i| start + (stop - start) * i as f64 / div).collect()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub device: Option<Device>,
    pub engine: Option<String>,
    #[serde(default)]
    pub params: Table,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

const TOP_LEVEL: [&str; 2] = ["device", "engine"];

/// Reads the config file (if any) and applies the overrides in order.
pub fn load(path: Option<&Path>, sets: &[String]) -> CliResult<ExperimentConfig> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            text.parse::<Table>()
                .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?
        }
        None => Table::new(),
    };
    for s in sets {
        apply_set(&mut table, s)?;
    }
    Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Validation(e.message().to_string()))
}

/// Applies one `key=value` override.
pub fn apply_set(table: &mut Table, assignment: &str) -> CliResult<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("--set expects key=value, got `{assignment}`")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Validation(format!(
            "--set has an empty key in `{assignment}`"
        )));
    }
    let mut path: Vec<&str> = key.split('.').collect();
    if path.len() == 1 && !TOP_LEVEL.contains(&path[0]) {
        path.insert(0, "params");
    }
    let value = parse_value(raw.trim());
    let (last, parents) = path.split_last().expect("split yields at least one segment");
    let mut cursor = table;
    for seg in parents {
        let entry = cursor
            .entry(seg.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Validation(format!("--set {key}: `{seg}` is not a table")))?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

/// TOML literal if it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Overlays user parameters on `T::default()` and deserializes strictly.
/// Integers are accepted where floats are expected.
pub fn resolve_params<T>(user: &Table) -> CliResult<T>
where
    T: Serialize + DeserializeOwned + Default,
{
    let mut merged = Table::try_from(T::default()).map_err(|e| CliError::Validation(e.to_string()))?;
    for (k, v) in user {
        let v = match (merged.get(k), v) {
            (Some(Value::Float(_)), Value::Integer(i)) => Value::Float(*i as f64),
            (None, Value::Integer(i)) => Value::Float(*i as f64),
            _ => v.clone(),
        };
        merged.insert(k.clone(), v);
    }
    Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Validation(format!("params: {}", e.message())))
}

/// Removes a numeric extra from the parameter table, with a default.
pub fn take_f64(params: &mut Table, key: &str, default: f64) -> CliResult<f64> {
    match params.remove(key) {
        None => Ok(default),
        Some(Value::Float(x)) => Ok(x),
        Some(Value::Integer(i)) => Ok(i as f64),
        Some(other) => Err(CliError::Validation(format!(
            "params.{key}: expected a number, got {other}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use optomech::pairgen::PairgenParams;

    #[test]
    fn bare_and_dotted_overrides() {
        let cfg = load(
            None,
            &[
                "g_k=0.4".into(),
                "sweep.points=11".into(),
                "device=\"convert\"".into(),
                "engine=fock".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.params.get("g_k"), Some(&Value::Float(0.4)));
        assert_eq!(cfg.sweep.points, Some(11));
        assert_eq!(cfg.device, Some(Device::Convert));
        assert_eq!(cfg.engine.as_deref(), Some("fock"));
    }

    #[test]
    fn malformed_overrides_are_validation_errors() {
        assert!(matches!(load(None, &["novalue".into()]), Err(CliError::Validation(_))));
        assert!(matches!(load(None, &["=3".into()]), Err(CliError::Validation(_))));
        assert!(matches!(
            load(None, &["sweep.bogus=3".into()]),
            Err(CliError::Validation(_))
        ));
        assert!(matches!(
            load(None, &["device=laser".into()]),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn missing_config_file_is_io_error() {
        let err = load(Some(Path::new("/nonexistent/cfg.toml")), &[]).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn params_overlay_defaults_and_reject_unknown_keys() {
        let mut t = Table::new();
        t.insert("g_k".into(), Value::Integer(1));
        let p: PairgenParams = resolve_params(&t).unwrap();
        assert_eq!(p.g_k, 1.0);
        assert_eq!(p.kappa, 15.0);
        t.insert("kapa".into(), Value::Float(1.0));
        assert!(matches!(
            resolve_params::<PairgenParams>(&t),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn grids() {
        let d = GridDefault {
            start: 0.0,
            stop: 1.0,
            points: 5,
            endpoint: true,
        };
        assert_eq!(SweepSpec::default().grid(d).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let open = SweepSpec {
            endpoint: Some(false),
            points: Some(4),
            ..Default::default()
        };
        assert_eq!(open.grid(d).unwrap(), vec![0.0, 0.25, 0.5, 0.75]);
        let empty = SweepSpec {
            points: Some(0),
            ..Default::default()
        };
        assert!(empty.grid(d).unwrap().is_empty());
        let explicit = SweepSpec {
            values: Some(vec![3.0, 1.0]),
            ..Default::default()
        };
        assert_eq!(explicit.grid(d).unwrap(), vec![3.0, 1.0]);
    }
}
