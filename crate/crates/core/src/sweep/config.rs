use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{StopPolicy, DEFAULT_CUTOFF, DEFAULT_KAPPA_THRESHOLD, DEFAULT_MAXQ};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "ELLRIG_CACHE_DIR";
/// Cache directory used when nothing else is configured.
pub const DEFAULT_CACHE_DIR: &str = ".ellrig-cache";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub e_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    /// `J = cutoff · q`.
    pub cutoff: usize,
    pub kappa_threshold: f64,
    pub maxq: u32,
    pub q_cap: u32,
    pub circle_accord: f64,
    pub below_half: f64,
    /// First period at which the stop rules are consulted.
    pub min_q: u32,
    /// `None` disables the on-disk cache.
    pub cache_dir: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let policy = StopPolicy::default();
        SweepConfig {
            e_values: Vec::new(),
            gamma_values: vec![3.5],
            cutoff: DEFAULT_CUTOFF,
            kappa_threshold: DEFAULT_KAPPA_THRESHOLD,
            maxq: DEFAULT_MAXQ,
            q_cap: policy.q_cap,
            circle_accord: policy.circle_accord.unwrap_or(0.10),
            below_half: policy.below.unwrap_or(0.5),
            min_q: policy.min_q,
            cache_dir: None,
            csv: None,
            json: None,
        }
    }
}

impl SweepConfig {
    pub fn stop_policy(&self) -> StopPolicy {
        StopPolicy {
            circle_accord: Some(self.circle_accord),
            below: Some(self.below_half),
            q_cap: self.q_cap,
            min_q: self.min_q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.e_values.is_empty() {
            return Err(Error::Config("no eccentricities given".into()));
        }
        if let Some(e) = self.e_values.iter().find(|e| !(0.0..1.0).contains(*e)) {
            return Err(Error::Config(format!("eccentricity {e} is outside [0, 1)")));
        }
        if self.gamma_values.is_empty() {
            return Err(Error::Config("no gamma values given".into()));
        }
        if let Some(g) = self.gamma_values.iter().find(|g| !(**g > 3.0 && **g < 4.0)) {
            return Err(Error::Config(format!("gamma {g} is outside (3, 4)")));
        }
        if self.cutoff == 0 {
            return Err(Error::Config("cutoff must be positive".into()));
        }
        if !(self.kappa_threshold > 0.0) {
            return Err(Error::Config("kappa_threshold must be positive".into()));
        }
        if self.maxq < 3 {
            return Err(Error::Config("maxq must be at least 3".into()));
        }
        if self.q_cap == 0 || self.q_cap > self.maxq {
            return Err(Error::Config(format!(
                "q_cap {} must lie in [1, maxq = {}]",
                self.q_cap, self.maxq
            )));
        }
        if !(self.circle_accord > 0.0) || !(self.below_half > 0.0) {
            return Err(Error::Config(
                "circle_accord and below_half must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("cannot parse {v:?} as a number"))
        }
        match key {
            "e_values" | "e" => self.e_values = parse_list(value)?,
            "e_range" => self.e_values = parse_range(value)?,
            "gamma_values" | "gamma" => self.gamma_values = parse_list(value)?,
            "cutoff" | "C_cutoff" => self.cutoff = num(value)?,
            "kappa_threshold" => self.kappa_threshold = num(value)?,
            "maxq" => self.maxq = num(value)?,
            "q_cap" => self.q_cap = num(value)?,
            "circle_accord" => self.circle_accord = num(value)?,
            "below_half" => self.below_half = num(value)?,
            "min_q" => self.min_q = num(value)?,
            "cache_dir" => self.cache_dir = Some(PathBuf::from(value)),
            "csv" => self.csv = Some(PathBuf::from(value)),
            "json" => self.json = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file on top of `self`. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err("expected key = value".into()))?;
            self.set(key.trim(), value.trim()).map_err(parse_err)?;
        }
        Ok(())
    }
}

/// Parses `0.1,0.2, 0.3`.
pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("cannot parse {t:?} as a number")))
        .collect()
}

/// Parses `min:max:step` into an inclusive grid. Grid points are generated by
/// index and rounded to 12 decimals, so `0:0.4:0.01` yields exactly the
/// decimal values `0.00, 0.01, …, 0.40`.
pub fn parse_range(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts = parse_list(&s.replace(':', ","))?;
    let [min, max, step] = parts[..] else {
        return Err(format!("expected min:max:step, got {s:?}"));
    };
    if !(step > 0.0) {
        return Err(format!("step must be positive, got {step}"));
    }
    if max < min {
        return Err(format!("max {max} is below min {min}"));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| ((min + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
