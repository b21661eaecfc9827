//! Flat `key = value` run configuration with `#` comments. Command-line
//! flags override file values; every key is checked against a fixed list.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Every key a run configuration may contain.
pub const KEYS: &[&str] = &[
    "alpha",
    "sigma",
    "slit_l_width",
    "slit_r_width",
    "t",
    "hbar",
    "mass",
    "grid",
    "grid_l_half_extent",
    "grid_l_points",
    "grid_r_spacing",
    "grid_r_points",
    "r_edge_tolerance",
    "n_list",
    "clicks",
    "seed",
    "d_src",
    "r",
    "lambda",
    "s_r_list",
    "widths",
    "broad_width",
    "epr_grid_half_extent",
    "epr_grid_points",
    "trials",
    "dims",
    "d",
    "samples",
    "half_range",
    "sigmas",
    "out",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag(String),
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag(name) => write!(f, "--{name}"),
            Origin::Default => write!(f, "default"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, (String, Origin)>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!("line {line_no}: expected `key = value`, got `{line}`")));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(CliError::Config(format!("line {line_no}: unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(CliError::Config(format!("line {line_no}: `{key}` has no value")));
            }
            if let Some((_, first)) = cfg.values.get(key) {
                return Err(CliError::Config(format!("line {line_no}: `{key}` already set on {first}")));
            }
            cfg.values.insert(key.to_string(), (value.to_string(), Origin::Line(line_no)));
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text).map_err(|e| match e {
                    CliError::Config(m) => CliError::Config(format!("{}: {m}", p.display())),
                    other => other,
                })
            }
        }
    }

    /// Flag values replace file values.
    pub fn set_flag(&mut self, key: &str, flag: &str, value: Option<String>) {
        debug_assert!(KEYS.contains(&key));
        if let Some(v) = value {
            self.values.insert(key.to_string(), (v, Origin::Flag(flag.to_string())));
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn origin(&self, key: &str) -> Origin {
        self.values.get(key).map(|(_, o)| o.clone()).unwrap_or(Origin::Default)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        let Some(raw) = self.raw(key) else { return Ok(None) };
        raw.parse().map(Some).map_err(|_| CliError::Config(format!("{}: `{key}` cannot use `{raw}`", self.origin(key))))
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        let Some(raw) = self.raw(key) else { return Ok(None) };
        raw.split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{}: `{key}` cannot use `{raw}`", self.origin(key))))
    }

    /// Positive finite number, or `None` when absent.
    pub fn positive(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get::<f64>(key)? {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                Err(CliError::Config(format!("{}: `{key}` must be positive, got {x}", self.origin(key))))
            }
            other => Ok(other),
        }
    }

    /// Rejects keys that the running command does not read.
    pub fn only(&self, allowed: &[&str]) -> Result<(), CliError> {
        for (k, (_, origin)) in &self.values {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::Config(format!("{origin}: key `{k}` does not apply to this command")));
            }
        }
        Ok(())
    }
}

/// Ordered record of the values a command actually used.
#[derive(Debug, Clone, Default)]
pub struct Effective(pub Vec<(String, String)>);

impl Effective {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn num(&mut self, key: &str, value: f64) {
        self.push(key, popper_core::output::format_number(value));
    }

    pub fn list<T: ToString>(&mut self, key: &str, values: &[T]) {
        self.push(key, values.iter().map(T::to_string).collect::<Vec<_>>().join(","));
    }

    pub fn num_list(&mut self, key: &str, values: &[f64]) {
        let text: Vec<String> = values.iter().map(|&x| popper_core::output::format_number(x)).collect();
        self.push(key, text.join(","));
    }

    /// `# config: key = value` lines; stripping the prefix gives a config
    /// file that reproduces the run.
    pub fn metadata(&self) -> Vec<(String, String)> {
        self.0.iter().map(|(k, v)| (format!("config: {k}"), v.clone())).collect()
    }

    pub fn as_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.0.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect(),
        )
    }
}
