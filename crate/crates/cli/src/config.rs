//! Run configuration: a flat `key = value` file, overridden by flags.
//!
//! Keys (dashes and underscores are interchangeable):
//!
//! | key        | meaning                                      | default   |
//! |------------|----------------------------------------------|-----------|
//! | `ell`      | seam length                                  | `2π`      |
//! | `s`        | graft height                                 | `2`       |
//! | `a`        | hyperbolic strip width                       | `1`       |
//! | `outer_bc` | `dirichlet` or `neumann`                     | dirichlet |
//! | `modes`    | spectral truncation `N`                      | `8`       |
//! | `tol`      | tolerance override for every check           | none      |
//! | `seed`     | seed of the random fields                    | `1`       |
//! | `samples`  | random configurations per randomized check   | `20`      |
//! | `out`      | output path (stdout when absent)             | none      |
//! | `param`    | sweep parameter: `ell`, `s` or `a`           | none      |
//! | `from`     | sweep start                                  | none      |
//! | `to`       | sweep end                                    | none      |
//! | `steps`    | sweep points                                 | none      |
//! | `t`        | geodesic family parameter                    | `1e-3`    |
//! | `fd_step`  | geodesic Newton difference step              | `1e-4·t`  |
//! | `points`   | geodesic collocation nodes                   | `256`     |
//! | `amplitude`| scale of the random geodesic field           | `1`       |

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use graftlab_core::geometry::OuterBc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("key {key}: cannot parse {value:?}")]
    Value { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Ell,
    S,
    A,
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ell" => Ok(SweepParam::Ell),
            "s" => Ok(SweepParam::S),
            "a" => Ok(SweepParam::A),
            other => Err(format!("unknown sweep parameter {other:?}")),
        }
    }
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Ell => "ell",
            SweepParam::S => "s",
            SweepParam::A => "a",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub ell: f64,
    pub s: f64,
    pub a: f64,
    pub outer_bc: OuterBc,
    pub modes: usize,
    pub tol: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub param: Option<SweepParam>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    pub t: f64,
    pub fd_step: Option<f64>,
    pub points: usize,
    pub amplitude: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ell: 2.0 * std::f64::consts::PI,
            s: 2.0,
            a: 1.0,
            outer_bc: OuterBc::Dirichlet,
            modes: 8,
            tol: None,
            seed: 1,
            samples: 20,
            out: None,
            param: None,
            from: None,
            to: None,
            steps: None,
            t: 1e-3,
            fd_step: None,
            points: 256,
            amplitude: 1.0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
    })
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        let key = k.trim().replace('-', "_");
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::default();
        for (k, v) in parse_pairs(&text)? {
            cfg.set(&k, &v)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "ell" => self.ell = parse(key, value)?,
            "s" => self.s = parse(key, value)?,
            "a" => self.a = parse(key, value)?,
            "outer_bc" => self.outer_bc = parse(key, value)?,
            "modes" => self.modes = parse(key, value)?,
            "tol" => self.tol = Some(parse(key, value)?),
            "seed" => self.seed = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "param" => self.param = Some(parse(key, value)?),
            "from" => self.from = Some(parse(key, value)?),
            "to" => self.to = Some(parse(key, value)?),
            "steps" => self.steps = Some(parse(key, value)?),
            "t" => self.t = parse(key, value)?,
            "fd_step" => self.fd_step = Some(parse(key, value)?),
            "points" => self.points = parse(key, value)?,
            "amplitude" => self.amplitude = parse(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return bad("ell must be finite and > 0");
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return bad("s must be finite and >= 0");
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return bad("a must be finite and > 0");
        }
        if self.modes == 0 || self.modes > 256 {
            return bad("modes must be in 1..=256");
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0) {
                return bad("tol must be >= 0");
            }
        }
        if self.samples == 0 {
            return bad("samples must be >= 1");
        }
        if !(self.t > 0.0) {
            return bad("t must be > 0");
        }
        if let Some(h) = self.fd_step {
            if !(h > 0.0) {
                return bad("fd_step must be > 0");
            }
        }
        if !self.amplitude.is_finite() {
            return bad("amplitude must be finite");
        }
        if self.points < 8 {
            return bad("points must be >= 8");
        }
        if self.steps == Some(0) {
            return bad("steps must be >= 1");
        }
        Ok(())
    }

    /// `(parameter, values)` of the sweep, in sweep order.
    pub fn sweep_points(&self) -> Result<(SweepParam, Vec<f64>), ConfigError> {
        let (Some(param), Some(from), Some(to), Some(steps)) = (self.param, self.from, self.to, self.steps) else {
            return Err(ConfigError::Invalid("sweep needs param, from, to and steps".into()));
        };
        if !(from.is_finite() && to.is_finite()) || steps == 0 {
            return Err(ConfigError::Invalid("sweep range must be finite with steps >= 1".into()));
        }
        let values = if steps == 1 {
            vec![from]
        } else {
            (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect()
        };
        Ok((param, values))
    }
}
