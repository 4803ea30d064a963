//! Flat `key = value` configuration with comma-separated lists.

use std::fmt;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::matrix::MatrixKind;

const KEYS: &[&str] = &[
    "mu",
    "k",
    "rho",
    "alpha",
    "w",
    "w_step",
    "matrix",
    "m",
    "n",
    "seed",
    "trials",
    "epsilon",
    "noise_fraction",
    "tail_scale",
    "signal_n",
    "a",
    "b",
    "t",
    "out_dir",
];

/// Prior-overlap fractions to sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSpec {
    /// Every `α` with `αρk` integral.
    Admissible,
    List(Vec<f64>),
}

/// Raw configuration: every field is optional and each experiment fills in
/// its own defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub mu: Option<f64>,
    pub k: Option<usize>,
    pub rho: Option<Vec<f64>>,
    pub alpha: Option<AlphaSpec>,
    /// Explicit w grid; takes precedence over `w_step`.
    pub w: Option<Vec<f64>>,
    pub w_step: Option<f64>,
    pub matrix: Option<MatrixKind>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub epsilon: Option<f64>,
    pub noise_fraction: Option<f64>,
    pub tail_scale: Option<f64>,
    pub signal_n: Option<usize>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub t: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

fn config_error(msg: impl fmt::Display) -> Error {
    Error::InvalidConfig(msg.to_string())
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| config_error(format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(config_error(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| config_error(format!("{key}: '{v}' is not a nonnegative integer")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_f64(key, s)).collect()
}

impl ExperimentConfig {
    /// Parses a config file body. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_error(format!(
                    "line {}: expected key = value, got '{line}'",
                    lineno + 1
                )));
            };
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Applies one `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| config_error(format!("override '{assignment}' is not key=value")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mu" => self.mu = Some(parse_f64(key, value)?),
            "k" => self.k = Some(parse_usize(key, value)?),
            "rho" => self.rho = Some(parse_list(key, value)?),
            "alpha" => {
                self.alpha = Some(if value == "admissible" {
                    AlphaSpec::Admissible
                } else {
                    AlphaSpec::List(parse_list(key, value)?)
                })
            }
            "w" => self.w = Some(parse_list(key, value)?),
            "w_step" => self.w_step = Some(parse_f64(key, value)?),
            "matrix" => {
                self.matrix = Some(MatrixKind::parse(value).map_err(|e| config_error(format!("matrix: {e}")))?)
            }
            "m" => self.m = Some(parse_usize(key, value)?),
            "n" => self.n = Some(parse_usize(key, value)?),
            "seed" => {
                self.seed = Some(
                    value
                        .parse()
                        .map_err(|_| config_error(format!("seed: '{value}' is not a u64")))?,
                )
            }
            "trials" => self.trials = Some(parse_usize(key, value)?),
            "epsilon" => self.epsilon = Some(parse_f64(key, value)?),
            "noise_fraction" => self.noise_fraction = Some(parse_f64(key, value)?),
            "tail_scale" => self.tail_scale = Some(parse_f64(key, value)?),
            "signal_n" => self.signal_n = Some(parse_usize(key, value)?),
            "a" => self.a = Some(parse_f64(key, value)?),
            "b" => self.b = Some(parse_f64(key, value)?),
            "t" => self.t = Some(parse_f64(key, value)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            _ => {
                return Err(config_error(format!(
                    "unknown key '{key}' (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// The w grid: the explicit list if given, else `0, step, …, 1`.
    pub fn w_grid(&self, default_step: f64) -> Result<Vec<f64>> {
        let grid = match &self.w {
            Some(list) => list.clone(),
            None => uniform_grid(self.w_step.unwrap_or(default_step))?,
        };
        if grid.is_empty() {
            return Err(config_error("w grid is empty"));
        }
        if let Some(w) = grid.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(config_error(format!("w = {w} outside [0, 1]")));
        }
        Ok(grid)
    }

    pub fn rho_list(&self, default: &[f64]) -> Result<Vec<f64>> {
        let list = self.rho.clone().unwrap_or_else(|| default.to_vec());
        if list.is_empty() {
            return Err(config_error("rho list is empty"));
        }
        if let Some(r) = list.iter().find(|r| !(**r > 0.0)) {
            return Err(config_error(format!("rho = {r} must be positive")));
        }
        Ok(list)
    }

    pub fn mu_or(&self, default: f64) -> Result<f64> {
        let mu = self.mu.unwrap_or(default);
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(config_error(format!("mu = {mu} must lie in (0, 1]")));
        }
        Ok(mu)
    }

    pub fn k_or(&self, default: usize) -> Result<usize> {
        let k = self.k.unwrap_or(default);
        if k == 0 {
            return Err(config_error("k must be at least 1"));
        }
        Ok(k)
    }

    pub fn seed_or(&self, default: u64) -> u64 {
        self.seed.unwrap_or(default)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// `0, step, 2·step, …, 1`, each point rounded to 12 decimals so that grids
/// match exactly across platforms.
pub fn uniform_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(config_error(format!("grid step {step} must lie in (0, 1]")));
    }
    let count = (1.0 / step).round() as usize;
    if ((count as f64) * step - 1.0).abs() > 1e-9 {
        return Err(config_error(format!("grid step {step} does not divide 1")));
    }
    Ok((0..=count)
        .map(|i| ((i as f64 / count as f64) * 1e12).round() / 1e12)
        .collect())
}

/// Every `α ∈ [0, 1]` with `αρk` integral, for `ρk` integral.
pub fn admissible_alphas(rho: f64, k: usize) -> Result<Vec<f64>> {
    let len = rho * k as f64;
    if (len - len.round()).abs() > 1e-9 || len.round() < 1.0 {
        return Err(config_error(format!(
            "rho*k = {len} must be a positive integer (rho={rho}, k={k})"
        )));
    }
    let len = len.round() as usize;
    Ok((0..=len).map(|j| j as f64 / len as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_and_overrides() {
        let mut cfg = ExperimentConfig::parse(
            "# figure defaults\nmu = 0.1\nk=4\nrho = 0.5, 1\nalpha = admissible\n\nseed = 7 # trailing\n",
        )
        .unwrap();
        assert_eq!(cfg.mu, Some(0.1));
        assert_eq!(cfg.rho, Some(vec![0.5, 1.0]));
        assert_eq!(cfg.alpha, Some(AlphaSpec::Admissible));
        cfg.apply_override("k=2").unwrap();
        assert_eq!(cfg.k, Some(2));
        assert_eq!(cfg.seed_or(0), 7);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ExperimentConfig::parse("bogus = 1"), Err(Error::InvalidConfig(_))));
        assert!(matches!(ExperimentConfig::parse("mu 0.1"), Err(Error::InvalidConfig(_))));
        assert!(matches!(ExperimentConfig::parse("k = -1"), Err(Error::InvalidConfig(_))));
        let cfg = ExperimentConfig::parse("w =").unwrap();
        assert!(cfg.w_grid(0.05).is_err());
        let cfg = ExperimentConfig::parse("w = 0, 1.5").unwrap();
        assert!(cfg.w_grid(0.05).is_err());
        assert!(uniform_grid(0.3).is_err());
    }

    #[test]
    fn grids() {
        let g = uniform_grid(0.05).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[17], 0.85);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(admissible_alphas(0.5, 4).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(admissible_alphas(1.0, 4).unwrap().len(), 5);
        assert!(admissible_alphas(0.3, 4).is_err());
    }
}
