use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::measure::{validate, MatrixMeasure};
use crate::projective::{DualPoint, ProjPoint};

/// Everything an experiment needs. Parsed from flat `key = value` text; see
/// [`ExperimentConfig::parse`] for the keys.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub measure: MatrixMeasure,
    pub x: ProjPoint,
    pub y: DualPoint,
    /// Dual point used by the large-deviation and regularity experiments.
    pub ld_y: DualPoint,
    pub n_grid: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    /// Truncation constant `A` (annuli `0 ≤ k ≤ A log n`).
    pub a_const: f64,
    /// Local-limit constant `B` (annuli `0 ≤ k ≤ B ζ⁻¹ log n`).
    pub b_const: f64,
    pub zeta: f64,
    pub delta: f64,
    pub alpha: f64,
    pub interval: (f64, f64),
    pub t_points: usize,
    pub epsilon: f64,
    pub ld_n_grid: Vec<usize>,
    pub ld_samples: usize,
    pub estimate_n: usize,
    pub estimate_samples: usize,
    pub burn_in: usize,
    pub grid_size: usize,
    pub pipeline_n: usize,
    /// Use exact enumeration whenever `|supp μ|ⁿ` fits under the cap.
    pub exact: bool,
}

fn golden_dual() -> DualPoint {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    DualPoint::new(&[1.0, -phi]).expect("nonzero")
}

impl Default for ExperimentConfig {
    /// The two-atom benchmark `[[2,1],[1,1]]`, `[[1,1],[1,2]]` with uniform weights.
    fn default() -> Self {
        ExperimentConfig {
            measure: MatrixMeasure::benchmark(),
            x: ProjPoint::basis(2, 0),
            y: DualPoint::new(&[1.0, 1.0]).expect("nonzero"),
            ld_y: golden_dual(),
            n_grid: (6..=12).map(|p| 1usize << p).collect(),
            samples: 1_000_000,
            seed: 20_240_917,
            workers: 1,
            a_const: 1.5,
            b_const: 1.5,
            zeta: 0.25,
            delta: 0.25,
            alpha: 0.1,
            interval: (-0.5, 0.5),
            t_points: 21,
            epsilon: 0.1,
            ld_n_grid: vec![16, 32, 64, 128, 256],
            ld_samples: 1_000_000,
            estimate_n: 4096,
            estimate_samples: 100_000,
            burn_in: 1000,
            grid_size: 4096,
            pipeline_n: 8,
            exact: false,
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

fn numbers(line: usize, key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| err(line, format!("`{key}`: `{s}` is not a number"))))
        .collect()
}

fn one_number(line: usize, key: &str, value: &str) -> Result<f64> {
    let v = numbers(line, key, value)?;
    if v.len() != 1 {
        return Err(err(line, format!("`{key}` expects one number, found {}", v.len())));
    }
    if !v[0].is_finite() {
        return Err(err(line, format!("`{key}` must be finite")));
    }
    Ok(v[0])
}

fn positive(line: usize, key: &str, value: &str) -> Result<f64> {
    let v = one_number(line, key, value)?;
    if v <= 0.0 {
        return Err(err(line, format!("`{key}` must be positive, got {v}")));
    }
    Ok(v)
}

fn integer(line: usize, key: &str, value: &str) -> Result<u64> {
    value.trim().parse::<u64>().map_err(|_| err(line, format!("`{key}` expects a non-negative integer, got `{}`", value.trim())))
}

fn unit(line: usize, key: &str, value: &str) -> Result<f64> {
    let v = positive(line, key, value)?;
    if v > 1.0 {
        return Err(err(line, format!("`{key}` must lie in (0, 1], got {v}")));
    }
    Ok(v)
}

fn at_least(line: usize, key: &str, value: &str, min: u64) -> Result<usize> {
    let v = integer(line, key, value)?;
    if v < min {
        return Err(err(line, format!("`{key}` must be at least {min}, got {v}")));
    }
    Ok(v as usize)
}

fn sample_count(line: usize, key: &str, value: &str) -> Result<usize> {
    at_least(line, key, value, 1000)
}

fn integers(line: usize, key: &str, value: &str) -> Result<Vec<usize>> {
    let v: Vec<usize> = value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| err(line, format!("`{key}`: `{s}` is not a non-negative integer"))))
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(err(line, format!("`{key}` is empty")));
    }
    if v[0] == 0 || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(err(line, format!("`{key}` must be positive and strictly ascending")));
    }
    Ok(v)
}

fn matrix(line: usize, value: &str) -> Result<Matrix> {
    let rows: Vec<Vec<f64>> = value
        .split(';')
        .map(|r| numbers(line, "atom", r))
        .filter(|r| !matches!(r, Ok(v) if v.is_empty()))
        .collect::<Result<_>>()?;
    let d = rows.len();
    if d == 0 {
        return Err(err(line, "`atom` is empty"));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(err(line, format!("`atom` is not square: {d} rows but a row of length {}", r.len())));
    }
    Matrix::from_rows(&rows).map_err(|e| err(line, e.to_string()))
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment. Keys:
    ///
    /// `atom` (repeatable; rows separated by `;`, entries by `,` or spaces), `weights`,
    /// `x`, `y`, `ld_y`, `n_grid`, `samples`, `seed`, `workers`, `A`, `B`, `zeta`,
    /// `delta`, `alpha`, `interval` (`a, b`), `t_points`, `epsilon`, `ld_n_grid`,
    /// `ld_samples`, `estimate_n`, `estimate_samples`, `burn_in`, `grid_size`,
    /// `pipeline_n`, `exact` (`true`/`false`).
    ///
    /// Missing keys keep their benchmark defaults; when atoms are given, `x`, `y` and
    /// `ld_y` default to the first basis vector and functional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut atoms: Vec<(usize, Matrix)> = Vec::new();
        let mut weights: Option<(usize, Vec<f64>)> = None;
        let mut points: Vec<(usize, &str, Vec<f64>)> = Vec::new();
        let mut interval_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(err(line, format!("expected `key = value`, found `{content}`")));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "atom" => atoms.push((line, matrix(line, value)?)),
                "weights" => weights = Some((line, numbers(line, key, value)?)),
                "x" | "y" | "ld_y" => {
                    points.push((line, key, numbers(line, key, value)?));
                }
                "n_grid" => cfg.n_grid = integers(line, key, value)?,
                "ld_n_grid" => cfg.ld_n_grid = integers(line, key, value)?,
                "samples" => cfg.samples = sample_count(line, key, value)?,
                "ld_samples" => cfg.ld_samples = sample_count(line, key, value)?,
                "estimate_samples" => cfg.estimate_samples = sample_count(line, key, value)?,
                "estimate_n" => cfg.estimate_n = at_least(line, key, value, 2)?,
                "burn_in" => cfg.burn_in = integer(line, key, value)? as usize,
                "seed" => cfg.seed = integer(line, key, value)?,
                "workers" => cfg.workers = integer(line, key, value)? as usize,
                "grid_size" => cfg.grid_size = at_least(line, key, value, 8)?,
                "pipeline_n" => cfg.pipeline_n = at_least(line, key, value, 1)?,
                "t_points" => cfg.t_points = at_least(line, key, value, 1)?,
                "A" => cfg.a_const = positive(line, key, value)?,
                "B" => cfg.b_const = positive(line, key, value)?,
                "zeta" => cfg.zeta = unit(line, key, value)?,
                "delta" => cfg.delta = unit(line, key, value)?,
                "alpha" => cfg.alpha = positive(line, key, value)?,
                "epsilon" => cfg.epsilon = positive(line, key, value)?,
                "interval" => {
                    let v = numbers(line, key, value)?;
                    if v.len() != 2 {
                        return Err(err(line, "`interval` expects two numbers `a, b`"));
                    }
                    cfg.interval = (v[0], v[1]);
                    interval_line = line;
                }
                "exact" => {
                    cfg.exact = match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(err(line, format!("`exact` expects true or false, got `{value}`"))),
                    }
                }
                _ => return Err(err(line, format!("unknown key `{key}`"))),
            }
        }
        if !atoms.is_empty() {
            let first = atoms[0].0;
            let w = match weights {
                Some((line, w)) => {
                    if w.len() != atoms.len() {
                        return Err(err(line, format!("{} weights for {} atoms", w.len(), atoms.len())));
                    }
                    w
                }
                None => vec![1.0 / atoms.len() as f64; atoms.len()],
            };
            let d = atoms[0].1.dim();
            if let Some((line, m)) = atoms.iter().find(|(_, m)| m.dim() != d) {
                return Err(err(*line, format!("atom has dimension {} but the first atom has {d}", m.dim())));
            }
            cfg.measure = validate(atoms.into_iter().map(|a| a.1).collect(), w).map_err(|e| err(first, e.to_string()))?;
            cfg.x = ProjPoint::basis(d, 0);
            cfg.y = DualPoint::basis(d, 0);
            cfg.ld_y = DualPoint::basis(d, 0);
        } else if let Some((line, _)) = weights {
            return Err(err(line, "`weights` given without `atom` lines"));
        }
        let d = cfg.measure.dim();
        for (line, name, v) in points {
            if v.len() != d {
                return Err(err(line, format!("`{name}` has {} entries but the matrices are {d}×{d}", v.len())));
            }
            match name {
                "x" => cfg.x = ProjPoint::new(&v).map_err(|e| err(line, e.to_string()))?,
                "y" => cfg.y = DualPoint::new(&v).map_err(|e| err(line, e.to_string()))?,
                _ => cfg.ld_y = DualPoint::new(&v).map_err(|e| err(line, e.to_string()))?,
            }
        }
        if cfg.interval.0 > cfg.interval.1 {
            return Err(err(interval_line, "`interval` needs a ≤ b"));
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Cross-field invariants.
    pub fn check(&self) -> Result<()> {
        if self.samples < 1000 || self.ld_samples < 1000 || self.estimate_samples < 1000 {
            return Err(Error::invalid("sample counts must be at least 1000"));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("n_grid must be strictly ascending"));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) || !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::invalid("zeta and delta must lie in (0, 1]"));
        }
        if self.interval.0 > self.interval.1 {
            return Err(Error::invalid("interval needs a ≤ b"));
        }
        if self.t_points < 1 {
            return Err(Error::invalid("t_points must be at least 1"));
        }
        if self.pipeline_n < 1 || self.estimate_n < 2 || self.grid_size < 8 {
            return Err(Error::invalid("pipeline_n ≥ 1, estimate_n ≥ 2 and grid_size ≥ 8 are required"));
        }
        Ok(())
    }
}
