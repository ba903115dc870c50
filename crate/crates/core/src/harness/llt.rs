use std::f64::consts::PI;
use std::path::Path;

use crate::error::Result;
use crate::harness::be::{require_positive_variance, sample_coefficients, CoefficientSample};
use crate::harness::cache::Estimates;
use crate::harness::config::ExperimentConfig;
use crate::harness::write_csv;

#[derive(Clone, Debug, PartialEq)]
pub struct LltRow {
    pub n: usize,
    pub t: f64,
    /// `√n · P̂(t + X − nγ̂ ∈ [a, b))`.
    pub a_hat: f64,
    /// `e^{−t²/(2ϱ̂²n)} (b − a) / (√(2π) ϱ̂)`.
    pub target: f64,
    pub abs_dev: f64,
}

#[derive(Clone, Debug)]
pub struct LltReport {
    pub rows: Vec<LltRow>,
    /// `(n, sup_t |𝒜̂_n(t) − target|)` in grid order.
    pub sup_dev: Vec<(usize, f64)>,
    /// `0.1 (b − a) / (√(2π) ϱ̂)`.
    pub tolerance: f64,
}

impl LltReport {
    pub(crate) fn from_rows(cfg: &ExperimentConfig, rho: f64, rows: Vec<LltRow>) -> Self {
        let mut sup_dev: Vec<(usize, f64)> = Vec::new();
        for r in &rows {
            match sup_dev.last_mut() {
                Some((n, d)) if *n == r.n => *d = d.max(r.abs_dev),
                _ => sup_dev.push((r.n, r.abs_dev)),
            }
        }
        let (a, b) = cfg.interval;
        LltReport { rows, sup_dev, tolerance: 0.1 * (b - a) / ((2.0 * PI).sqrt() * rho) }
    }

    /// Last sup-deviation below the first.
    pub fn decreasing(&self) -> bool {
        match (self.sup_dev.first(), self.sup_dev.last()) {
            (Some(f), Some(l)) => self.sup_dev.len() > 1 && l.1 < f.1,
            _ => false,
        }
    }

    pub fn final_within_tolerance(&self) -> bool {
        self.sup_dev.last().is_some_and(|l| l.1 <= self.tolerance)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![r.n.to_string(), r.t.to_string(), r.a_hat.to_string(), r.target.to_string(), r.abs_dev.to_string()])
            .collect();
        write_csv(path, &["n", "t", "a_hat", "target", "abs_dev"], &rows)
    }
}

/// One row per `t` in the grid of `cfg.t_points` values spanning `[−3ϱ̂√n, 3ϱ̂√n]`.
pub fn llt_rows(cfg: &ExperimentConfig, rho: f64, s: &CoefficientSample) -> Vec<LltRow> {
    let (a, b) = cfg.interval;
    let n = s.n as f64;
    let sn = n.sqrt();
    let m = cfg.t_points;
    (0..m)
        .map(|i| {
            let t = if m == 1 { 0.0 } else { 3.0 * rho * sn * (-1.0 + 2.0 * i as f64 / (m - 1) as f64) };
            let p = s.centred.eval_left(b - t) - s.centred.eval_left(a - t);
            let a_hat = sn * p;
            let target = (-t * t / (2.0 * rho * rho * n)).exp() * (b - a) / ((2.0 * PI).sqrt() * rho);
            LltRow { n: s.n, t, a_hat, target, abs_dev: (a_hat - target).abs() }
        })
        .collect()
}

/// Local limit sweep over `cfg.n_grid` for the window `cfg.interval`.
pub fn run_llt_experiment(cfg: &ExperimentConfig, est: &Estimates) -> Result<LltReport> {
    require_positive_variance(est)?;
    let rho = est.rho();
    let mut rows = Vec::new();
    for &n in &cfg.n_grid {
        rows.extend(llt_rows(cfg, rho, &sample_coefficients(cfg, est, n)?));
    }
    Ok(LltReport::from_rows(cfg, rho, rows))
}
