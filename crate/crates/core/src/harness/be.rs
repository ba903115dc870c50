use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::cache::Estimates;
use crate::harness::config::ExperimentConfig;
use crate::harness::llt::{llt_rows, LltReport, LltRow};
use crate::harness::{enumerable, write_csv};
use crate::montecarlo::{exact_functionals, run_sigma_dist, EmpiricalCdf};
use crate::rng::cell_seed;
use crate::stats::{linear_fit, normal_cdf, LineFit};

/// Law of `log |⟨f, S_n v⟩| − nγ̂` at one `n`, sampled or enumerated.
#[derive(Clone, Debug)]
pub struct CoefficientSample {
    pub n: usize,
    pub centred: EmpiricalCdf,
    /// Mass of paths with `log d(S_n x, H_y) ≤ −A log n`.
    pub trunc_frac: f64,
    pub exact: bool,
    pub samples: usize,
    pub seed: u64,
}

/// Samples (or, with `cfg.exact` and a small enough `n`, enumerates) the centred
/// coefficient law. The Monte Carlo cell for `n` is seeded from `(cfg.seed, n)`.
pub fn sample_coefficients(cfg: &ExperimentConfig, est: &Estimates, n: usize) -> Result<CoefficientSample> {
    let shift = n as f64 * est.gamma;
    let cut = -cfg.a_const * (n as f64).ln();
    if cfg.exact && enumerable(&cfg.measure, n) {
        let words = exact_functionals(&cfg.measure, &cfg.x, &cfg.y, n)?;
        let trunc_frac = words.iter().filter(|w| w.log_dist <= cut).map(|w| w.weight).sum();
        let samples = words.len();
        let centred = EmpiricalCdf::weighted(words.into_iter().map(|w| (w.coeff_log - shift, w.weight)).collect())?;
        return Ok(CoefficientSample { n, centred, trunc_frac, exact: true, samples, seed: 0 });
    }
    let seed = cell_seed(cfg.seed, n as u64);
    let pairs = run_sigma_dist(&cfg.measure, &cfg.x, &cfg.y, n, cfg.samples, seed, cfg.workers)?;
    let trunc = pairs.iter().filter(|p| p.1 <= cut).count();
    let centred = EmpiricalCdf::new(pairs.iter().map(|(s, l)| s + l - shift).collect())?;
    Ok(CoefficientSample {
        n,
        centred,
        trunc_frac: trunc as f64 / cfg.samples as f64,
        exact: false,
        samples: cfg.samples,
        seed,
    })
}

/// `sup_b |P̂((X − nγ̂)/√n ≤ b) − Φ(b/ϱ̂)|` over 10⁴ equally spaced `b ∈ [−6ϱ̂, 6ϱ̂]`.
pub fn be_gap(centred: &EmpiricalCdf, n: usize, rho: f64) -> f64 {
    let sn = (n as f64).sqrt();
    (0..10_000)
        .map(|i| {
            let b = rho * (-6.0 + 12.0 * i as f64 / 9_999.0);
            (centred.eval(b * sn) - normal_cdf(b / rho)).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeRow {
    pub n: usize,
    pub gap: f64,
    pub trunc_frac: f64,
    pub samples: usize,
    pub seed: u64,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct BeReport {
    pub rows: Vec<BeRow>,
    /// Least-squares fit of `log gap` against `log n` (needs two grid points).
    pub fit: Option<LineFit>,
    pub gamma: f64,
    pub rho: f64,
}

impl BeReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![r.n.to_string(), r.gap.to_string(), r.trunc_frac.to_string(), r.samples.to_string(), r.seed.to_string()])
            .collect();
        write_csv(path, &["n", "gap", "trunc_frac", "samples", "seed"], &rows)
    }
}

fn check_degenerate(est: &Estimates) -> Result<()> {
    if !(est.rho_sq > 1e-12 && est.rho_sq > 2.0 * est.rho_sq_se) {
        return Err(Error::Degenerate(format!(
            "estimated variance ϱ̂² = {:e} ± {:e} is not positive; the normal approximation is void",
            est.rho_sq, est.rho_sq_se
        )));
    }
    Ok(())
}

fn fit_rate(rows: &[BeRow]) -> Option<LineFit> {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.gap > 0.0).map(|r| ((r.n as f64).ln(), r.gap.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    linear_fit(&x, &y).ok()
}

fn be_row(s: &CoefficientSample, rho: f64) -> BeRow {
    BeRow { n: s.n, gap: be_gap(&s.centred, s.n, rho), trunc_frac: s.trunc_frac, samples: s.samples, seed: s.seed, exact: s.exact }
}

/// Berry–Esseen sweep over `cfg.n_grid` for `J = (−∞, b]`.
pub fn run_be_experiment(cfg: &ExperimentConfig, est: &Estimates) -> Result<BeReport> {
    check_degenerate(est)?;
    let rho = est.rho();
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        rows.push(be_row(&sample_coefficients(cfg, est, n)?, rho));
    }
    let fit = fit_rate(&rows);
    Ok(BeReport { rows, fit, gamma: est.gamma, rho })
}

/// Both sweeps from one sample per `n`.
pub fn run_be_llt(cfg: &ExperimentConfig, est: &Estimates) -> Result<(BeReport, LltReport)> {
    check_degenerate(est)?;
    let rho = est.rho();
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    let mut llt: Vec<LltRow> = Vec::new();
    for &n in &cfg.n_grid {
        let s = sample_coefficients(cfg, est, n)?;
        rows.push(be_row(&s, rho));
        llt.extend(llt_rows(cfg, rho, &s));
    }
    let fit = fit_rate(&rows);
    Ok((BeReport { rows, fit, gamma: est.gamma, rho }, LltReport::from_rows(cfg, rho, llt)))
}

pub(crate) fn require_positive_variance(est: &Estimates) -> Result<()> {
    check_degenerate(est)
}
