use std::path::Path;

use crate::error::Result;
use crate::harness::cache::Estimates;
use crate::harness::config::ExperimentConfig;
use crate::harness::{write_csv, TAG_LD};
use crate::montecarlo::{exact_functionals, run_sigma_dist};
use crate::rng::cell_seed;
use crate::stats::{poisson_rate_fit, RateFit};

/// Frequencies of one event along `cfg.ld_n_grid` and the fitted exponential rate.
#[derive(Clone, Debug)]
pub struct LdEvent {
    pub name: &'static str,
    pub n: Vec<usize>,
    pub counts: Vec<u64>,
    pub samples: usize,
    /// `None` when no event was observed at any `n`.
    pub fit: Option<RateFit>,
    pub note: String,
}

impl LdEvent {
    /// Negative slope at 95% confidence.
    pub fn pass(&self) -> bool {
        self.fit.is_some_and(|f| f.slope_upper95() < 0.0)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|c| *c as f64 / self.samples as f64).collect()
    }
}

#[derive(Clone, Debug)]
pub struct LdReport {
    pub epsilon: f64,
    /// `|σ(S_n, x) − nγ̂| ≥ εn`.
    pub sigma: LdEvent,
    /// `d(S_n x, H_y) ≤ e^{−εn}`.
    pub distance: LdEvent,
}

impl LdReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut rows = Vec::new();
        for ev in [&self.sigma, &self.distance] {
            let (slope, upper) = match ev.fit {
                Some(f) => (f.slope.to_string(), f.slope_upper95().to_string()),
                None => ("NaN".into(), "NaN".into()),
            };
            for (n, c) in ev.n.iter().zip(&ev.counts) {
                rows.push(vec![
                    ev.name.to_string(),
                    n.to_string(),
                    c.to_string(),
                    ev.samples.to_string(),
                    (*c as f64 / ev.samples as f64).to_string(),
                    slope.clone(),
                    upper.clone(),
                ]);
            }
        }
        write_csv(path, &["event", "n", "count", "samples", "frequency", "slope", "slope_upper95"], &rows)
    }
}

fn event(name: &'static str, n: Vec<usize>, counts: Vec<u64>, samples: usize) -> LdEvent {
    let t: Vec<f64> = n.iter().map(|v| *v as f64).collect();
    let exposure = vec![samples as f64; n.len()];
    let (fit, note) = match poisson_rate_fit(&t, &counts, &exposure) {
        Ok(f) => (Some(f), String::new()),
        Err(e) => (None, format!("no decay rate: {e}")),
    };
    LdEvent { name, n, counts, samples, fit, note }
}

/// Counts both events over `cfg.ld_n_grid` with `cfg.ld_samples` paths per `n`, using
/// `cfg.ld_y` for the hyperplane, and fits `count ~ Poisson(N e^{a + b n})`.
pub fn run_ld_experiment(cfg: &ExperimentConfig, est: &Estimates) -> Result<LdReport> {
    let eps = cfg.epsilon;
    let mut c_sigma = Vec::new();
    let mut c_dist = Vec::new();
    for &n in &cfg.ld_n_grid {
        let seed = cell_seed(cfg.seed ^ TAG_LD, n as u64);
        let pairs = run_sigma_dist(&cfg.measure, &cfg.x, &cfg.ld_y, n, cfg.ld_samples, seed, cfg.workers)?;
        let nf = n as f64;
        c_sigma.push(pairs.iter().filter(|p| (p.0 - nf * est.gamma).abs() >= eps * nf).count() as u64);
        c_dist.push(pairs.iter().filter(|p| p.1 <= -eps * nf).count() as u64);
    }
    Ok(LdReport {
        epsilon: eps,
        sigma: event("sigma", cfg.ld_n_grid.clone(), c_sigma, cfg.ld_samples),
        distance: event("distance", cfg.ld_n_grid.clone(), c_dist, cfg.ld_samples),
    })
}

/// Exact probabilities of both events at one enumerable `n`.
pub fn ld_frequencies_exact(cfg: &ExperimentConfig, gamma: f64, n: usize) -> Result<(f64, f64)> {
    let words = exact_functionals(&cfg.measure, &cfg.x, &cfg.ld_y, n)?;
    let nf = n as f64;
    let eps = cfg.epsilon;
    let p1 = words.iter().filter(|w| (w.sigma - nf * gamma).abs() >= eps * nf).map(|w| w.weight).sum();
    let p2 = words.iter().filter(|w| w.log_dist <= -eps * nf).map(|w| w.weight).sum();
    Ok((p1, p2))
}
