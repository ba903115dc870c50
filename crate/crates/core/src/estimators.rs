//! Monte Carlo estimators of the Lyapunov exponent, the asymptotic variance, the
//! stationary measure and its regularity near hyperplanes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::MatrixMeasure;
use crate::montecarlo::{check_points, pool, run_sigma_checkpoint, Walker};
use crate::projective::{act, dual_pairing, DualPoint, ProjPoint};
use crate::rng::StreamFactory;
use crate::stats::{linear_fit, mean, variance};

#[derive(Clone, Debug)]
pub struct MomentOptions {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    /// Steps discarded before increments are accumulated; clamped to `n / 2`.
    pub burn_in: usize,
    pub start: Option<ProjPoint>,
}

impl MomentOptions {
    pub fn new(n: usize, samples: usize, seed: u64) -> Self {
        MomentOptions { n, samples, seed, workers: 1, burn_in: 1000, start: None }
    }
}

#[derive(Clone, Debug)]
pub struct LyapunovEstimate {
    /// Mean of `(σ_n − σ_b) / (n − b)`: the start-point bias of `σ_n / n` is removed.
    pub gamma_hat: f64,
    pub std_error: f64,
    /// Plain `mean σ_n / n`.
    pub gamma_raw: f64,
    pub raw_std_error: f64,
    /// `log √d / n`: change of `σ_n / n` when the norm cocycle is replaced by `log ‖S_n‖`.
    pub substitution_bound: f64,
    pub n: usize,
    pub burn_in: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct VarianceEstimate {
    /// `Var(σ_n − σ_b) / (n − b)`.
    pub rho_sq: f64,
    pub std_error: f64,
    pub degenerate: bool,
    pub n: usize,
    pub burn_in: usize,
    pub samples: usize,
}

fn increments(measure: &MatrixMeasure, opts: &MomentOptions) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    if opts.n == 0 || opts.samples < 2 {
        return Err(Error::invalid("need n ≥ 1 and at least two samples"));
    }
    let start = opts.start.clone().unwrap_or_else(|| ProjPoint::basis(measure.dim(), 0));
    let b = opts.burn_in.min(opts.n / 2);
    let pairs = run_sigma_checkpoint(measure, &start, b, opts.n, opts.samples, opts.seed, opts.workers)?;
    let inc = pairs.iter().map(|(sb, sn)| sn - sb).collect();
    let raw = pairs.iter().map(|(_, sn)| *sn).collect();
    Ok((inc, raw, b))
}

fn lyapunov_from(measure: &MatrixMeasure, opts: &MomentOptions, inc: &[f64], raw: &[f64], b: usize) -> LyapunovEstimate {
    let m = (opts.n - b) as f64;
    let nn = opts.samples as f64;
    LyapunovEstimate {
        gamma_hat: mean(inc) / m,
        std_error: (variance(inc) / nn).sqrt() / m,
        gamma_raw: mean(raw) / opts.n as f64,
        raw_std_error: (variance(raw) / nn).sqrt() / opts.n as f64,
        substitution_bound: (measure.dim() as f64).sqrt().ln() / opts.n as f64,
        n: opts.n,
        burn_in: b,
        samples: opts.samples,
        seed: opts.seed,
    }
}

fn variance_from(opts: &MomentOptions, inc: &[f64], b: usize) -> VarianceEstimate {
    let m = (opts.n - b) as f64;
    let mu = mean(inc);
    let s2 = variance(inc);
    let m4 = inc.iter().map(|x| (x - mu).powi(4)).sum::<f64>() / inc.len() as f64;
    let se = ((m4 - s2 * s2).max(0.0) / inc.len() as f64).sqrt() / m;
    let scale = inc.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    VarianceEstimate {
        rho_sq: s2 / m,
        std_error: se,
        degenerate: s2.sqrt() <= 1e-10 * scale,
        n: opts.n,
        burn_in: b,
        samples: opts.samples,
    }
}

pub fn estimate_lyapunov(measure: &MatrixMeasure, opts: &MomentOptions) -> Result<LyapunovEstimate> {
    let (inc, raw, b) = increments(measure, opts)?;
    Ok(lyapunov_from(measure, opts, &inc, &raw, b))
}

pub fn estimate_variance_clt(measure: &MatrixMeasure, opts: &MomentOptions) -> Result<VarianceEstimate> {
    let (inc, _, b) = increments(measure, opts)?;
    Ok(variance_from(opts, &inc, b))
}

/// Both estimates from one batch of paths.
pub fn estimate_moments(
    measure: &MatrixMeasure,
    opts: &MomentOptions,
) -> Result<(LyapunovEstimate, VarianceEstimate)> {
    let (inc, raw, b) = increments(measure, opts)?;
    Ok((lyapunov_from(measure, opts, &inc, &raw, b), variance_from(opts, &inc, b)))
}

/// Equal-weight sample of the stationary measure from Markov chains on projective space.
#[derive(Clone, Debug)]
pub struct StationaryCloud {
    pub points: Vec<ProjPoint>,
    pub weights: Vec<f64>,
    pub burn_in: usize,
    pub chain_length: usize,
    pub chains: usize,
}

/// Runs `chains` chains (stream `i` for chain `i`), discards `burn_in` steps and keeps
/// the next `chain_length` states of each chain, concatenated in chain order.
pub fn estimate_stationary(
    measure: &MatrixMeasure,
    burn_in: usize,
    chain_length: usize,
    chains: usize,
    seed: u64,
    workers: usize,
) -> Result<StationaryCloud> {
    if chain_length == 0 || chains == 0 {
        return Err(Error::invalid("empty chain"));
    }
    let start = ProjPoint::basis(measure.dim(), 0);
    check_points(measure, &start, None)?;
    let walker = Walker::new(measure);
    let streams = StreamFactory::new(seed);
    let per_chain: Vec<Vec<ProjPoint>> = pool(workers)?.install(|| {
        (0..chains)
            .into_par_iter()
            .map(|c| {
                let mut rng = streams.stream(c as u64);
                let mut v = start.coords().to_vec();
                walker.walk(&mut rng, &mut v, burn_in);
                (0..chain_length)
                    .map(|_| {
                        walker.walk(&mut rng, &mut v, 1);
                        ProjPoint::new(&v).expect("unit vector")
                    })
                    .collect()
            })
            .collect()
    });
    let points: Vec<ProjPoint> = per_chain.into_iter().flatten().collect();
    let w = 1.0 / points.len() as f64;
    Ok(StationaryCloud { weights: vec![w; points.len()], points, burn_in, chain_length, chains })
}

pub type TestFunction = Box<dyn Fn(&ProjPoint) -> f64 + Send + Sync>;

/// Smooth functions on projective space: trigonometric in the angle for `d = 2`,
/// quadratic forms `w ↦ w_i w_j` otherwise.
pub fn test_basket(d: usize) -> Vec<TestFunction> {
    let mut out: Vec<TestFunction> = Vec::new();
    if d == 2 {
        for m in 1..=10 {
            let m = m as f64;
            out.push(Box::new(move |w: &ProjPoint| (2.0 * m * w.angle()).cos()));
            out.push(Box::new(move |w: &ProjPoint| (2.0 * m * w.angle()).sin()));
        }
    } else {
        for i in 0..d {
            for j in i..d {
                out.push(Box::new(move |w: &ProjPoint| w.coords()[i] * w.coords()[j]));
            }
        }
    }
    out
}

/// `max_φ |ν̂(φ) − ν̂(Pφ)|` over the given test functions.
pub fn invariance_residual(cloud: &StationaryCloud, measure: &MatrixMeasure, funcs: &[TestFunction]) -> f64 {
    let images: Vec<Vec<ProjPoint>> = cloud
        .points
        .iter()
        .map(|w| measure.atoms().iter().map(|a| act(a, w)).collect())
        .collect();
    funcs
        .iter()
        .map(|f| {
            let mut diff = 0.0;
            for ((w, imgs), cw) in cloud.points.iter().zip(&images).zip(&cloud.weights) {
                let pf: f64 = imgs.iter().zip(measure.weights()).map(|(q, p)| p * f(q)).sum();
                diff += cw * (f(w) - pf);
            }
            diff.abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct RegularityFit {
    pub eta_hat: f64,
    pub log_c_hat: f64,
    pub std_error: f64,
    pub radii: Vec<f64>,
    pub masses: Vec<f64>,
    pub used: usize,
}

/// Log-log fit of `ν̂{w : d(w, H_y) ≤ r}` against `r`. Radii whose ball holds fewer
/// than 50 sample points are left out; fewer than three usable radii is an error.
pub fn regularity_exponent(cloud: &StationaryCloud, y: &DualPoint, radii: &[f64]) -> Result<RegularityFit> {
    let mut dists: Vec<f64> = cloud.points.iter().map(|w| dual_pairing(y, w)).collect();
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = dists.len() as f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut masses = Vec::new();
    for r in radii {
        let count = dists.partition_point(|d| *d <= *r);
        masses.push(count as f64 / n);
        if count >= 50 {
            xs.push(r.ln());
            ys.push((count as f64 / n).ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::Fit(format!(
            "only {} radii carry enough stationary mass; the hyperplane may miss the support",
            xs.len()
        )));
    }
    let f = linear_fit(&xs, &ys)?;
    Ok(RegularityFit {
        eta_hat: f.slope,
        log_c_hat: f.intercept,
        std_error: f.slope_se,
        radii: radii.to_vec(),
        masses,
        used: xs.len(),
    })
}
