//! Seeded Monte Carlo sampling of random walks on projective space, exact enumeration
//! of short walks, and empirical distribution utilities.

use std::io::Write;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::measure::{for_each_product, MatrixMeasure};
use crate::projective::{DualPoint, ProjPoint};
use crate::rng::StreamFactory;

/// Functionals of one path `S_n = g_n ⋯ g_1` started at `x`.
#[derive(Clone, Debug)]
pub struct PathFunctionals {
    /// `σ(S_n, x)`, or `σ(S_n, x) − nγ` when a centering was requested.
    pub sigma: f64,
    /// `log d(S_n x, H_y)`; `-∞` when the pairing vanishes exactly.
    pub log_dist: f64,
    /// `log |⟨f, S_n v⟩|` (never centered).
    pub coeff_log: f64,
    pub end_point: ProjPoint,
}

#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub centering: Option<f64>,
}

/// Step kernel shared by all samplers. The vector is renormalized every few steps
/// and the logarithms of the norms are summed, so `σ` is additive along the path
/// without overflow.
pub(crate) struct Walker {
    dim: usize,
    mats: Vec<f64>,
    thresholds: Vec<u64>,
    renorm_every: usize,
}

impl Walker {
    pub(crate) fn new(measure: &MatrixMeasure) -> Self {
        let dim = measure.dim();
        let mut mats = Vec::with_capacity(measure.len() * dim * dim);
        for a in measure.atoms() {
            mats.extend_from_slice(a.matrix().data());
        }
        let log_n = measure.max_big_n().ln();
        let renorm_every = if log_n > 0.0 { ((150.0 / log_n) as usize).clamp(1, 64) } else { 64 };
        Walker { dim, mats, thresholds: measure.thresholds(), renorm_every }
    }

    #[inline(always)]
    fn pick(&self, u: u64) -> usize {
        if self.thresholds.len() == 2 {
            return (u >= self.thresholds[0]) as usize;
        }
        self.thresholds.iter().position(|t| u < *t).unwrap_or(self.thresholds.len() - 1)
    }

    /// Runs `n` steps from the unit vector `v` (overwritten with the unit end vector);
    /// returns the accumulated log-norm.
    pub(crate) fn walk(&self, rng: &mut ChaCha8Rng, v: &mut [f64], n: usize) -> f64 {
        if self.dim == 2 {
            return self.walk2(rng, v, n);
        }
        let d = self.dim;
        let mut s = 0.0;
        let mut tmp = vec![0.0; d];
        let mut left = self.renorm_every;
        for _ in 0..n {
            let i = self.pick(rng.next_u64());
            let m = &self.mats[i * d * d..(i + 1) * d * d];
            for r in 0..d {
                tmp[r] = dot(&m[r * d..(r + 1) * d], v);
            }
            v.copy_from_slice(&tmp);
            left -= 1;
            if left == 0 {
                let r = norm(v);
                s += r.ln();
                v.iter_mut().for_each(|x| *x /= r);
                left = self.renorm_every;
            }
        }
        let r = norm(v);
        v.iter_mut().for_each(|x| *x /= r);
        s + r.ln()
    }

    fn walk2(&self, rng: &mut ChaCha8Rng, v: &mut [f64], n: usize) -> f64 {
        let (mut a, mut b) = (v[0], v[1]);
        let mut s = 0.0;
        let mut left = self.renorm_every;
        for _ in 0..n {
            let i = self.pick(rng.next_u64());
            let m = &self.mats[4 * i..4 * i + 4];
            let na = m[0] * a + m[1] * b;
            let nb = m[2] * a + m[3] * b;
            a = na;
            b = nb;
            left -= 1;
            if left == 0 {
                let r = (a * a + b * b).sqrt();
                s += r.ln();
                a /= r;
                b /= r;
                left = self.renorm_every;
            }
        }
        let r = (a * a + b * b).sqrt();
        v[0] = a / r;
        v[1] = b / r;
        s + r.ln()
    }
}

pub(crate) fn check_points(measure: &MatrixMeasure, x: &ProjPoint, y: Option<&DualPoint>) -> Result<()> {
    if x.dim() != measure.dim() {
        return Err(Error::DimensionMismatch { expected: measure.dim(), found: x.dim() });
    }
    if let Some(y) = y {
        if y.dim() != measure.dim() {
            return Err(Error::DimensionMismatch { expected: measure.dim(), found: y.dim() });
        }
    }
    Ok(())
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))
}

/// Runs `samples` independent paths of length `n` in parallel. Path `i` uses stream `i`
/// of the master seed, so the output does not depend on the number of workers.
pub fn run_paths(
    measure: &MatrixMeasure,
    x: &ProjPoint,
    y: &DualPoint,
    cfg: &SimulationConfig,
) -> Result<Vec<PathFunctionals>> {
    check_points(measure, x, Some(y))?;
    let walker = Walker::new(measure);
    let streams = StreamFactory::new(cfg.seed);
    let shift = cfg.centering.map(|g| g * cfg.n as f64).unwrap_or(0.0);
    pool(cfg.workers)?.install(|| {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = streams.stream(i as u64);
                let mut v = x.coords().to_vec();
                let sigma = walker.walk(&mut rng, &mut v, cfg.n);
                let log_dist = dot(y.coords(), &v).abs().ln();
                Ok(PathFunctionals {
                    sigma: sigma - shift,
                    log_dist,
                    coeff_log: sigma + log_dist,
                    end_point: ProjPoint::new(&v)?,
                })
            })
            .collect()
    })
}

/// `(σ, log d)` pairs only; same streams and values as [`run_paths`] without centering.
pub fn run_sigma_dist(
    measure: &MatrixMeasure,
    x: &ProjPoint,
    y: &DualPoint,
    n: usize,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<(f64, f64)>> {
    check_points(measure, x, Some(y))?;
    let walker = Walker::new(measure);
    let streams = StreamFactory::new(seed);
    pool(workers)?.install(|| {
        Ok((0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = streams.stream(i as u64);
                let mut v = x.coords().to_vec();
                let sigma = walker.walk(&mut rng, &mut v, n);
                (sigma, dot(y.coords(), &v).abs().ln())
            })
            .collect())
    })
}

/// `(σ_b, σ_n)` for every path, read off the same trajectory.
pub fn run_sigma_checkpoint(
    measure: &MatrixMeasure,
    x: &ProjPoint,
    burn_in: usize,
    n: usize,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<(f64, f64)>> {
    check_points(measure, x, None)?;
    if burn_in > n {
        return Err(Error::invalid("burn-in exceeds path length"));
    }
    let walker = Walker::new(measure);
    let streams = StreamFactory::new(seed);
    pool(workers)?.install(|| {
        Ok((0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = streams.stream(i as u64);
                let mut v = x.coords().to_vec();
                let sb = walker.walk(&mut rng, &mut v, burn_in);
                let rest = walker.walk(&mut rng, &mut v, n - burn_in);
                (sb, sb + rest)
            })
            .collect())
    })
}

/// One word of the exact n-step distribution.
#[derive(Clone, Debug)]
pub struct ExactFunctional {
    pub weight: f64,
    pub sigma: f64,
    pub log_dist: f64,
    pub coeff_log: f64,
    pub end_point: ProjPoint,
}

/// Enumerates all words of length `n` and evaluates the path functionals on the
/// product matrices directly.
pub fn exact_functionals(
    measure: &MatrixMeasure,
    x: &ProjPoint,
    y: &DualPoint,
    n: usize,
) -> Result<Vec<ExactFunctional>> {
    check_points(measure, x, Some(y))?;
    let mut out = Vec::new();
    for_each_product(measure, n, |p, w| {
        let v = p.apply(x.coords());
        let r = norm(&v);
        let pair = dot(y.coords(), &v).abs();
        out.push(ExactFunctional {
            weight: w,
            sigma: r.ln(),
            log_dist: (pair / r).ln(),
            coeff_log: pair.ln(),
            end_point: ProjPoint::new(&v).expect("nonzero image"),
        });
    })?;
    Ok(out)
}

/// Writes `path_index,sigma,log_dist,coeff_log`.
pub fn write_paths_csv(path: &Path, paths: &[PathFunctionals]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "path_index,sigma,log_dist,coeff_log")?;
    for (i, p) in paths.iter().enumerate() {
        writeln!(w, "{},{},{},{}", i, p.sigma, p.log_dist, p.coeff_log)?;
    }
    w.flush()?;
    Ok(())
}

/// Right-continuous step CDF of a finite weighted sample.
#[derive(Clone, Debug)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
    cum: Vec<f64>,
}

impl EmpiricalCdf {
    /// Equal-weight sample. `-∞` is allowed (it sits below every threshold); NaN is not.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid("NaN in sample"));
        }
        if values.is_empty() {
            return Err(Error::invalid("empty sample"));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = values.len() as f64;
        let cum = (1..=values.len()).map(|i| i as f64 / n).collect();
        Ok(EmpiricalCdf { values, cum })
    }

    /// Weighted atoms; equal values are merged.
    pub fn weighted(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|(v, w)| v.is_nan() || !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("bad weighted atom"));
        }
        if atoms.is_empty() {
            return Err(Error::invalid("empty sample"));
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mut values = Vec::with_capacity(atoms.len());
        let mut cum = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for (v, w) in atoms {
            acc += w / total;
            if values.last() == Some(&v) {
                *cum.last_mut().unwrap() = acc;
            } else {
                values.push(v);
                cum.push(acc);
            }
        }
        *cum.last_mut().unwrap() = 1.0;
        Ok(EmpiricalCdf { values, cum })
    }

    /// `P(X ≤ b)`.
    pub fn eval(&self, b: f64) -> f64 {
        let k = self.values.partition_point(|v| *v <= b);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    /// `P(X < b)`.
    pub fn eval_left(&self, b: f64) -> f64 {
        let k = self.values.partition_point(|v| *v < b);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    /// `P(lo ≤ X ≤ hi)`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        self.eval(hi) - self.eval_left(lo)
    }

    /// Atoms in increasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn atom_weights(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cum
            .iter()
            .map(|c| {
                let w = c - prev;
                prev = *c;
                w
            })
            .collect()
    }
}

/// Exact Kolmogorov distance between two step CDFs.
pub fn ks_distance(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let mut sup = 0.0f64;
    for v in a.values.iter().chain(b.values.iter()) {
        sup = sup.max((a.eval(*v) - b.eval(*v)).abs());
        sup = sup.max((a.eval_left(*v) - b.eval_left(*v)).abs());
    }
    sup
}

/// Kolmogorov distance between a step CDF and a continuous CDF.
pub fn ks_distance_continuous<F: Fn(f64) -> f64>(a: &EmpiricalCdf, cdf: F) -> f64 {
    let mut sup = 0.0f64;
    let mut prev = 0.0;
    for (v, c) in a.values.iter().zip(&a.cum) {
        let f = cdf(*v);
        sup = sup.max((prev - f).abs()).max((c - f).abs());
        prev = *c;
    }
    sup
}

/// Kolmogorov distance to a discrete reference, evaluated between reference atoms
/// after merging atoms closer than `tol` (relative). Insensitive to rounding of the
/// sampled values at the level of `tol`.
pub fn ks_distance_discrete(sample: &EmpiricalCdf, reference: &EmpiricalCdf, tol: f64) -> f64 {
    let mut merged: Vec<f64> = Vec::new();
    for v in &reference.values {
        match merged.last() {
            Some(last) if (v - last).abs() <= tol * last.abs().max(1.0) => {}
            _ => merged.push(*v),
        }
    }
    let mut points = Vec::with_capacity(merged.len() + 1);
    points.push(merged[0] - 1.0);
    for w in merged.windows(2) {
        points.push(0.5 * (w[0] + w[1]));
    }
    points.push(merged[merged.len() - 1] + 1.0);
    points
        .iter()
        .map(|p| (sample.eval(*p) - reference.eval(*p)).abs())
        .fold(0.0, f64::max)
}

/// Two-sided DKW radius: `P(sup |F_N − F| > ε) ≤ α` for `ε = sqrt(ln(2/α) / 2N)`.
pub fn dkw_epsilon(samples: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * samples as f64)).sqrt()
}
