//! Small statistical helpers: normal distribution, least squares, Poisson regression.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0).max(1.0)
}

#[derive(Clone, Copy, Debug)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

/// Ordinary least squares `y = intercept + slope x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::Fit("need at least two points".into()));
    }
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if n > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (n as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit { slope, intercept, slope_se })
}

/// Least squares polynomial `Σ_{k in powers} c_k x^k` via normal equations solved by
/// Gaussian elimination; adequate for the low degrees used here.
pub fn poly_fit(x: &[f64], y: &[f64], powers: &[i32]) -> Result<Vec<f64>> {
    let p = powers.len();
    if x.len() < p {
        return Err(Error::Fit(format!("{} points for {} coefficients", x.len(), p)));
    }
    let mut a = vec![0.0; p * p];
    let mut b = vec![0.0; p];
    for (xi, yi) in x.iter().zip(y) {
        let row: Vec<f64> = powers.iter().map(|k| xi.powi(*k)).collect();
        for i in 0..p {
            b[i] += row[i] * yi;
            for j in 0..p {
                a[i * p + j] += row[i] * row[j];
            }
        }
    }
    solve(&mut a, &mut b, p)?;
    Ok(b)
}

fn solve(a: &mut [f64], b: &mut [f64], p: usize) -> Result<()> {
    for k in 0..p {
        let piv = (k..p)
            .max_by(|i, j| a[i * p + k].abs().partial_cmp(&a[j * p + k].abs()).unwrap())
            .unwrap();
        if a[piv * p + k].abs() < 1e-300 {
            return Err(Error::Fit("singular normal equations".into()));
        }
        for j in 0..p {
            a.swap(k * p + j, piv * p + j);
        }
        b.swap(k, piv);
        for i in k + 1..p {
            let f = a[i * p + k] / a[k * p + k];
            for j in k..p {
                a[i * p + j] -= f * a[k * p + j];
            }
            b[i] -= f * b[k];
        }
    }
    for i in (0..p).rev() {
        for j in i + 1..p {
            b[i] -= a[i * p + j] * b[j];
        }
        b[i] /= a[i * p + i];
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
pub struct RateFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_se: f64,
}

impl RateFit {
    /// Upper end of the two-sided 95% interval for the slope.
    pub fn slope_upper95(&self) -> f64 {
        self.slope + 1.959964 * self.slope_se
    }
}

/// Maximum-likelihood fit of `count_i ~ Poisson(exposure_i · exp(a + b t_i))` by Newton's
/// method; standard error from the observed information. Zero counts take part in the fit.
pub fn poisson_rate_fit(t: &[f64], counts: &[u64], exposure: &[f64]) -> Result<RateFit> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Fit("all counts are zero; the rate is not identifiable".into()));
    }
    if t.len() < 2 {
        return Err(Error::Fit("need at least two points".into()));
    }
    let loglik = |a: f64, b: f64| -> f64 {
        t.iter()
            .zip(counts)
            .zip(exposure)
            .map(|((ti, c), e)| {
                let eta = a + b * ti;
                *c as f64 * eta - e * eta.exp()
            })
            .sum()
    };
    let mut a = (total as f64 / exposure.iter().sum::<f64>()).ln();
    let mut b = 0.0;
    let mut info = [0.0; 4];
    for _ in 0..200 {
        let (mut g0, mut g1) = (0.0, 0.0);
        info = [0.0; 4];
        for ((ti, c), e) in t.iter().zip(counts).zip(exposure) {
            let lam = e * (a + b * ti).exp();
            let r = *c as f64 - lam;
            g0 += r;
            g1 += r * ti;
            info[0] += lam;
            info[1] += lam * ti;
            info[3] += lam * ti * ti;
        }
        info[2] = info[1];
        let det = info[0] * info[3] - info[1] * info[2];
        if !(det > 0.0) {
            return Err(Error::Fit("singular information matrix".into()));
        }
        let da = (info[3] * g0 - info[1] * g1) / det;
        let db = (-info[2] * g0 + info[0] * g1) / det;
        let base = loglik(a, b);
        let mut step = 1.0;
        while step > 1e-8 && loglik(a + step * da, b + step * db) < base - 1e-12 {
            step *= 0.5;
        }
        a += step * da;
        b += step * db;
        if (step * da).abs() < 1e-12 && (step * db).abs() < 1e-12 {
            break;
        }
    }
    let det = info[0] * info[3] - info[1] * info[2];
    Ok(RateFit { intercept: a, slope: b, slope_se: (info[0] / det).sqrt() })
}
