use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::operator::TransferOperator;

#[derive(Clone, Copy, Debug)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions { tol: 1e-10, max_iter: 5000 }
    }
}

/// Leading eigenpair. The eigenfunction has sup norm one and is real and positive at
/// grid point 0.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub lambda: Complex64,
    pub eigenfunction: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.norm()))
}

fn normalize(v: &mut [Complex64]) {
    let s = sup(v);
    if s == 0.0 {
        return;
    }
    let anchor = if v[0].norm() > 1e-3 * s {
        v[0]
    } else {
        *v.iter().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()).unwrap()
    };
    let phase = anchor / anchor.norm();
    let f = 1.0 / (s * phase);
    v.iter_mut().for_each(|x| *x *= f);
}

/// Power iteration for the leading eigenvalue of `𝒫_z` on the grid.
pub fn leading_eigen(
    op: &TransferOperator,
    z: Complex64,
    opts: PowerOptions,
    start: Option<&[Complex64]>,
) -> Result<Eigenpair> {
    let m = op.len();
    let twisted = op.at(z);
    let mut v: Vec<Complex64> = match start {
        Some(s) if s.len() == m => s.to_vec(),
        _ => vec![Complex64::new(1.0, 0.0); m],
    };
    normalize(&mut v);
    let mut w = vec![Complex64::new(0.0, 0.0); m];
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        twisted.apply_into(&v, &mut w);
        let num: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        let lambda = num / den;
        residual = v.iter().zip(&w).map(|(a, b)| (b - lambda * a).norm()).fold(0.0, f64::max);
        if residual <= opts.tol * lambda.norm().max(1e-300) || sup(&w) == 0.0 {
            normalize(&mut w);
            return Ok(Eigenpair { lambda, eigenfunction: w, residual, iterations: it });
        }
        std::mem::swap(&mut v, &mut w);
        normalize(&mut v);
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual })
}

#[derive(Clone, Copy, Debug)]
pub struct GapEstimate {
    /// Estimated modulus of the second eigenvalue of `𝒫₀`.
    pub rho: f64,
    pub approximate: bool,
    pub iterations: usize,
}

/// Second-eigenvalue modulus of `𝒫₀` by power iteration on the complement of the
/// constants, projected with the left Perron vector at every step.
pub fn spectral_gap_at_zero(op: &TransferOperator) -> Result<GapEstimate> {
    let m = op.len();
    let mut pi = vec![1.0 / m as f64; m];
    let mut tmp = vec![0.0; m];
    for _ in 0..20_000 {
        op.apply_real_left(&pi, &mut tmp);
        let s: f64 = tmp.iter().sum();
        tmp.iter_mut().for_each(|x| *x /= s);
        let diff: f64 = pi.iter().zip(&tmp).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut tmp);
        if diff < 1e-14 {
            break;
        }
    }
    let mut u: Vec<f64> = (0..m)
        .map(|j| {
            let t = j as f64 / m as f64;
            (2.0 * std::f64::consts::PI * t).cos() + 0.3 * (6.0 * std::f64::consts::PI * t).sin() + 0.1 * t
        })
        .collect();
    let project = |u: &mut [f64], pi: &[f64]| {
        let c: f64 = u.iter().zip(pi).map(|(a, b)| a * b).sum();
        u.iter_mut().for_each(|x| *x -= c);
        let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        n
    };
    let n0 = project(&mut u, &pi);
    if !(n0 > 0.0) {
        return Err(Error::GapUnavailable("degenerate start vector".into()));
    }
    u.iter_mut().for_each(|x| *x /= n0);
    let total = 600;
    let mut logs = Vec::with_capacity(total);
    for _ in 0..total {
        op.apply_real(&u, &mut tmp);
        std::mem::swap(&mut u, &mut tmp);
        let n = project(&mut u, &pi);
        if !n.is_finite() {
            return Err(Error::GapUnavailable("non-finite iterate".into()));
        }
        if n == 0.0 {
            return Ok(GapEstimate { rho: 0.0, approximate: op.grid().is_approximate(), iterations: logs.len() });
        }
        logs.push(n.ln());
        u.iter_mut().for_each(|x| *x /= n);
    }
    let tail = &logs[total / 2..];
    let rho = (tail.iter().sum::<f64>() / tail.len() as f64).exp();
    Ok(GapEstimate { rho, approximate: op.grid().is_approximate(), iterations: total })
}

#[derive(Clone, Debug)]
pub struct DecayReport {
    pub xi: f64,
    pub rho_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `log ‖𝒫_{iξ}^k 1‖_∞` for `k = 1..=n_max`.
    pub log_norms: Vec<f64>,
}

/// Growth rate of `‖𝒫_{iξ}^k 1‖_∞`, fitted on the second half of `k = 1..=n_max`.
pub fn high_frequency_decay(op: &TransferOperator, xi: f64, n_max: usize) -> Result<DecayReport> {
    if n_max < 8 {
        return Err(Error::invalid("need at least 8 iterations"));
    }
    let m = op.len();
    let t = op.at(Complex64::new(0.0, xi));
    let mut v = vec![Complex64::new(1.0, 0.0); m];
    let mut w = vec![Complex64::new(0.0, 0.0); m];
    let mut acc = 0.0;
    let mut log_norms = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        t.apply_into(&v, &mut w);
        let s = sup(&w);
        if s == 0.0 {
            return Ok(DecayReport { xi, rho_hat: 0.0, ci_low: 0.0, ci_high: 0.0, log_norms });
        }
        acc += s.ln();
        log_norms.push(acc);
        w.iter_mut().for_each(|x| *x /= s);
        std::mem::swap(&mut v, &mut w);
    }
    let k0 = n_max / 2;
    let ks: Vec<f64> = (k0..n_max).map(|k| (k + 1) as f64).collect();
    let fit = crate::stats::linear_fit(&ks, &log_norms[k0..])?;
    Ok(DecayReport {
        xi,
        rho_hat: fit.slope.exp(),
        ci_low: (fit.slope - 1.96 * fit.slope_se).exp(),
        ci_high: (fit.slope + 1.96 * fit.slope_se).exp(),
        log_norms,
    })
}
