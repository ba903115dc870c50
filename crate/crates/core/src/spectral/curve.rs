use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::eigen::{leading_eigen, spectral_gap_at_zero, GapEstimate, PowerOptions};
use crate::spectral::operator::TransferOperator;
use crate::stats::{linear_fit, poly_fit};

#[derive(Clone, Debug)]
pub struct CurveOptions {
    pub power: PowerOptions,
    /// Half-width of the window around zero used for the Taylor fit.
    pub fit_radius: f64,
    pub keep_eigenfunctions: bool,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions { power: PowerOptions::default(), fit_radius: 0.3, keep_eigenfunctions: false }
    }
}

/// `ξ ↦ λ_{iξ}` on a grid with Taylor coefficients fitted near zero.
#[derive(Clone, Debug)]
pub struct SpectralCurve {
    pub xi: Vec<f64>,
    pub lambda: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub eigenfunctions: Vec<Vec<Complex64>>,
    pub gap_at_zero: GapEstimate,
    /// Coefficient of `ξ` in `arg λ_{iξ}`.
    pub fitted_gamma: f64,
    /// `−2 ×` coefficient of `ξ²` in `log |λ_{iξ}|`.
    pub fitted_rho_sq: f64,
    /// Log-log slope of `|λ_{iξ} − 1 − iγξ + (ϱ² + γ²)ξ²/2|` near zero.
    pub remainder_slope: f64,
    pub approximate: bool,
}

impl SpectralCurve {
    pub fn second_order(&self, xi: f64) -> Complex64 {
        let g = self.fitted_gamma;
        Complex64::new(1.0 - 0.5 * (self.fitted_rho_sq + g * g) * xi * xi, g * xi)
    }
}

/// Leading eigenvalue of `𝒫_{iξ}` for every `ξ` in the grid. Points are processed in
/// order of `|ξ|`, each warm-started from the nearest finished neighbour.
pub fn lambda_curve(op: &TransferOperator, xi_grid: &[f64], opts: &CurveOptions) -> Result<SpectralCurve> {
    let mut order: Vec<usize> = (0..xi_grid.len()).collect();
    order.sort_by(|a, b| xi_grid[*a].abs().partial_cmp(&xi_grid[*b].abs()).unwrap());
    let mut lambda = vec![Complex64::new(0.0, 0.0); xi_grid.len()];
    let mut residuals = vec![0.0; xi_grid.len()];
    let mut eig: Vec<Option<Vec<Complex64>>> = vec![None; xi_grid.len()];
    let mut done: Vec<usize> = Vec::new();
    for &i in &order {
        let xi = xi_grid[i];
        let start = done
            .iter()
            .min_by(|a, b| {
                (xi_grid[**a] - xi).abs().partial_cmp(&(xi_grid[**b] - xi).abs()).unwrap()
            })
            .and_then(|j| eig[*j].clone());
        let e = leading_eigen(op, Complex64::new(0.0, xi), opts.power, start.as_deref())?;
        lambda[i] = e.lambda;
        residuals[i] = e.residual;
        eig[i] = Some(e.eigenfunction);
        done.push(i);
    }
    let gap = spectral_gap_at_zero(op)?;

    let (mut fx, mut fre, mut fim) = (Vec::new(), Vec::new(), Vec::new());
    for (x, l) in xi_grid.iter().zip(&lambda) {
        if x.abs() <= opts.fit_radius + 1e-12 && *x != 0.0 {
            let lg = l.ln();
            fx.push(*x);
            fre.push(lg.re);
            fim.push(lg.im);
        }
    }
    if fx.len() < 6 {
        return Err(Error::Fit(format!("only {} nonzero ξ within the fit window", fx.len())));
    }
    let re = poly_fit(&fx, &fre, &[1, 2, 3, 4])?;
    let im = poly_fit(&fx, &fim, &[1, 2, 3, 4])?;
    let fitted_gamma = im[0];
    let fitted_rho_sq = -2.0 * re[1];

    let mut curve = SpectralCurve {
        xi: xi_grid.to_vec(),
        lambda,
        residuals,
        eigenfunctions: Vec::new(),
        gap_at_zero: gap,
        fitted_gamma,
        fitted_rho_sq,
        remainder_slope: f64::NAN,
        approximate: op.grid().is_approximate(),
    };
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for (x, l) in curve.xi.iter().zip(&curve.lambda) {
        if *x > 0.0 && *x <= opts.fit_radius + 1e-12 {
            let r = (l - curve.second_order(*x)).norm();
            if r > 1e-13 {
                lx.push(x.ln());
                ly.push(r.ln());
            }
        }
    }
    if lx.len() >= 3 {
        curve.remainder_slope = linear_fit(&lx, &ly)?.slope;
    }
    if opts.keep_eigenfunctions {
        curve.eigenfunctions = eig.into_iter().map(|e| e.unwrap_or_default()).collect();
    }
    Ok(curve)
}

/// Constants fitted for the two eigenvalue estimates near zero.
#[derive(Clone, Debug)]
pub struct LambdaEstimates {
    /// Largest grid radius on which `|λ_{iξ}| ≤ exp(−ϱ²ξ²/4)` holds throughout.
    pub xi0: f64,
    /// For each `n`: `max √n |λ_{iξ/√n}ⁿ − e^{iξ√nγ − ϱ²ξ²/2}| / (|ξ|³ e^{−ϱ²ξ²/4})`.
    pub constants: Vec<(usize, f64)>,
}

/// Reads both estimates off the curve: grid points `u` with `|u| ≤ ξ₀` stand for
/// `ξ = u√n`, so no interpolation is involved.
pub fn lambda_estimates_check(curve: &SpectralCurve, n_list: &[usize]) -> Result<LambdaEstimates> {
    let rho_sq = curve.fitted_rho_sq;
    let gamma = curve.fitted_gamma;
    if !(rho_sq > 0.0) {
        return Err(Error::Degenerate("fitted variance is not positive".into()));
    }
    let mut pos: Vec<(f64, Complex64)> =
        curve.xi.iter().zip(&curve.lambda).filter(|(x, _)| **x != 0.0).map(|(x, l)| (*x, *l)).collect();
    pos.sort_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap());
    let mut xi0 = 0.0;
    for (x, l) in &pos {
        if l.norm() <= (-rho_sq * x * x / 4.0).exp() {
            xi0 = x.abs();
        } else {
            break;
        }
    }
    if xi0 == 0.0 {
        return Err(Error::Fit("first estimate fails at the smallest grid frequency".into()));
    }
    let mut constants = Vec::new();
    for &n in n_list {
        let sn = (n as f64).sqrt();
        let mut c = 0.0f64;
        for (u, l) in pos.iter().filter(|(u, _)| u.abs() <= xi0) {
            let xi = u * sn;
            let power = (l.ln() * n as f64).exp();
            let target = Complex64::new(-0.5 * rho_sq * xi * xi, xi * sn * gamma).exp();
            let bound = xi.abs().powi(3) * (-rho_sq * xi * xi / 4.0).exp();
            c = c.max(sn * (power - target).norm() / bound);
        }
        constants.push((n, c));
    }
    Ok(LambdaEstimates { xi0, constants })
}
