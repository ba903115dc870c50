use std::path::Path;

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::write_csv;
use crate::spectral::{
    high_frequency_decay, lambda_curve, lambda_estimates_check, CurveOptions, DecayReport, LambdaEstimates, OperatorGrid,
    SpectralCurve, TransferOperator,
};

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub grid_size: usize,
    pub curve: SpectralCurve,
    /// Growth rate of `‖𝒫_{i}^k 1‖_∞` (frequency one).
    pub decay: DecayReport,
    /// `None` when the fitted variance is not positive.
    pub estimates: Option<LambdaEstimates>,
}

impl SpectrumReport {
    /// `xi,re_lambda,im_lambda,abs_lambda,residual`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .curve
            .xi
            .iter()
            .zip(&self.curve.lambda)
            .zip(&self.curve.residuals)
            .map(|((x, l), r)| vec![x.to_string(), l.re.to_string(), l.im.to_string(), l.norm().to_string(), r.to_string()])
            .collect();
        write_csv(path, &["xi", "re_lambda", "im_lambda", "abs_lambda", "residual"], &rows)
    }

    pub fn summary(&self) -> String {
        let c = &self.curve;
        let mut s = String::new();
        s.push_str(&format!("grid size                 {}{}\n", self.grid_size, if c.approximate { " (scattered, approximate)" } else { "" }));
        s.push_str(&format!("gap at zero (|λ₂| est.)   {:.6}\n", c.gap_at_zero.rho));
        s.push_str(&format!("fitted gamma              {:.9}\n", c.fitted_gamma));
        s.push_str(&format!("fitted rho^2              {:.9}\n", c.fitted_rho_sq));
        s.push_str(&format!("remainder log-log slope   {:.4}\n", c.remainder_slope));
        s.push_str(&format!(
            "decay rate at xi = {}      {:.7} (95% CI {:.7} .. {:.7})\n",
            self.decay.xi, self.decay.rho_hat, self.decay.ci_low, self.decay.ci_high
        ));
        if let Some(e) = &self.estimates {
            s.push_str(&format!("xi0                       {:.4}\n", e.xi0));
            for (n, k) in &e.constants {
                s.push_str(&format!("  n = {n:<6} third-order constant {k:.4}\n"));
            }
        }
        s
    }
}

/// `λ_{iξ}` on `ξ ∈ [−2, 2]` (step 0.025) for the discretized operator with
/// `cfg.grid_size` points, the high-frequency decay at `ξ = 1` and the eigenvalue
/// estimate constants for `cfg.n_grid`.
pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumReport> {
    let d = cfg.measure.dim();
    let grid = if d == 2 { OperatorGrid::circle(cfg.grid_size)? } else { OperatorGrid::cloud(d, cfg.grid_size, cfg.seed)? };
    let op = TransferOperator::new(&cfg.measure, grid)?;
    let xi: Vec<f64> = (-80..=80).map(|i| i as f64 * 0.025).collect();
    let curve = lambda_curve(&op, &xi, &CurveOptions::default())?;
    let decay = high_frequency_decay(&op, 1.0, 400)?;
    let estimates = lambda_estimates_check(&curve, &cfg.n_grid).ok();
    Ok(SpectrumReport { grid_size: cfg.grid_size, curve, decay, estimates })
}
