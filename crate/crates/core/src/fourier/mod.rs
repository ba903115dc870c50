//! Smoothing kernel, band-limited window approximants, conjugate characteristic
//! functions, the smoothing inequality and partitions of unity near a hyperplane.

mod approximants;
mod kernel;
mod partition;
pub mod quadrature;
mod smoothing;
mod window;

use num_complex::Complex64;

pub use approximants::{approximants, default_margins, Approximants, BandLimited, Side};
pub use kernel::{make_kernel, primitive, tail_constant, theta, theta_hat, SmoothingKernel, C0, MIX_A, SECOND_MOMENT};
pub use partition::{chi_tilde, holder_seminorm, phi_aggregates, PartitionOfUnity, PhaseSign, PhiAggregates};
pub use smoothing::{smoothing_gap_bound, Atoms, Distribution, GapBound, Gaussian, Mixture};
pub use window::WindowFunction;

use crate::montecarlo::EmpiricalCdf;

/// `φ_F(ξ) = Σ_j w_j e^{−iξX_j}` for weighted atoms `(X_j, w_j)`.
pub fn conjugate_cf(atoms: &[(f64, f64)], xi: f64) -> Complex64 {
    atoms.iter().map(|(x, w)| Complex64::new(0.0, -xi * x).exp() * *w).sum()
}

pub fn conjugate_cf_ecdf(f: &EmpiricalCdf, xi: f64) -> Complex64 {
    f.values()
        .iter()
        .zip(f.atom_weights())
        .map(|(x, w)| Complex64::new(0.0, -xi * x).exp() * w)
        .sum()
}

/// `∫_{−δ⁻²}^{δ⁻²} g(ξ) dξ` split at the knots of `ϑ̂_δ`, with enough panels for an
/// oscillation `e^{iuξ}` of frequency `|u| ≤ freq`.
pub fn band_integral<F>(kernel: &SmoothingKernel, freq: f64, g: F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let knots = kernel.fourier_knots();
    let mut acc = Complex64::new(0.0, 0.0);
    for w in knots.windows(2) {
        let len = w[1] - w[0];
        let panels = 2 + (len * freq.abs() / 4.0).ceil() as usize;
        acc += quadrature::integrate(&g, w[0], w[1], panels);
    }
    acc
}

/// Density of `F ∗ ϑ_δ` at `u` from `φ_F` by Fourier inversion.
pub fn smoothed_density_from_cf<F>(cf: F, kernel: &SmoothingKernel, u: f64) -> f64
where
    F: Fn(f64) -> Complex64,
{
    let v = band_integral(kernel, u.abs() + 10.0, |xi| {
        Complex64::new(0.0, u * xi).exp() * cf(xi) * kernel.fourier(xi)
    });
    v.re / (2.0 * std::f64::consts::PI)
}
