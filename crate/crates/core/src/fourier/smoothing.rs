use crate::fourier::kernel::{tail_constant, SmoothingKernel};
use crate::fourier::quadrature::integrate;
use crate::montecarlo::EmpiricalCdf;
use crate::stats::{normal_cdf, normal_pdf};

/// A distribution function that can also be convolved with the smoothing kernel.
pub trait Distribution: Sync {
    fn cdf(&self, u: f64) -> f64;

    /// `P(X < u)`; differs from [`cdf`](Self::cdf) only at atoms.
    fn cdf_left(&self, u: f64) -> f64 {
        self.cdf(u)
    }

    /// `(F ∗ ϑ_δ)(u)`.
    fn smoothed(&self, kernel: &SmoothingKernel, u: f64) -> f64;

    /// Atom locations, where the supremum of `|F − H|` may be attained from the left.
    fn atoms(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Gaussian {
    pub mean: f64,
    pub sd: f64,
}

impl Gaussian {
    pub fn standard() -> Self {
        Gaussian { mean: 0.0, sd: 1.0 }
    }

    pub fn density_bound(&self) -> f64 {
        1.0 / (self.sd * (2.0 * std::f64::consts::PI).sqrt())
    }
}

impl Distribution for Gaussian {
    fn cdf(&self, u: f64) -> f64 {
        normal_cdf((u - self.mean) / self.sd)
    }

    /// `∫ h(r) Θ_δ(u − r) dr` over `mean ± 12 sd`.
    fn smoothed(&self, kernel: &SmoothingKernel, u: f64) -> f64 {
        let (a, b) = (self.mean - 12.0 * self.sd, self.mean + 12.0 * self.sd);
        let width = 0.5 * self.sd.min(kernel.scale());
        let panels = ((b - a) / width).ceil() as usize;
        integrate(
            |r| normal_pdf((r - self.mean) / self.sd) / self.sd * kernel.cdf(u - r),
            a,
            b,
            panels,
        )
    }
}

/// Weighted point masses.
#[derive(Clone, Debug)]
pub struct Atoms(pub EmpiricalCdf);

impl Distribution for Atoms {
    fn cdf(&self, u: f64) -> f64 {
        self.0.eval(u)
    }

    fn cdf_left(&self, u: f64) -> f64 {
        self.0.eval_left(u)
    }

    fn smoothed(&self, kernel: &SmoothingKernel, u: f64) -> f64 {
        self.0
            .values()
            .iter()
            .zip(self.0.atom_weights())
            .map(|(x, w)| w * kernel.cdf(u - x))
            .sum()
    }

    fn atoms(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }
}

/// Convex combination of distributions.
pub struct Mixture(pub Vec<(f64, Box<dyn Distribution>)>);

impl Distribution for Mixture {
    fn cdf(&self, u: f64) -> f64 {
        self.0.iter().map(|(w, d)| w * d.cdf(u)).sum()
    }

    fn cdf_left(&self, u: f64) -> f64 {
        self.0.iter().map(|(w, d)| w * d.cdf_left(u)).sum()
    }

    fn smoothed(&self, kernel: &SmoothingKernel, u: f64) -> f64 {
        self.0.iter().map(|(w, d)| w * d.smoothed(kernel, u)).sum()
    }

    fn atoms(&self) -> Vec<f64> {
        self.0.iter().flat_map(|(_, d)| d.atoms()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct GapBound {
    /// `sup_u |F − H|`.
    pub lhs: f64,
    /// `2 sup_{|u|≤κδ⁻²} |(F − H) ∗ ϑ_δ| + Cδ²`.
    pub rhs: f64,
    pub smoothed_sup: f64,
    pub kappa: f64,
    pub c_tail: f64,
    pub big_c: f64,
    /// `sup_{|u|≥δ⁻²} |F − H|` on the grid.
    pub far_sup: f64,
    /// False when `far_sup > Dδ²`: the inequality is then not claimed.
    pub applicable: bool,
    pub pass: bool,
}

/// Evaluates both sides of the smoothing inequality
/// `sup |F − H| ≤ 2 sup_{|u|≤κδ⁻²} |(F − H) ∗ ϑ_δ(u)| + Cδ²`
/// with `κ = 1 + 4c`, `C = 12mc`, `c = sup_D D ∫_{|v|≥D} ϑ`.
///
/// The suprema are taken over `points` equispaced points of `[−κδ⁻², κδ⁻²]`, the atoms of
/// `F` (both one-sided limits) and, for the far-field hypothesis, `points` more on
/// `δ⁻² ≤ |u| ≤ 4κδ⁻²`. The hypothesis constant `D` is supplied by the caller.
pub fn smoothing_gap_bound(
    f: &dyn Distribution,
    h: &Gaussian,
    kernel: &SmoothingKernel,
    points: usize,
    d_const: f64,
) -> GapBound {
    let c = tail_constant();
    let kappa = 1.0 + 4.0 * c;
    let big_c = 12.0 * h.density_bound() * c;
    let d2 = kernel.scale();
    let reach = kappa / d2;
    let points = points.max(3);
    let grid: Vec<f64> = (0..points).map(|i| -reach + 2.0 * reach * i as f64 / (points - 1) as f64).collect();

    let mut lhs = 0.0f64;
    let mut far = 0.0f64;
    let gap = |u: f64| (f.cdf(u) - h.cdf(u)).abs().max((f.cdf_left(u) - h.cdf(u)).abs());
    for u in grid.iter().copied().chain(f.atoms()) {
        let g = gap(u);
        lhs = lhs.max(g);
        if u.abs() >= 1.0 / d2 {
            far = far.max(g);
        }
    }
    for i in 0..points {
        let t = 1.0 / d2 + (4.0 * reach - 1.0 / d2) * i as f64 / (points - 1) as f64;
        for u in [t, -t] {
            let g = gap(u);
            lhs = lhs.max(g);
            far = far.max(g);
        }
    }
    let smoothed_sup = grid
        .iter()
        .map(|u| (f.smoothed(kernel, *u) - h.smoothed(kernel, *u)).abs())
        .fold(0.0, f64::max);
    let rhs = 2.0 * smoothed_sup + big_c * d2;
    let applicable = far <= d_const * d2;
    GapBound {
        lhs,
        rhs,
        smoothed_sup,
        kappa,
        c_tail: c,
        big_c,
        far_sup: far,
        applicable,
        pass: applicable && lhs <= rhs,
    }
}
