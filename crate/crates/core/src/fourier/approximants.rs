use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::kernel::{primitive, SmoothingKernel, SECOND_MOMENT};
use crate::fourier::quadrature::integrate;
use crate::fourier::window::WindowFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

/// Band-limited one-sided approximant of a window.
///
/// Upper: `(ψ_w⁺ ∗ ϑ_δ) / (1 − T(w))`, with `ψ_w⁺` the sup-convolution of `ψ` over
/// `[−w, w]` and `T(w)` the kernel mass outside `[−w, w]`.
/// Lower: `ψ_w⁻ ∗ k`, with `ψ_w⁻` the inf-convolution and `k(s) = ϑ_δ(s)(1 − s²/w²)`,
/// whose transform is `ϑ̂_δ + ϑ̂_δ''/w²`.
/// Both transforms vanish outside `[−δ⁻², δ⁻²]`.
#[derive(Clone, Debug)]
pub struct BandLimited {
    pub side: Side,
    pub base: WindowFunction,
    pub kernel: SmoothingKernel,
    pub margin: f64,
    scale: f64,
}

impl BandLimited {
    fn new(side: Side, psi: &WindowFunction, kernel: SmoothingKernel, margin: f64) -> Result<Self> {
        let (base, scale) = match side {
            Side::Upper => {
                let t = kernel.tail_mass(margin);
                (psi.dilate(margin)?, 1.0 / (1.0 - t))
            }
            Side::Lower => (psi.erode(margin)?, 1.0),
        };
        Ok(BandLimited { side, base, kernel, margin, scale })
    }

    pub fn eval(&self, u: f64) -> f64 {
        let d2 = self.kernel.scale();
        let mut acc = 0.0;
        for (a, b, va, slope) in self.base.pieces() {
            // ∫_a^b (va + slope (r − a)) K(u − r) dr with v = (u − r)/δ²
            let alpha = va - slope * a + slope * u;
            let (v1, v2) = ((u - a) / d2, (u - b) / d2);
            let i0 = primitive(0, v1) - primitive(0, v2);
            let i1 = primitive(1, v1) - primitive(1, v2);
            acc += alpha * i0 - slope * d2 * i1;
            if self.side == Side::Lower {
                let i2 = primitive(2, v1) - primitive(2, v2);
                let i3 = primitive(3, v1) - primitive(3, v2);
                let c = d2 * d2 / (self.margin * self.margin);
                acc -= c * (alpha * i2 - slope * d2 * i3);
            }
        }
        acc * self.scale
    }

    pub fn fourier(&self, xi: f64) -> Complex64 {
        let k = match self.side {
            Side::Upper => self.kernel.fourier(xi),
            Side::Lower => self.kernel.fourier(xi) + self.kernel.fourier_dd(xi) / (self.margin * self.margin),
        };
        if k == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.base.fourier(xi) * (k * self.scale)
    }

    pub fn integral(&self) -> f64 {
        self.fourier(0.0).re
    }

    pub fn band_limit(&self) -> f64 {
        self.kernel.band_limit()
    }

    /// `u ↦ self(u + c)`.
    pub fn shifted(&self, c: f64) -> Self {
        BandLimited { base: self.base.shifted(c), ..self.clone() }
    }

    /// `‖self − ψ‖_{L¹}`: quadrature over the support widened by `400 δ²`, split at the
    /// knots, plus the leading-order far tails.
    pub fn l1_distance(&self, psi: &WindowFunction) -> f64 {
        let d2 = self.kernel.scale();
        let (lo, hi) = match (self.base.support(), psi.support()) {
            (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => return 0.0,
        };
        let reach = 400.0 * d2;
        let (a, b) = (lo - reach, hi + reach);
        let mut cuts: Vec<f64> = psi.knots().iter().chain(self.base.knots()).map(|k| k.0).collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let panels = ((w[1] - w[0]) / (0.25 * d2)).ceil() as usize;
            total += integrate(|u| (self.eval(u) - psi.eval(u)).abs(), w[0], w[1], panels);
        }
        let mass = self.base.integral() * self.scale;
        let v = reach / d2;
        let tail = match self.side {
            Side::Upper => mass * (1.0 - 2.0 * primitive(0, v)),
            Side::Lower => {
                let c = d2 * d2 / (self.margin * self.margin);
                mass * c * 2.0 * (primitive(2, 1e15) - primitive(2, v))
            }
        };
        total + tail
    }
}

#[derive(Clone, Debug)]
pub struct Approximants {
    pub minus: BandLimited,
    pub plus: BandLimited,
    pub attempts: usize,
    /// Largest observed `max(ψ⁻ − ψ, ψ − ψ⁺)` on the verification grid (≤ 0 when dominated).
    pub worst_violation: f64,
}

/// Default margins: `w⁺ = δ^{3/2}`, `w⁻ = (m₂ δ⁴)^{1/3}` with `m₂` the kernel second moment; they balance the widening of
/// the window against the kernel mass (upper) and the `s²` correction (lower).
pub fn default_margins(delta: f64) -> (f64, f64) {
    (delta.powf(1.5), (SECOND_MOMENT * delta.powi(4)).cbrt())
}

/// Builds `ψ⁻_δ ≤ ψ ≤ ψ⁺_δ`, verifies the domination on 10⁴ points spanning the support
/// ± 5, and widens the margins by half on failure (at most three attempts).
pub fn approximants(psi: &WindowFunction, kernel: SmoothingKernel) -> Result<Approximants> {
    let (mut wp, mut wm) = default_margins(kernel.delta());
    let (lo, hi) = psi.support().unwrap_or((-1.0, 1.0));
    let grid: Vec<f64> = (0..10_000).map(|i| lo - 5.0 + (hi - lo + 10.0) * i as f64 / 9_999.0).collect();
    let mut worst = f64::INFINITY;
    for attempt in 1..=3 {
        let plus = BandLimited::new(Side::Upper, psi, kernel, wp)?;
        let minus = BandLimited::new(Side::Lower, psi, kernel, wm)?;
        worst = grid
            .iter()
            .map(|u| {
                let p = psi.eval(*u);
                (minus.eval(*u) - p).max(p - plus.eval(*u))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if worst <= 1e-12 {
            return Ok(Approximants { minus, plus, attempts: attempt, worst_violation: worst });
        }
        wp *= 1.5;
        wm *= 1.5;
    }
    Err(Error::Domination { attempts: 3, violation: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::kernel::make_kernel;

    #[test]
    fn real_space_matches_fourier_inversion() {
        let psi = WindowFunction::upper(0.0, 1.0, 0.25).unwrap();
        let k = make_kernel(0.5).unwrap();
        let a = approximants(&psi, k).unwrap();
        for side in [&a.plus, &a.minus] {
            for u in [-0.7, 0.0, 0.33, 1.2, 3.0] {
                let b = side.band_limit();
                let inv: Complex64 = integrate(
                    |xi| side.fourier(xi) * Complex64::new(0.0, xi * u).exp(),
                    -b,
                    b,
                    400,
                );
                let inv = inv.re / (2.0 * std::f64::consts::PI);
                assert!((inv - side.eval(u)).abs() < 1e-9, "{:?} u={u}: {inv} vs {}", side.side, side.eval(u));
            }
        }
    }

    #[test]
    fn zero_window_gives_zero() {
        let k = make_kernel(0.25).unwrap();
        let a = approximants(&WindowFunction::zero(), k).unwrap();
        assert!(a.plus.l1_distance(&WindowFunction::zero()) <= 1e-6);
        assert!(a.minus.l1_distance(&WindowFunction::zero()) <= 1e-6);
    }
}
