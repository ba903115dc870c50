use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fourier::quadrature::gl8;

/// `c₀` with `∫ c₀ (sin(u/4)/(u/4))⁴ du = 1`; the integral of `sinc⁴` is `2π/3`.
pub const C0: f64 = 3.0 / (8.0 * std::f64::consts::PI);

/// Second scale of the mixture. Irrational, so the zeros `4πk` and `4πk/a` of the two
/// components never meet.
pub const MIX_A: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Second moment `∫ u² ϑ(u) du = −ϑ̂''(0) = 6 (1 + a⁻²)`.
pub const SECOND_MOMENT: f64 = 6.0 * (1.0 + 1.0 / (MIX_A * MIX_A));

const H: f64 = 0.5;
const VMAX: f64 = 20_000.0;

/// `ϑ(u) = ½ [ϑ₁(u) + a ϑ₁(a u)]` with `ϑ₁(u) = c₀ (sin(u/4)/(u/4))⁴` and `a = MIX_A`.
/// Strictly positive, even, unit mass.
pub fn theta(u: f64) -> f64 {
    0.5 * (profile(u) + MIX_A * profile(MIX_A * u))
}

fn profile(u: f64) -> f64 {
    let x = 0.25 * u;
    let s = if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    };
    let s2 = s * s;
    C0 * s2 * s2
}

/// Centered cubic B-spline, supported on `[-2, 2]`, unit mass.
fn bspline(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    } else if a <= 2.0 {
        let t = 2.0 - a;
        t * t * t / 6.0
    } else {
        0.0
    }
}

fn bspline_dd(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        -2.0 + 3.0 * a
    } else if a <= 2.0 {
        2.0 - a
    } else {
        0.0
    }
}

/// `ϑ̂(ξ) = ∫ e^{−iξu} ϑ(u) du = (3/4) [M(2ξ) + M(2ξ/a)]`, supported on `[-1, 1]`.
pub fn theta_hat(xi: f64) -> f64 {
    0.75 * (bspline(2.0 * xi) + bspline(2.0 * xi / MIX_A))
}

/// Second derivative of `ϑ̂`.
pub fn theta_hat_dd(xi: f64) -> f64 {
    3.0 * (bspline_dd(2.0 * xi) + bspline_dd(2.0 * xi / MIX_A) / (MIX_A * MIX_A))
}

struct Tables {
    /// `∫_0^{kH} s^m ϑ₁(s) ds` for `m = 0..4`.
    prim: [Vec<f64>; 4],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let n = (VMAX / H) as usize;
        let mut prim: [Vec<f64>; 4] = Default::default();
        for p in prim.iter_mut() {
            p.reserve(n + 1);
            p.push(0.0);
        }
        let mut acc = [0.0; 4];
        for k in 0..n {
            let seg = panel(k as f64 * H, (k + 1) as f64 * H);
            for m in 0..4 {
                acc[m] += seg[m];
                prim[m].push(acc[m]);
            }
        }
        Tables { prim }
    })
}

fn panel(a: f64, b: f64) -> [f64; 4] {
    let (x, w) = gl8();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [0.0; 4];
    for (xi, wi) in x.iter().zip(w) {
        let s = mid + half * xi;
        let t = profile(s) * wi * half;
        out[0] += t;
        out[1] += t * s;
        out[2] += t * s * s;
        out[3] += t * s * s * s;
    }
    out
}

/// `∫_v^∞ cos(a s) s^{−p} ds` for large `v` (asymptotic series).
fn tail_cos(a: f64, p: f64, v: f64) -> f64 {
    let (s, c) = (a * v).sin_cos();
    let mut acc = 0.0;
    let mut coef = 1.0 / (a * v.powf(p));
    // integrate by parts: terms alternate between -sin and +cos
    for k in 0..6 {
        let term = if k % 4 == 0 {
            -s
        } else if k % 4 == 1 {
            c
        } else if k % 4 == 2 {
            s
        } else {
            -c
        };
        acc += term * coef;
        coef *= (p + k as f64) / (a * v);
    }
    acc
}

/// `∫_v^∞ s^{−p} ds` (`p > 1`) or, for `p = 1`, `−ln v` (used only in differences).
fn tail_pow(p: f64, v: f64) -> f64 {
    if p == 1.0 {
        -v.ln()
    } else {
        v.powf(1.0 - p) / (p - 1.0)
    }
}

/// `∫_0^v s^m ϑ(s) ds`, `m ∈ {0, 1, 2, 3}`.
pub fn primitive(m: usize, v: f64) -> f64 {
    assert!(m < 4);
    0.5 * (profile_primitive(m, v) + profile_primitive(m, MIX_A * v) / MIX_A.powi(m as i32))
}

fn profile_primitive(m: usize, v: f64) -> f64 {
    if v < 0.0 {
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        return sign * profile_primitive(m, -v);
    }
    let t = tables();
    if v >= VMAX {
        // sin⁴(s/4) = 3/8 − cos(s/2)/2 + cos(s)/8
        let p = (4 - m) as f64;
        let k = 256.0 * C0;
        let diff = |x: f64| 0.375 * tail_pow(p, x) - 0.5 * tail_cos(0.5, p, x) + 0.125 * tail_cos(1.0, p, x);
        return t.prim[m][t.prim[m].len() - 1] + k * (diff(VMAX) - diff(v));
    }
    let k = (v / H) as usize;
    let a = k as f64 * H;
    if v == a {
        return t.prim[m][k];
    }
    t.prim[m][k] + panel(a, v)[m]
}

/// Tail constant `c = sup_{D>0} D ∫_{|v|≥D} ϑ(v) dv`.
pub fn tail_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let f = |d: f64| d * (1.0 - 2.0 * primitive(0, d));
        let mut best = (0.0, 0.0);
        let mut d = 0.01;
        while d < 200.0 {
            let v = f(d);
            if v > best.1 {
                best = (d, v);
            }
            d += 0.01;
        }
        // golden-section refinement around the grid maximum
        let (mut lo, mut hi) = (best.0 - 0.01, best.0 + 0.01);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if f(x1) > f(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        f(0.5 * (lo + hi)).max(best.1)
    })
}

/// `ϑ_δ(u) = δ⁻² ϑ(u/δ²)`, whose Fourier transform `ϑ̂(δ²ξ)` vanishes for `|ξ| > δ⁻²`.
#[derive(Clone, Copy, Debug)]
pub struct SmoothingKernel {
    delta: f64,
    scale: f64,
}

pub fn make_kernel(delta: f64) -> Result<SmoothingKernel> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("kernel scale δ = {delta} outside (0, 1]")));
    }
    Ok(SmoothingKernel { delta, scale: delta * delta })
}

impl SmoothingKernel {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `δ²`, the spatial scale.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `δ⁻²`, the Fourier band limit.
    pub fn band_limit(&self) -> f64 {
        1.0 / self.scale
    }

    pub fn eval(&self, u: f64) -> f64 {
        theta(u / self.scale) / self.scale
    }

    pub fn fourier(&self, xi: f64) -> f64 {
        theta_hat(self.scale * xi)
    }

    pub fn fourier_dd(&self, xi: f64) -> f64 {
        self.scale * self.scale * theta_hat_dd(self.scale * xi)
    }

    /// `Θ_δ(u) = ∫_{−∞}^u ϑ_δ`.
    pub fn cdf(&self, u: f64) -> f64 {
        0.5 + primitive(0, u / self.scale)
    }

    /// `∫_{|s|>w} ϑ_δ(s) ds`.
    pub fn tail_mass(&self, w: f64) -> f64 {
        (1.0 - 2.0 * primitive(0, w.abs() / self.scale)).max(0.0)
    }

    /// Knots of `ϑ̂_δ` on `[−δ⁻², δ⁻²]`, ascending; the transform is a cubic polynomial between them.
    pub fn fourier_knots(&self) -> [f64; 9] {
        let b = self.band_limit();
        let (h, ha) = (0.5 * b, 0.5 * MIX_A * b);
        [-b, -MIX_A * b, -h, -ha, 0.0, ha, h, MIX_A * b, b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::quadrature::adaptive_simpson;

    #[test]
    fn normalization_by_independent_quadrature() {
        // closed-form c₀ against adaptive Simpson on [-1e4, 1e4] plus the analytic tail
        let body = adaptive_simpson(&theta, -1e4, 1e4, 1e-12);
        let tail = 32.0 * C0 * (1.0 + MIX_A.powi(-3)) / 1e12;
        assert!((body + tail - 1.0).abs() < 1e-10, "{}", body + tail);
    }

    #[test]
    fn primitives_against_moments() {
        assert!((primitive(0, 1e9) - 0.5).abs() < 1e-13);
        assert!((primitive(1, 1e9) - 8.0 * C0 * 2f64.ln() * (1.0 + 1.0 / MIX_A)).abs() < 1e-12);
        assert!((2.0 * primitive(2, 1e12) - SECOND_MOMENT).abs() < 1e-9);
        let direct = adaptive_simpson(&|s: f64| s * s * s * theta(s), 0.0, 37.3, 1e-13);
        assert!((primitive(3, 37.3) - direct).abs() < 1e-11);
        let across = adaptive_simpson(&|s: f64| s * s * theta(s), 19_990.0, 20_030.0, 1e-15);
        assert!((primitive(2, 20_030.0) - primitive(2, 19_990.0) - across).abs() < 1e-13);
        let across3 = adaptive_simpson(&|s: f64| s.powi(3) * theta(s), 19_990.0, 20_030.0, 1e-13);
        assert!((primitive(3, 20_030.0) - primitive(3, 19_990.0) - across3).abs() < 1e-11);
    }

    #[test]
    fn fourier_transform_matches_direct_integral() {
        for xi in [0.0, 0.1, 0.37, 0.5, 0.8, 0.99] {
            let direct = 2.0 * adaptive_simpson(&|u: f64| theta(u) * (xi * u).cos(), 0.0, 4000.0, 1e-13);
            assert!((direct - theta_hat(xi)).abs() < 1e-8, "{xi}: {direct} vs {}", theta_hat(xi));
        }
        assert_eq!(theta_hat(1.0001), 0.0);
        let k = make_kernel(0.5).unwrap();
        assert_eq!(k.fourier(1.0001 * k.band_limit()), 0.0);
        assert_eq!(k.fourier(0.0), 1.0);
        assert!(make_kernel(0.0).is_err() && make_kernel(1.5).is_err());
    }

    #[test]
    fn strictly_positive_through_the_zeros_of_each_component() {
        for k in 1..200 {
            let z = 4.0 * std::f64::consts::PI * k as f64;
            assert!(theta(z) > 0.0 && theta(z / MIX_A) > 0.0);
        }
        let dd = -theta_hat_dd(0.0);
        assert!((dd - SECOND_MOMENT).abs() < 1e-12 && (SECOND_MOMENT - 18.0).abs() < 1e-12);
    }

    #[test]
    fn tail_constant_bounds_the_tail() {
        let c = tail_constant();
        assert!(c > 0.0 && c < 10.0);
        for d in [0.1, 1.0, 3.0, 10.0, 100.0] {
            assert!(d * (1.0 - 2.0 * primitive(0, d)) <= c + 1e-12);
        }
    }
}
