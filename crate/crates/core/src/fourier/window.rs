use num_complex::Complex64;

use crate::error::{Error, Result};

/// Continuous piecewise-affine function with compact support, given by its knots
/// `(u_i, ψ(u_i))`; zero outside `[u_0, u_last]`, and `ψ(u_0) = ψ(u_last) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowFunction {
    knots: Vec<(f64, f64)>,
}

impl WindowFunction {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Ok(WindowFunction { knots });
        }
        if knots.len() < 2 {
            return Err(Error::invalid("a nonzero window needs at least two knots"));
        }
        if knots.windows(2).any(|w| !(w[1].0 >= w[0].0)) || knots.iter().any(|k| !k.0.is_finite()) {
            return Err(Error::invalid("window knots must be finite and non-decreasing"));
        }
        if knots[0].1 != 0.0 || knots[knots.len() - 1].1 != 0.0 {
            return Err(Error::invalid("window must vanish at its end knots"));
        }
        if knots.iter().any(|k| !(0.0..=1.0).contains(&k.1)) {
            return Err(Error::invalid("window values must lie in [0, 1]"));
        }
        // drop zero-length pieces
        let mut clean: Vec<(f64, f64)> = Vec::with_capacity(knots.len());
        for k in knots {
            match clean.last() {
                Some(l) if l.0 == k.0 => {
                    if l.1 != k.1 {
                        return Err(Error::invalid("window must be continuous"));
                    }
                }
                _ => clean.push(k),
            }
        }
        if clean.len() < 2 {
            clean.clear();
        }
        Ok(WindowFunction { knots: clean })
    }

    pub fn zero() -> Self {
        WindowFunction { knots: Vec::new() }
    }

    /// Equal to one on `[p1, p2]`, affine on `[p0, p1]` and `[p2, p3]`.
    pub fn trapezoid(p0: f64, p1: f64, p2: f64, p3: f64) -> Result<Self> {
        if !(p0 <= p1 && p1 <= p2 && p2 <= p3 && p0 < p3) {
            return Err(Error::invalid("trapezoid corners must satisfy p0 ≤ p1 ≤ p2 ≤ p3, p0 < p3"));
        }
        WindowFunction::new(vec![(p0, 0.0), (p1, 1.0), (p2, 1.0), (p3, 0.0)])
    }

    /// `ψ ≥ 1_{[a,b]}`: one on `[a, b]`, slope `1/ζ` down to zero at `a − ζ` and `b + ζ`.
    pub fn upper(a: f64, b: f64, zeta: f64) -> Result<Self> {
        check_interval(a, b, zeta)?;
        Self::trapezoid(a - zeta, a, b, b + zeta)
    }

    /// `ψ̃ ≤ 1_{[a,b]}` with slope `1/ζ`; a triangle when `b − a < 2ζ`.
    pub fn lower(a: f64, b: f64, zeta: f64) -> Result<Self> {
        check_interval(a, b, zeta)?;
        if b == a {
            return Ok(Self::zero());
        }
        if b - a >= 2.0 * zeta {
            Self::trapezoid(a, a + zeta, b - zeta, b)
        } else {
            let m = 0.5 * (a + b);
            WindowFunction::new(vec![(a, 0.0), (m, (b - a) / (2.0 * zeta)), (b, 0.0)])
        }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn is_zero(&self) -> bool {
        self.knots.is_empty() || self.knots.iter().all(|k| k.1 == 0.0)
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        if self.knots.is_empty() {
            None
        } else {
            Some((self.knots[0].0, self.knots[self.knots.len() - 1].0))
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let k = &self.knots;
        if k.is_empty() || u <= k[0].0 || u >= k[k.len() - 1].0 {
            return 0.0;
        }
        let i = k.partition_point(|p| p.0 <= u);
        let (a, b) = (k[i - 1], k[i]);
        a.1 + (b.1 - a.1) * (u - a.0) / (b.0 - a.0)
    }

    /// `u ↦ ψ(u + c)`.
    pub fn shifted(&self, c: f64) -> Self {
        WindowFunction { knots: self.knots.iter().map(|(u, v)| (u - c, *v)).collect() }
    }

    /// Affine pieces `(u_start, u_end, value_start, slope)`.
    pub fn pieces(&self) -> Vec<(f64, f64, f64, f64)> {
        self.knots
            .windows(2)
            .filter(|w| w[1].0 > w[0].0)
            .map(|w| (w[0].0, w[1].0, w[0].1, (w[1].1 - w[0].1) / (w[1].0 - w[0].0)))
            .collect()
    }

    pub fn integral(&self) -> f64 {
        self.knots.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum()
    }

    pub fn lipschitz(&self) -> f64 {
        self.pieces().iter().fold(0.0, |m, p| m.max(p.3.abs()))
    }

    pub fn max_value(&self) -> f64 {
        self.knots.iter().fold(0.0, |m, k| m.max(k.1))
    }

    /// `ψ̂(ξ) = ∫ e^{−iξu} ψ(u) du`. Away from zero the transform is read off the jumps of
    /// the slope; near zero a Taylor series in the centred moments is used instead.
    pub fn fourier(&self, xi: f64) -> Complex64 {
        let Some((lo, hi)) = self.support() else {
            return Complex64::new(0.0, 0.0);
        };
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        let phase = Complex64::new(0.0, -xi * c).exp();
        if xi.abs() * r <= 1.0 {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut fact = Complex64::new(1.0, 0.0);
            for k in 0..30 {
                if k > 0 {
                    fact *= Complex64::new(0.0, -xi) / k as f64;
                }
                acc += fact * self.centred_moment(k, c);
            }
            return phase * acc;
        }
        let pieces = self.pieces();
        let n = self.knots.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, k) in self.knots.iter().enumerate() {
            let after = if i + 1 < n { pieces[i].3 } else { 0.0 };
            let before = if i > 0 { pieces[i - 1].3 } else { 0.0 };
            acc += Complex64::new(0.0, -xi * (k.0 - c)).exp() * (after - before);
        }
        -phase * acc / (xi * xi)
    }

    fn centred_moment(&self, k: i32, c: f64) -> f64 {
        // ∫ (u−c)^k (α + β(u−c)) du over each piece, with α + βt the piece in t = u − c
        self.pieces()
            .iter()
            .map(|&(a, b, va, s)| {
                let (ta, tb) = (a - c, b - c);
                let alpha = va - s * ta;
                let p = |t: f64, j: i32| t.powi(j + 1) / (j + 1) as f64;
                alpha * (p(tb, k) - p(ta, k)) + s * (p(tb, k + 1) - p(ta, k + 1))
            })
            .sum()
    }

    fn plateau(&self) -> Result<(usize, usize)> {
        let top = self.max_value();
        let first = self.knots.iter().position(|k| k.1 == top).unwrap();
        let last = self.knots.iter().rposition(|k| k.1 == top).unwrap();
        let rising = self.knots[..=first].windows(2).all(|w| w[1].1 >= w[0].1);
        let falling = self.knots[last..].windows(2).all(|w| w[1].1 <= w[0].1);
        let flat = self.knots[first..=last].iter().all(|k| k.1 == top);
        if !(rising && falling && flat) {
            return Err(Error::invalid("window is not unimodal"));
        }
        Ok((first, last))
    }

    /// `u ↦ sup_{|s|≤w} ψ(u + s)` for a unimodal window.
    pub fn dilate(&self, w: f64) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (first, last) = self.plateau()?;
        let mut knots = Vec::with_capacity(self.knots.len());
        for (i, k) in self.knots.iter().enumerate() {
            if i <= first {
                knots.push((k.0 - w, k.1));
            } else if i >= last {
                knots.push((k.0 + w, k.1));
            }
        }
        WindowFunction::new(knots)
    }

    /// `u ↦ inf_{|s|≤w} ψ(u + s) = min(ψ(u − w), ψ(u + w))` for a unimodal window.
    pub fn erode(&self, w: f64) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        self.plateau()?;
        let right = self.shifted(-w);
        let left = self.shifted(w);
        let (lo, hi) = (right.knots[0].0, left.knots[left.knots.len() - 1].0);
        if lo >= hi {
            return Ok(Self::zero());
        }
        let mut xs: Vec<f64> = right.knots.iter().chain(&left.knots).map(|k| k.0).filter(|x| *x >= lo && *x <= hi).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        let mut pts: Vec<f64> = Vec::new();
        for win in xs.windows(2) {
            pts.push(win[0]);
            let (a, b) = (win[0], win[1]);
            let da = right.eval(a) - left.eval(a);
            let db = right.eval(b) - left.eval(b);
            if da * db < 0.0 {
                pts.push(a + (b - a) * da / (da - db));
            }
        }
        pts.push(hi);
        let knots: Vec<(f64, f64)> = pts.iter().map(|u| (*u, right.eval(*u).min(left.eval(*u)))).collect();
        let mut knots = knots;
        knots[0].1 = 0.0;
        let n = knots.len();
        knots[n - 1].1 = 0.0;
        WindowFunction::new(knots)
    }
}

fn check_interval(a: f64, b: f64, zeta: f64) -> Result<()> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("window interval needs a ≤ b"));
    }
    if !(zeta > 0.0) {
        return Err(Error::invalid("window slope scale ζ must be positive"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_basics() {
        let p = WindowFunction::upper(0.0, 1.0, 0.25).unwrap();
        assert_eq!(p.eval(0.5), 1.0);
        assert_eq!(p.eval(-0.125), 0.5);
        assert_eq!(p.eval(1.3), 0.0);
        assert!((p.integral() - 1.25).abs() < 1e-15);
        assert!((p.lipschitz() - 4.0).abs() < 1e-12);
        let q = WindowFunction::lower(0.0, 0.3, 0.25).unwrap();
        assert!((q.max_value() - 0.6).abs() < 1e-15);
        assert!(WindowFunction::lower(0.0, 0.0, 0.25).unwrap().is_zero());
    }

    #[test]
    fn fourier_of_triangle() {
        let t = WindowFunction::new(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]).unwrap();
        for xi in [0.0, 0.3, 0.999, 1.001, 2.5, 17.0] {
            let want = if xi == 0.0 { 1.0 } else { (2.0 - 2.0 * f64::cos(xi)) / (xi * xi) };
            let got = t.fourier(xi);
            assert!((got.re - want).abs() < 1e-13 && got.im.abs() < 1e-13, "{xi}: {got}");
        }
        // shifting multiplies by a phase
        let s = t.shifted(-2.0);
        let z = s.fourier(1.7);
        let want = Complex64::new(0.0, -1.7 * 2.0).exp() * t.fourier(1.7);
        assert!((z - want).norm() < 1e-13);
    }

    #[test]
    fn dilation_and_erosion() {
        let p = WindowFunction::trapezoid(0.0, 1.0, 2.0, 3.0).unwrap();
        let d = p.dilate(0.5).unwrap();
        assert_eq!(d.knots(), &[(-0.5, 0.0), (0.5, 1.0), (2.5, 1.0), (3.5, 0.0)]);
        let e = p.erode(0.25).unwrap();
        for u in [0.1, 0.7, 1.3, 1.5, 2.2, 2.9] {
            let want = p.eval(u - 0.25).min(p.eval(u + 0.25));
            assert!((e.eval(u) - want).abs() < 1e-14);
        }
        let tri = p.erode(0.9).unwrap();
        assert!((tri.max_value() - 0.6).abs() < 1e-12);
        assert!(p.erode(2.0).unwrap().is_zero());
    }
}
