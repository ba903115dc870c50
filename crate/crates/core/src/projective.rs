//! Projective space, its dual, the norm cocycle and the hyperplane distance.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, operator_norm, Matrix};

/// An invertible matrix together with its norm data.
#[derive(Clone, Debug)]
pub struct GroupAtom {
    matrix: Matrix,
    norm: f64,
    inv_norm: f64,
}

impl GroupAtom {
    /// Rejects matrices with `|det| < 1e-12 ‖g‖^d`.
    pub fn new(matrix: Matrix) -> Result<Self> {
        Self::with_index(matrix, 0)
    }

    pub(crate) fn with_index(matrix: Matrix, index: usize) -> Result<Self> {
        let d = matrix.dim();
        let norm = operator_norm(&matrix);
        let det = matrix.det();
        if !(det.abs() >= 1e-12 * norm.powi(d as i32)) || norm == 0.0 {
            return Err(Error::SingularAtom { index, det });
        }
        let inv = matrix.inverse().ok_or(Error::SingularAtom { index, det })?;
        let inv_norm = operator_norm(&inv);
        Ok(GroupAtom { matrix, norm, inv_norm })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn inv_norm(&self) -> f64 {
        self.inv_norm
    }

    /// `max(‖g‖, ‖g⁻¹‖)`.
    pub fn big_n(&self) -> f64 {
        self.norm.max(self.inv_norm)
    }
}

fn canonical(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::invalid("empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("vector has non-finite entries"));
    }
    let n = norm(v);
    if n == 0.0 {
        return Err(Error::invalid("zero vector has no projective class"));
    }
    let mut out: Vec<f64> = v.iter().map(|x| x / n).collect();
    if let Some(first) = out.iter().find(|x| x.abs() > 1e-14) {
        if *first < 0.0 {
            out.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(out)
}

/// A line in ℝ^d, stored as a unit representative whose first non-negligible
/// coordinate is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    v: Vec<f64>,
}

impl ProjPoint {
    pub fn new(v: &[f64]) -> Result<Self> {
        Ok(ProjPoint { v: canonical(v)? })
    }

    /// The line through `(cos θ, sin θ)`.
    pub fn from_angle(theta: f64) -> Self {
        ProjPoint::new(&[theta.cos(), theta.sin()]).expect("unit vector")
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        ProjPoint { v }
    }

    pub fn coords(&self) -> &[f64] {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// Angle in `[0, π)` of a point of the projective line.
    pub fn angle(&self) -> f64 {
        let a = self.v[1].atan2(self.v[0]);
        a.rem_euclid(std::f64::consts::PI)
    }

    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        proj_distance(self, other) <= tol
    }
}

/// A hyperplane `H_y = ker f`, stored as the unit functional `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPoint {
    f: Vec<f64>,
}

impl DualPoint {
    pub fn new(f: &[f64]) -> Result<Self> {
        Ok(DualPoint { f: canonical(f)? })
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut f = vec![0.0; d];
        f[i] = 1.0;
        DualPoint { f }
    }

    pub fn coords(&self) -> &[f64] {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }
}

fn wedge_norm(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 2 {
        return (a[0] * b[1] - a[1] * b[0]).abs();
    }
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let w = a[i] * b[j] - a[j] * b[i];
            s += w * w;
        }
    }
    s.sqrt()
}

/// `d(x, w) = ‖x ∧ w‖` for unit representatives: the sine of the angle between the lines.
pub fn proj_distance(x: &ProjPoint, w: &ProjPoint) -> f64 {
    wedge_norm(&x.v, &w.v).min(1.0)
}

/// Image of the line `x` under `g`.
pub fn act(g: &GroupAtom, x: &ProjPoint) -> ProjPoint {
    ProjPoint::new(&g.matrix.apply(&x.v)).expect("invertible image of a nonzero vector")
}

/// `σ(g, x) = log ‖g v‖ / ‖v‖`.
pub fn cocycle(g: &GroupAtom, x: &ProjPoint) -> f64 {
    norm(&g.matrix.apply(&x.v)).ln()
}

/// `|⟨f, v⟩|` for unit `f`, `v`; equals `d(x, H_y)`.
pub fn dual_pairing(y: &DualPoint, x: &ProjPoint) -> f64 {
    dot(&y.f, &x.v).abs()
}

/// `log d(x, H_y)`; `-∞` exactly on the hyperplane.
pub fn log_dist(x: &ProjPoint, y: &DualPoint) -> f64 {
    dual_pairing(y, x).ln()
}

/// `log |⟨f, g v⟩|` with unit `f`, `v`.
pub fn coefficient_log(g: &GroupAtom, x: &ProjPoint, y: &DualPoint) -> f64 {
    dot(&y.f, &g.matrix.apply(&x.v)).abs().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(rows: &[[f64; 2]; 2]) -> GroupAtom {
        GroupAtom::new(Matrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap()).unwrap()
    }

    #[test]
    fn canonical_sign() {
        let p = ProjPoint::new(&[-3.0, 4.0]).unwrap();
        assert_eq!(p.coords(), &[0.6, -0.8]);
        let q = ProjPoint::new(&[0.0, -2.0]).unwrap();
        assert_eq!(q.coords(), &[0.0, 1.0]);
        assert!(ProjPoint::new(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn fibonacci_example_values() {
        let g = atom(&[[2.0, 1.0], [1.0, 1.0]]);
        let e1 = ProjPoint::basis(2, 0);
        assert!((cocycle(&g, &e1) - 5f64.sqrt().ln()).abs() < 1e-15);
        let gx = act(&g, &e1);
        let want = [2.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt()];
        assert!((gx.coords()[0] - want[0]).abs() < 1e-15);
        assert!((gx.coords()[1] - want[1]).abs() < 1e-15);
        let e2 = ProjPoint::basis(2, 1);
        assert!((proj_distance(&e1, &e2) - 1.0).abs() < 1e-15);
        assert_eq!(proj_distance(&e1, &e1), 0.0);
    }

    #[test]
    fn near_singular_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14]]).unwrap();
        assert!(matches!(GroupAtom::new(m), Err(Error::SingularAtom { .. })));
    }

    #[test]
    fn pairing_zero_on_hyperplane() {
        let y = DualPoint::basis(2, 0);
        let e2 = ProjPoint::basis(2, 1);
        assert_eq!(dual_pairing(&y, &e2), 0.0);
        assert_eq!(log_dist(&e2, &y), f64::NEG_INFINITY);
    }

    #[test]
    fn coefficient_matches_definition() {
        let g = atom(&[[1.0, 1.0], [1.0, 2.0]]);
        let x = ProjPoint::from_angle(0.4);
        let y = DualPoint::new(&[0.3, -0.7]).unwrap();
        let gx = act(&g, &x);
        let split = cocycle(&g, &x) + log_dist(&gx, &y);
        assert!((coefficient_log(&g, &x, &y) - split).abs() < 1e-13);
    }
}
