//! Small dense square matrices and the handful of decompositions the lab needs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(Matrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::invalid(format!(
                    "matrix is not square: row of length {} in a {}-row matrix",
                    r.len(),
                    dim
                )));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(dim, data)
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, s: f64) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = s;
        }
        Matrix { dim, data }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let dim = entries.len();
        let mut m = Self::scalar(dim, 0.0);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * dim + i] = *e;
        }
        m
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Matrix { dim: 2, data: vec![c, -s, s, c] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        let d = self.dim;
        debug_assert_eq!(d, other.dim);
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        Matrix { dim: d, data: out }
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let d = self.dim;
        for i in 0..d {
            let row = &self.data[i * d..(i + 1) * d];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(v, &mut out);
        out
    }

    /// `selfᵀ v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                out[j] += self.data[i * d + j] * v[i];
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[j * d + i] = self.data[i * d + j];
            }
        }
        Matrix { dim: d, data: out }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn lu(&self) -> (Vec<f64>, Vec<usize>, f64) {
        let d = self.dim;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..d).collect();
        let mut sign = 1.0;
        for k in 0..d {
            let mut p = k;
            for i in k + 1..d {
                if a[i * d + k].abs() > a[p * d + k].abs() {
                    p = i;
                }
            }
            if p != k {
                for j in 0..d {
                    a.swap(k * d + j, p * d + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[k * d + k];
            if piv == 0.0 {
                continue;
            }
            for i in k + 1..d {
                let f = a[i * d + k] / piv;
                a[i * d + k] = f;
                for j in k + 1..d {
                    a[i * d + j] -= f * a[k * d + j];
                }
            }
        }
        (a, perm, sign)
    }

    pub fn det(&self) -> f64 {
        if self.dim == 2 {
            return self.data[0] * self.data[3] - self.data[1] * self.data[2];
        }
        let (a, _, sign) = self.lu();
        (0..self.dim).fold(sign, |acc, i| acc * a[i * self.dim + i])
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let d = self.dim;
        let (a, perm, _) = self.lu();
        if (0..d).any(|i| a[i * d + i] == 0.0) {
            return None;
        }
        let mut inv = vec![0.0; d * d];
        for col in 0..d {
            let mut x: Vec<f64> = (0..d).map(|i| if perm[i] == col { 1.0 } else { 0.0 }).collect();
            for i in 0..d {
                for k in 0..i {
                    x[i] -= a[i * d + k] * x[k];
                }
            }
            for i in (0..d).rev() {
                for k in i + 1..d {
                    x[i] -= a[i * d + k] * x[k];
                }
                x[i] /= a[i * d + i];
            }
            for i in 0..d {
                inv[i * d + col] = x[i];
            }
        }
        Some(Matrix { dim: d, data: inv })
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

/// Eigenvalues of a symmetric matrix (row-major) by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &[f64], d: usize) -> Vec<f64> {
    let mut a = a.to_vec();
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return vec![0.0; d];
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                off += a[i * d + j] * a[i * d + j];
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..d).map(|i| a[i * d + i]).collect()
}

/// Largest singular value.
pub fn operator_norm(m: &Matrix) -> f64 {
    let d = m.dim();
    let mtm = m.transpose().mul(m);
    if d == 2 {
        let (a, b, c) = (mtm.data[0], mtm.data[1], mtm.data[3]);
        let half_tr = 0.5 * (a + c);
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        return (half_tr + disc).sqrt();
    }
    symmetric_eigenvalues(mtm.data(), d)
        .into_iter()
        .fold(0.0f64, f64::max)
        .max(0.0)
        .sqrt()
}

/// All eigenvalues, sorted by decreasing modulus.
pub fn eigenvalues(m: &Matrix) -> Vec<Complex64> {
    let mut ev: Vec<Complex64> = if m.dim() == 2 {
        let tr = m.data[0] + m.data[3];
        let det = m.det();
        let disc = tr * tr - 4.0 * det;
        if disc >= 0.0 {
            let r = disc.sqrt();
            // avoid cancellation in the smaller root
            let sgn = if tr >= 0.0 { 1.0 } else { -1.0 };
            let big = 0.5 * (tr + sgn * r);
            let small = if big != 0.0 { det / big } else { 0.5 * (tr - r) };
            vec![Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
        } else {
            let r = (-disc).sqrt();
            vec![Complex64::new(0.5 * tr, 0.5 * r), Complex64::new(0.5 * tr, -0.5 * r)]
        }
    } else {
        m.to_nalgebra().complex_eigenvalues().iter().copied().collect()
    };
    ev.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Orthonormal basis of the numerical null space of `m` (singular values below `tol * ‖m‖`).
pub fn null_space(m: &Matrix, tol: f64) -> Vec<Vec<f64>> {
    let d = m.dim();
    let svd = m.to_nalgebra().svd(false, true);
    let vt = match svd.v_t {
        Some(v) => v,
        None => return Vec::new(),
    };
    let smax = svd.singular_values.iter().fold(0.0f64, |a, b| a.max(*b));
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol * smax.max(1e-300) {
            out.push((0..d).map(|j| vt[(k, j)]).collect());
        }
    }
    out
}

/// Numerical rank of a set of vectors.
pub fn rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let d = vectors[0].len();
    let mut flat = Vec::with_capacity(vectors.len() * d);
    for v in vectors {
        flat.extend_from_slice(v);
    }
    let a = DMatrix::from_row_slice(vectors.len(), d, &flat);
    let sv = a.singular_values();
    let smax = sv.iter().fold(0.0f64, |a, b| a.max(*b));
    sv.iter().filter(|s| **s > tol * smax).count()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]])
            .unwrap();
        assert!((m.det() - 18.0).abs() < 1e-12);
        let p = m.mul(&m.inverse().unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p.get(i, j) - e).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        // eigenvalues of the path-graph Laplacian-like matrix 2 - 2cos(k pi/(d+1))
        let d = 6;
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            a[i * d + i] = 2.0;
            if i + 1 < d {
                a[i * d + i + 1] = -1.0;
                a[(i + 1) * d + i] = -1.0;
            }
        }
        let mut ev = symmetric_eigenvalues(&a, d);
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (k, e) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (d + 1) as f64).cos();
            assert!((e - want).abs() < 1e-12, "{e} vs {want}");
        }
    }

    #[test]
    fn operator_norm_of_fibonacci_matrix() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let phi = 0.5 * (1.0 + 5f64.sqrt());
        assert!((operator_norm(&m) - phi * phi).abs() < 1e-13);
        let m3 = Matrix::diag(&[1.0, -5.0, 2.0]);
        assert!((operator_norm(&m3) - 5.0).abs() < 1e-13);
    }

    #[test]
    fn eigenvalues_two_by_two_and_general() {
        let r = Matrix::rotation(0.3);
        let ev = eigenvalues(&r);
        assert!((ev[0].norm() - 1.0).abs() < 1e-14);
        assert!((ev[0].im.abs() - 0.3f64.sin()).abs() < 1e-14);
        let m = Matrix::diag(&[0.5, 3.0, -2.0]);
        let ev = eigenvalues(&m);
        assert!((ev[0].re - 3.0).abs() < 1e-12);
        assert!((ev[1].re + 2.0).abs() < 1e-12);
        let m = Matrix::from_rows(&[vec![1.0, 1e8], vec![0.0, 1e-8]]).unwrap();
        let ev = eigenvalues(&m);
        assert!((ev[1].re - 1e-8).abs() < 1e-20);
    }
}
