use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{MatrixMeasure, ENUMERATION_CAP};
use crate::projective::{act, cocycle, ProjPoint};
use crate::spectral::grid::OperatorGrid;

/// Sparse discretization of `𝒫_z φ(w) = Σ_a p_a e^{z σ(g_a, w)} φ(g_a w)`.
/// Each row stores `(column, p_a · stencil weight, σ(g_a, w_j))`.
#[derive(Clone, Debug)]
pub struct TransferOperator {
    grid: OperatorGrid,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    base: Vec<f64>,
    sigma: Vec<f64>,
}

impl TransferOperator {
    pub fn new(measure: &MatrixMeasure, grid: OperatorGrid) -> Result<Self> {
        if grid.dim() != measure.dim() {
            return Err(Error::DimensionMismatch { expected: measure.dim(), found: grid.dim() });
        }
        let m = grid.len();
        let mut row_ptr = Vec::with_capacity(m + 1);
        let mut cols = Vec::new();
        let mut base = Vec::new();
        let mut sigma = Vec::new();
        row_ptr.push(0);
        for j in 0..m {
            let w = grid.point(j);
            for (a, p) in measure.atoms().iter().zip(measure.weights()) {
                let s = cocycle(a, &w);
                for (col, c) in grid.stencil(&act(a, &w)) {
                    if c == 0.0 {
                        continue;
                    }
                    cols.push(col as u32);
                    base.push(p * c);
                    sigma.push(s);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(TransferOperator { grid, row_ptr, cols, base, sigma })
    }

    pub fn grid(&self) -> &OperatorGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Fixes `z` and precomputes the complex coefficients.
    pub fn at(&self, z: Complex64) -> TwistedOperator<'_> {
        let coef = self
            .base
            .iter()
            .zip(&self.sigma)
            .map(|(b, s)| (z * s).exp() * *b)
            .collect();
        TwistedOperator { op: self, coef }
    }

    pub fn apply(&self, z: Complex64, phi: &[Complex64]) -> Vec<Complex64> {
        let t = self.at(z);
        let mut out = vec![Complex64::new(0.0, 0.0); phi.len()];
        t.apply_into(phi, &mut out);
        out
    }

    /// `𝒫₀ φ` for real `φ`.
    pub fn apply_real(&self, phi: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[j]..self.row_ptr[j + 1] {
                acc += self.base[k] * phi[self.cols[k] as usize];
            }
            *o = acc;
        }
    }

    /// `π ↦ π 𝒫₀` (row vector times matrix).
    pub fn apply_real_left(&self, pi: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, pj) in pi.iter().enumerate() {
            for k in self.row_ptr[j]..self.row_ptr[j + 1] {
                out[self.cols[k] as usize] += pj * self.base[k];
            }
        }
    }
}

pub struct TwistedOperator<'a> {
    op: &'a TransferOperator,
    coef: Vec<Complex64>,
}

impl TwistedOperator<'_> {
    pub fn apply_into(&self, phi: &[Complex64], out: &mut [Complex64]) {
        let op = self.op;
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in op.row_ptr[j]..op.row_ptr[j + 1] {
                acc += self.coef[k] * phi[op.cols[k] as usize];
            }
            *o = acc;
        }
    }
}

/// `𝒫_zⁿ` at a single start point, computed exactly by expanding the one-step
/// operator `n` times: every word contributes its weight, its accumulated cocycle
/// (sum of one-step cocycles along the orbit) and its end point.
#[derive(Clone, Debug)]
pub struct ExactOperator {
    dim: usize,
    weights: Vec<f64>,
    sigma: Vec<f64>,
    ends: Vec<f64>,
}

impl ExactOperator {
    pub fn new(measure: &MatrixMeasure, x: &ProjPoint, n: usize) -> Result<Self> {
        let k = measure.len() as u128;
        if k.checked_pow(n as u32).map_or(true, |t| t > ENUMERATION_CAP as u128) {
            return Err(Error::EnumerationCap { atoms: measure.len(), n, cap: ENUMERATION_CAP });
        }
        if x.dim() != measure.dim() {
            return Err(Error::DimensionMismatch { expected: measure.dim(), found: x.dim() });
        }
        let mut terms = vec![(1.0, 0.0, x.clone())];
        for _ in 0..n {
            let mut next = Vec::with_capacity(terms.len() * measure.len());
            for (w, s, p) in &terms {
                for (a, pa) in measure.atoms().iter().zip(measure.weights()) {
                    next.push((w * pa, s + cocycle(a, p), act(a, p)));
                }
            }
            terms = next;
        }
        let dim = measure.dim();
        let mut out = ExactOperator {
            dim,
            weights: Vec::with_capacity(terms.len()),
            sigma: Vec::with_capacity(terms.len()),
            ends: Vec::with_capacity(terms.len() * dim),
        };
        for (w, s, p) in terms {
            out.weights.push(w);
            out.sigma.push(s);
            out.ends.extend_from_slice(p.coords());
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `(weight, σ, end point)` of word `i`.
    pub fn term(&self, i: usize) -> (f64, f64, ProjPoint) {
        let p = ProjPoint::new(&self.ends[i * self.dim..(i + 1) * self.dim]).expect("unit vector");
        (self.weights[i], self.sigma[i], p)
    }

    /// `(𝒫_zⁿ φ)(x)`.
    pub fn apply<F>(&self, z: Complex64, phi: F) -> Complex64
    where
        F: Fn(&ProjPoint) -> Complex64,
    {
        (0..self.len())
            .map(|i| {
                let (w, s, p) = self.term(i);
                (z * s).exp() * w * phi(&p)
            })
            .sum()
    }

    /// Like [`apply`](Self::apply) with `φ` evaluated once per word and reused for
    /// many values of `z`.
    pub fn apply_many(&self, zs: &[Complex64], phi_values: &[Complex64]) -> Vec<Complex64> {
        zs.iter()
            .map(|z| {
                self.weights
                    .iter()
                    .zip(&self.sigma)
                    .zip(phi_values)
                    .map(|((w, s), f)| (z * s).exp() * *w * f)
                    .sum()
            })
            .collect()
    }

    pub fn end_points(&self) -> Vec<ProjPoint> {
        (0..self.len()).map(|i| self.term(i).2).collect()
    }
}
