use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::projective::{proj_distance, ProjPoint};
use crate::rng::StreamFactory;

/// Discretization of projective space on which transfer operators act.
#[derive(Clone, Debug)]
pub enum OperatorGrid {
    /// Angles `θ_j = jπ/M` on the projective line, linear interpolation.
    Circle { m: usize },
    /// Seeded random points of `P^{d-1}`, inverse-distance interpolation from the
    /// `neighbors` nearest points.
    Cloud { points: Vec<ProjPoint>, neighbors: usize },
}

impl OperatorGrid {
    pub fn circle(m: usize) -> Result<Self> {
        if m < 4 {
            return Err(Error::invalid("circle grid needs at least 4 points"));
        }
        Ok(OperatorGrid::Circle { m })
    }

    pub fn cloud(d: usize, m: usize, seed: u64) -> Result<Self> {
        if d < 2 || m < d + 2 {
            return Err(Error::invalid("cloud grid needs d ≥ 2 and more than d + 1 points"));
        }
        let mut rng = StreamFactory::new(seed).stream(0);
        let mut points = Vec::with_capacity(m);
        points.push(ProjPoint::basis(d, 0));
        while points.len() < m {
            // Box-Muller gives a uniform direction on the sphere
            let v: Vec<f64> = (0..d)
                .map(|_| {
                    let u1 = ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
                    let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                })
                .collect();
            if let Ok(p) = ProjPoint::new(&v) {
                points.push(p);
            }
        }
        Ok(OperatorGrid::Cloud { points, neighbors: d.max(4) })
    }

    pub fn len(&self) -> usize {
        match self {
            OperatorGrid::Circle { m } => *m,
            OperatorGrid::Cloud { points, .. } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            OperatorGrid::Circle { .. } => 2,
            OperatorGrid::Cloud { points, .. } => points[0].dim(),
        }
    }

    /// Cloud grids carry no convergence guarantee.
    pub fn is_approximate(&self) -> bool {
        matches!(self, OperatorGrid::Cloud { .. })
    }

    pub fn point(&self, j: usize) -> ProjPoint {
        match self {
            OperatorGrid::Circle { m } => {
                ProjPoint::from_angle(j as f64 * std::f64::consts::PI / *m as f64)
            }
            OperatorGrid::Cloud { points, .. } => points[j].clone(),
        }
    }

    /// Interpolation stencil `(index, weight)` with weights summing to one.
    pub fn stencil(&self, w: &ProjPoint) -> Vec<(usize, f64)> {
        match self {
            OperatorGrid::Circle { m } => {
                let h = std::f64::consts::PI / *m as f64;
                let u = w.angle() / h;
                let j = u.floor();
                let t = u - j;
                let j = (j as usize) % *m;
                vec![(j, 1.0 - t), ((j + 1) % *m, t)]
            }
            OperatorGrid::Cloud { points, neighbors } => {
                let mut best: Vec<(f64, usize)> = Vec::with_capacity(neighbors + 1);
                for (i, p) in points.iter().enumerate() {
                    let dist = proj_distance(p, w);
                    if best.len() < *neighbors || dist < best[best.len() - 1].0 {
                        let pos = best.partition_point(|b| b.0 <= dist);
                        best.insert(pos, (dist, i));
                        best.truncate(*neighbors);
                    }
                }
                if best[0].0 < 1e-14 {
                    return vec![(best[0].1, 1.0)];
                }
                let total: f64 = best.iter().map(|b| 1.0 / b.0).sum();
                best.iter().map(|b| (b.1, 1.0 / b.0 / total)).collect()
            }
        }
    }

    /// Interpolates grid values at `w`.
    pub fn interpolate<T>(&self, values: &[T], w: &ProjPoint) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let s = self.stencil(w);
        let mut acc = values[s[0].0] * s[0].1;
        for (j, c) in &s[1..] {
            acc = acc + values[*j] * *c;
        }
        acc
    }
}
