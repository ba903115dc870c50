use num_complex::Complex64;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::projective::{log_dist, DualPoint, ProjPoint};
use crate::rng::StreamFactory;

const EPS: f64 = 0.1;

fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * (3.0 - 2.0 * s)
    }
}

/// Even bump: one on `[−ε, ε]`, zero outside `(−1+ε, 1−ε)`, with
/// `χ̃(t) + χ̃(t − 1) = 1` on `[0, 1]`.
pub fn chi_tilde(t: f64) -> f64 {
    1.0 - smoothstep((t.abs() - EPS) / (1.0 - 2.0 * EPS))
}

/// `χ_k(w) = χ̃(log d(w, H_y)/ζ + k)` for `k = 0..=K`, and `Φ* = 1 − Σ_{k≤K} χ_k`.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    y: DualPoint,
    zeta: f64,
    cap: usize,
}

impl PartitionOfUnity {
    /// Builds the partition and re-verifies its defining properties at 10⁴ seeded points
    /// whose distances to `H_y` are log-uniform over the first `K + 2` annuli.
    pub fn build(y: &DualPoint, zeta: f64, cap: usize) -> Result<Self> {
        if !(zeta > 0.0 && zeta <= 1.0) {
            return Err(Error::invalid(format!("partition scale ζ = {zeta} outside (0, 1]")));
        }
        if cap < 1 {
            return Err(Error::invalid("partition needs K ≥ 1"));
        }
        let p = PartitionOfUnity { y: y.clone(), zeta, cap };
        let mut rng = StreamFactory::new(0x5eed_0f_c41).stream(cap as u64);
        for _ in 0..10_000 {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let logd = -u * (cap as f64 + 2.0) * zeta;
            let vals: Vec<f64> = (0..=cap).map(|k| p.chi_log(k, logd)).collect();
            let nonzero = vals.iter().filter(|v| **v != 0.0).count();
            if nonzero > 2 {
                return Err(Error::Partition(format!("{nonzero} functions nonzero at log d = {logd}")));
            }
            for (k, v) in vals.iter().enumerate() {
                let lo = -(k as f64 + 1.0) * zeta;
                let hi = -(k as f64 - 1.0) * zeta;
                if *v != 0.0 && !(logd > lo && logd < hi) {
                    return Err(Error::Partition(format!("χ_{k} nonzero outside its annulus")));
                }
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::Partition(format!("χ_{k} = {v} outside [0, 1]")));
                }
            }
            let total: f64 = vals.iter().sum::<f64>() + p.tail_log(logd);
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::Partition(format!("sum {total} ≠ 1")));
            }
        }
        Ok(p)
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn dual_point(&self) -> &DualPoint {
        &self.y
    }

    /// `χ_k` as a function of `log d(w, H_y)`.
    pub fn chi_log(&self, k: usize, logd: f64) -> f64 {
        if logd == f64::NEG_INFINITY {
            return 0.0;
        }
        chi_tilde(logd / self.zeta + k as f64)
    }

    pub fn chi(&self, k: usize, w: &ProjPoint) -> f64 {
        self.chi_log(k, log_dist(w, &self.y))
    }

    pub fn tail_log(&self, logd: f64) -> f64 {
        partial_tail(self, self.cap, logd)
    }

    /// `Φ*(w) = 1 − Σ_{k≤K} χ_k(w)`.
    pub fn tail(&self, w: &ProjPoint) -> f64 {
        self.tail_log(log_dist(w, &self.y))
    }
}

fn partial_tail(p: &PartitionOfUnity, count: usize, logd: f64) -> f64 {
    if logd == f64::NEG_INFINITY {
        return 1.0;
    }
    // only two consecutive χ_k can be nonzero, so the sum is local
    let t = -logd / p.zeta;
    let k0 = t.floor() as i64;
    let mut s = 0.0;
    for k in [k0 - 1, k0, k0 + 1, k0 + 2] {
        if k >= 0 && k as usize <= count {
            s += p.chi_log(k as usize, logd);
        }
    }
    1.0 - s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseSign {
    /// `e^{+iξkζ/√n}`.
    Plus,
    /// `e^{−iξkζ/√n}`.
    Minus,
}

/// `Φ_{n,ξ} = Σ_{0≤k≤K_n} e^{±iξkζ/√n} χ_k` and `Φ*_n = 1 − Σ_{0≤k≤K_n} χ_k`,
/// with `K_n = ⌊c ζ⁻¹ log n⌋`.
#[derive(Clone, Debug)]
pub struct PhiAggregates {
    partition: PartitionOfUnity,
    pub n: usize,
    pub xi: f64,
    pub count: usize,
    pub sign: PhaseSign,
}

pub fn phi_aggregates(
    partition: &PartitionOfUnity,
    n: usize,
    xi: f64,
    scale_constant: f64,
    zeta: f64,
    sign: PhaseSign,
) -> Result<PhiAggregates> {
    if (zeta - partition.zeta).abs() > 1e-15 {
        return Err(Error::Partition(format!(
            "aggregate scale ζ = {zeta} does not match the partition's ζ = {}",
            partition.zeta
        )));
    }
    if n < 1 || !(scale_constant > 0.0) {
        return Err(Error::invalid("need n ≥ 1 and a positive scale constant"));
    }
    let count = (scale_constant * (n as f64).ln() / zeta).floor().max(0.0) as usize;
    if count > partition.cap {
        return Err(Error::Partition(format!(
            "aggregate needs χ_0..χ_{count} but the partition stops at K = {}",
            partition.cap
        )));
    }
    Ok(PhiAggregates { partition: partition.clone(), n, xi, count, sign })
}

impl PhiAggregates {
    pub fn phase(&self, k: usize) -> Complex64 {
        let s = match self.sign {
            PhaseSign::Plus => 1.0,
            PhaseSign::Minus => -1.0,
        };
        Complex64::new(0.0, s * self.xi * k as f64 * self.partition.zeta / (self.n as f64).sqrt()).exp()
    }

    pub fn phi_log(&self, logd: f64) -> Complex64 {
        if logd == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        let t = -logd / self.partition.zeta;
        let k0 = t.floor() as i64;
        let mut s = Complex64::new(0.0, 0.0);
        for k in [k0 - 1, k0, k0 + 1, k0 + 2] {
            if k >= 0 && k as usize <= self.count {
                s += self.phase(k as usize) * self.partition.chi_log(k as usize, logd);
            }
        }
        s
    }

    pub fn star_log(&self, logd: f64) -> f64 {
        partial_tail(&self.partition, self.count, logd)
    }

    pub fn phi(&self, w: &ProjPoint) -> Complex64 {
        self.phi_log(log_dist(w, self.partition.dual_point()))
    }

    pub fn star(&self, w: &ProjPoint) -> f64 {
        self.star_log(log_dist(w, self.partition.dual_point()))
    }

    pub fn partition(&self) -> &PartitionOfUnity {
        &self.partition
    }
}

/// Finite-difference Hölder seminorm `sup |f(w₁) − f(w₂)| / d(w₁, w₂)^α` of a function
/// of `log d(w, H_y)` on the projective line. Pairs are placed at log-spaced distances
/// from the hyperplane and separated by log-spaced angles.
pub fn holder_seminorm<F>(f: F, alpha: f64, min_log_dist: f64) -> f64
where
    F: Fn(f64) -> Complex64,
{
    let mut sup = 0.0f64;
    let steps = 400;
    for i in 0..=steps {
        let theta = (min_log_dist * i as f64 / steps as f64).exp().asin();
        for j in 0..40 {
            let h = theta.max(1e-300) * 10f64.powf(-3.0 + 4.0 * j as f64 / 39.0);
            let t2 = (theta + h).min(std::f64::consts::FRAC_PI_2);
            if t2 <= theta {
                continue;
            }
            let dist = (t2 - theta).sin();
            let diff = (f(theta.sin().ln()) - f(t2.sin().ln())).norm();
            sup = sup.max(diff / dist.powf(alpha));
        }
    }
    sup
}
