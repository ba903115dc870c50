use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::fourier::{
    approximants, conjugate_cf, make_kernel, phi_aggregates, quadrature::integrate, BandLimited, PartitionOfUnity,
    PhaseSign, WindowFunction,
};
use crate::harness::config::ExperimentConfig;
use crate::montecarlo::{exact_functionals, EmpiricalCdf, ExactFunctional};
use crate::projective::log_dist;
use crate::spectral::ExactOperator;

/// Agreement between direct sums over the enumerated law and the transfer-operator
/// expressions for the smoothed distribution `F_n` and the window functional `ℛ_n`.
#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub n: usize,
    pub gamma: f64,
    pub tolerance: f64,
    /// `max_ξ |φ_{F_n}(ξ) − e^{iξ√nγ} 𝒫ⁿ_{−iξ/√n}(Φ_{n,ξ} + Φ*_n)(x)|` over 50 frequencies.
    pub cf_max_error: f64,
    pub cf_worst_xi: f64,
    pub cf_frequencies: usize,
    /// `|φ_{F_n}(0) − 1|`, both routes.
    pub cf_zero_error: f64,
    /// Smallest `C̃` with `F_n(b − 1/√n) − C̃/√n ≤ 𝓛_n(b) ≤ F_n(b + 1/√n) + C̃/√n` on the
    /// `b`-grid.
    pub sandwich_constant: f64,
    pub sandwich_worst_b: f64,
    /// `max_t |ℛ_n(t)` direct `−` Fourier form`|` for the upper and lower approximants.
    pub fourier_max_error: f64,
    pub fourier_worst_t: f64,
    /// Same, term by term (`χ_k` and `Φ*` pieces separately).
    pub fourier_term_max_error: f64,
}

impl PipelineReport {
    pub fn pass(&self) -> bool {
        self.cf_max_error <= self.tolerance
            && self.cf_zero_error <= self.tolerance
            && self.sandwich_constant.is_finite()
            && self.fourier_max_error <= self.tolerance
            && self.fourier_term_max_error <= self.tolerance
    }
}

fn annuli(scale: f64, n: usize, zeta: f64) -> usize {
    (scale * (n as f64).ln() / zeta).floor().max(0.0) as usize
}

/// Atoms of `F_n`: `((σ − nγ − kζ)/√n, p·χ_k)` for `k ≤ K` and `((σ − nγ)/√n, p·Φ*)`.
fn fn_atoms(words: &[ExactFunctional], part: &PartitionOfUnity, count: usize, n: usize, gamma: f64) -> Vec<(f64, f64)> {
    let sn = (n as f64).sqrt();
    let zeta = part.zeta();
    let mut atoms = Vec::with_capacity(words.len() * (count + 2));
    for w in words {
        let base = w.sigma - n as f64 * gamma;
        let mut used = 0.0;
        for k in 0..=count {
            let c = part.chi_log(k, w.log_dist);
            used += c;
            atoms.push(((base - k as f64 * zeta) / sn, w.weight * c));
        }
        atoms.push((base / sn, w.weight * (1.0 - used)));
    }
    atoms
}

/// Runs the three exact cross-checks at word length `n` with centering `gamma`.
///
/// (i) the conjugate characteristic function of `F_n` (partition scale one, `K = ⌊A log n⌋`)
/// from its atoms against the transfer-operator formula at 50 frequencies in `[−10, 10]`;
/// (ii) the sandwich between `F_n` and `𝓛_n(b) = P((log|⟨f, S_n v⟩| − nγ)/√n ≤ b)`;
/// (iii) `ℛ_n(t)` for the band-limited approximants of the trapezoid window over
/// `cfg.interval` (scale `ζ`, `K = ⌊Bζ⁻¹ log n⌋`) by direct summation and by Fourier
/// inversion through `𝒫ⁿ_{iξ/√n}`.
pub fn fn_pipeline_check(cfg: &ExperimentConfig, gamma: f64, n: usize) -> Result<PipelineReport> {
    let tolerance = 1e-6;
    let words = exact_functionals(&cfg.measure, &cfg.x, &cfg.y, n)?;
    let op = ExactOperator::new(&cfg.measure, &cfg.x, n)?;
    let end_logd: Vec<f64> = op.end_points().iter().map(|p| log_dist(p, &cfg.y)).collect();
    let sn = (n as f64).sqrt();

    // (i)
    let count = annuli(cfg.a_const, n, 1.0);
    let part = PartitionOfUnity::build(&cfg.y, 1.0, count.max(1) + 2)?;
    let atoms = fn_atoms(&words, &part, count, n, gamma);
    let operator_cf = |xi: f64| -> Result<Complex64> {
        let agg = phi_aggregates(&part, n, xi, cfg.a_const, 1.0, PhaseSign::Plus)?;
        let phi: Vec<Complex64> = end_logd.iter().map(|l| agg.phi_log(*l) + agg.star_log(*l)).collect();
        let z = Complex64::new(0.0, -xi / sn);
        Ok(Complex64::new(0.0, xi * sn * gamma).exp() * op.apply_many(&[z], &phi)[0])
    };
    let cf_frequencies = 50;
    let mut cf_max_error = 0.0f64;
    let mut cf_worst_xi = 0.0;
    for j in 0..cf_frequencies {
        let xi = -10.0 + 20.0 * j as f64 / (cf_frequencies - 1) as f64;
        let e = (conjugate_cf(&atoms, xi) - operator_cf(xi)?).norm();
        if e > cf_max_error {
            cf_max_error = e;
            cf_worst_xi = xi;
        }
    }
    let cf_zero_error = (conjugate_cf(&atoms, 0.0) - 1.0).norm().max((operator_cf(0.0)? - 1.0).norm());

    // (ii)
    let f_n = EmpiricalCdf::weighted(atoms.clone())?;
    let l_n = EmpiricalCdf::weighted(words.iter().map(|w| ((w.coeff_log - n as f64 * gamma) / sn, w.weight)).collect())?;
    let lo = f_n.values()[0].min(l_n.values()[0]) - 2.0 / sn;
    let hi = f_n.values().last().unwrap().max(*l_n.values().last().unwrap()) + 2.0 / sn;
    let mut sandwich = 0.0f64;
    let mut sandwich_worst_b = lo;
    for i in 0..=20_000 {
        let b = lo + (hi - lo) * i as f64 / 20_000.0;
        let l = l_n.eval(b);
        let gap = (f_n.eval(b - 1.0 / sn) - l).max(l - f_n.eval(b + 1.0 / sn));
        if gap > sandwich {
            sandwich = gap;
            sandwich_worst_b = b;
        }
    }

    // (iii)
    let zeta = cfg.zeta;
    let count4 = annuli(cfg.b_const, n, zeta);
    let part4 = PartitionOfUnity::build(&cfg.y, zeta, count4.max(1) + 2)?;
    let psi = WindowFunction::upper(cfg.interval.0, cfg.interval.1, zeta)?;
    let approx = approximants(&psi, make_kernel(cfg.delta)?)?;
    let mut fourier_max_error = 0.0f64;
    let mut fourier_worst_t = 0.0;
    let mut fourier_term_max_error = 0.0f64;
    for band in [&approx.plus, &approx.minus] {
        for t in [-1.0, -0.3, 0.0, 0.4, 1.2] {
            let direct = r_direct(band, &words, &part4, count4, n, gamma, t);
            let (total, terms) = r_fourier(band, &op, &end_logd, &part4, cfg.b_const, count4, n, gamma, t)?;
            let e = (total - direct.iter().sum::<f64>()).norm();
            if e > fourier_max_error {
                fourier_max_error = e;
                fourier_worst_t = t;
            }
            for (d, f) in direct.iter().zip(&terms) {
                fourier_term_max_error = fourier_term_max_error.max((f - d).norm());
            }
        }
    }

    Ok(PipelineReport {
        n,
        gamma,
        tolerance,
        cf_max_error,
        cf_worst_xi,
        cf_frequencies,
        cf_zero_error,
        sandwich_constant: sandwich.max(0.0) * sn,
        sandwich_worst_b,
        fourier_max_error,
        fourier_worst_t,
        fourier_term_max_error,
    })
}

/// Terms `𝓔_n(ψ_{t,k}·χ_k)` for `k ≤ K` followed by `𝓔_n(ψ_{t,0}·Φ*)`, summed over words.
fn r_direct(
    band: &BandLimited,
    words: &[ExactFunctional],
    part: &PartitionOfUnity,
    count: usize,
    n: usize,
    gamma: f64,
    t: f64,
) -> Vec<f64> {
    let sn = (n as f64).sqrt();
    let zeta = part.zeta();
    let mut terms = vec![0.0; count + 2];
    for w in words {
        let u = w.sigma - n as f64 * gamma + t;
        let mut used = 0.0;
        for (k, term) in terms.iter_mut().enumerate().take(count + 1) {
            let c = part.chi_log(k, w.log_dist);
            used += c;
            if c != 0.0 {
                *term += sn * w.weight * c * band.eval(u - k as f64 * zeta);
            }
        }
        terms[count + 1] += sn * w.weight * (1.0 - used) * band.eval(u);
    }
    terms
}

/// `(1/2π) ∫_{|ξ|≤δ⁻²√n} ψ̂(ξ/√n) e^{iξt/√n} e^{−iξ√nγ} 𝒫ⁿ_{iξ/√n}(Φ_{n,ξ} + Φ*_n)(x) dξ`,
/// with the same integral split into its `χ_k` and `Φ*` pieces.
#[allow(clippy::too_many_arguments)]
fn r_fourier(
    band: &BandLimited,
    op: &ExactOperator,
    end_logd: &[f64],
    part: &PartitionOfUnity,
    b_const: f64,
    count: usize,
    n: usize,
    gamma: f64,
    t: f64,
) -> Result<(Complex64, Vec<Complex64>)> {
    let sn = (n as f64).sqrt();
    let zeta = part.zeta();
    let chis: Vec<Vec<f64>> = end_logd.iter().map(|l| (0..=count).map(|k| part.chi_log(k, *l)).collect()).collect();
    let sigmas: Vec<(f64, f64)> = (0..op.len()).map(|i| op.term(i)).map(|(w, s, _)| (w, s)).collect();
    let spread = sigmas.iter().fold(0.0f64, |m, (_, s)| m.max((s - n as f64 * gamma).abs()));
    let reach = band.base.support().map_or(0.0, |(a, b)| a.abs().max(b.abs()));
    let freq = (spread + t.abs() + count as f64 * zeta + reach + 1.0) / sn;
    let eval = |xi: f64| -> Vec<Complex64> {
        let z = Complex64::new(0.0, xi / sn);
        let common = band.fourier(xi / sn) * Complex64::new(0.0, xi * t / sn - xi * sn * gamma).exp();
        let agg = phi_aggregates(part, n, xi, b_const, zeta, PhaseSign::Minus).expect("partition covers K");
        let mut out = vec![Complex64::new(0.0, 0.0); count + 3];
        for (i, (w, s)) in sigmas.iter().enumerate() {
            let e = (z * s).exp() * *w * common;
            let mut used = 0.0;
            for (k, c) in chis[i].iter().enumerate() {
                used += c;
                out[k] += e * *c * agg.phase(k);
            }
            out[count + 1] += e * (1.0 - used);
            out[count + 2] += e * (agg.phi_log(end_logd[i]) + agg.star_log(end_logd[i]));
        }
        out
    };
    let knots: Vec<f64> = band.kernel.fourier_knots().iter().map(|k| k * sn).collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); count + 3];
    for w in knots.windows(2) {
        let panels = 4 + ((w[1] - w[0]) * freq / 2.0).ceil() as usize;
        let part_sum: VecC = integrate(|xi| VecC(eval(xi)), w[0], w[1], panels);
        for (a, v) in acc.iter_mut().zip(part_sum.0) {
            *a += v;
        }
    }
    let scale = 1.0 / (2.0 * PI);
    let total = acc[count + 2] * scale;
    let terms = acc[..count + 2].iter().map(|v| v * scale).collect();
    Ok((total, terms))
}

/// Vector of complex values with the arithmetic the quadrature rule needs.
#[derive(Clone, Debug, Default)]
struct VecC(Vec<Complex64>);

impl std::ops::Add for VecC {
    type Output = VecC;
    fn add(self, rhs: VecC) -> VecC {
        if self.0.is_empty() {
            return rhs;
        }
        if rhs.0.is_empty() {
            return self;
        }
        VecC(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Mul<f64> for VecC {
    type Output = VecC;
    fn mul(self, rhs: f64) -> VecC {
        VecC(self.0.into_iter().map(|a| a * rhs).collect())
    }
}
