//! Finitely supported probability measures on GL(d, ℝ) and their assumption checks.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, null_space, rank, Matrix};
use crate::projective::{act, proj_distance, GroupAtom, ProjPoint};

/// Largest number of words `K^n` the exact enumerator will visit.
pub const ENUMERATION_CAP: u64 = 1 << 24;

/// A probability vector over invertible matrices of a common dimension.
#[derive(Clone, Debug)]
pub struct MatrixMeasure {
    atoms: Vec<GroupAtom>,
    weights: Vec<f64>,
    dim: usize,
}

impl MatrixMeasure {
    /// Validates and normalizes. Weights must be positive and finite.
    pub fn new(matrices: Vec<Matrix>, weights: Vec<f64>) -> Result<Self> {
        validate(matrices, weights)
    }

    pub fn uniform(matrices: Vec<Matrix>) -> Result<Self> {
        let k = matrices.len();
        validate(matrices, vec![1.0; k])
    }

    /// `g₁ = [[2,1],[1,1]]`, `g₂ = [[1,1],[1,2]]` with equal weights.
    pub fn benchmark() -> Self {
        let g1 = Matrix::new(2, vec![2.0, 1.0, 1.0, 1.0]).unwrap();
        let g2 = Matrix::new(2, vec![1.0, 1.0, 1.0, 2.0]).unwrap();
        MatrixMeasure::uniform(vec![g1, g2]).unwrap()
    }

    pub fn atoms(&self) -> &[GroupAtom] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `max_g N(g)` over the support.
    pub fn max_big_n(&self) -> f64 {
        self.atoms.iter().map(|a| a.big_n()).fold(1.0, f64::max)
    }

    /// Cumulative `u64` thresholds: atom `i` is chosen when `u < thresholds[i]`.
    pub fn thresholds(&self) -> Vec<u64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.len());
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if i + 1 == self.len() {
                out.push(u64::MAX);
            } else {
                out.push((acc * 18446744073709551616.0).min(u64::MAX as f64) as u64);
            }
        }
        out
    }
}

/// Checks dimensions, invertibility and weights; normalizes weights to sum to one.
pub fn validate(matrices: Vec<Matrix>, weights: Vec<f64>) -> Result<MatrixMeasure> {
    if matrices.is_empty() {
        return Err(Error::EmptySupport);
    }
    if weights.len() != matrices.len() {
        return Err(Error::DimensionMismatch { expected: matrices.len(), found: weights.len() });
    }
    let dim = matrices[0].dim();
    let mut atoms = Vec::with_capacity(matrices.len());
    for (i, m) in matrices.into_iter().enumerate() {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
        }
        atoms.push(GroupAtom::with_index(m, i)?);
    }
    let mut total = 0.0;
    for (i, w) in weights.iter().enumerate() {
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::NonPositiveWeight(i));
        }
        total += w;
    }
    if total == 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    if let Some(i) = weights.iter().position(|w| *w == 0.0) {
        return Err(Error::NonPositiveWeight(i));
    }
    let weights = weights.iter().map(|w| w / total).collect();
    Ok(MatrixMeasure { atoms, weights, dim })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A word (indices of atoms, first applied first) and the ratio `|λ₁|/|λ₂|` of its product.
#[derive(Clone, Debug)]
pub struct ProximalWitness {
    pub word: Vec<usize>,
    pub gap_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct ProximalCheck {
    pub verdict: Verdict,
    pub witness: Option<ProximalWitness>,
    pub words_tried: usize,
}

#[derive(Clone, Debug)]
pub struct IrreducibilityCheck {
    pub verdict: Verdict,
    pub evidence: String,
}

#[derive(Clone, Debug)]
pub struct AssumptionReport {
    pub proximal: ProximalCheck,
    pub strong_irreducibility: IrreducibilityCheck,
    pub exponential_moment: Verdict,
    pub max_big_n: f64,
}

impl AssumptionReport {
    pub fn hard_failure(&self) -> bool {
        self.proximal.verdict == Verdict::Fail
            || self.strong_irreducibility.verdict == Verdict::Fail
            || self.exponential_moment == Verdict::Fail
    }
}

impl std::fmt::Display for AssumptionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "proximality: {}", self.proximal.verdict)?;
        match &self.proximal.witness {
            Some(w) => writeln!(f, " (word {:?}, |λ1|/|λ2| = {:.6})", w.word, w.gap_ratio)?,
            None => writeln!(f, " (no witness in {} words)", self.proximal.words_tried)?,
        }
        writeln!(
            f,
            "strong irreducibility: {} ({})",
            self.strong_irreducibility.verdict, self.strong_irreducibility.evidence
        )?;
        write!(
            f,
            "exponential moment: {} (finite support, max N(g) = {:.6})",
            self.exponential_moment, self.max_big_n
        )
    }
}

fn word_product(measure: &MatrixMeasure, word: &[usize]) -> Matrix {
    let mut p = Matrix::identity(measure.dim());
    for &i in word {
        p = measure.atoms[i].matrix().mul(&p);
    }
    p
}

fn gap_ratio(m: &Matrix) -> f64 {
    let ev = eigenvalues(m);
    if ev.len() < 2 {
        return f64::INFINITY;
    }
    let (a, b) = (ev[0].norm(), ev[1].norm());
    if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

/// Searches for a word whose product has a simple dominant eigenvalue.
/// All words up to `max_word_len` are tried in order of length until `trials` words
/// have been examined; the remaining budget goes to random words. Without a witness the
/// verdict is inconclusive, since finitely many words cannot rule proximality out.
pub fn check_proximal(
    measure: &MatrixMeasure,
    max_word_len: usize,
    trials: usize,
    seed: u64,
) -> ProximalCheck {
    let k = measure.len();
    let mut tried = 0usize;
    let test = |word: &[usize], tried: &mut usize| -> Option<ProximalWitness> {
        *tried += 1;
        let r = gap_ratio(&word_product(measure, word));
        (r > 1.0 + 1e-6).then(|| ProximalWitness { word: word.to_vec(), gap_ratio: r })
    };
    for len in 1..=max_word_len {
        let count = (k as u64).checked_pow(len as u32).unwrap_or(u64::MAX);
        if tried as u64 + count > trials as u64 {
            break;
        }
        for idx in 0..count {
            let mut word = Vec::with_capacity(len);
            let mut r = idx;
            for _ in 0..len {
                word.push((r % k as u64) as usize);
                r /= k as u64;
            }
            if let Some(w) = test(&word, &mut tried) {
                return ProximalCheck { verdict: Verdict::Pass, witness: Some(w), words_tried: tried };
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while tried < trials && max_word_len > 0 {
        let len = 1 + (rng.next_u64() % max_word_len as u64) as usize;
        let word: Vec<usize> = (0..len).map(|_| (rng.next_u64() % k as u64) as usize).collect();
        if let Some(w) = test(&word, &mut tried) {
            return ProximalCheck { verdict: Verdict::Pass, witness: Some(w), words_tried: tried };
        }
    }
    ProximalCheck { verdict: Verdict::Inconclusive, witness: None, words_tried: tried }
}

fn real_eigenvectors(m: &Matrix) -> Vec<Vec<f64>> {
    let scale = m.max_abs().max(1e-300);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for ev in eigenvalues(m) {
        if ev.im.abs() > 1e-10 * scale {
            continue;
        }
        let d = m.dim();
        let mut shifted = m.data().to_vec();
        for i in 0..d {
            shifted[i * d + i] -= ev.re;
        }
        let shifted = Matrix::new(d, shifted).expect("finite");
        for v in null_space(&shifted, 1e-9) {
            out.push(v);
        }
    }
    out
}

/// Closes `{line}` under the atoms; returns the orbit if it stays within `cap` lines.
fn finite_orbit(atoms: &[GroupAtom], line: &ProjPoint, cap: usize) -> Option<Vec<ProjPoint>> {
    let mut orbit = vec![line.clone()];
    let mut frontier = 0;
    while frontier < orbit.len() {
        let p = orbit[frontier].clone();
        frontier += 1;
        for a in atoms {
            let q = act(a, &p);
            if !orbit.iter().any(|o| proj_distance(o, &q) < 1e-9) {
                orbit.push(q);
                if orbit.len() > cap {
                    return None;
                }
            }
        }
    }
    Some(orbit)
}

fn transposed(measure: &MatrixMeasure) -> Vec<GroupAtom> {
    measure
        .atoms
        .iter()
        .map(|a| GroupAtom::new(a.matrix().transpose()).expect("transpose of an invertible matrix"))
        .collect()
}

/// Heuristic strong-irreducibility test.
///
/// Fails when a finite union of lines (or, through the transposes, of hyperplanes) built
/// from eigenvectors of short words is invariant. Passes when no such union is found,
/// proximal words have at least three attracting directions spanning ℝ^d and random
/// orbits span ℝ^d. Anything else is inconclusive.
pub fn check_strong_irreducibility(measure: &MatrixMeasure, seed: u64) -> IrreducibilityCheck {
    let d = measure.dim();
    let k = measure.len();
    let mut words: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    for i in 0..k {
        for j in 0..k {
            words.push(vec![i, j]);
        }
    }
    let cap = 2 * d + 2;
    let t_atoms = transposed(measure);
    for (label, atoms, transpose) in
        [("lines", &measure.atoms[..], false), ("hyperplanes", &t_atoms[..], true)]
    {
        for w in &words {
            let mut p = word_product(measure, w);
            if transpose {
                p = p.transpose();
            }
            for v in real_eigenvectors(&p) {
                let Ok(line) = ProjPoint::new(&v) else { continue };
                if let Some(orbit) = finite_orbit(atoms, &line, cap) {
                    return IrreducibilityCheck {
                        verdict: Verdict::Fail,
                        evidence: format!("invariant union of {} {}", orbit.len(), label),
                    };
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attractors: Vec<ProjPoint> = Vec::new();
    for _ in 0..200 {
        let len = 1 + (rng.next_u64() % 6) as usize;
        let word: Vec<usize> = (0..len).map(|_| (rng.next_u64() % k as u64) as usize).collect();
        let p = word_product(measure, &word);
        if gap_ratio(&p) <= 1.0 + 1e-6 {
            continue;
        }
        let mut v: Vec<f64> = (0..d).map(|_| gaussianish(&mut rng)).collect();
        for _ in 0..200 {
            v = p.apply(&v);
            let n = crate::linalg::norm(&v);
            v.iter_mut().for_each(|x| *x /= n);
        }
        let Ok(a) = ProjPoint::new(&v) else { continue };
        if !attractors.iter().any(|b| proj_distance(b, &a) < 1e-6) {
            attractors.push(a);
        }
    }
    let attractor_rank =
        rank(&attractors.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(), 1e-8);
    let mut orbit_vectors = Vec::new();
    for _ in 0..4 {
        let mut v: Vec<f64> = (0..d).map(|_| gaussianish(&mut rng)).collect();
        for _ in 0..4 * d {
            let i = (rng.next_u64() % k as u64) as usize;
            v = measure.atoms[i].matrix().apply(&v);
            let n = crate::linalg::norm(&v);
            v.iter_mut().for_each(|x| *x /= n);
            orbit_vectors.push(v.clone());
        }
    }
    let orbit_rank = rank(&orbit_vectors, 1e-8);
    let evidence = format!(
        "{} distinct attracting directions of rank {}, random orbit rank {}",
        attractors.len(),
        attractor_rank,
        orbit_rank
    );
    let verdict = if attractors.len() >= 3 && attractor_rank == d && orbit_rank == d {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    IrreducibilityCheck { verdict, evidence }
}

fn gaussianish(rng: &mut ChaCha8Rng) -> f64 {
    // sum of uniforms; only general position matters here
    (0..4).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64).sum::<f64>() - 2.0
}

pub fn check_assumptions(
    measure: &MatrixMeasure,
    max_word_len: usize,
    trials: usize,
    seed: u64,
) -> AssumptionReport {
    AssumptionReport {
        proximal: check_proximal(measure, max_word_len, trials, seed),
        strong_irreducibility: check_strong_irreducibility(measure, seed.wrapping_add(1)),
        exponential_moment: Verdict::Pass,
        max_big_n: measure.max_big_n(),
    }
}

fn check_cap(measure: &MatrixMeasure, n: usize) -> Result<u64> {
    let k = measure.len() as u64;
    let total = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > ENUMERATION_CAP as u128 {
        return Err(Error::EnumerationCap { atoms: measure.len(), n, cap: ENUMERATION_CAP });
    }
    Ok(total as u64)
}

/// Visits every word of length `n` with its product `g_n ⋯ g_1` and probability.
/// Products are formed by left multiplication along a depth-first traversal.
pub fn for_each_product<F>(measure: &MatrixMeasure, n: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&Matrix, f64),
{
    check_cap(measure, n)?;
    fn rec<F: FnMut(&Matrix, f64)>(
        m: &MatrixMeasure,
        depth: usize,
        n: usize,
        prod: &Matrix,
        w: f64,
        visit: &mut F,
    ) {
        if depth == n {
            visit(prod, w);
            return;
        }
        for (a, wa) in m.atoms.iter().zip(&m.weights) {
            let next = a.matrix().mul(prod);
            rec(m, depth + 1, n, &next, w * wa, visit);
        }
    }
    rec(measure, 0, n, &Matrix::identity(measure.dim()), 1.0, &mut visit);
    Ok(())
}

/// The n-fold convolution as a list of products and probabilities (not merged).
pub fn convolution_enumerate(measure: &MatrixMeasure, n: usize) -> Result<Vec<(GroupAtom, f64)>> {
    let mut out = Vec::with_capacity(check_cap(measure, n)? as usize);
    let mut err = None;
    for_each_product(measure, n, |m, w| match GroupAtom::new(m.clone()) {
        Ok(a) => out.push((a, w)),
        Err(e) => {
            if err.is_none() {
                err = Some(e)
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_normalized() {
        let m = MatrixMeasure::new(
            vec![Matrix::identity(2), Matrix::scalar(2, 2.0)],
            vec![3.0, 1.0],
        )
        .unwrap();
        assert_eq!(m.weights(), &[0.75, 0.25]);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(MatrixMeasure::new(vec![], vec![]), Err(Error::EmptySupport)));
        let z = MatrixMeasure::new(vec![Matrix::identity(2), Matrix::identity(2)], vec![0.0, 0.0]);
        assert!(matches!(z, Err(Error::ZeroTotalWeight)));
        let mixed = MatrixMeasure::new(vec![Matrix::identity(2), Matrix::identity(3)], vec![1.0, 1.0]);
        assert!(matches!(mixed, Err(Error::DimensionMismatch { .. })));
        let sing = Matrix::new(2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            MatrixMeasure::uniform(vec![Matrix::identity(2), sing]),
            Err(Error::SingularAtom { index: 1, .. })
        ));
    }

    #[test]
    fn benchmark_passes_checks() {
        let m = MatrixMeasure::benchmark();
        let r = check_assumptions(&m, 2, 100, 7);
        assert_eq!(r.proximal.verdict, Verdict::Pass);
        assert!(r.proximal.witness.as_ref().unwrap().word.len() <= 2);
        assert_eq!(r.strong_irreducibility.verdict, Verdict::Pass, "{}", r);
        assert!(!r.hard_failure());
    }

    #[test]
    fn diagonal_pair_is_reducible() {
        let m = MatrixMeasure::uniform(vec![Matrix::diag(&[2.0, 1.0]), Matrix::diag(&[1.0, 2.0])])
            .unwrap();
        let r = check_strong_irreducibility(&m, 1);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn rotation_is_not_proximal() {
        let m = MatrixMeasure::uniform(vec![Matrix::rotation(1.0)]).unwrap();
        let r = check_assumptions(&m, 4, 50, 3);
        assert_eq!(r.proximal.verdict, Verdict::Inconclusive);
        assert_eq!(r.strong_irreducibility.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn enumeration_cap() {
        let m = MatrixMeasure::benchmark();
        assert!(matches!(convolution_enumerate(&m, 25), Err(Error::EnumerationCap { .. })));
        let all = convolution_enumerate(&m, 3).unwrap();
        assert_eq!(all.len(), 8);
        let total: f64 = all.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }
}
