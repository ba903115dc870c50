use num_complex::Complex64;
use rmp_core::estimators::{estimate_moments, MomentOptions};
use rmp_core::linalg::Matrix;
use rmp_core::montecarlo::exact_functionals;
use rmp_core::spectral::{
    high_frequency_decay, lambda_curve, lambda_estimates_check, leading_eigen, spectral_gap_at_zero, CurveOptions,
    ExactOperator, OperatorGrid, PowerOptions, TransferOperator,
};
use rmp_core::{DualPoint, Error, MatrixMeasure, ProjPoint};

const PI: f64 = std::f64::consts::PI;

fn circle_op(m: &MatrixMeasure, size: usize) -> TransferOperator {
    TransferOperator::new(m, OperatorGrid::circle(size).unwrap()).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn scalar2() -> MatrixMeasure {
    MatrixMeasure::uniform(vec![Matrix::scalar(2, 2.0)]).unwrap()
}

#[test]
fn stochastic_at_zero() {
    let op = circle_op(&MatrixMeasure::benchmark(), 512);
    let out = op.apply(c(0.0), &vec![c(1.0); 512]);
    assert!(out.iter().all(|v| (v - c(1.0)).norm() < 1e-14));

    // left Perron vector: π𝒫₀ = π, so ⟨π, 𝒫₀φ⟩ = ⟨π, φ⟩
    let mut pi = vec![1.0 / 512.0; 512];
    let mut tmp = vec![0.0; 512];
    for _ in 0..5000 {
        op.apply_real_left(&pi, &mut tmp);
        let s: f64 = tmp.iter().sum();
        tmp.iter_mut().for_each(|x| *x /= s);
        std::mem::swap(&mut pi, &mut tmp);
    }
    let phi: Vec<f64> = (0..512).map(|j| (2.0 * PI * j as f64 / 512.0).cos() + 0.3).collect();
    op.apply_real(&phi, &mut tmp);
    let a: f64 = pi.iter().zip(&phi).map(|(p, f)| p * f).sum();
    let b: f64 = pi.iter().zip(&tmp).map(|(p, f)| p * f).sum();
    assert!((a - b).abs() < 1e-10, "{a} vs {b}");
}

#[test]
fn rotation_on_a_compatible_grid_is_a_shift() {
    let m = 360;
    let rot = MatrixMeasure::uniform(vec![Matrix::rotation(PI / m as f64)]).unwrap();
    let op = circle_op(&rot, m);
    let phi: Vec<f64> = (0..m).map(|j| ((j * 7919) % 113) as f64).collect();
    let mut out = vec![0.0; m];
    op.apply_real(&phi, &mut out);
    for j in 0..m {
        assert!((out[j] - phi[(j + 1) % m]).abs() < 1e-9, "{j}");
    }
}

#[test]
fn grid_iterates_approach_the_exact_operator() {
    let b = MatrixMeasure::benchmark();
    let n = 6;
    let z = Complex64::new(0.0, 0.7);
    let f = |w: &ProjPoint| c((2.0 * w.angle()).cos() + 0.5 * (4.0 * w.angle()).sin());
    let mut errors = Vec::new();
    for size in [1024usize, 2048, 4096] {
        let op = circle_op(&b, size);
        let grid = op.grid().clone();
        let mut v: Vec<Complex64> = (0..size).map(|j| f(&grid.point(j))).collect();
        for _ in 0..n {
            v = op.apply(z, &v);
        }
        let mut err = 0.0f64;
        for j in (0..size).step_by(size / 32) {
            let exact = ExactOperator::new(&b, &grid.point(j), n).unwrap().apply(z, f);
            err = err.max((exact - v[j]).norm());
        }
        errors.push(err);
    }
    // linear interpolation: error O(M⁻²), far below 1e-4 at these sizes
    assert!(errors[2] < 1e-5, "{errors:?}");
    let order = (errors[0] / errors[2]).log2() / 2.0;
    assert!(order >= 1.0, "observed order {order} ({errors:?})");
}

#[test]
fn leading_eigenpairs() {
    let b = MatrixMeasure::benchmark();
    let op = circle_op(&b, 1024);
    let e = leading_eigen(&op, c(0.0), PowerOptions::default(), None).unwrap();
    assert!((e.lambda - c(1.0)).norm() < 1e-9);
    assert!(e.eigenfunction.iter().all(|v| (v - c(1.0)).norm() < 1e-8));

    let s = circle_op(&scalar2(), 64);
    let xi = 0.9;
    let e = leading_eigen(&s, Complex64::new(0.0, xi), PowerOptions::default(), None).unwrap();
    assert!((e.lambda - Complex64::new(0.0, xi * 2f64.ln()).exp()).norm() < 1e-12);
}

#[test]
fn eigenvalue_matches_enumerated_growth_rate() {
    let b = MatrixMeasure::benchmark();
    let xi = 0.1;
    let op = circle_op(&b, 4096);
    let lambda = leading_eigen(&op, Complex64::new(0.0, xi), PowerOptions::default(), None).unwrap().lambda;
    let x = ProjPoint::basis(2, 0);
    let y = DualPoint::basis(2, 0);
    let moment = |n: usize| -> Complex64 {
        exact_functionals(&b, &x, &y, n)
            .unwrap()
            .iter()
            .map(|f| Complex64::new(0.0, xi * f.sigma).exp() * f.weight)
            .sum()
    };
    let rate = (moment(12) / moment(10)).ln() / 2.0;
    let rel = (rate - lambda.ln()).norm() / lambda.ln().norm();
    assert!(rel <= 1e-3, "{rate} vs {}", lambda.ln());
}

#[test]
fn gap_at_zero() {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let rot = MatrixMeasure::uniform(vec![Matrix::rotation(PI * golden)]).unwrap();
    let g = spectral_gap_at_zero(&circle_op(&rot, 512)).unwrap();
    assert!(g.rho > 0.99, "{}", g.rho);
    let red = MatrixMeasure::uniform(vec![Matrix::diag(&[4.0, 1.0]), Matrix::diag(&[1.0, 4.0])]).unwrap();
    assert!(spectral_gap_at_zero(&circle_op(&red, 512)).is_ok());
    let g = spectral_gap_at_zero(&circle_op(&MatrixMeasure::benchmark(), 1024)).unwrap();
    assert!(g.rho < 1.0, "{}", g.rho);
}

#[test]
fn scalar_walk_curve_is_degenerate() {
    let xi: Vec<f64> = (-12..=12).map(|i| i as f64 * 0.025).collect();
    let curve = lambda_curve(&circle_op(&scalar2(), 64), &xi, &CurveOptions::default()).unwrap();
    assert!((curve.fitted_gamma - 2f64.ln()).abs() < 1e-9);
    assert!(curve.fitted_rho_sq.abs() < 1e-9);
    assert!(matches!(lambda_estimates_check(&curve, &[64]), Err(Error::Degenerate(_))));
}

#[test]
fn benchmark_curve_properties() {
    let b = MatrixMeasure::benchmark();
    let xi: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.025).collect();
    let curve = lambda_curve(&circle_op(&b, 2048), &xi, &CurveOptions::default()).unwrap();
    for (i, l) in curve.lambda.iter().enumerate() {
        assert!(l.norm() <= 1.0 + 1e-12);
        let mirror = curve.lambda[xi.len() - 1 - i];
        assert!((mirror - l.conj()).norm() < 1e-9, "{}", xi[i]);
    }
    assert!(curve.remainder_slope >= 2.7, "{}", curve.remainder_slope);

    let mut opts = MomentOptions::new(4096, 20_000, 77);
    opts.start = Some(ProjPoint::basis(2, 0));
    let (g, v) = estimate_moments(&b, &opts).unwrap();
    assert!((curve.fitted_gamma - g.gamma_hat).abs() < 3.0 * g.std_error);
    assert!((curve.fitted_rho_sq - v.rho_sq).abs() < 3.0 * v.std_error);

    let est = lambda_estimates_check(&curve, &[64, 256, 1024]).unwrap();
    assert!(est.xi0 > 0.5, "{}", est.xi0);
    assert!(est.constants.iter().all(|(_, k)| k.is_finite()));
}

#[test]
fn high_frequency_behaviour() {
    let s = circle_op(&scalar2(), 64);
    let r = high_frequency_decay(&s, 2.0 * PI / 2f64.ln(), 50).unwrap();
    assert!((r.rho_hat - 1.0).abs() < 1e-12);

    let b = circle_op(&MatrixMeasure::benchmark(), 1024);
    let zero = b.apply(Complex64::new(0.0, 1.0), &vec![c(0.0); 1024]);
    assert!(zero.iter().all(|v| *v == c(0.0)));

    let r = high_frequency_decay(&b, 1.0, 400).unwrap();
    assert!(r.rho_hat < 1.0 && r.ci_high < 1.0, "{} ({}..{})", r.rho_hat, r.ci_low, r.ci_high);
    // after burn-in the norms keep decreasing
    let tail = &r.log_norms[50..];
    assert!(tail.windows(2).all(|w| w[1] < w[0]));
}
