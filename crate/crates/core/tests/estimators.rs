use rmp_core::estimators::{
    estimate_lyapunov, estimate_moments, estimate_stationary, estimate_variance_clt, invariance_residual,
    regularity_exponent, test_basket, MomentOptions,
};
use rmp_core::linalg::Matrix;
use rmp_core::montecarlo::{exact_functionals, ks_distance_continuous, EmpiricalCdf};
use rmp_core::stats::{linear_fit, mean, variance};
use rmp_core::{DualPoint, MatrixMeasure, ProjPoint};

fn conjugated(m: &MatrixMeasure, r: &Matrix) -> MatrixMeasure {
    let rt = r.transpose();
    MatrixMeasure::new(m.atoms().iter().map(|a| r.mul(a.matrix()).mul(&rt)).collect(), m.weights().to_vec()).unwrap()
}

#[test]
fn degenerate_walks() {
    let scalar = MatrixMeasure::uniform(vec![Matrix::scalar(2, 2.0)]).unwrap();
    let (g, v) = estimate_moments(&scalar, &MomentOptions::new(300, 100, 5)).unwrap();
    assert!((g.gamma_hat - 2f64.ln()).abs() < 1e-12 && g.std_error < 1e-14);
    assert!(v.degenerate && v.rho_sq.abs() < 1e-20);
    let rot = MatrixMeasure::uniform(vec![Matrix::rotation(0.4)]).unwrap();
    assert!(estimate_lyapunov(&rot, &MomentOptions::new(300, 100, 5)).unwrap().gamma_hat.abs() < 1e-12);
    let hyp = MatrixMeasure::uniform(vec![Matrix::diag(&[2.0, 0.5])]).unwrap();
    let mut opts = MomentOptions::new(300, 100, 5);
    opts.start = Some(ProjPoint::basis(2, 0));
    assert!(estimate_variance_clt(&hyp, &opts).unwrap().rho_sq.abs() < 1e-20);
}

#[test]
fn scalar_atoms_give_the_mean_log_modulus() {
    let m = MatrixMeasure::new(vec![Matrix::scalar(3, 2.0), Matrix::scalar(3, -0.5), Matrix::scalar(3, 3.0)], vec![0.2, 0.3, 0.5])
        .unwrap();
    let exact = 0.2 * 2f64.ln() + 0.3 * 0.5f64.ln() + 0.5 * 3f64.ln();
    let g = estimate_lyapunov(&m, &MomentOptions::new(200, 4000, 8)).unwrap();
    assert!((g.gamma_hat - exact).abs() < 3.0 * g.std_error, "{} vs {exact}", g.gamma_hat);
}

#[test]
fn lyapunov_matches_extrapolated_enumeration() {
    let b = MatrixMeasure::benchmark();
    let x = ProjPoint::basis(2, 0);
    let y = DualPoint::basis(2, 0);
    let (mut ns, mut totals) = (Vec::new(), Vec::new());
    for n in [8usize, 10, 12] {
        let s: f64 = exact_functionals(&b, &x, &y, n).unwrap().iter().map(|f| f.weight * f.sigma).sum();
        ns.push(n as f64);
        totals.push(s);
    }
    // E σ_n = nγ + c + (exponentially small)
    let oracle = linear_fit(&ns, &totals).unwrap().slope;
    let mut opts = MomentOptions::new(4096, 100_000, 21);
    opts.start = Some(x);
    let g = estimate_lyapunov(&b, &opts).unwrap();
    assert!((g.gamma_hat - oracle).abs() < 3.0 * g.std_error, "{} vs {oracle} (se {:e})", g.gamma_hat, g.std_error);
}

#[test]
fn lyapunov_is_conjugation_invariant() {
    let b = MatrixMeasure::benchmark();
    let c = conjugated(&b, &Matrix::rotation(0.83));
    let a = estimate_lyapunov(&b, &MomentOptions::new(1024, 4000, 1)).unwrap();
    let z = estimate_lyapunov(&c, &MomentOptions::new(1024, 4000, 2)).unwrap();
    let se = a.std_error.hypot(z.std_error);
    assert!((a.gamma_hat - z.gamma_hat).abs() < 3.0 * se);
}

#[test]
fn variance_is_consistent_across_lengths() {
    let b = MatrixMeasure::benchmark();
    let est: Vec<_> = [256usize, 1024, 4096]
        .iter()
        .map(|n| estimate_variance_clt(&b, &MomentOptions::new(*n, 20_000, 3 + *n as u64)).unwrap())
        .collect();
    for v in &est {
        assert!(v.rho_sq > 0.0 && !v.degenerate);
    }
    for w in est.windows(2) {
        let se = w[0].std_error.hypot(w[1].std_error);
        assert!((w[0].rho_sq - w[1].rho_sq).abs() < 3.0 * se, "{} vs {}", w[0].rho_sq, w[1].rho_sq);
    }
}

#[test]
fn irrational_rotation_equidistributes() {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let rot = MatrixMeasure::uniform(vec![Matrix::rotation(2.0 * std::f64::consts::PI * golden)]).unwrap();
    let cloud = estimate_stationary(&rot, 0, 100_000, 1, 4, 1).unwrap();
    let u = EmpiricalCdf::new(cloud.points.iter().map(|p| p.angle() / std::f64::consts::PI).collect()).unwrap();
    assert!(ks_distance_continuous(&u, |t| t.clamp(0.0, 1.0)) <= 0.05);

    let y = DualPoint::basis(2, 0);
    let radii: Vec<f64> = (0..12).map(|i| 1e-3 * 1.8f64.powi(i)).collect();
    let fit = regularity_exponent(&cloud, &y, &radii).unwrap();
    assert!((fit.eta_hat - 1.0).abs() <= 0.15, "{}", fit.eta_hat);
}

#[test]
fn attracting_fixed_point() {
    let m = MatrixMeasure::uniform(vec![Matrix::diag(&[2.0, 1.0])]).unwrap();
    let cloud = estimate_stationary(&m, 200, 1000, 2, 4, 1).unwrap();
    let e1 = ProjPoint::basis(2, 0);
    assert!(cloud.points.iter().all(|p| p.approx_eq(&e1, 1e-12)));
    let radii: Vec<f64> = (0..10).map(|i| 1e-3 * 2f64.powi(i)).collect();
    assert!(regularity_exponent(&cloud, &DualPoint::basis(2, 0), &radii).is_err());
}

#[test]
fn benchmark_stationary_cloud() {
    let b = MatrixMeasure::benchmark();
    let len = 100_000;
    let cloud = estimate_stationary(&b, 1000, len, 1, 6, 1).unwrap();
    let basket = test_basket(2);
    assert_eq!(basket.len(), 20);
    for i in 0..basket.len() {
        let vals: Vec<f64> = cloud.points.iter().map(|p| basket[i](p)).collect();
        let bound = 3.0 / (len as f64).sqrt() * variance(&vals).sqrt();
        let r = invariance_residual(&cloud, &b, &basket[i..i + 1]);
        assert!(r <= bound, "test function {i}: {r} > {bound} (mean {})", mean(&vals));
    }
    let y = DualPoint::new(&[1.0, -1.6180339887]).unwrap();
    let radii: Vec<f64> = (0..14).map(|i| 1e-4 * 2f64.powi(i)).collect();
    let fit = regularity_exponent(&cloud, &y, &radii).unwrap();
    assert!(fit.eta_hat - 1.96 * fit.std_error > 0.0, "{} ± {}", fit.eta_hat, fit.std_error);
}
