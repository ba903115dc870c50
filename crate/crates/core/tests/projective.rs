use proptest::prelude::*;
use rmp_core::linalg::{operator_norm, Matrix};
use rmp_core::projective::{act, cocycle, coefficient_log, dual_pairing, proj_distance};
use rmp_core::{DualPoint, GroupAtom, ProjPoint};

fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    Matrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap()
}

fn atom(a: f64, b: f64, c: f64, d: f64) -> GroupAtom {
    GroupAtom::new(m2(a, b, c, d)).unwrap()
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

#[test]
fn operator_norm_examples() {
    close(operator_norm(&Matrix::identity(2)), 1.0, 1e-15);
    close(operator_norm(&Matrix::diag(&[3.0, 0.5])), 3.0, 1e-15);
    close(operator_norm(&m2(1.0, 1.0, 0.0, 1.0)), (1.0 + 5f64.sqrt()) / 2.0, 1e-10);
    close(operator_norm(&Matrix::diag(&[3.0, 0.5, -7.0])), 7.0, 1e-12);
}

#[test]
fn distance_examples() {
    let e1 = ProjPoint::basis(2, 0);
    let e2 = ProjPoint::basis(2, 1);
    let diag = ProjPoint::new(&[1.0, 1.0]).unwrap();
    close(proj_distance(&e1, &e1), 0.0, 0.0);
    close(proj_distance(&e1, &e2), 1.0, 1e-15);
    close(proj_distance(&e1, &diag), 0.5f64.sqrt(), 1e-10);
}

#[test]
fn action_examples() {
    let e1 = ProjPoint::basis(2, 0);
    let x = ProjPoint::new(&[0.3, -0.7]).unwrap();
    assert!(act(&atom(1.0, 0.0, 0.0, 1.0), &x).approx_eq(&x, 1e-15));
    assert!(act(&atom(2.0, 0.0, 0.0, 1.0), &e1).approx_eq(&e1, 1e-15));
    assert!(act(&atom(0.0, -1.0, 1.0, 0.0), &e1).approx_eq(&ProjPoint::basis(2, 1), 1e-15));
}

#[test]
fn cocycle_examples() {
    let x = ProjPoint::new(&[0.3, -0.7]).unwrap();
    close(cocycle(&atom(1.0, 0.0, 0.0, 1.0), &x), 0.0, 1e-15);
    close(cocycle(&GroupAtom::new(Matrix::scalar(2, -2.5)).unwrap(), &x), 2.5f64.ln(), 1e-14);
    let diag = ProjPoint::new(&[1.0, 1.0]).unwrap();
    close(cocycle(&atom(2.0, 0.0, 0.0, 1.0), &diag), 0.4581453659, 1e-10);
}

#[test]
fn pairing_examples() {
    let e1 = ProjPoint::basis(2, 0);
    let f1 = DualPoint::basis(2, 0);
    let f2 = DualPoint::basis(2, 1);
    close(dual_pairing(&f1, &e1), 1.0, 0.0);
    close(dual_pairing(&f2, &e1), 0.0, 0.0);
    close(dual_pairing(&f1, &ProjPoint::new(&[1.0, 1.0]).unwrap()), 0.5f64.sqrt(), 1e-15);
}

#[test]
fn coefficient_examples() {
    let e1 = ProjPoint::basis(2, 0);
    let f1 = DualPoint::basis(2, 0);
    close(coefficient_log(&atom(1.0, 0.0, 0.0, 1.0), &e1, &f1), 0.0, 0.0);
    close(coefficient_log(&GroupAtom::new(Matrix::scalar(2, 3.0)).unwrap(), &e1, &f1), 3f64.ln(), 1e-15);
    close(coefficient_log(&atom(1.0, 1.0, 0.0, 1.0), &ProjPoint::basis(2, 1), &f1), 0.0, 1e-15);
    assert_eq!(coefficient_log(&atom(1.0, 0.0, 0.0, 1.0), &ProjPoint::basis(2, 1), &f1), f64::NEG_INFINITY);
}

fn matrix_strategy(d: usize) -> impl Strategy<Value = GroupAtom> {
    prop::collection::vec(-3.0f64..3.0, d * d).prop_filter_map("near singular", move |v| {
        let m = Matrix::new(d, v).ok()?;
        if m.det().abs() < 0.05 {
            return None;
        }
        GroupAtom::new(m).ok()
    })
}

fn point_strategy(d: usize) -> impl Strategy<Value = ProjPoint> {
    prop::collection::vec(-1.0f64..1.0, d)
        .prop_filter_map("short vector", |v| (v.iter().map(|x| x * x).sum::<f64>() > 1e-4).then(|| ProjPoint::new(&v).unwrap()))
}

fn rotation(d: usize, seed: &[f64]) -> Matrix {
    // Gram–Schmidt on a seeded frame
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        let mut v: Vec<f64> = (0..d).map(|j| seed[i * d + j] + if i == j { 2.0 } else { 0.0 }).collect();
        for c in &cols {
            let p: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        cols.push(v);
    }
    let mut data = vec![0.0; d * d];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..d {
            data[i * d + j] = c[i];
        }
    }
    Matrix::new(d, data).unwrap()
}

fn additive(g1: &GroupAtom, g2: &GroupAtom, x: &ProjPoint) -> Result<(), TestCaseError> {
    let g21 = GroupAtom::new(g2.matrix().mul(g1.matrix())).unwrap();
    let lhs = cocycle(&g21, x);
    let rhs = cocycle(g2, &act(g1, x)) + cocycle(g1, x);
    prop_assert!((lhs - rhs).abs() < 1e-10, "{} vs {}", lhs, rhs);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn cocycle_is_additive_d2(g1 in matrix_strategy(2), g2 in matrix_strategy(2), x in point_strategy(2)) {
        additive(&g1, &g2, &x)?;
    }

    #[test]
    fn cocycle_is_additive_d4(g1 in matrix_strategy(4), g2 in matrix_strategy(4), x in point_strategy(4)) {
        additive(&g1, &g2, &x)?;
    }

    #[test]
    fn distance_is_a_metric(x in point_strategy(3), y in point_strategy(3), z in point_strategy(3)) {
        let (xy, yz, xz) = (proj_distance(&x, &y), proj_distance(&y, &z), proj_distance(&x, &z));
        prop_assert!((0.0..=1.0).contains(&xy));
        prop_assert!((xy - proj_distance(&y, &x)).abs() < 1e-15);
        prop_assert!(xz <= xy + yz + 1e-12);
    }

    #[test]
    fn coefficient_splits_into_cocycle_and_distance(g in matrix_strategy(3), x in point_strategy(3), f in point_strategy(3)) {
        let y = DualPoint::new(f.coords()).unwrap();
        let c = coefficient_log(&g, &x, &y);
        let split = cocycle(&g, &x) + dual_pairing(&y, &act(&g, &x)).ln();
        prop_assume!(c.is_finite() && c > -20.0);
        prop_assert!((c - split).abs() < 1e-9, "{} vs {}", c, split);
    }

    #[test]
    fn cocycle_within_norm_bounds(g in matrix_strategy(2), x in point_strategy(2)) {
        let s = cocycle(&g, &x);
        prop_assert!(s.abs() <= g.big_n().ln() + 1e-12);
        prop_assert!(s <= g.norm().ln() + 1e-12 && s >= -g.inv_norm().ln() - 1e-12);
    }

    #[test]
    fn distance_is_orthogonally_invariant(seed in prop::collection::vec(-0.5f64..0.5, 9), x in point_strategy(3), w in point_strategy(3)) {
        let r = GroupAtom::new(rotation(3, &seed)).unwrap();
        let lhs = proj_distance(&act(&r, &x), &act(&r, &w));
        prop_assert!((lhs - proj_distance(&x, &w)).abs() < 1e-12);
    }
}
