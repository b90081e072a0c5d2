use mrf_learn::linalg::Matrix;
use mrf_learn::regression::{
    aggregate_rows, predict_linear, solve_l1_regression, solve_l1_regression_with, L1Problem, PivotRule,
};
use mrf_learn::rng::RngStream;
use proptest::prelude::*;

mod common;
use common::{random_instance, vertex_oracle};

#[test]
fn matches_vertex_enumeration_on_fifty_instances() {
    for seed in 0..50 {
        let (phi, y, budget) = random_instance(seed);
        let expected = vertex_oracle(&phi, &y, budget);
        let p = L1Problem::new(Matrix::from_rows(&phi), y.clone(), budget);
        for rule in [PivotRule::DantzigBland, PivotRule::Bland] {
            let sol = solve_l1_regression_with(&p, rule).unwrap();
            assert!(
                (sol.objective - expected).abs() <= 1e-6,
                "seed {seed} {rule:?}: simplex {} vs oracle {expected}",
                sol.objective
            );
            assert!(sol.w.iter().map(|v| v.abs()).sum::<f64>() <= budget + 1e-9);
        }
    }
}

#[test]
fn realizable_column_gives_zero() {
    let mut r = RngStream::new(3, 3);
    let phi: Vec<Vec<f64>> = (0..10).map(|_| (0..5).map(|_| 2.0 * r.unit() - 1.0).collect()).collect();
    let y: Vec<f64> = phi.iter().map(|row| row[3]).collect();
    let sol = solve_l1_regression(&L1Problem::new(Matrix::from_rows(&phi), y, 1.5)).unwrap();
    assert!(sol.objective < 1e-9);
    assert!(sol.w.iter().map(|v| v.abs()).sum::<f64>() <= 1.5 + 1e-9);
}

#[test]
fn zero_budget_keeps_zero_weights() {
    let phi = Matrix::from_rows(&[vec![1.0, 0.5], vec![-0.2, 1.0], vec![0.0, 0.0]]);
    let sol = solve_l1_regression(&L1Problem::new(phi, vec![1.0, -1.0, 1.0], 0.0)).unwrap();
    assert_eq!(sol.w, vec![0.0, 0.0]);
    assert_eq!(sol.objective, 3.0);
}

#[test]
fn constant_labels_and_zero_columns() {
    let phi = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]]);
    let sol = solve_l1_regression(&L1Problem::new(phi, vec![1.0; 3], 4.0)).unwrap();
    assert!(sol.objective < 1e-12);
    assert_eq!(sol.w[0], 0.0);
    assert_eq!(sol.stats.cols, 1);
    assert_eq!(sol.stats.rows, 1);
}

#[test]
fn duplicate_rows_are_weighted() {
    let phi = Matrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]);
    let (m, y, c) = aggregate_rows(&phi, &[1.0, -1.0, 1.0], None);
    assert_eq!(m.rows(), 2);
    assert_eq!(y, vec![1.0, -1.0]);
    assert_eq!(c, vec![2.0, 1.0]);
    // Two votes for +1 beat one for -1: the median fit is w = 1.
    let sol = solve_l1_regression(&L1Problem::new(phi, vec![1.0, -1.0, 1.0], 5.0)).unwrap();
    assert!((sol.w[0] - 1.0).abs() < 1e-9);
    assert!((sol.objective - 2.0).abs() < 1e-9);
}

#[test]
fn predict_linear_examples() {
    assert_eq!(predict_linear(&[0.0, 0.0], &[0.3, -0.7]), 0.0);
    assert_eq!(predict_linear(&[0.0, 1.0], &[0.3, -0.7]), -0.7);
    let phi = Matrix::from_rows(&[vec![0.5, 1.0], vec![-1.0, 0.25]]);
    let y = vec![1.0, -1.0];
    let p = L1Problem::new(phi.clone(), y.clone(), 1.0);
    let sol = solve_l1_regression(&p).unwrap();
    let direct: f64 = (0..2).map(|i| (predict_linear(&sol.w, phi.row(i)) - y[i]).abs()).sum();
    assert!((direct - sol.objective).abs() < 1e-12);
}

fn instance() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, f64)> {
    (1usize..10, 1usize..7).prop_flat_map(|(s, f)| {
        (
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, f), s),
            prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1.0 } else { -1.0 }), s),
            0.0f64..5.0,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn budget_is_respected((phi, y, budget) in instance()) {
        let sol = solve_l1_regression(&L1Problem::new(Matrix::from_rows(&phi), y, budget)).unwrap();
        prop_assert!(sol.w.iter().map(|v| v.abs()).sum::<f64>() <= budget + 1e-9);
    }

    #[test]
    fn scaling_is_equivariant((phi, y, budget) in instance(), c in 0.1f64..10.0) {
        let m = Matrix::from_rows(&phi);
        let a = solve_l1_regression(&L1Problem::new(m.clone(), y.clone(), budget)).unwrap();
        let ys: Vec<f64> = y.iter().map(|v| c * v).collect();
        let b = solve_l1_regression(&L1Problem::new(m, ys, c * budget)).unwrap();
        prop_assert!((b.objective - c * a.objective).abs() <= 1e-8 * c.max(1.0) * (1.0 + a.objective));
    }

    #[test]
    fn single_weight_perturbations_do_not_improve((phi, y, budget) in instance()) {
        let p = L1Problem::new(Matrix::from_rows(&phi), y, budget);
        let sol = solve_l1_regression(&p).unwrap();
        for j in 0..sol.w.len() {
            for step in [1e-4, -1e-4] {
                let mut w = sol.w.clone();
                w[j] += step;
                let l1: f64 = w.iter().map(|v| v.abs()).sum();
                if l1 > budget {
                    if l1 == 0.0 { continue; }
                    w.iter_mut().for_each(|v| *v *= budget / l1);
                }
                prop_assert!(p.objective(&w) >= sol.objective - 1e-8);
            }
        }
    }
}
