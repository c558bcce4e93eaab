mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use slope_screen::{dual_norm, prox_sorted_l1, slope_norm, subdiff_membership, Weights};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Rearrangement inequality: the sorted pairing maximizes `Σ w_k |x_π(k)|`.
fn slope_norm_by_permutations(x: &[f64], w: &[f64]) -> f64 {
    permutations(x.len())
        .iter()
        .map(|p| p.iter().zip(w).map(|(&j, wk)| wk * x[j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn prox_objective(x: &[f64], z: &[f64], scale: f64, w: &Weights) -> f64 {
    let fit: f64 = x.iter().zip(z).map(|(a, b)| 0.5 * (a - b) * (a - b)).sum();
    fit + scale * slope_norm(x, w).unwrap()
}

#[test]
fn examples() {
    let w = Weights::new(vec![2.0, 1.0, 0.5]).unwrap();
    assert_eq!(slope_norm(&[3.0, -1.0, 2.0], &w).unwrap(), 8.5);
    assert_eq!(slope_norm(&[0.0; 3], &w).unwrap(), 0.0);
    assert!(slope_norm(&[1.0], &w).is_err());
    assert_eq!(dual_norm(&[1.0, 1.0], &Weights::new(vec![1.0, 1.0]).unwrap()).unwrap(), 1.0);
    assert_eq!(dual_norm(&[1.0, 1.0], &Weights::new(vec![1.0, 0.0]).unwrap()).unwrap(), 2.0);
}

#[test]
fn norm_matches_rearrangement_oracle() {
    let mut rng = rng(40);
    for _ in 0..200 {
        let n = rng.random_range(1..=6);
        let x = random_vector(&mut rng, n);
        let w = random_weights(&mut rng, n);
        let expected = slope_norm_by_permutations(&x, w.as_slice());
        assert!((slope_norm(&x, &w).unwrap() - expected).abs() <= 1e-12);
    }
}

#[test]
fn unit_weights_give_l1() {
    let mut rng = rng(41);
    for _ in 0..100 {
        let n = rng.random_range(1..=50);
        let x = random_vector(&mut rng, n);
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        assert!((slope_norm(&x, &Weights::constant(n, 1.0).unwrap()).unwrap() - l1).abs() <= 1e-12);
    }
}

#[test]
fn prox_is_optimal_on_a_thousand_inputs() {
    let mut rng = rng(42);
    for case in 0..1000 {
        let n = rng.random_range(1..=40);
        let z: Vec<f64> = random_vector(&mut rng, n).iter().map(|v| 2.0 * v).collect();
        let w = random_weights(&mut rng, n);
        let (t, lambda) = (rng.random_range(0.1..2.0), rng.random_range(0.1..2.0));
        let x = prox_sorted_l1(&z, t, lambda, &w).unwrap();
        let g: Vec<f64> = z.iter().zip(&x).map(|(a, b)| (a - b) / (t * lambda)).collect();
        assert!(subdiff_membership(&x, &g, &w, 1e-9), "case {case}");

        // no random perturbation does better
        let best = prox_objective(&x, &z, t * lambda, &w);
        for _ in 0..5 {
            let y: Vec<f64> = x.iter().map(|v| v + 1e-3 * rng.random_range(-1.0..1.0)).collect();
            assert!(prox_objective(&y, &z, t * lambda, &w) >= best - 1e-12);
        }
    }
}

#[test]
fn prox_pooling_example() {
    let w = Weights::new(vec![0.5, 0.1]).unwrap();
    let x = prox_sorted_l1(&[1.0, 0.9], 1.0, 1.0, &w).unwrap();
    assert!((x[0] - 0.65).abs() < 1e-12 && (x[1] - 0.65).abs() < 1e-12);
}

proptest! {
    #[test]
    fn constant_weights_soft_threshold(z in prop::collection::vec(-3.0f64..3.0, 1..50), level in 0.01f64..2.0) {
        let w = Weights::constant(z.len(), 1.0).unwrap();
        let x = prox_sorted_l1(&z, 1.0, level, &w).unwrap();
        for (xi, zi) in x.iter().zip(&z) {
            let soft = zi.signum() * (zi.abs() - level).max(0.0);
            prop_assert!((xi - soft).abs() <= 1e-12);
        }
    }

    #[test]
    fn weak_duality_of_norms(
        x in prop::collection::vec(-3.0f64..3.0, 1..30),
        g in prop::collection::vec(-3.0f64..3.0, 30),
        raw_w in prop::collection::vec(0.01f64..1.0, 30),
    ) {
        let n = x.len();
        let mut w = raw_w[..n].to_vec();
        w.sort_by(|a, b| b.total_cmp(a));
        let w = Weights::new(w).unwrap();
        let ip: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
        prop_assert!(ip <= dual_norm(&g[..n], &w).unwrap() * slope_norm(&x, &w).unwrap() + 1e-10);
    }
}
