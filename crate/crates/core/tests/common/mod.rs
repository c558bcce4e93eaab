#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use slope_screen::bench::{gen_dictionary, gen_observation, oscar_weights, DictKind};
use slope_screen::solver::{solve_with_screening, ScreenStrategy, SolveOptions};
use slope_screen::{Dictionary, ProblemInstance, Weights};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_weights(rng: &mut StdRng, n: usize) -> Weights {
    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    w[0] = w[0].max(0.05);
    Weights::new(w).unwrap()
}

pub fn random_dictionary(rng: &mut StdRng, m: usize, n: usize) -> Dictionary {
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    Dictionary::from_col_major(m, n, data).unwrap()
}

pub fn random_vector(rng: &mut StdRng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Small instance from the benchmark generators with OSCAR weights.
pub fn oscar_instance(kind: DictKind, m: usize, n: usize, w_last: f64, ratio: f64, seed: u64) -> ProblemInstance {
    let dict = gen_dictionary(kind, m, n, seed).unwrap();
    let y = gen_observation(m, seed).unwrap();
    ProblemInstance::with_lambda_ratio(dict, y, ratio, oscar_weights(n, w_last).unwrap()).unwrap()
}

/// Unscreened solve to the given gap; the oracle for zero sets.
pub fn reference_solution(p: &ProblemInstance, gap_tol: f64) -> Vec<f64> {
    let opts = SolveOptions {
        gap_tol,
        max_iters: 2_000_000,
        screen_strategy: ScreenStrategy::None,
        record_trace: false,
        ..SolveOptions::default()
    };
    let res = solve_with_screening(p, &opts).unwrap();
    assert!(res.gap <= gap_tol, "reference solve stopped at gap {}", res.gap);
    res.x
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `κ_{q,r}` with 1-based ranks, summed directly.
pub fn kappa(lambda: f64, w: &[f64], radius: f64, q: usize, r: usize) -> f64 {
    (r..=q).map(|k| lambda * w[k - 1] - radius).sum()
}

/// Whether the atom with sorted value `v_atom` passes the family test
/// against the remaining sorted values `others`, for every `q ≤ q_max`.
fn passes_family(v_atom: f64, others: &[f64], lambda: f64, w: &[f64], radius: f64, q_max: usize) -> bool {
    (1..=q_max).all(|q| {
        (1..=q).any(|r| {
            let bound: f64 = v_atom + (r..q).map(|k| others[k - 1]).sum::<f64>();
            bound < kappa(lambda, w, radius, q, r)
        })
    })
}

/// Per-rank pass flags of the reduced sequential test without early stop:
/// rank `ℓ` only faces `q ≤ ℓ`. Indexed by 0-based rank.
pub fn reduced_rank_passes(v: &[f64], lambda: f64, w: &[f64], radius: f64) -> Vec<bool> {
    (1..=v.len())
        .map(|l| passes_family(v[l - 1], &v[..l - 1], lambda, w, radius, l))
        .collect()
}

/// Per-rank pass flags of the per-atom test over every `q ≤ n` on the
/// dictionary with that atom removed.
pub fn unreduced_rank_passes(v: &[f64], lambda: f64, w: &[f64], radius: f64) -> Vec<bool> {
    let n = v.len();
    (0..n)
        .map(|l| {
            let others: Vec<f64> = v.iter().enumerate().filter(|(k, _)| *k != l).map(|(_, x)| *x).collect();
            passes_family(v[l], &others, lambda, w, radius, n)
        })
        .collect()
}

/// Ranks `n, n−1, …` that pass before the first failure (0-based ranks).
pub fn backward_suffix(passes: &[bool]) -> Vec<usize> {
    let mut out = Vec::new();
    for l in (0..passes.len()).rev() {
        if !passes[l] {
            break;
        }
        out.push(l);
    }
    out.reverse();
    out
}
