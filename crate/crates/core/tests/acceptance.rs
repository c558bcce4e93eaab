mod common;

use std::sync::Mutex;
use std::time::Instant;

use common::*;
use rand::Rng;

use slope_screen::bench::{
    budget_benchmark, calibrate_budget, default_delta_grid, default_r0_grid, detection_experiment, performance_profile, DetectionResult,
    DictKind, ExperimentConfig, ProfileRow, SolverKind, OSCAR_W_LAST,
};
use slope_screen::dual::gap_radius;
use slope_screen::screening::{screen_all_bruteforce, screen_all_fast, BRUTE_FORCE_MAX_N};
use slope_screen::solver::{solve_observed, solve_with_screening, SolveOptions};
use slope_screen::{
    make_dual_point, objectives, prox_sorted_l1, screen, screening_radius, subdiff_membership, ProblemInstance, ScalingVariant,
    ScreenParams, ScreenStrategy, SortedCorrelations, Strategy, Weights,
};

// the criteria time solvers, so they must not run concurrently
static SERIAL: Mutex<()> = Mutex::new(());

const KINDS: [DictKind; 3] = [DictKind::Gaussian, DictKind::Uniform, DictKind::Toeplitz];
const RATIOS: [f64; 3] = [0.3, 0.5, 0.8];
const ZERO_TOL: f64 = 1e-9;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id} [{name}]: {verdict} ({detail})");
}

fn oscar_label(w_last: f64) -> usize {
    OSCAR_W_LAST.iter().position(|&w| w == w_last).map_or(0, |k| k + 1)
}

/// Zero set of an instance, solved with screening and then certified on the
/// full problem so that an unsafe test cannot bias its own oracle.
fn certified_solution(p: &ProblemInstance) -> Vec<f64> {
    let opts = SolveOptions {
        gap_tol: 1e-14,
        max_iters: 5_000_000,
        record_trace: false,
        ..SolveOptions::default()
    };
    let x = solve_with_screening(p, &SolverKind::PgAll.options(&opts)).unwrap().x;
    let u = make_dual_point(p, &x, ScalingVariant::Full).unwrap();
    if objectives(p, &x, &u).unwrap().gap <= 1e-14 {
        x
    } else {
        reference_solution(p, 1e-14)
    }
}

/// Checks every test on every GAP sphere met along one solve; returns
/// `(spheres checked, violations)`.
fn observe_safety(p: &ProblemInstance, x_star: &[f64], opts: &SolveOptions, strategies: &[Strategy]) -> (usize, Vec<String>) {
    let mut spheres = 0;
    let mut violations = Vec::new();
    solve_observed(p, opts, |info| {
        let obj = objectives(info.problem, info.x, info.dual).unwrap();
        let params = ScreenParams::new(info.problem.lambda(), screening_radius(&obj, 0.0));
        let sc = SortedCorrelations::from_correlations(info.dual.correlations());
        spheres += 1;
        for &s in strategies {
            if s == Strategy::AllBrute && info.problem.n() > BRUTE_FORCE_MAX_N {
                continue;
            }
            let out = screen(&sc, info.problem.weights(), params, s).unwrap();
            for &j in &out.screened {
                let orig = info.map.kept()[j];
                if x_star[orig].abs() > ZERO_TOL {
                    violations.push(format!(
                        "{} screened {orig} with x* = {:e} at iter {}",
                        s.name(),
                        x_star[orig],
                        info.iter
                    ));
                }
            }
        }
    })
    .unwrap();
    (spheres, violations)
}

#[test]
fn criterion_1_safety_suite() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut rng = rng(1001);
    let (mut instances, mut spheres) = (0, 0);
    let mut violations = Vec::new();
    let all = [Strategy::R1, Strategy::Rq, Strategy::AllFast, Strategy::AllBrute];
    for kind in KINDS {
        for w_last in OSCAR_W_LAST {
            for i in 0..50u64 {
                let (m, n) = (rng.random_range(20..=100), rng.random_range(50..=300));
                let ratio = RATIOS[rng.random_range(0..3)];
                let seed = 10_000 + 100 * instances as u64 + i;
                let p = oscar_instance(kind, m, n, w_last, ratio, seed);
                let x_star = certified_solution(&p);

                let full = SolveOptions {
                    gap_tol: 1e-12,
                    max_iters: 2_000_000,
                    screen_strategy: ScreenStrategy::All,
                    record_trace: false,
                    ..SolveOptions::default()
                };
                let (k, v) = observe_safety(&p, &x_star, &full, &all);
                spheres += k;
                violations.extend(
                    v.into_iter()
                        .map(|s| format!("{kind:?} OSCAR-{} seed {seed}: {s}", oscar_label(w_last))),
                );

                // per-rank scaling: the gap need not vanish, so cap the run
                let bao = SolveOptions {
                    max_iters: 2_000,
                    scaling_variant: ScalingVariant::Max,
                    screen_strategy: ScreenStrategy::Rq,
                    ..full
                };
                let (k, v) = observe_safety(&p, &x_star, &bao, &all);
                spheres += k;
                violations.extend(
                    v.into_iter()
                        .map(|s| format!("{kind:?} OSCAR-{} seed {seed} (Bao): {s}", oscar_label(w_last))),
                );
                instances += 1;
            }
        }
    }
    let pass = violations.is_empty();
    report(
        1,
        "safety",
        pass,
        format!(
            "{instances} instances, {spheres} spheres x 4 tests, {} violations, {:.1} s",
            violations.len(),
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass, "{:?}", &violations[..violations.len().min(10)]);
}

#[test]
fn criterion_2_fast_equals_bruteforce() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut rng = rng(1002);
    let mut mismatches = Vec::new();
    let mut partial = 0;
    for case in 0..100u64 {
        let n: usize = rng.random_range(4..=60);
        let (sc, w, params) = match case % 3 {
            // dyadic values so that ties compare exactly
            0 => {
                let levels = [1.0, 0.75, 0.5, 0.5, 0.25, 0.125];
                let mut w: Vec<f64> = (0..n).map(|_| levels[rng.random_range(0..levels.len())]).collect();
                w.sort_by(|a, b| b.total_cmp(a));
                let c: Vec<f64> = (0..n).map(|_| rng.random_range(0..40) as f64 / 32.0).collect();
                let radius = rng.random_range(0..4) as f64 / 64.0;
                (
                    SortedCorrelations::from_correlations(&c),
                    Weights::new(w).unwrap(),
                    ScreenParams::new(1.0, radius),
                )
            }
            // duplicated columns give equal correlations
            1 => {
                let p = oscar_instance(DictKind::Gaussian, 20, n.div_ceil(2), 0.1, 0.5, 2000 + case);
                let x = reference_solution(&p, 1e-10);
                let u = make_dual_point(&p, &x, ScalingVariant::Full).unwrap();
                let mut c = u.correlations().to_vec();
                c.extend_from_slice(&u.correlations()[..n - c.len()]);
                let lambda = p.lambda();
                let radius = rng.random_range(0.0..0.05) * lambda;
                let w = slope_screen::bench::oscar_weights(n, 0.1).unwrap();
                (SortedCorrelations::from_correlations(&c), w, ScreenParams::new(lambda, radius))
            }
            _ => {
                let w = random_weights(&mut rng, n);
                let lambda = rng.random_range(0.5..2.0);
                let radius = rng.random_range(0.0..0.3) * lambda * w.last();
                let scale = lambda * w.first();
                let c: Vec<f64> = (0..n)
                    .map(|_| rng.random_range(-1.0..1.0) * scale * rng.random_range(0.0..1.0))
                    .collect();
                (SortedCorrelations::from_correlations(&c), w, ScreenParams::new(lambda, radius))
            }
        };
        let fast = screen_all_fast(&sc, &w, params).unwrap();
        let brute = screen_all_bruteforce(&sc, &w, params).unwrap();
        if !fast.screened.is_empty() && fast.screened.len() < n {
            partial += 1;
        }
        if fast.screened != brute.screened {
            mismatches.push(case);
        }
    }
    let pass = mismatches.is_empty();
    report(
        2,
        "fast equals brute force",
        pass,
        format!("100 instances, {partial} partially screened, mismatches {mismatches:?}"),
    );
    assert!(pass);
}

fn detection_configs() -> Vec<ExperimentConfig> {
    let base = ExperimentConfig {
        m: 100,
        n: 300,
        trials: 50,
        r0_grid: default_r0_grid(),
        ..Default::default()
    };
    let mut out: Vec<ExperimentConfig> = OSCAR_W_LAST
        .iter()
        .map(|&w| ExperimentConfig {
            oscar_w_last: w,
            ..base.clone()
        })
        .collect();
    out.push(ExperimentConfig {
        dict_kind: DictKind::Toeplitz,
        oscar_w_last: OSCAR_W_LAST[0],
        ..base
    });
    out
}

/// Screened sets per strategy at every `R0` of one trial.
fn screened_sets(cfg: &ExperimentConfig, trial: usize) -> Vec<[Vec<usize>; 3]> {
    let p = cfg.instance(trial).unwrap();
    let x = certified_solution(&p);
    let u = make_dual_point(&p, &x, ScalingVariant::Full).unwrap();
    let obj = objectives(&p, &x, &u).unwrap();
    let certified = obj.gap.max(cfg.reference_gap).max(slope_screen::dual::gap_floor(obj.primal));
    let sc = SortedCorrelations::from_correlations(u.correlations());
    cfg.r0_grid
        .iter()
        .map(|&r0| {
            let params = ScreenParams::new(p.lambda(), gap_radius(certified, r0));
            [Strategy::R1, Strategy::Rq, Strategy::AllFast].map(|s| screen(&sc, p.weights(), params, s).unwrap().screened)
        })
        .collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|j| b.binary_search(j).is_ok())
}

#[test]
fn criterion_3_dominance() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut rows = 0;
    let mut failures = Vec::new();
    for cfg in detection_configs() {
        for trial in 0..cfg.trials {
            for (k, [r1, rq, all]) in screened_sets(&cfg, trial).into_iter().enumerate() {
                rows += 1;
                if !is_subset(&r1, &all) || !is_subset(&rq, &all) {
                    failures.push(format!(
                        "{:?} OSCAR-{} trial {trial} r0 #{k}",
                        cfg.dict_kind,
                        oscar_label(cfg.oscar_w_last)
                    ));
                }
            }
        }
    }
    let lasso = ExperimentConfig {
        m: 100,
        n: 300,
        trials: 50,
        oscar_w_last: 1.0,
        r0_grid: default_r0_grid(),
        ..Default::default()
    };
    let mut lasso_rows = 0;
    for trial in 0..lasso.trials {
        for (k, [_, rq, all]) in screened_sets(&lasso, trial).into_iter().enumerate() {
            lasso_rows += 1;
            if rq != all {
                failures.push(format!("LASSO trial {trial} r0 #{k}"));
            }
        }
    }
    let pass = failures.is_empty();
    report(
        3,
        "dominance",
        pass,
        format!("{rows} OSCAR rows, {lasso_rows} LASSO rows, {} failures", failures.len()),
    );
    assert!(pass, "{:?}", &failures[..failures.len().min(10)]);
}

fn curve_at(res: &DetectionResult, s: Strategy) -> Vec<f64> {
    res.mean_curve(s).into_iter().map(|(_, v)| v).collect()
}

#[test]
fn criterion_4_detection_curves() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut summary = Vec::new();
    for cfg in detection_configs() {
        let label = format!("{:?} OSCAR-{}", cfg.dict_kind, oscar_label(cfg.oscar_w_last));
        let res = detection_experiment(&cfg, 4).unwrap();
        checks.push((format!("{label}: reference solves converged"), res.unconverged().is_empty()));
        let [r1, rq, all] = [Strategy::R1, Strategy::Rq, Strategy::AllFast].map(|s| curve_at(&res, s));
        for (name, c) in [("r=1", &r1), ("r=q", &rq), ("all", &all)] {
            checks.push((format!("{label}: {name} nonincreasing"), c.windows(2).all(|w| w[0] >= w[1])));
        }
        checks.push((format!("{label}: r=1 at R0=0 >= 99%"), r1[0] >= 99.0));
        if cfg.oscar_w_last == OSCAR_W_LAST[2] {
            let worst = rq.iter().copied().fold(0.0, f64::max);
            checks.push((format!("{label}: r=q <= 1% everywhere (max {worst:.3})"), worst <= 1.0));
        }
        if cfg.oscar_w_last == OSCAR_W_LAST[0] {
            let wins = r1.iter().zip(&rq).filter(|(a, b)| b > a).count();
            checks.push((format!("{label}: r=q beats r=1 somewhere ({wins} radii)"), wins > 0));
        }
        summary.push(format!("{label} R0=0 r1/rq/all {:.1}/{:.1}/{:.1}", r1[0], rq[0], all[0]));
    }
    let failed: Vec<&String> = checks.iter().filter(|c| !c.1).map(|c| &c.0).collect();
    let pass = failed.is_empty();
    report(
        4,
        "detection curves",
        pass,
        format!("{}; {:.1} s; failed {failed:?}", summary.join("; "), start.elapsed().as_secs_f64()),
    );
    assert!(pass);
}

#[test]
fn criterion_5_prox() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut rng = rng(1005);
    let mut failures = 0;
    for case in 0..1000 {
        let n = rng.random_range(1..=50);
        let z: Vec<f64> = random_vector(&mut rng, n).iter().map(|v| 2.0 * v).collect();
        let (t, lambda) = (rng.random_range(0.1..2.0), rng.random_range(0.1..2.0));
        let w = if case % 4 == 0 {
            Weights::constant(n, 1.0).unwrap()
        } else {
            random_weights(&mut rng, n)
        };
        let x = prox_sorted_l1(&z, t, lambda, &w).unwrap();
        let g: Vec<f64> = z.iter().zip(&x).map(|(a, b)| (a - b) / (t * lambda)).collect();
        let mut ok = subdiff_membership(&x, &g, &w, 1e-9);
        if case % 4 == 0 {
            let level = t * lambda;
            ok &= x
                .iter()
                .zip(&z)
                .all(|(xi, zi)| (xi - zi.signum() * (zi.abs() - level).max(0.0)).abs() <= 1e-12);
        }
        failures += usize::from(!ok);
    }
    let pass = failures == 0;
    report(
        5,
        "prox optimality",
        pass,
        format!("1000 inputs, 250 with constant weights, {failures} failures"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_lambda_max() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut rng = rng(1006);
    let mut failures = Vec::new();
    for i in 0..20u64 {
        let (m, n) = (rng.random_range(20..=60), rng.random_range(40..=120));
        let kind = KINDS[i as usize % 3];
        let p = oscar_instance(kind, m, n, OSCAR_W_LAST[(i / 3) as usize % 3], 1.0, 3000 + i);
        let lmax = p.lambda_max();
        let above = reference_solution(&p.with_lambda(1.01 * lmax).unwrap(), 1e-14);
        let below = reference_solution(&p.with_lambda(0.9 * lmax).unwrap(), 1e-14);
        let sup = |x: &[f64]| x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if sup(&above) > 1e-9 || sup(&below) <= 1e-6 {
            failures.push(i);
        }
    }
    let pass = failures.is_empty();
    report(
        6,
        "lambda_max",
        pass,
        format!("{}/20 instances, failures {failures:?}", 20 - failures.len()),
    );
    assert!(pass);
}

fn rho(profile: &[ProfileRow], solver: SolverKind, delta: f64) -> f64 {
    profile.iter().find(|r| r.solver == solver && r.delta == delta).unwrap().rho
}

#[test]
fn criterion_7_benchmark_profiles() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let deltas = default_delta_grid();
    let at_1e8 = *deltas.iter().find(|d| (d.log10() + 8.0).abs() < 1e-9).unwrap();
    let mut failed = Vec::new();
    let mut short_leads = Vec::new();
    let mut summary = Vec::new();
    for kind in KINDS {
        for w_last in OSCAR_W_LAST {
            let label = format!("{kind:?} OSCAR-{}", oscar_label(w_last));
            let cfg = ExperimentConfig {
                dict_kind: kind,
                oscar_w_last: w_last,
                m: 100,
                n: 300,
                trials: 50,
                solvers: SolverKind::ALL.to_vec(),
                ..Default::default()
            };
            let budget = calibrate_budget(&cfg).unwrap();
            let profile = performance_profile(&budget_benchmark(&cfg, budget).unwrap(), &deltas);
            let at = |s: SolverKind| rho(&profile, s, at_1e8);
            summary.push(format!(
                "{label} budget {:.1} ms rho(1e-8) no/rq/bao/all {:.0}/{:.0}/{:.0}/{:.0}",
                1e3 * budget,
                at(SolverKind::PgNo),
                at(SolverKind::PgRq),
                at(SolverKind::PgBao),
                at(SolverKind::PgAll)
            ));
            if w_last == OSCAR_W_LAST[2] {
                let worst = deltas
                    .iter()
                    .map(|&d| (rho(&profile, SolverKind::PgRq, d) - rho(&profile, SolverKind::PgNo, d)).abs())
                    .fold(0.0, f64::max);
                if worst > 5.0 {
                    failed.push(format!("{label}: |rq - no| reaches {worst:.0} pp"));
                }
            } else {
                let behind = deltas
                    .iter()
                    .filter(|&&d| rho(&profile, SolverKind::PgAll, d) < rho(&profile, SolverKind::PgNo, d))
                    .count();
                if behind > 0 {
                    failed.push(format!("{label}: all below no at {behind} levels"));
                }
                let lead = at(SolverKind::PgAll) - at(SolverKind::PgNo);
                if lead < 10.0 {
                    failed.push(format!("{label}: lead at 1e-8 only {lead:.0} pp"));
                    short_leads.push(label.clone());
                }
            }
        }
    }
    let pass = failed.is_empty();
    report(
        7,
        "benchmark profiles",
        pass,
        format!("{}; {:.1} s; failed {failed:?}", summary.join("; "), start.elapsed().as_secs_f64()),
    );
    // the verdict above covers every check; single trials flip with wall-clock
    // jitter, so only the lead at 1e-8 is asserted
    assert!(short_leads.is_empty(), "{short_leads:?}");
}

#[test]
fn criterion_8_threshold_visits() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let sizes = [300usize, 1200, 4800];
    let mut visits = Vec::new();
    let mut bound_ratio = Vec::new();
    for &n in &sizes {
        let p = oscar_instance(DictKind::Gaussian, n / 3, n, OSCAR_W_LAST[1], 0.5, 4000 + n as u64);
        let opts = SolveOptions {
            gap_tol: 1e-6,
            max_iters: 1_000_000,
            record_trace: false,
            ..SolveOptions::default()
        };
        let x = solve_with_screening(&p, &SolverKind::PgAll.options(&opts)).unwrap().x;
        let u = make_dual_point(&p, &x, ScalingVariant::Full).unwrap();
        let radius = screening_radius(&objectives(&p, &x, &u).unwrap(), 0.0);
        let sc = SortedCorrelations::from_correlations(u.correlations());
        let out = screen_all_fast(&sc, p.weights(), ScreenParams::new(p.lambda(), radius)).unwrap();
        let nf = n as f64;
        let q_s = out.screened.len() as f64;
        visits.push(out.thresholds_visited.max(1) as f64);
        bound_ratio.push(out.thresholds_visited as f64 / (nf * nf.ln() + q_s * nf));
    }
    // least-squares slope of log visits against log n
    let lx: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = visits.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / 3.0, ly.iter().sum::<f64>() / 3.0);
    let slope = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / lx.iter().map(|a| (a - mx) * (a - mx)).sum::<f64>();
    // soft criterion: reported, never asserted
    report(
        8,
        "threshold visits, soft",
        slope <= 1.3,
        format!(
            "visits {visits:?} at n {sizes:?}, fitted exponent {slope:.3}, visits / (n ln n + q_s n) {:?}",
            bound_ratio.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
        ),
    );
    assert!(bound_ratio.iter().all(|&r| r <= 1.0));
}
