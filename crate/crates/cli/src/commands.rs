use std::path::Path;

use serde_json::{json, Value};

use slope_screen::bench::{
    budget_benchmark, calibrate_budget, default_delta_grid, detection_experiment, gen_dictionary_with_width, gen_observation,
    oscar_weights, performance_profile, read_bench_csv, write_bench_csv, write_detection_csv, write_profile_csv, ExperimentConfig,
};
use slope_screen::io::{read_matrix, read_vector, write_atomic, write_matrix, write_vector};
use slope_screen::solver::{solve_observed, SolveReport};
use slope_screen::{
    make_dual_point, objectives, screen, screening_radius, sort_correlations, Dictionary, Error, ProblemInstance, Result, ScreenParams,
    SolveOptions, Weights,
};

use crate::{BenchArgs, Cli, Command, DetectArgs, ExperimentArgs, GenArgs, InstanceArgs, ProfileArgs, ScreenArgs, SolveArgs};

const THREADS_VAR: &str = "SLOPE_SCREEN_THREADS";

/// Runs one subcommand and returns its one-line JSON summary.
pub fn run(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Gen(a) => gen(cli, a),
        Command::Solve(a) => solve(cli, a),
        Command::Screen(a) => screen_cmd(cli, a),
        Command::Detect(a) => detect(cli, a),
        Command::Bench(a) => bench(cli, a),
        Command::Profile(a) => profile(cli, a),
    }
}

fn seed(cli: &Cli) -> u64 {
    cli.seed.unwrap_or(0)
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<Value> {
    check_output(&a.dict)?;
    check_output(&a.obs)?;
    let width = a.toeplitz_width.unwrap_or_else(|| slope_screen::bench::default_toeplitz_width(a.m));
    let dict = gen_dictionary_with_width(a.kind, a.m, a.n, seed(cli), width)?;
    let y = gen_observation(a.m, seed(cli))?;
    write_matrix(&a.dict, a.m, a.n, &dict.to_row_major())?;
    write_vector(&a.obs, &y)?;
    Ok(json!({
        "command": "gen",
        "seed": seed(cli),
        "kind": a.kind,
        "m": a.m,
        "n": a.n,
        "dict": a.dict,
        "obs": a.obs,
    }))
}

fn check_readable(path: &Path) -> Result<()> {
    std::fs::metadata(path).map(|_| ()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_instance(a: &InstanceArgs) -> Result<ProblemInstance> {
    for path in [Some(&a.dict), Some(&a.obs), a.weights_file.as_ref()].into_iter().flatten() {
        check_readable(path)?;
    }
    let (m, n, rows) = read_matrix(&a.dict)?;
    let dict = Dictionary::from_row_major(m, n, &rows)?;
    let y = read_vector(&a.obs)?;
    let weights = match &a.weights_file {
        Some(path) => Weights::new(read_vector(path)?)?,
        None => oscar_weights(n, a.oscar_wlast.unwrap_or(0.1))?,
    };
    match a.lambda {
        Some(lambda) => ProblemInstance::new(dict, y, lambda, weights),
        None => ProblemInstance::with_lambda_ratio(dict, y, a.lambda_ratio, weights),
    }
}

fn check_output(path: &Path) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    if dir.is_dir() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("output directory {} does not exist", dir.display())))
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

fn solve(cli: &Cli, a: &SolveArgs) -> Result<Value> {
    check_output(&a.out)?;
    let p = load_instance(&a.instance)?;
    let opts = SolveOptions {
        gap_tol: a.gap_tol,
        max_iters: a.max_iters,
        time_budget: a.time_budget,
        screen_strategy: a.screen,
        screen_every: a.screen_every,
        scaling_variant: a.scaling,
        restart_on_reduction: a.restart_on_reduction,
        ..SolveOptions::default()
    };
    let result = solve_observed(&p, &opts, |info| {
        if cli.verbose {
            eprintln!(
                "iter {} gap {:.3e} dim {} screened {}",
                info.iter,
                info.gap,
                info.problem.n(),
                info.newly_screened.len()
            );
        }
    })?;
    let report: SolveReport = result.report();
    write_json(&a.out, &report)?;
    Ok(json!({
        "command": "solve",
        "seed": seed(cli),
        "lambda": p.lambda(),
        "gap": result.gap,
        "iterations": result.iterations,
        "exit": result.exit,
        "screened": result.screened.len(),
        "wall_time_s": result.wall_time_s,
        "out": a.out,
    }))
}

fn screen_cmd(cli: &Cli, a: &ScreenArgs) -> Result<Value> {
    if let Some(out) = &a.out {
        check_output(out)?;
    }
    let p = load_instance(&a.instance)?;
    let x = match (&a.x, &a.result) {
        (Some(path), _) => {
            check_readable(path)?;
            read_vector(path)?
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str::<SolveReport>(&text)?.x
        }
        (None, None) => return Err(Error::InvalidArgument("an iterate is required: pass --x or --result".into())),
    };
    if !(a.r0 >= 0.0) {
        return Err(Error::InvalidArgument(format!("--r0 must be nonnegative, got {}", a.r0)));
    }
    let u = make_dual_point(&p, &x, a.scaling)?;
    let obj = objectives(&p, &x, &u)?;
    let radius = screening_radius(&obj, a.r0);
    let sc = sort_correlations(p.dict(), u.u())?;
    let report = screen(&sc, p.weights(), ScreenParams::new(p.lambda(), radius), a.strategy)?.report();
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    Ok(json!({
        "command": "screen",
        "seed": seed(cli),
        "strategy": report.strategy,
        "gap": obj.gap,
        "radius": report.radius,
        "screened": report.screened.len(),
        "n": report.n,
        "out": a.out,
    }))
}

fn experiment_config(cli: &Cli, a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(kind) = a.kind {
        cfg.dict_kind = kind;
    }
    if let Some(m) = a.m {
        cfg.m = m;
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(w) = a.oscar_wlast {
        cfg.oscar_w_last = w;
    }
    if let Some(r) = a.lambda_ratio {
        cfg.lambda_ratio = r;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `requested`, capped by the environment variable when it is set.
fn worker_count(requested: usize) -> Result<usize> {
    let cap = match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|c| *c > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?,
        Err(_) => usize::MAX,
    };
    Ok(requested.max(1).min(cap))
}

fn detect(cli: &Cli, a: &DetectArgs) -> Result<Value> {
    check_output(&a.out)?;
    let cfg = experiment_config(cli, &a.experiment)?;
    let jobs = worker_count(a.jobs)?;
    let res = detection_experiment(&cfg, jobs)?;
    write_detection_csv(&a.out, &res.rows())?;
    Ok(json!({
        "command": "detect",
        "seed": cfg.master_seed,
        "trials": cfg.trials,
        "jobs": jobs,
        "skipped": res.skipped(),
        "unconverged": res.unconverged(),
        "out": a.out,
    }))
}

fn bench(cli: &Cli, a: &BenchArgs) -> Result<Value> {
    check_output(&a.out)?;
    if let Some(p) = &a.profile_out {
        check_output(p)?;
    }
    if a.jobs.is_some() {
        eprintln!("warning: bench ignores --jobs; timed runs are serialized");
    }
    let mut cfg = experiment_config(cli, &a.experiment)?;
    if let Some(b) = a.budget {
        cfg.time_budget_s = Some(b);
    }
    cfg.validate()?;
    let budget = match cfg.time_budget_s {
        Some(b) => b,
        None => calibrate_budget(&cfg)?,
    };
    let rows = budget_benchmark(&cfg, budget)?;
    write_bench_csv(&a.out, &rows)?;
    if let Some(path) = &a.profile_out {
        write_profile_csv(path, &performance_profile(&rows, &default_delta_grid()))?;
    }
    Ok(json!({
        "command": "bench",
        "seed": cfg.master_seed,
        "trials": cfg.trials,
        "budget_s": budget,
        "out": a.out,
        "profile_out": a.profile_out,
    }))
}

fn profile(cli: &Cli, a: &ProfileArgs) -> Result<Value> {
    check_readable(&a.input)?;
    check_output(&a.out)?;
    let deltas = a.deltas.clone().unwrap_or_else(default_delta_grid);
    if deltas.iter().any(|d| !(*d >= 0.0)) {
        return Err(Error::InvalidArgument("deltas must be nonnegative".into()));
    }
    let rows = read_bench_csv(&a.input)?;
    let prof = performance_profile(&rows, &deltas);
    write_profile_csv(&a.out, &prof)?;
    Ok(json!({
        "command": "profile",
        "seed": seed(cli),
        "rows": prof.len(),
        "out": a.out,
    }))
}
