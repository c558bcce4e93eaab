use serde::{Deserialize, Serialize};

use super::{BenchRow, SolverKind};

/// One point of a performance profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub delta: f64,
    pub solver: SolverKind,
    /// Percentage of trials whose final gap is at most `delta`.
    pub rho: f64,
}

/// 49 log-spaced levels from 1e-14 to 1e-2.
pub fn default_delta_grid() -> Vec<f64> {
    (0..49).map(|k| 10f64.powf(-14.0 + k as f64 / 4.0)).collect()
}

/// `ρ(δ) = 100 · #{trials with final gap ≤ δ} / #trials`, per solver, in
/// order of the solvers' first appearance.
pub fn performance_profile(rows: &[BenchRow], deltas: &[f64]) -> Vec<ProfileRow> {
    let mut solvers: Vec<SolverKind> = Vec::new();
    for r in rows {
        if !solvers.contains(&r.solver) {
            solvers.push(r.solver);
        }
    }
    let mut out = Vec::with_capacity(deltas.len() * solvers.len());
    for &delta in deltas {
        for &solver in &solvers {
            let (total, hit) = rows
                .iter()
                .filter(|r| r.solver == solver)
                .fold((0usize, 0usize), |(t, h), r| (t + 1, h + usize::from(r.final_gap <= delta)));
            out.push(ProfileRow {
                delta,
                solver,
                rho: 100.0 * hit as f64 / total as f64,
            });
        }
    }
    out
}
