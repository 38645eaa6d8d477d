//! Penalty-based successive convex approximation scheduler.
//!
//! The cardinality objective is relaxed through per-user indicators
//! `κ_k ∈ [0,1]` whose binariness is enforced by the difference-of-convex
//! penalty `g(κ) − h(κ)` with weight μ. Each iteration keeps `g`, replaces
//! `h` and the quadratic-over-affine SINR bound by their first-order
//! expansions at the previous iterate, and solves the resulting convex
//! subproblem. The loop stops once the relative objective change falls
//! below δ; the relaxed indicators are then rounded and the rounded set is
//! re-verified with the power-minimization oracle so the returned solution
//! always respects the rate and power constraints.
//!
//! An optional tuning pass restarts the loop with the beam of one stuck
//! user (small κ, non-negligible beam power) zeroed out, reclaiming the
//! power it wasted; the best run wins.

use crate::channel::{inner, sinr, ChannelRealization};
use crate::conic::{build_sca_subproblem, min_power_feasible, solve, ConicStatus};
use crate::error::{Error, Result};
use crate::fbl::{min_sinr, rate, FblParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tolerance on the per-iteration objective decrease and on the final
/// feasibility margins.
const MONOTONE_TOL: f64 = 1e-6;

/// Algorithm parameters. Defaults follow the reference configuration:
/// μ = 0.05, δ = 10⁻³.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaConfig {
    pub mu: f64,
    /// Relative-objective stopping threshold.
    pub delta: f64,
    pub max_iters: usize,
    /// κ values at or above this round to "scheduled".
    pub round_threshold: f64,
    pub tuning_enabled: bool,
    /// Tuning rounds cap; `None` means one per user (K).
    pub max_tuning_rounds: Option<usize>,
    /// Beam power below which a beam counts as switched off.
    pub beam_power_floor: f64,
}

impl Default for ScaConfig {
    fn default() -> Self {
        Self {
            mu: 0.05,
            delta: 1e-3,
            max_iters: 100,
            round_threshold: 0.5,
            tuning_enabled: true,
            max_tuning_rounds: None,
            beam_power_floor: 1e-8,
        }
    }
}

impl ScaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::Config("mu must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config("delta must lie in (0,1)".into()));
        }
        if !(self.round_threshold > 0.0 && self.round_threshold < 1.0) {
            return Err(Error::Config("round threshold must lie in (0,1)".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// One iterate of the algorithm. Vectors are indexed by global user id;
/// non-candidates carry zero beams, κ = 0 and φ = 1.
#[derive(Debug, Clone)]
pub struct ScaState {
    pub tau: usize,
    pub kappa: Vec<f64>,
    pub weights: Vec<Vec<Complex64>>,
    pub phi: Vec<f64>,
    /// Subproblem objective value ς at this iterate.
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleStatus {
    Converged,
    MaxIters,
    Degenerate,
}

/// Final scheduling decision with verified beams.
#[derive(Debug, Clone)]
pub struct SchedulingSolution {
    /// Scheduled users, ascending.
    pub scheduled_set: Vec<usize>,
    /// Beams for all K users; zero for unscheduled.
    pub weights: Vec<Vec<Complex64>>,
    pub per_user_sinr: Vec<f64>,
    pub per_user_rate_nats: Vec<f64>,
    pub total_power: f64,
    pub iterations_used: usize,
    pub tuning_rounds_used: usize,
    pub status: ScheduleStatus,
}

impl SchedulingSolution {
    pub fn cardinality(&self) -> usize {
        self.scheduled_set.len()
    }

    fn empty(num_users: usize, num_antennas: usize, status: ScheduleStatus) -> Self {
        Self {
            scheduled_set: Vec::new(),
            weights: vec![vec![Complex64::new(0.0, 0.0); num_antennas]; num_users],
            per_user_sinr: vec![0.0; num_users],
            per_user_rate_nats: vec![0.0; num_users],
            total_power: 0.0,
            iterations_used: 0,
            tuning_rounds_used: 0,
            status,
        }
    }
}

/// One row of the convergence trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub tau: usize,
    pub objective: f64,
    pub kappa_sum: f64,
    pub power: f64,
}

/// Exact penalty objective (the non-convex original): −Σκ + μ(Σκ − Σκ²).
pub fn penalty_objective(kappa: &[f64], mu: f64) -> f64 {
    let s: f64 = kappa.iter().sum();
    let sq: f64 = kappa.iter().map(|k| k * k).sum();
    -s + mu * (s - sq)
}

/// Users individually feasible under maximum ratio transmission at full
/// power: `{k : P·‖h̄_k‖² ≥ γ̃_k}`.
pub fn prefilter(
    realization: &ChannelRealization,
    gamma_tilde: &[f64],
    power_budget: f64,
) -> Vec<usize> {
    (0..realization.num_users())
        .filter(|&k| power_budget * realization.normalized_gain(k) >= gamma_tilde[k])
        .collect()
}

fn beam_power(w: &[Complex64]) -> f64 {
    w.iter().map(|c| c.norm_sqr()).sum()
}

/// Starting point: MRT beams with the budget split equally across the
/// candidates, φ = interference + 1, and κ clamped so κγ̃ ≤ γ holds.
pub fn initialize(
    realization: &ChannelRealization,
    gamma_tilde: &[f64],
    candidates: &[usize],
    power_budget: f64,
    mu: f64,
) -> Result<ScaState> {
    if candidates.is_empty() {
        return Err(Error::Config("candidate set must be nonempty".into()));
    }
    let k_total = realization.num_users();
    let nt = realization.num_antennas();
    let per_user = power_budget / candidates.len() as f64;

    let mut weights = vec![vec![Complex64::new(0.0, 0.0); nt]; k_total];
    for &k in candidates {
        let hbar = &realization.normalized_channels[k];
        let norm = realization.normalized_gain(k).sqrt();
        let scale = per_user.sqrt() / norm;
        weights[k] = hbar.iter().map(|c| c * scale).collect();
    }

    let mut phi = vec![1.0; k_total];
    let mut kappa = vec![0.0; k_total];
    for &k in candidates {
        let hbar = &realization.normalized_channels[k];
        let interference: f64 = candidates
            .iter()
            .filter(|&&l| l != k)
            .map(|&l| inner(hbar, &weights[l]).norm_sqr())
            .sum();
        phi[k] = interference + 1.0;
        let gamma = inner(hbar, &weights[k]).norm_sqr() / phi[k];
        kappa[k] = (gamma / gamma_tilde[k]).min(1.0);
    }

    // At the expansion point the surrogate equals the exact penalty
    // objective, which serves as ς⁽⁰⁾.
    let kappa_c: Vec<f64> = candidates.iter().map(|&k| kappa[k]).collect();
    Ok(ScaState {
        tau: 0,
        kappa,
        weights,
        phi,
        objective: penalty_objective(&kappa_c, mu),
    })
}

/// One pass of the SCA loop: solve the subproblem linearized at `state`.
pub fn iterate(
    realization: &ChannelRealization,
    gamma_tilde: &[f64],
    candidates: &[usize],
    state: &ScaState,
    config: &ScaConfig,
    power_budget: f64,
) -> Result<ScaState> {
    let (program, layout) = build_sca_subproblem(
        realization,
        gamma_tilde,
        candidates,
        &state.kappa,
        &state.weights,
        &state.phi,
        config.mu,
        power_budget,
    )?;
    let sol = solve(&program)?;
    if sol.status != ConicStatus::Optimal {
        return Err(Error::Solver(format!(
            "subproblem ended with status {:?} at iteration {}",
            sol.status,
            state.tau + 1
        )));
    }
    let mut next = state.clone();
    next.tau += 1;
    next.objective = sol.objective_value;
    for (i, &k) in candidates.iter().enumerate() {
        next.kappa[k] = sol.primal[layout.kappa(i)].clamp(0.0, 1.0);
        next.phi[k] = sol.primal[layout.phi(i)].max(1.0);
        next.weights[k] = layout.extract_beam(&sol.primal, i);
    }
    Ok(next)
}

struct RunCore {
    solution: SchedulingSolution,
    final_state: Option<ScaState>,
    trace: Vec<TraceRow>,
}

fn total_power(weights: &[Vec<Complex64>]) -> f64 {
    weights.iter().map(|w| beam_power(w)).sum()
}

fn run_core(
    realization: &ChannelRealization,
    params: &FblParams,
    gamma_tilde: &[f64],
    power_budget: f64,
    config: &ScaConfig,
    excluded: &[usize],
) -> Result<RunCore> {
    config.validate()?;
    let k_total = realization.num_users();
    let nt = realization.num_antennas();

    let candidates: Vec<usize> = prefilter(realization, gamma_tilde, power_budget)
        .into_iter()
        .filter(|k| !excluded.contains(k))
        .collect();
    if candidates.is_empty() {
        return Ok(RunCore {
            solution: SchedulingSolution::empty(k_total, nt, ScheduleStatus::Degenerate),
            final_state: None,
            trace: Vec::new(),
        });
    }

    let mut state = initialize(realization, gamma_tilde, &candidates, power_budget, config.mu)?;
    let mut trace = vec![TraceRow {
        tau: 0,
        objective: state.objective,
        kappa_sum: state.kappa.iter().sum(),
        power: total_power(&state.weights),
    }];

    let mut status = ScheduleStatus::MaxIters;
    let mut iterations = 0usize;
    for _ in 0..config.max_iters {
        let next = match iterate(realization, gamma_tilde, &candidates, &state, config, power_budget)
        {
            Ok(next) => next,
            Err(Error::Solver(_)) => {
                status = if iterations == 0 {
                    ScheduleStatus::Degenerate
                } else {
                    ScheduleStatus::MaxIters
                };
                break;
            }
            Err(e) => return Err(e),
        };
        if next.objective > state.objective + MONOTONE_TOL {
            // Numerical stall: reject the iterate rather than accept an
            // objective increase.
            status = ScheduleStatus::MaxIters;
            break;
        }
        let diff = (next.objective - state.objective).abs();
        let converged = if state.objective.abs() < 1e-12 {
            diff <= config.delta * 1e-3
        } else {
            diff / state.objective.abs() <= config.delta
        };
        iterations += 1;
        state = next;
        trace.push(TraceRow {
            tau: state.tau,
            objective: state.objective,
            kappa_sum: state.kappa.iter().sum(),
            power: total_power(&state.weights),
        });
        if converged {
            status = ScheduleStatus::Converged;
            break;
        }
    }

    // Round κ and re-verify with the feasibility oracle, dropping the
    // weakest indicator until the rounded set fits the budget.
    let mut scheduled: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&k| state.kappa[k] >= config.round_threshold)
        .collect();
    let mut solution = SchedulingSolution::empty(k_total, nt, status);
    solution.iterations_used = iterations;
    while !scheduled.is_empty() {
        let oracle = min_power_feasible(realization, &scheduled, gamma_tilde, power_budget)?;
        if oracle.feasible() {
            solution.scheduled_set = scheduled.clone();
            solution.weights = oracle.weights;
            solution.total_power = oracle.power;
            for &k in &scheduled {
                let g = sinr(&solution.weights, realization, &scheduled, k)?;
                solution.per_user_sinr[k] = g;
                solution.per_user_rate_nats[k] = rate(g, params)?;
            }
            break;
        }
        // Drop the scheduled user the relaxation believed in least.
        let weakest = *scheduled
            .iter()
            .min_by(|&&a, &&b| state.kappa[a].total_cmp(&state.kappa[b]))
            .expect("nonempty");
        scheduled.retain(|&k| k != weakest);
    }

    Ok(RunCore {
        solution,
        final_state: Some(state),
        trace,
    })
}

/// Full pipeline with uniform FBL thresholds derived from `params`.
pub fn run(
    realization: &ChannelRealization,
    params: &FblParams,
    power_budget: f64,
    config: &ScaConfig,
) -> Result<SchedulingSolution> {
    let gt = vec![min_sinr(params)?; realization.num_users()];
    run_with_thresholds(realization, params, &gt, power_budget, config)
}

/// Pipeline with caller-provided per-user SINR thresholds (used by the
/// Shannon baseline); rates are still reported with the FBL formula.
pub fn run_with_thresholds(
    realization: &ChannelRealization,
    params: &FblParams,
    gamma_tilde: &[f64],
    power_budget: f64,
    config: &ScaConfig,
) -> Result<SchedulingSolution> {
    Ok(run_core(realization, params, gamma_tilde, power_budget, config, &[])?.solution)
}

/// Like [`run_with_thresholds`], also returning the convergence trace.
pub fn run_with_trace(
    realization: &ChannelRealization,
    params: &FblParams,
    gamma_tilde: &[f64],
    power_budget: f64,
    config: &ScaConfig,
) -> Result<(SchedulingSolution, Vec<TraceRow>)> {
    let core = run_core(realization, params, gamma_tilde, power_budget, config, &[])?;
    Ok((core.solution, core.trace))
}

/// Full pipeline plus the tuning pass (uniform FBL thresholds).
pub fn run_with_tuning(
    realization: &ChannelRealization,
    params: &FblParams,
    power_budget: f64,
    config: &ScaConfig,
) -> Result<SchedulingSolution> {
    let gt = vec![min_sinr(params)?; realization.num_users()];
    run_with_tuning_thresholds(realization, params, &gt, power_budget, config)
}

fn better(a: &SchedulingSolution, b: &SchedulingSolution) -> bool {
    a.cardinality() > b.cardinality()
        || (a.cardinality() == b.cardinality() && a.total_power < b.total_power)
}

/// Tuning pass: after a run, a user left with κ below the rounding
/// threshold but a beam still burning power is excluded (smallest κ first,
/// one user per round), its power is redistributed by re-initialization
/// over the remaining candidates, and the loop re-runs. The best solution
/// by cardinality (ties: lower power) is returned.
pub fn run_with_tuning_thresholds(
    realization: &ChannelRealization,
    params: &FblParams,
    gamma_tilde: &[f64],
    power_budget: f64,
    config: &ScaConfig,
) -> Result<SchedulingSolution> {
    let mut excluded: Vec<usize> = Vec::new();
    let first = run_core(realization, params, gamma_tilde, power_budget, config, &excluded)?;
    let mut best = first.solution;
    let mut last_state = first.final_state;
    let mut rounds = 0usize;

    if config.tuning_enabled {
        let max_rounds = config
            .max_tuning_rounds
            .unwrap_or(realization.num_users());
        while rounds < max_rounds {
            let Some(state) = &last_state else { break };
            let candidates: Vec<usize> = prefilter(realization, gamma_tilde, power_budget)
                .into_iter()
                .filter(|k| !excluded.contains(k))
                .collect();
            let stuck = candidates
                .iter()
                .copied()
                .filter(|&k| {
                    state.kappa[k] < config.round_threshold
                        && beam_power(&state.weights[k]) > config.beam_power_floor
                })
                .min_by(|&a, &b| state.kappa[a].total_cmp(&state.kappa[b]));
            let Some(k) = stuck else { break };
            excluded.push(k);
            rounds += 1;
            let rerun = run_core(realization, params, gamma_tilde, power_budget, config, &excluded)?;
            if better(&rerun.solution, &best) {
                best = rerun.solution;
            }
            last_state = rerun.final_state;
        }
    }
    best.tuning_rounds_used = rounds;
    Ok(best)
}
