//! Comparison anchors: exhaustive search over user subsets and the
//! Shannon-capacity scheduler with post-verification.

use crate::channel::{sinr, ChannelRealization};
use crate::conic::min_power_feasible;
use crate::error::{Error, Result};
use crate::fbl::{rate, shannon_min_sinr, FblParams};
use crate::sca::{run_with_tuning_thresholds, ScaConfig, SchedulingSolution};
use num_complex::Complex64;

/// Default cap on K for exhaustive search.
pub const DEFAULT_ES_CAP: usize = 10;

/// Result of the exhaustive search.
#[derive(Debug, Clone)]
pub struct EsResult {
    /// A maximum-cardinality feasible subset (empty if none).
    pub best_set: Vec<usize>,
    /// Min-power beams for `best_set`, zero elsewhere.
    pub weights: Vec<Vec<Complex64>>,
    pub min_power: f64,
    /// Number of feasibility solves performed.
    pub subsets_checked: usize,
}

/// Enumerate subsets in decreasing cardinality and return the first
/// feasible one found, which by the enumeration order has maximum
/// cardinality. Feasibility is monotone under subset inclusion, so every
/// recorded infeasible subset rules out all of its supersets.
pub fn exhaustive_search(
    realization: &ChannelRealization,
    gamma_tilde: &[f64],
    power_budget: f64,
    cap: usize,
) -> Result<EsResult> {
    let k_total = realization.num_users();
    let nt = realization.num_antennas();
    if k_total > cap {
        return Err(Error::SizeCap(format!(
            "exhaustive search over K = {k_total} users exceeds the cap of {cap}; lower K or raise the cap"
        )));
    }

    let mut checked = 0usize;

    // Singletons first: min power for one user is γ̃/‖h̄‖² in closed form,
    // so the prefilter criterion is exact here.
    let universe: Vec<usize> = crate::sca::prefilter(realization, gamma_tilde, power_budget);
    let n = universe.len();

    let empty = |checked: usize| EsResult {
        best_set: Vec::new(),
        weights: vec![vec![Complex64::new(0.0, 0.0); nt]; k_total],
        min_power: 0.0,
        subsets_checked: checked,
    };
    if n == 0 {
        return Ok(empty(checked));
    }

    let mut infeasible_masks: Vec<u32> = Vec::new();
    for size in (1..=n).rev() {
        for mask in masks_of_size(n, size) {
            if infeasible_masks.iter().any(|&t| t & mask == t) {
                continue;
            }
            let subset: Vec<usize> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| universe[i])
                .collect();
            checked += 1;
            let oracle = min_power_feasible(realization, &subset, gamma_tilde, power_budget)?;
            if oracle.feasible() {
                return Ok(EsResult {
                    best_set: subset,
                    weights: oracle.weights,
                    min_power: oracle.power,
                    subsets_checked: checked,
                });
            }
            // Indeterminate solves are treated as infeasible but must not
            // poison the superset pruning store.
            if oracle.power.is_finite() || oracle.power == f64::INFINITY {
                infeasible_masks.push(mask);
            }
        }
    }
    Ok(empty(checked))
}

/// All n-bit masks with exactly `size` bits set, ascending.
fn masks_of_size(n: usize, size: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == size {
            out.push(mask);
        }
    }
    out
}

/// Shannon-capacity scheduling run plus FBL post-verification.
#[derive(Debug, Clone)]
pub struct ShannonOutcome {
    /// Verified solution: users whose FBL rate missed the target are
    /// removed and their beams zeroed.
    pub solution: SchedulingSolution,
    /// Scheduled set before verification.
    pub raw_scheduled: Vec<usize>,
}

impl ShannonOutcome {
    pub fn raw_cardinality(&self) -> usize {
        self.raw_scheduled.len()
    }

    pub fn verified_cardinality(&self) -> usize {
        self.solution.cardinality()
    }
}

/// Run the full SCA pipeline with the Shannon thresholds γ̃* = 2^(D/n) − 1,
/// then verify every scheduled user against the FBL rate target and drop
/// violators. Dropping only removes interference, so survivors keep
/// meeting the target after their beams are re-evaluated.
pub fn shannon_schedule(
    realization: &ChannelRealization,
    params: &FblParams,
    power_budget: f64,
    config: &ScaConfig,
) -> Result<ShannonOutcome> {
    let gt_star = vec![shannon_min_sinr(params); realization.num_users()];
    let raw = run_with_tuning_thresholds(realization, params, &gt_star, power_budget, config)?;

    let raw_scheduled = raw.scheduled_set.clone();
    let target = params.rate_target_nats;
    let verified: Vec<usize> = raw_scheduled
        .iter()
        .copied()
        .filter(|&k| raw.per_user_rate_nats[k] >= target - 1e-6)
        .collect();

    let mut solution = raw;
    if verified.len() != raw_scheduled.len() {
        let nt = realization.num_antennas();
        for &k in &raw_scheduled {
            if !verified.contains(&k) {
                solution.weights[k] = vec![Complex64::new(0.0, 0.0); nt];
                solution.per_user_sinr[k] = 0.0;
                solution.per_user_rate_nats[k] = 0.0;
            }
        }
        solution.scheduled_set = verified.clone();
        for &k in &verified {
            let g = sinr(&solution.weights, realization, &verified, k)?;
            solution.per_user_sinr[k] = g;
            solution.per_user_rate_nats[k] = rate(g, params)?;
        }
        solution.total_power = solution
            .weights
            .iter()
            .map(|w| w.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum();
    }
    Ok(ShannonOutcome {
        solution,
        raw_scheduled,
    })
}
