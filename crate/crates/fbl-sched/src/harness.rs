//! Monte Carlo sweeps over candidate count, blocklength, and reliability.
//!
//! For each axis value and trial a fresh channel realization is drawn from
//! a seed that is a pure function of (master seed, axis index, trial
//! index); all requested methods run on the same realization. Results are
//! aggregated into per-(axis value, method) means and emitted as CSV with
//! the fixed header
//! `axis_value,method,mean_cardinality,stderr,mean_iters,infeasible_trials`.
//! Wall-clock timings are collected alongside but excluded from the CSV so
//! the file is byte-deterministic for a fixed master seed.

use crate::baselines::{exhaustive_search, shannon_schedule, DEFAULT_ES_CAP};
use crate::channel::{draw_channels, NetworkConfig};
use crate::error::{Error, Result};
use crate::fbl::{min_sinr, FblParams};
use crate::sca::{run_with_thresholds, run_with_tuning_thresholds, ScaConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Which quantity the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    NumUsers,
    Blocklength,
    Epsilon,
}

/// Scheduling methods the harness can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ScaTuned,
    ScaPlain,
    Es,
    Shannon,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sca_tuned" => Ok(Method::ScaTuned),
            "sca_plain" => Ok(Method::ScaPlain),
            "es" => Ok(Method::Es),
            "shannon" => Ok(Method::Shannon),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected sca_tuned, sca_plain, es, shannon)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    /// Values taken by the swept quantity; stored ascending.
    pub axis_values: Vec<f64>,
    /// Fixed network parameters (K is overridden on the num_users axis).
    pub network: NetworkConfig,
    /// Fixed reliability parameters (ε, n overridden on their axes).
    pub epsilon: f64,
    pub blocklength_n: u32,
    pub data_bits: u32,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub master_seed: u64,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub sca: ScaConfig,
    #[serde(default = "default_es_cap")]
    pub es_cap: usize,
}

fn default_trials() -> usize {
    100
}

fn default_es_cap() -> usize {
    DEFAULT_ES_CAP
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.axis_values.is_empty() {
            return Err(Error::Config("axis_values must be nonempty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method required".into()));
        }
        for &v in &self.axis_values {
            match self.axis {
                SweepAxis::NumUsers | SweepAxis::Blocklength => {
                    if v < 1.0 || v.fract() != 0.0 {
                        return Err(Error::Config(format!(
                            "axis value {v} must be a positive integer"
                        )));
                    }
                    if self.axis == SweepAxis::NumUsers
                        && self.methods.contains(&Method::Es)
                        && v as usize > self.es_cap
                    {
                        return Err(Error::Config(format!(
                            "exhaustive search requested but K = {v} exceeds the cap {}",
                            self.es_cap
                        )));
                    }
                }
                SweepAxis::Epsilon => {
                    if !(v > 0.0 && v <= 0.5) {
                        return Err(Error::Config(format!("epsilon {v} outside (0, 0.5]")));
                    }
                }
            }
        }
        if self.axis != SweepAxis::NumUsers
            && self.methods.contains(&Method::Es)
            && self.network.num_users > self.es_cap
        {
            return Err(Error::Config(format!(
                "exhaustive search requested but K = {} exceeds the cap {}",
                self.network.num_users, self.es_cap
            )));
        }
        self.sca.validate()?;
        self.network.validate()
    }

    /// Sort the axis ascending (reliability lists are often given
    /// strictest-first).
    pub fn normalize(&mut self) {
        self.axis_values.sort_by(f64::total_cmp);
        self.axis_values.dedup();
    }

    fn instantiate(&self, axis_value: f64) -> Result<(NetworkConfig, FblParams)> {
        let mut net = self.network.clone();
        let mut eps = self.epsilon;
        let mut n = self.blocklength_n;
        match self.axis {
            SweepAxis::NumUsers => net.num_users = axis_value as usize,
            SweepAxis::Blocklength => n = axis_value as u32,
            SweepAxis::Epsilon => eps = axis_value,
        }
        Ok((net, FblParams::new(eps, n, self.data_bits)?))
    }
}

/// Per-trial seed: a pure function of (master seed, axis index, trial).
pub fn trial_seed(master_seed: u64, axis_index: usize, trial: usize) -> u64 {
    // splitmix64 over the combined counter, so nearby indices decorrelate.
    let mut z = master_seed
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(1 + axis_index as u64))
        .wrapping_add(0x243f6a8885a308d3u64.wrapping_mul(1 + trial as u64));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Aggregated row for one (axis value, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub method: String,
    pub mean_cardinality: f64,
    pub stderr: f64,
    pub mean_iters: f64,
    pub infeasible_trials: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Mean wall time per row, milliseconds. Informational; excluded from
    /// the CSV and from determinism guarantees.
    pub timing_ms: Vec<f64>,
}

struct TrialOutcome {
    method: &'static str,
    cardinality: usize,
    iterations: usize,
    infeasible: bool,
    wall_ms: f64,
}

fn run_methods(
    config: &SweepConfig,
    net: &NetworkConfig,
    params: &FblParams,
    seed: u64,
) -> Result<Vec<TrialOutcome>> {
    let realization = draw_channels(net, seed)?;
    let power = net.power_budget();
    let gamma_tilde = vec![min_sinr(params)?; net.num_users];
    let mut out = Vec::new();
    for method in &config.methods {
        match method {
            Method::ScaTuned => {
                let t = Instant::now();
                let sol = run_with_tuning_thresholds(
                    &realization,
                    params,
                    &gamma_tilde,
                    power,
                    &config.sca,
                )?;
                out.push(TrialOutcome {
                    method: "sca_tuned",
                    cardinality: sol.cardinality(),
                    iterations: sol.iterations_used,
                    infeasible: sol.cardinality() == 0,
                    wall_ms: t.elapsed().as_secs_f64() * 1e3,
                });
            }
            Method::ScaPlain => {
                let t = Instant::now();
                let plain_cfg = ScaConfig {
                    tuning_enabled: false,
                    ..config.sca.clone()
                };
                let sol =
                    run_with_thresholds(&realization, params, &gamma_tilde, power, &plain_cfg)?;
                out.push(TrialOutcome {
                    method: "sca_plain",
                    cardinality: sol.cardinality(),
                    iterations: sol.iterations_used,
                    infeasible: sol.cardinality() == 0,
                    wall_ms: t.elapsed().as_secs_f64() * 1e3,
                });
            }
            Method::Es => {
                let t = Instant::now();
                let es = exhaustive_search(&realization, &gamma_tilde, power, config.es_cap)?;
                out.push(TrialOutcome {
                    method: "es",
                    cardinality: es.best_set.len(),
                    iterations: es.subsets_checked,
                    infeasible: es.best_set.is_empty(),
                    wall_ms: t.elapsed().as_secs_f64() * 1e3,
                });
            }
            Method::Shannon => {
                let t = Instant::now();
                let sh = shannon_schedule(&realization, params, power, &config.sca)?;
                let ms = t.elapsed().as_secs_f64() * 1e3;
                out.push(TrialOutcome {
                    method: "shannon_raw",
                    cardinality: sh.raw_cardinality(),
                    iterations: sh.solution.iterations_used,
                    infeasible: sh.raw_cardinality() == 0,
                    wall_ms: ms,
                });
                out.push(TrialOutcome {
                    method: "shannon_verified",
                    cardinality: sh.verified_cardinality(),
                    iterations: sh.solution.iterations_used,
                    infeasible: sh.verified_cardinality() == 0,
                    wall_ms: 0.0,
                });
            }
        }
    }
    Ok(out)
}

/// Run the sweep. Trials execute in parallel; results are gathered per
/// (axis, trial) before aggregation so the output is order-independent.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut result = SweepResult::default();

    for (axis_index, &axis_value) in config.axis_values.iter().enumerate() {
        let (net, params) = config.instantiate(axis_value)?;
        let per_trial: Vec<Vec<TrialOutcome>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let seed = trial_seed(config.master_seed, axis_index, trial);
                run_methods(config, &net, &params, seed)
            })
            .collect::<Result<_>>()?;

        // Fixed method-label order keeps the CSV stable.
        let mut labels: Vec<&'static str> = Vec::new();
        for m in &config.methods {
            match m {
                Method::ScaTuned => labels.push("sca_tuned"),
                Method::ScaPlain => labels.push("sca_plain"),
                Method::Es => labels.push("es"),
                Method::Shannon => {
                    labels.push("shannon_raw");
                    labels.push("shannon_verified");
                }
            }
        }
        for label in labels {
            let cards: Vec<f64> = per_trial
                .iter()
                .flat_map(|t| t.iter().filter(|o| o.method == label))
                .map(|o| o.cardinality as f64)
                .collect();
            let iters: Vec<f64> = per_trial
                .iter()
                .flat_map(|t| t.iter().filter(|o| o.method == label))
                .map(|o| o.iterations as f64)
                .collect();
            let infeasible = per_trial
                .iter()
                .flat_map(|t| t.iter().filter(|o| o.method == label))
                .filter(|o| o.infeasible)
                .count();
            let wall: f64 = per_trial
                .iter()
                .flat_map(|t| t.iter().filter(|o| o.method == label))
                .map(|o| o.wall_ms)
                .sum();
            let mean_card = mean(&cards);
            result.rows.push(SweepRow {
                axis_value,
                method: label.to_string(),
                mean_cardinality: mean_card,
                stderr: stderr(&cards, mean_card),
                mean_iters: mean(&iters),
                infeasible_trials: infeasible,
            });
            result.timing_ms.push(wall / cards.len().max(1) as f64);
        }
    }
    Ok(result)
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn stderr(xs: &[f64], mean: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (var / xs.len() as f64).sqrt()
}

pub const CSV_HEADER: &str = "axis_value,method,mean_cardinality,stderr,mean_iters,infeasible_trials";

/// RFC-4180-style CSV: dot decimal, LF line endings, no quoting needed.
pub fn to_csv(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.axis_value, r.method, r.mean_cardinality, r.stderr, r.mean_iters, r.infeasible_trials
        ));
    }
    out
}

/// Parse a CSV produced by [`to_csv`]. Timing data is not in the file, so
/// the returned result carries an empty `timing_ms`.
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "unexpected CSV header: {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!("line {}: expected 6 fields", idx + 2)));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", idx + 2)))
        };
        rows.push(SweepRow {
            axis_value: num(fields[0])?,
            method: fields[1].to_string(),
            mean_cardinality: num(fields[2])?,
            stderr: num(fields[3])?,
            mean_iters: num(fields[4])?,
            infeasible_trials: fields[5]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", idx + 2)))?,
        });
    }
    Ok(SweepResult {
        rows,
        timing_ms: Vec::new(),
    })
}
