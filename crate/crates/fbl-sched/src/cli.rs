//! Command-line front end.
//!
//! Subcommands:
//!
//! * `solve` — schedule one instance (from a seed or an instance file),
//! * `sweep` — Monte Carlo sweep over users/blocklength/epsilon, CSV out,
//! * `compare` — per-instance table of the SCA scheduler against
//!   exhaustive search at small K,
//! * `rate-tools` — print R(γ), V(γ), γ̃ and γ̃* for given (ε, n, D).
//!
//! Exit codes: 0 ok, 1 usage error, 2 runtime error.

use crate::baselines::{exhaustive_search, DEFAULT_ES_CAP};
use crate::channel::{draw_channels, ChannelRealization, InstanceFile, NetworkConfig};
use crate::error::{Error, Result};
use crate::fbl::{min_sinr, rate, shannon_min_sinr, v_of, FblParams};
use crate::harness::{self, Method, SweepAxis, SweepConfig};
use crate::sca::{run_with_thresholds, run_with_trace, run_with_tuning_thresholds, ScaConfig};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "fbl-sched", version, about = "Joint user scheduling and beamforming under finite-blocklength rate constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FblArgs {
    /// Decoding error probability ε.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Blocklength n in channel uses.
    #[arg(long, default_value_t = 128)]
    blocklength: u32,
    /// Payload size D in bits.
    #[arg(long, default_value_t = 256)]
    data_bits: u32,
}

#[derive(Args, Clone)]
struct NetArgs {
    /// Number of candidate users K.
    #[arg(long, default_value_t = 8)]
    users: usize,
    /// Number of BS antennas Nt.
    #[arg(long, default_value_t = 4)]
    antennas: usize,
    /// Transmit SNR in dB (P = σ²·10^(SNR/10)).
    #[arg(long, default_value_t = 10.0)]
    snr_db: f64,
}

#[derive(Args, Clone)]
struct ScaArgs {
    /// Penalty weight μ.
    #[arg(long, default_value_t = 0.05)]
    mu: f64,
    /// Relative-objective stopping threshold δ.
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    /// Disable the tuning pass.
    #[arg(long)]
    no_tuning: bool,
}

impl ScaArgs {
    fn to_config(&self) -> ScaConfig {
        ScaConfig {
            mu: self.mu,
            delta: self.delta,
            tuning_enabled: !self.no_tuning,
            ..ScaConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Schedule a single instance and print the result.
    Solve {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        fbl: FblArgs,
        #[command(flatten)]
        sca: ScaArgs,
        /// Channel seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Load the instance from a file instead of drawing from the seed.
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Dump the drawn instance to a file.
        #[arg(long)]
        dump_instance: Option<PathBuf>,
        /// Write the convergence trace (tau,objective,kappa_sum,power) as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Monte Carlo sweep; writes CSV.
    Sweep {
        /// Swept quantity: users | blocklength | epsilon.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        fbl: FblArgs,
        #[command(flatten)]
        sca: ScaArgs,
        /// Trials per axis value.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Master seed; per-trial seeds derive from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated methods: sca_tuned,sca_plain,es,shannon.
        #[arg(long, value_delimiter = ',', default_value = "sca_tuned")]
        methods: Vec<String>,
        /// Output CSV path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Read the whole sweep configuration from a JSON file instead.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// SCA vs exhaustive search, per-instance table.
    Compare {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        fbl: FblArgs,
        #[command(flatten)]
        sca: ScaArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the rate quantities for given parameters.
    RateTools {
        #[command(flatten)]
        fbl: FblArgs,
        /// Also evaluate R(γ) and V(γ) at this SINR.
        #[arg(long)]
        gamma: Option<f64>,
    },
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(Error::Config(msg)) | Err(Error::Parse(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            net,
            fbl,
            sca,
            seed,
            instance,
            dump_instance,
            trace,
        } => cmd_solve(net, fbl, sca, seed, instance, dump_instance, trace),
        Command::Sweep {
            axis,
            values,
            net,
            fbl,
            sca,
            trials,
            seed,
            methods,
            out,
            config,
        } => cmd_sweep(axis, values, net, fbl, sca, trials, seed, methods, out, config),
        Command::Compare {
            net,
            fbl,
            sca,
            trials,
            seed,
        } => cmd_compare(net, fbl, sca, trials, seed),
        Command::RateTools { fbl, gamma } => cmd_rate_tools(fbl, gamma),
    }
}

fn load_or_draw(
    net: &NetArgs,
    seed: u64,
    instance: Option<&PathBuf>,
) -> Result<(NetworkConfig, ChannelRealization)> {
    match instance {
        Some(path) => {
            let file = InstanceFile::load(path)?;
            let realization = file.to_realization()?;
            Ok((file.config, realization))
        }
        None => {
            let config = NetworkConfig {
                snr_db: net.snr_db,
                ..NetworkConfig::new(net.antennas, net.users)
            };
            let realization = draw_channels(&config, seed)?;
            Ok((config, realization))
        }
    }
}

fn cmd_solve(
    net: NetArgs,
    fbl: FblArgs,
    sca: ScaArgs,
    seed: u64,
    instance: Option<PathBuf>,
    dump_instance: Option<PathBuf>,
    trace_path: Option<PathBuf>,
) -> Result<()> {
    let (config, realization) = load_or_draw(&net, seed, instance.as_ref())?;
    if let Some(path) = dump_instance {
        InstanceFile::from_realization(&config, seed, &realization).save(&path)?;
    }
    let params = FblParams::new(fbl.epsilon, fbl.blocklength, fbl.data_bits)?;
    let power = config.power_budget();
    let gt = vec![min_sinr(&params)?; config.num_users];
    let sca_config = sca.to_config();

    let solution = if let Some(path) = trace_path {
        let (sol, trace) = run_with_trace(&realization, &params, &gt, power, &sca_config)?;
        let mut text = String::from("tau,objective,kappa_sum,power\n");
        for row in trace {
            text.push_str(&format!(
                "{},{},{},{}\n",
                row.tau, row.objective, row.kappa_sum, row.power
            ));
        }
        std::fs::write(path, text)?;
        sol
    } else if sca_config.tuning_enabled {
        run_with_tuning_thresholds(&realization, &params, &gt, power, &sca_config)?
    } else {
        run_with_thresholds(&realization, &params, &gt, power, &sca_config)?
    };

    println!("minimum SINR threshold  : {:.6}", gt[0]);
    println!("scheduled set           : {:?}", solution.scheduled_set);
    println!("cardinality             : {}", solution.cardinality());
    println!(
        "total power             : {:.6} / budget {:.6}",
        solution.total_power, power
    );
    println!("iterations              : {}", solution.iterations_used);
    println!("tuning rounds           : {}", solution.tuning_rounds_used);
    println!("status                  : {:?}", solution.status);
    for &k in &solution.scheduled_set {
        println!(
            "  user {k:2}: SINR {:9.4}  rate {:.4} nats/use (target {:.4})",
            solution.per_user_sinr[k], solution.per_user_rate_nats[k], params.rate_target_nats
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    axis: Option<String>,
    values: Vec<f64>,
    net: NetArgs,
    fbl: FblArgs,
    sca: ScaArgs,
    trials: usize,
    seed: u64,
    methods: Vec<String>,
    out: Option<PathBuf>,
    config_path: Option<PathBuf>,
) -> Result<()> {
    let mut config = if let Some(path) = config_path {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str::<SweepConfig>(&text)?
    } else {
        let axis = match axis.as_deref() {
            Some("users") | Some("num_users") => SweepAxis::NumUsers,
            Some("blocklength") => SweepAxis::Blocklength,
            Some("epsilon") => SweepAxis::Epsilon,
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown axis '{other}' (expected users, blocklength, epsilon)"
                )))
            }
            None => {
                return Err(Error::Config(
                    "either --axis/--values or --config is required".into(),
                ))
            }
        };
        if values.is_empty() {
            return Err(Error::Config("--values must be nonempty".into()));
        }
        SweepConfig {
            axis,
            axis_values: values,
            network: NetworkConfig {
                snr_db: net.snr_db,
                ..NetworkConfig::new(net.antennas, net.users)
            },
            epsilon: fbl.epsilon,
            blocklength_n: fbl.blocklength,
            data_bits: fbl.data_bits,
            trials,
            master_seed: seed,
            methods: methods
                .iter()
                .map(|m| Method::parse(m))
                .collect::<Result<Vec<_>>>()?,
            sca: sca.to_config(),
            es_cap: DEFAULT_ES_CAP,
        }
    };
    config.normalize();
    let result = harness::run_sweep(&config)?;
    let csv = harness::to_csv(&result);
    match out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_compare(net: NetArgs, fbl: FblArgs, sca: ScaArgs, trials: usize, seed: u64) -> Result<()> {
    if net.users > DEFAULT_ES_CAP {
        return Err(Error::Config(format!(
            "compare uses exhaustive search; --users must be ≤ {DEFAULT_ES_CAP}"
        )));
    }
    let config = NetworkConfig {
        snr_db: net.snr_db,
        ..NetworkConfig::new(net.antennas, net.users)
    };
    let params = FblParams::new(fbl.epsilon, fbl.blocklength, fbl.data_bits)?;
    let power = config.power_budget();
    let gt = vec![min_sinr(&params)?; config.num_users];
    let sca_config = sca.to_config();

    println!("trial,sca_cardinality,es_cardinality,sca_power,es_power");
    let mut sum_sca = 0usize;
    let mut sum_es = 0usize;
    for trial in 0..trials {
        let r = draw_channels(&config, seed.wrapping_add(trial as u64))?;
        let sol = run_with_tuning_thresholds(&r, &params, &gt, power, &sca_config)?;
        let es = exhaustive_search(&r, &gt, power, DEFAULT_ES_CAP)?;
        sum_sca += sol.cardinality();
        sum_es += es.best_set.len();
        println!(
            "{trial},{},{},{:.6},{:.6}",
            sol.cardinality(),
            es.best_set.len(),
            sol.total_power,
            es.min_power
        );
    }
    println!(
        "# mean sca {:.3}, mean es {:.3}",
        sum_sca as f64 / trials.max(1) as f64,
        sum_es as f64 / trials.max(1) as f64
    );
    Ok(())
}

fn cmd_rate_tools(fbl: FblArgs, gamma: Option<f64>) -> Result<()> {
    let params = FblParams::new(fbl.epsilon, fbl.blocklength, fbl.data_bits)?;
    println!("theta                : {:.9}", params.theta);
    println!("rate target (nats)   : {:.9}", params.rate_target_nats);
    println!("min SINR (FBL)       : {:.9}", min_sinr(&params)?);
    println!("min SINR (Shannon)   : {:.9}", shannon_min_sinr(&params));
    if let Some(g) = gamma {
        println!("V({g})         : {:.9}", v_of(g)?);
        println!("R({g})         : {:.9} nats/use", rate(g, &params)?);
    }
    Ok(())
}
