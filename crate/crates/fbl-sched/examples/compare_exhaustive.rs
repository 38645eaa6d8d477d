//! Scheduler against the exhaustive-search optimum on small instances.

use fbl_sched::baselines::{exhaustive_search, DEFAULT_ES_CAP};
use fbl_sched::channel::{draw_channels, NetworkConfig};
use fbl_sched::fbl::{min_sinr, FblParams};
use fbl_sched::sca::{run_with_tuning, ScaConfig};

fn main() -> fbl_sched::Result<()> {
    let config = NetworkConfig {
        cell_radius_m: 80.0,
        ..NetworkConfig::new(2, 6)
    };
    let params = FblParams::new(1e-6, 128, 256)?;
    let gamma_tilde = vec![min_sinr(&params)?; config.num_users];
    let budget = config.power_budget();

    println!("seed  sca              es               subsets checked");
    let mut agree = 0;
    let trials = 20u64;
    for seed in 0..trials {
        let r = draw_channels(&config, seed)?;
        let sca = run_with_tuning(&r, &params, budget, &ScaConfig::default())?;
        let es = exhaustive_search(&r, &gamma_tilde, budget, DEFAULT_ES_CAP)?;
        if sca.cardinality() == es.best_set.len() {
            agree += 1;
        }
        println!(
            "{seed:4}  {:<16} {:<16} {}",
            format!("{:?}", sca.scheduled_set),
            format!("{:?}", es.best_set),
            es.subsets_checked
        );
    }
    println!("\ncardinality matched the optimum on {agree}/{trials} instances");
    Ok(())
}
