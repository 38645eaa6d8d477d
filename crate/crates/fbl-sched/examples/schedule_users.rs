//! Full scheduling run on one instance, with the convergence trace of the
//! penalized objective.

use fbl_sched::channel::{draw_channels, NetworkConfig};
use fbl_sched::fbl::{min_sinr, FblParams};
use fbl_sched::sca::{run_with_trace, run_with_tuning, ScaConfig};

fn main() -> fbl_sched::Result<()> {
    let config = NetworkConfig {
        cell_radius_m: 100.0,
        ..NetworkConfig::new(4, 8)
    };
    let params = FblParams::new(1e-6, 128, 256)?;
    let gamma_tilde = vec![min_sinr(&params)?; config.num_users];
    let budget = config.power_budget();
    let r = draw_channels(&config, 17)?;

    let (plain, trace) = run_with_trace(&r, &params, &gamma_tilde, budget, &ScaConfig::default())?;
    println!("tau  objective   sum(kappa)   power");
    for row in &trace {
        println!(
            "{:3} {:10.5} {:11.5} {:8.4}",
            row.tau, row.objective, row.kappa_sum, row.power
        );
    }

    let tuned = run_with_tuning(&r, &params, budget, &ScaConfig::default())?;
    println!(
        "\nplain: {:?} ({:?}), tuned: {:?} ({} tuning rounds)",
        plain.scheduled_set, plain.status, tuned.scheduled_set, tuned.tuning_rounds_used
    );
    println!("tuned power {:.4} / {budget} W", tuned.total_power);
    for &k in &tuned.scheduled_set {
        println!(
            "  user {k}: SINR {:7.3}, rate {:.4} nats/use (target {:.4})",
            tuned.per_user_sinr[k], tuned.per_user_rate_nats[k], params.rate_target_nats
        );
    }
    Ok(())
}
