//! Power-minimization feasibility oracle: how much transmit power each user
//! subset needs to hold every member at its minimum SINR.

use fbl_sched::channel::{draw_channels, NetworkConfig};
use fbl_sched::conic::min_power_feasible;
use fbl_sched::fbl::{min_sinr, FblParams};

fn main() -> fbl_sched::Result<()> {
    let config = NetworkConfig {
        cell_radius_m: 50.0,
        ..NetworkConfig::new(2, 4)
    };
    let params = FblParams::new(1e-6, 128, 256)?;
    let gamma_tilde = vec![min_sinr(&params)?; config.num_users];
    let budget = config.power_budget();
    let r = draw_channels(&config, 3)?;

    println!("SINR floor {:.4}, budget {budget} W\n", gamma_tilde[0]);
    println!("subset          min power   verdict");
    let subsets: [&[usize]; 7] = [&[0], &[1], &[2], &[3], &[0, 1], &[0, 1, 2], &[0, 1, 2, 3]];
    for subset in subsets {
        let out = min_power_feasible(&r, subset, &gamma_tilde, budget)?;
        let power = if out.power.is_finite() {
            format!("{:9.4}", out.power)
        } else {
            "      inf".into()
        };
        println!("{:<14} {power}   {:?}", format!("{subset:?}"), out.feasibility);
    }
    Ok(())
}
