//! Finite-blocklength rate arithmetic: the rate penalty relative to Shannon
//! capacity and the minimum SINR needed to hit a rate target.

use fbl_sched::fbl::{min_sinr, rate, shannon_min_sinr, v_of, FblParams};

fn main() -> fbl_sched::Result<()> {
    let params = FblParams::new(1e-6, 128, 256)?;
    println!(
        "epsilon = {:.0e}, n = {}, D = {} bits -> theta = {:.6}, target = {:.6} nats/use",
        params.epsilon, params.blocklength_n, params.data_bits, params.theta, params.rate_target_nats
    );

    println!("\n gamma   ln(1+g)    V(g)     R(g)");
    for gamma in [0.5f64, 1.0, 2.0, 3.0, 5.0, 8.0] {
        println!(
            "{gamma:6.2} {:9.4} {:8.4} {:8.4}",
            (1.0 + gamma).ln(),
            v_of(gamma)?,
            rate(gamma, &params)?
        );
    }

    println!("\nminimum SINR for the target, FBL vs Shannon:");
    for (eps, n) in [(1e-6, 128u32), (1e-6, 256), (1e-9, 128), (1e-3, 128)] {
        let p = FblParams::new(eps, n, 256)?;
        println!(
            "  epsilon = {eps:7.0e}, n = {n:3}: FBL {:7.4}, Shannon {:7.4}",
            min_sinr(&p)?,
            shannon_min_sinr(&p)
        );
    }
    Ok(())
}
