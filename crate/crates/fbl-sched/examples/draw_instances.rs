//! Draw reproducible network instances and round-trip one through the
//! JSON instance format.

use fbl_sched::channel::{draw_channels, InstanceFile, NetworkConfig};

fn main() -> fbl_sched::Result<()> {
    let config = NetworkConfig::new(4, 8);
    println!(
        "cell {} m, d0 {} m, rho {}, SNR {} dB -> P = {} W",
        config.cell_radius_m,
        config.ref_distance_m,
        config.pathloss_exp,
        config.snr_db,
        config.power_budget()
    );

    let r = draw_channels(&config, 42)?;
    println!("\nuser  distance   ||hbar||^2");
    for k in 0..config.num_users {
        println!("{k:4} {:9.1} m {:11.5}", r.distances_m[k], r.normalized_gain(k));
    }

    let path = std::env::temp_dir().join("fbl-sched-instance.json");
    InstanceFile::from_realization(&config, 42, &r).save(&path)?;
    let back = InstanceFile::load(&path)?.to_realization()?;
    assert_eq!(back, r);
    println!("\ninstance saved to {} and reloaded bit-exactly", path.display());
    Ok(())
}
