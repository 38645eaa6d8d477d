//! Monte Carlo sweep over blocklength, comparing the scheduler with and
//! without tuning and with the Shannon-capacity variant. Prints the CSV the
//! harness would write to disk.

use fbl_sched::baselines::DEFAULT_ES_CAP;
use fbl_sched::channel::NetworkConfig;
use fbl_sched::harness::{run_sweep, to_csv, Method, SweepAxis, SweepConfig};
use fbl_sched::sca::ScaConfig;

fn main() -> fbl_sched::Result<()> {
    let config = SweepConfig {
        axis: SweepAxis::Blocklength,
        axis_values: vec![64.0, 128.0, 256.0, 512.0],
        network: NetworkConfig::new(4, 8),
        epsilon: 1e-6,
        blocklength_n: 128,
        data_bits: 256,
        trials: 100,
        master_seed: 1,
        methods: vec![Method::ScaTuned, Method::ScaPlain, Method::Shannon],
        sca: ScaConfig::default(),
        es_cap: DEFAULT_ES_CAP,
    };
    let result = run_sweep(&config)?;
    print!("{}", to_csv(&result));
    eprintln!(
        "\nmean wall time per trial and axis point: {:?} ms",
        result.timing_ms
    );
    Ok(())
}
