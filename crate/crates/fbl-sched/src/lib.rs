//! Joint user scheduling and downlink beamforming for short-packet,
//! high-reliability traffic.
//!
//! A multi-antenna base station must serve as many single-antenna users as
//! possible on one time-frequency resource, under a total power budget and
//! a per-user minimum rate evaluated with the finite-blocklength normal
//! approximation rather than the Shannon capacity. The library provides:
//!
//! * [`fbl`] — finite-blocklength rate math and SINR thresholds,
//! * [`channel`] — reproducible synthetic network instances,
//! * [`conic`] — real-embedded convex programs and their interior-point
//!   solution (SCA subproblem, power-minimization feasibility oracle),
//! * [`sca`] — the penalty-based successive-convex-approximation scheduler
//!   with its optional tuning pass,
//! * [`baselines`] — exhaustive search and a Shannon-capacity variant with
//!   post-verification,
//! * [`harness`] — Monte Carlo sweeps with CSV output,
//! * [`cli`] — the `fbl-sched` command-line front end.
//!
//! See the crate `examples/` directory for one runnable example per
//! capability.

pub mod baselines;
pub mod channel;
pub mod cli;
pub mod conic;
pub mod error;
pub mod fbl;
pub mod harness;
pub mod sca;

pub use error::{Error, Result};
