//! Finite-blocklength (FBL) rate mathematics.
//!
//! Short-packet transmission at blocklength `n` with decoding error
//! probability `ε` achieves (in nats per channel use)
//!
//! ```text
//! R(γ) = ln(1 + γ) − θ·sqrt(V(γ)),    θ = Q⁻¹(ε)/sqrt(n),
//! V(γ) = 1 − 1/(1 + γ)²,
//! ```
//!
//! a conservative correction of the Shannon capacity `ln(1 + γ)`. This
//! module evaluates `R`, `V`, the standard-normal upper-tail quantile
//! `Q⁻¹`, and inverts `R` numerically to obtain the minimum SINR that
//! meets a rate target.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::erf;
use std::f64::consts::{LN_2, SQRT_2};

/// Reliability/latency parameters and the derived rate target.
///
/// `theta` and `rate_target_nats` are derived in [`FblParams::new`] and kept
/// alongside the raw inputs so downstream code never recomputes them
/// inconsistently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FblParams {
    /// Decoding error probability, 0 < ε ≤ 0.5.
    pub epsilon: f64,
    /// Number of channel uses per packet.
    pub blocklength_n: u32,
    /// Payload size in bits.
    pub data_bits: u32,
    /// Penalty coefficient θ = Q⁻¹(ε)/√n, nats per channel use.
    pub theta: f64,
    /// Per-user rate target r = (D/n)·ln2, nats per channel use.
    pub rate_target_nats: f64,
}

impl FblParams {
    /// Build parameters from (ε, n, D). The rate target defaults to the
    /// equal-split value D/n bits per channel use, converted to nats.
    pub fn new(epsilon: f64, blocklength_n: u32, data_bits: u32) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 0.5], got {epsilon}"
            )));
        }
        if blocklength_n == 0 {
            return Err(Error::Config("blocklength must be positive".into()));
        }
        if data_bits == 0 {
            return Err(Error::Config("data size must be positive".into()));
        }
        let theta = q_inv(epsilon)? / (blocklength_n as f64).sqrt();
        let rate_target_nats = data_bits as f64 / blocklength_n as f64 * LN_2;
        Ok(Self {
            epsilon,
            blocklength_n,
            data_bits,
            theta,
            rate_target_nats,
        })
    }

    /// Override the rate target (nats per channel use). The default from
    /// [`FblParams::new`] is D/n bits; callers with per-user targets above
    /// that floor may raise it.
    pub fn with_rate_target(mut self, rate_target_nats: f64) -> Result<Self> {
        if rate_target_nats <= 0.0 {
            return Err(Error::Config("rate target must be positive".into()));
        }
        self.rate_target_nats = rate_target_nats;
        Ok(self)
    }
}

/// Standard-normal upper-tail quantile: returns `x` with `Q(x) = p`.
///
/// An erfc-inverse initial guess is polished with Newton steps on
/// `ln Q(x) − ln p`, which stays well conditioned far into the tail.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("q_inv requires p in (0,1), got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let mut x = SQRT_2 * erf::erfc_inv(2.0 * p);
    let ln_p = p.ln();
    for _ in 0..3 {
        let q = q_of(x);
        if q <= 0.0 {
            break;
        }
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf == 0.0 {
            break;
        }
        let step = (q.ln() - ln_p) * q / pdf;
        x += step;
        if step.abs() < 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(x)
}

/// Gaussian upper-tail integral Q(x) = P[N(0,1) > x].
pub fn q_of(x: f64) -> f64 {
    0.5 * erf::erfc(x / SQRT_2)
}

/// Channel dispersion V(γ) = 1 − (1+γ)⁻².
pub fn v_of(gamma: f64) -> Result<f64> {
    if gamma < 0.0 {
        return Err(Error::Domain(format!("v_of requires γ ≥ 0, got {gamma}")));
    }
    let t = 1.0 + gamma;
    Ok(1.0 - 1.0 / (t * t))
}

/// Achievable FBL rate R(γ) = ln(1+γ) − θ·√V(γ), nats per channel use.
///
/// May be negative for small γ when θ > 0.
pub fn rate(gamma: f64, params: &FblParams) -> Result<f64> {
    let v = v_of(gamma)?;
    Ok((1.0 + gamma).ln() - params.theta * v.sqrt())
}

/// Shannon-capacity SINR threshold 2^(D/n) − 1.
///
/// With the bits-to-nats convention of [`FblParams::new`] this equals
/// `exp(rate_target_nats) − 1`.
pub fn shannon_min_sinr(params: &FblParams) -> f64 {
    (params.rate_target_nats).exp() - 1.0
}

/// Minimum SINR γ̃ whose FBL rate meets the target: the unique root of
/// `rate(γ) = r` above the Shannon threshold `e^r − 1`.
///
/// R is strictly increasing on that half-line and sits strictly below the
/// target at the Shannon threshold whenever θ > 0, so the root is bracketed
/// by doubling and located by bisection to 1e−9 in rate.
pub fn min_sinr(params: &FblParams) -> Result<f64> {
    let r = params.rate_target_nats;
    if r <= 0.0 {
        return Err(Error::Config("rate target must be positive".into()));
    }
    let lo = shannon_min_sinr(params);
    if params.theta == 0.0 {
        return Ok(lo);
    }
    let f = |g: f64| rate(g, params).expect("γ ≥ 0 inside bracket") - r;
    debug_assert!(f(lo) <= 0.0);
    let mut hi = (2.0 * lo).max(1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Domain("min_sinr bracket diverged".into()));
        }
    }
    let mut lo = lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= 1e-12 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(eps: f64, n: u32, d: u32) -> FblParams {
        FblParams::new(eps, n, d).unwrap()
    }

    #[test]
    fn q_inv_symmetry_and_median() {
        assert_eq!(q_inv(0.5).unwrap(), 0.0);
        let a = q_inv(0.01).unwrap();
        let b = q_inv(0.99).unwrap();
        assert_relative_eq!(a, -b, max_relative = 1e-12);
    }

    #[test]
    fn q_inv_golden_tail_values() {
        // Frozen from a 40-digit bisection on Q via mpmath's erfc.
        assert_relative_eq!(q_inv(1e-6).unwrap(), 4.753424308822899, max_relative = 1e-11);
        assert_relative_eq!(q_inv(1e-3).unwrap(), 3.0902323061678136, max_relative = 1e-11);
        assert_relative_eq!(q_inv(1e-9).unwrap(), 5.997807015007687, max_relative = 1e-11);
        assert_relative_eq!(q_inv(1e-12).unwrap(), 7.034483825301132, max_relative = 1e-11);
    }

    #[test]
    fn q_inv_rejects_out_of_domain() {
        assert!(q_inv(0.0).is_err());
        assert!(q_inv(1.0).is_err());
        assert!(q_inv(-0.1).is_err());
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(v_of(0.0).unwrap(), 0.0);
        assert_relative_eq!(v_of(1.0).unwrap(), 0.75);
        assert_relative_eq!(v_of(3.0).unwrap(), 0.9375);
        assert!(v_of(-1e-9).is_err());
    }

    #[test]
    fn rate_reduces_to_shannon_at_theta_zero() {
        let p = params(0.5, 128, 128);
        assert_eq!(p.theta, 0.0);
        let g = std::f64::consts::E - 1.0;
        assert_relative_eq!(rate(g, &p).unwrap(), 1.0, max_relative = 1e-12);
        assert_eq!(rate(0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn rate_golden_value() {
        // R(3) at ε=1e−6, n=128; frozen from the 40-digit evaluation.
        let p = params(1e-6, 128, 256);
        assert_relative_eq!(rate(3.0, &p).unwrap(), 0.9794884674736868, max_relative = 1e-10);
        assert!(rate(-0.5, &p).is_err());
    }

    #[test]
    fn shannon_threshold_values() {
        assert_relative_eq!(shannon_min_sinr(&params(1e-6, 128, 256)), 3.0, max_relative = 1e-12);
        assert_relative_eq!(shannon_min_sinr(&params(1e-6, 128, 128)), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn min_sinr_matches_shannon_when_theta_zero() {
        // r = ln4 (D/n = 2 bits), θ = 0 ⇒ γ̃ = 3.
        let p = params(0.5, 128, 256);
        assert_relative_eq!(min_sinr(&p).unwrap(), 3.0, max_relative = 1e-9);
    }

    #[test]
    fn min_sinr_golden_and_round_trip() {
        let p = params(1e-6, 128, 256);
        let g = min_sinr(&p).unwrap();
        assert_relative_eq!(g, 5.053700409002079, max_relative = 1e-8);
        assert!((rate(g, &p).unwrap() - p.rate_target_nats).abs() <= 1e-9);
        assert!(g >= shannon_min_sinr(&p));
    }

    #[test]
    fn theta_recomputation_consistent() {
        let p = params(1e-5, 256, 200);
        let recomputed = q_inv(p.epsilon).unwrap() / (p.blocklength_n as f64).sqrt();
        assert_relative_eq!(p.theta, recomputed, max_relative = 1e-12);
        assert!(p.theta > 0.0);
        assert!(p.rate_target_nats > 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(FblParams::new(0.0, 128, 256).is_err());
        assert!(FblParams::new(0.6, 128, 256).is_err());
        assert!(FblParams::new(1e-6, 0, 256).is_err());
        assert!(FblParams::new(1e-6, 128, 0).is_err());
    }

    proptest! {
        #[test]
        fn q_inv_round_trip(exp10 in -12.0f64..-0.31) {
            let p = 10f64.powf(exp10);
            let x = q_inv(p).unwrap();
            prop_assert!(((q_of(x) - p) / p).abs() <= 1e-10);
        }

        #[test]
        fn fbl_rate_below_shannon(gamma in 0.0f64..100.0) {
            let p = params(1e-6, 128, 256);
            prop_assert!(rate(gamma, &p).unwrap() < (1.0 + gamma).ln() + 1e-15);
        }

        #[test]
        fn dispersion_monotone(a in 0.0f64..50.0, b in 0.0f64..50.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (vl, vh) = (v_of(lo).unwrap(), v_of(hi).unwrap());
            prop_assert!(vl <= vh && (0.0..1.0).contains(&vl) && vh < 1.0);
        }

        #[test]
        fn min_sinr_round_trip_random(
            eps10 in -9.0f64..-0.4,
            n in 32u32..1024,
            d in 16u32..1024,
        ) {
            let p = params(10f64.powf(eps10), n, d);
            let g = min_sinr(&p).unwrap();
            prop_assert!((rate(g, &p).unwrap() - p.rate_target_nats).abs() <= 1e-9);
            prop_assert!(g >= shannon_min_sinr(&p) - 1e-12);
        }
    }
}
