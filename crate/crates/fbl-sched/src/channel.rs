//! Synthetic downlink network instances.
//!
//! One base station with `Nt` antennas serves `K` single-antenna users
//! dropped uniformly over a disk cell. The channel of user k is
//! `h_k = sqrt(1/(1+(d_k/d0)^ϱ)) · h̃_k` with i.i.d. circularly-symmetric
//! unit-variance complex Gaussian `h̃_k`, and the noise-normalized channel
//! is `h̄_k = h_k/σ_k`. The SINR of user k under beamformers `{w_l}` and an
//! active user set S is
//!
//! ```text
//! γ_k = |h̄_kᴴ w_k|² / (Σ_{l≠k, l∈S} |h̄_kᴴ w_l|² + 1).
//! ```

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Cell geometry, fading law, and power budget of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub num_antennas: usize,
    pub num_users: usize,
    #[serde(default = "default_cell_radius")]
    pub cell_radius_m: f64,
    #[serde(default = "default_ref_distance")]
    pub ref_distance_m: f64,
    #[serde(default = "default_pathloss_exp")]
    pub pathloss_exp: f64,
    #[serde(default = "default_noise_sigma")]
    pub noise_sigma: f64,
    #[serde(default = "default_snr_db")]
    pub snr_db: f64,
}

fn default_cell_radius() -> f64 {
    300.0
}
fn default_ref_distance() -> f64 {
    30.0
}
fn default_pathloss_exp() -> f64 {
    3.0
}
fn default_noise_sigma() -> f64 {
    1.0
}
fn default_snr_db() -> f64 {
    10.0
}

impl NetworkConfig {
    /// Defaults: cell radius 300 m, d0 = 30 m, ϱ = 3, σ = 1, SNR = 10 dB.
    pub fn new(num_antennas: usize, num_users: usize) -> Self {
        Self {
            num_antennas,
            num_users,
            cell_radius_m: default_cell_radius(),
            ref_distance_m: default_ref_distance(),
            pathloss_exp: default_pathloss_exp(),
            noise_sigma: default_noise_sigma(),
            snr_db: default_snr_db(),
        }
    }

    /// Transmit power budget P = σ²·10^(SNR/10), linear watts.
    pub fn power_budget(&self) -> f64 {
        self.noise_sigma * self.noise_sigma * 10f64.powf(self.snr_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_antennas == 0 || self.num_users == 0 {
            return Err(Error::Config("Nt and K must be at least 1".into()));
        }
        if !(self.cell_radius_m > 1.0) {
            return Err(Error::Config("cell radius must exceed 1 m".into()));
        }
        if !(self.ref_distance_m > 0.0) || !(self.noise_sigma > 0.0) {
            return Err(Error::Config("d0 and σ must be positive".into()));
        }
        if !self.power_budget().is_finite() || self.power_budget() <= 0.0 {
            return Err(Error::Config("power budget must be positive".into()));
        }
        Ok(())
    }
}

/// One static draw of the network: per-user channels and geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Raw channel vectors h_k, length Nt each.
    pub channels: Vec<Vec<Complex64>>,
    /// BS-to-user distances d_k in meters.
    pub distances_m: Vec<f64>,
    /// Per-user noise standard deviations σ_k.
    pub noise_sigmas: Vec<f64>,
    /// Noise-normalized channels h̄_k = h_k/σ_k.
    pub normalized_channels: Vec<Vec<Complex64>>,
}

impl ChannelRealization {
    pub fn num_users(&self) -> usize {
        self.channels.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    /// ‖h̄_k‖².
    pub fn normalized_gain(&self, k: usize) -> f64 {
        self.normalized_channels[k].iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Complex inner product hᴴw = Σ conj(h_i)·w_i.
pub fn inner(h: &[Complex64], w: &[Complex64]) -> Complex64 {
    debug_assert_eq!(h.len(), w.len());
    h.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Draw one network realization. Deterministic for a fixed seed; the RNG is
/// ChaCha12 so realizations are reproducible across platforms.
pub fn draw_channels(config: &NetworkConfig, seed: u64) -> Result<ChannelRealization> {
    config.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let nt = config.num_antennas;
    let k = config.num_users;
    let r_min = 1.0; // 1 m exclusion keeps the path loss finite
    let r_max = config.cell_radius_m;

    let mut channels = Vec::with_capacity(k);
    let mut distances = Vec::with_capacity(k);
    let mut noise_sigmas = Vec::with_capacity(k);
    for _ in 0..k {
        // Uniform over the annulus [r_min, r_max]: area-weighted radius.
        let u: f64 = rng.gen();
        let d = (r_min * r_min + u * (r_max * r_max - r_min * r_min)).sqrt();
        let loss = (1.0 / (1.0 + (d / config.ref_distance_m).powf(config.pathloss_exp))).sqrt();
        let scale = loss * std::f64::consts::FRAC_1_SQRT_2; // unit-variance CN(0,1) entries
        let h: Vec<Complex64> = (0..nt)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * scale, im * scale)
            })
            .collect();
        channels.push(h);
        distances.push(d);
        noise_sigmas.push(config.noise_sigma);
    }
    let normalized = channels
        .iter()
        .zip(&noise_sigmas)
        .map(|(h, s)| h.iter().map(|c| c / s).collect())
        .collect();
    Ok(ChannelRealization {
        channels,
        distances_m: distances,
        noise_sigmas,
        normalized_channels: normalized,
    })
}

/// SINR of user `k` under the given beamformers and active set, Eq.-(2) form.
pub fn sinr(
    weights: &[Vec<Complex64>],
    realization: &ChannelRealization,
    active_set: &[usize],
    k: usize,
) -> Result<f64> {
    if !active_set.contains(&k) {
        return Err(Error::Domain(format!("user {k} is not in the active set")));
    }
    let hbar = &realization.normalized_channels[k];
    let signal = inner(hbar, &weights[k]).norm_sqr();
    let interference: f64 = active_set
        .iter()
        .filter(|&&l| l != k)
        .map(|&l| inner(hbar, &weights[l]).norm_sqr())
        .sum();
    Ok(signal / (interference + 1.0))
}

/// On-disk instance format. Complex entries are stored as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub config: NetworkConfig,
    pub seed: u64,
    pub distances_m: Vec<f64>,
    pub noise_sigmas: Vec<f64>,
    pub channels: Vec<Vec<(f64, f64)>>,
}

impl InstanceFile {
    pub fn from_realization(config: &NetworkConfig, seed: u64, r: &ChannelRealization) -> Self {
        Self {
            config: config.clone(),
            seed,
            distances_m: r.distances_m.clone(),
            noise_sigmas: r.noise_sigmas.clone(),
            channels: r
                .channels
                .iter()
                .map(|h| h.iter().map(|c| (c.re, c.im)).collect())
                .collect(),
        }
    }

    pub fn to_realization(&self) -> Result<ChannelRealization> {
        if self.channels.len() != self.noise_sigmas.len()
            || self.channels.len() != self.distances_m.len()
        {
            return Err(Error::Parse("instance field lengths disagree".into()));
        }
        let channels: Vec<Vec<Complex64>> = self
            .channels
            .iter()
            .map(|h| h.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
            .collect();
        let normalized = channels
            .iter()
            .zip(&self.noise_sigmas)
            .map(|(h, s)| h.iter().map(|c| c / s).collect())
            .collect();
        Ok(ChannelRealization {
            channels,
            distances_m: self.distances_m.clone(),
            noise_sigmas: self.noise_sigmas.clone(),
            normalized_channels: normalized,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
