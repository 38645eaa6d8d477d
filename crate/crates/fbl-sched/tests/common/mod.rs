//! Independent oracles for the acceptance suite. Everything here is
//! implemented from scratch (series/continued fractions, bisection, grid
//! search) so it shares no code path with the library under test.

#![allow(dead_code)]

use num_complex::Complex64;

const SQRT_PI: f64 = 1.7724538509055160273;

/// erf(x) by Taylor series, accurate for |x| ≤ 2.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for n in 1..200 {
        term *= -x2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    2.0 / SQRT_PI * sum
}

/// erfc(x) by the Lentz continued fraction, accurate for x ≥ 2.
fn erfc_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = tiny;
    let mut c = f;
    let mut d = 0.0;
    // K = 1/(x+) (1/2)/(x+) (1)/(x+) (3/2)/(x+) ...
    for n in 0..400 {
        let a = if n == 0 { 1.0 } else { n as f64 / 2.0 };
        let b = x;
        d = b + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x * x).exp() / SQRT_PI * f
}

/// Complementary error function oracle.
pub fn erfc_oracle(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc_oracle(-x)
    } else if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_cf(x)
    }
}

/// Gaussian tail probability Q(x).
pub fn q_oracle(x: f64) -> f64 {
    0.5 * erfc_oracle(x / std::f64::consts::SQRT_2)
}

/// Inverse of Q by bisection; valid for p in (0, 0.5].
pub fn q_inv_oracle(p: f64) -> f64 {
    assert!(p > 0.0 && p <= 0.5);
    let mut lo = 0.0f64;
    let mut hi = 40.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_oracle(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        dx += (x - mx) * (x - mx);
        dy += (y - my) * (y - my);
    }
    if dx == 0.0 || dy == 0.0 {
        return 0.0;
    }
    num / (dx * dy).sqrt()
}

fn inner(h: &[Complex64], w: &[Complex64]) -> Complex64 {
    h.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Brute-force min-power oracle for two users with two antennas.
///
/// Each unit beam direction is `[cos θ, sin θ·e^{iψ}]` up to an irrelevant
/// global phase. For fixed directions the two SINR constraints are active
/// at the optimum, giving a 2×2 linear system in the powers. A coarse grid
/// over (θ₁, ψ₁, θ₂, ψ₂) is refined around the incumbent.
pub fn grid_min_power_two_user(
    hbar: &[Vec<Complex64>],
    gamma: &[f64],
) -> Option<f64> {
    assert_eq!(hbar.len(), 2);
    assert_eq!(hbar[0].len(), 2);

    let powers_for = |angles: [f64; 4]| -> Option<(f64, f64)> {
        let u1 = [
            Complex64::new(angles[0].cos(), 0.0),
            Complex64::from_polar(angles[0].sin(), angles[1]),
        ];
        let u2 = [
            Complex64::new(angles[2].cos(), 0.0),
            Complex64::from_polar(angles[2].sin(), angles[3]),
        ];
        let g11 = inner(&hbar[0], &u1).norm_sqr();
        let g12 = inner(&hbar[0], &u2).norm_sqr();
        let g21 = inner(&hbar[1], &u1).norm_sqr();
        let g22 = inner(&hbar[1], &u2).norm_sqr();
        let det = g11 * g22 - gamma[0] * gamma[1] * g12 * g21;
        if det <= 1e-12 {
            return None;
        }
        let p1 = gamma[0] * (g22 + gamma[1] * g12) / det;
        let p2 = gamma[1] * (g11 + gamma[0] * g21) / det;
        if p1 >= 0.0 && p2 >= 0.0 && p1.is_finite() && p2.is_finite() {
            Some((p1, p2))
        } else {
            None
        }
    };

    let half_pi = std::f64::consts::FRAC_PI_2;
    let two_pi = std::f64::consts::TAU;
    let mut center = [half_pi / 2.0, std::f64::consts::PI, half_pi / 2.0, std::f64::consts::PI];
    let mut span = [half_pi, two_pi, half_pi, two_pi];
    let mut best: Option<(f64, [f64; 4])> = None;

    for pass in 0..5 {
        let steps = if pass == 0 { 20 } else { 10 };
        let mut local_best: Option<(f64, [f64; 4])> = best;
        let axis = |i: usize, t: usize| center[i] - span[i] / 2.0 + span[i] * t as f64 / steps as f64;
        for t1 in 0..=steps {
            for t2 in 0..=steps {
                for t3 in 0..=steps {
                    for t4 in 0..=steps {
                        let a = [axis(0, t1), axis(1, t2), axis(2, t3), axis(3, t4)];
                        if let Some((p1, p2)) = powers_for(a) {
                            let total = p1 + p2;
                            if local_best.map_or(true, |(b, _)| total < b) {
                                local_best = Some((total, a));
                            }
                        }
                    }
                }
            }
        }
        best = local_best;
        let (_, a) = best?;
        center = a;
        for s in span.iter_mut() {
            *s /= 4.0;
        }
    }
    best.map(|(p, _)| p)
}
