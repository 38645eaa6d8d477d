//! Builders for the two convex programs used by the scheduler.

use super::{
    expr_from_row, im_inner_row, re_inner_row, solve, unembed, ConicConstraint, ConicProgram,
    ConicStatus, LinExpr,
};
use crate::channel::{inner, ChannelRealization};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Variable layout of the SCA subproblem over a candidate list of size `n`:
/// per-candidate real-embedded beams (2·Nt each), then κ, then φ.
#[derive(Debug, Clone, Copy)]
pub struct ScaVarLayout {
    pub num_antennas: usize,
    pub num_candidates: usize,
}

impl ScaVarLayout {
    pub fn num_vars(&self) -> usize {
        self.num_candidates * (2 * self.num_antennas + 2)
    }

    /// Offset of the embedded beam block of the i-th candidate.
    pub fn beam(&self, i: usize) -> usize {
        i * 2 * self.num_antennas
    }

    pub fn kappa(&self, i: usize) -> usize {
        self.num_candidates * 2 * self.num_antennas + i
    }

    pub fn phi(&self, i: usize) -> usize {
        self.num_candidates * (2 * self.num_antennas + 1) + i
    }

    pub fn extract_beam(&self, x: &[f64], i: usize) -> Vec<Complex64> {
        let o = self.beam(i);
        unembed(&x[o..o + 2 * self.num_antennas])
    }

    /// Flatten per-user state (indexed by global user id) into the
    /// subproblem's variable vector.
    pub fn pack(
        &self,
        candidates: &[usize],
        kappa: &[f64],
        weights: &[Vec<Complex64>],
        phi: &[f64],
    ) -> Vec<f64> {
        let mut x = vec![0.0; self.num_vars()];
        for (i, &k) in candidates.iter().enumerate() {
            let emb = super::embed(&weights[k]);
            x[self.beam(i)..self.beam(i) + emb.len()].copy_from_slice(&emb);
            x[self.kappa(i)] = kappa[k];
            x[self.phi(i)] = phi[k];
        }
        x
    }
}

/// Convex subproblem of one SCA iteration.
///
/// Minimizes `−Σκ + g(κ) − φ(κ)` where `g(κ) = μΣκ + μ(Σκ)²` stays intact
/// and the concave part is replaced by the first-order expansion of
/// `h(κ) = μΣκ² + μ(Σκ)²` at the previous iterate, subject to
///
/// * box `0 ≤ κ ≤ 1`,
/// * interference cone `Σ_{l≠k}|h̄_kᴴw_l|² + 1 ≤ φ_k`,
/// * total power `Σ‖w‖² ≤ P`,
/// * the linearized SINR coupling
///   `κ_kγ̃_k − 2Re(conj(z_k)·h̄_kᴴw_k)/φ_k⁽ᵗ⁾ + (|z_k|/φ_k⁽ᵗ⁾)²·φ_k ≤ 0`
///   with `z_k = h̄_kᴴw_k⁽ᵗ⁾`, the quadratic-over-affine lower bound taken
///   at the previous `(w⁽ᵗ⁾, φ⁽ᵗ⁾)`.
///
/// `prev_*` slices are indexed by global user id; `candidates` selects the
/// users that enter the program.
#[allow(clippy::too_many_arguments)]
pub fn build_sca_subproblem(
    realization: &ChannelRealization,
    gamma_tilde: &[f64],
    candidates: &[usize],
    prev_kappa: &[f64],
    prev_weights: &[Vec<Complex64>],
    prev_phi: &[f64],
    mu: f64,
    power_budget: f64,
) -> Result<(ConicProgram, ScaVarLayout)> {
    if candidates.is_empty() {
        return Err(Error::Program("candidate set is empty".into()));
    }
    for &k in candidates {
        if !(prev_phi[k] > 0.0) {
            return Err(Error::Program(format!(
                "previous φ of user {k} must be strictly positive, got {}",
                prev_phi[k]
            )));
        }
    }
    let layout = ScaVarLayout {
        num_antennas: realization.num_antennas(),
        num_candidates: candidates.len(),
    };
    let mut program = ConicProgram::new(layout.num_vars());

    // Objective. Linear κ term: −1 + μ − h'(κ_k⁽ᵗ⁾); quadratic: μ(Σκ)²;
    // constant: Σ h'_k κ_k⁽ᵗ⁾ − h(κ⁽ᵗ⁾).
    let kappa_prev: Vec<f64> = candidates.iter().map(|&k| prev_kappa[k]).collect();
    let sum_prev: f64 = kappa_prev.iter().sum();
    let h_prev = mu * kappa_prev.iter().map(|k| k * k).sum::<f64>() + mu * sum_prev * sum_prev;
    let mut obj_const = -h_prev;
    for (i, &kp) in kappa_prev.iter().enumerate() {
        let h_grad = 2.0 * mu * (kp + sum_prev);
        program.lin_obj[layout.kappa(i)] = -1.0 + mu - h_grad;
        obj_const += h_grad * kp;
    }
    program.obj_constant = obj_const;
    for i in 0..layout.num_candidates {
        for j in i..layout.num_candidates {
            if mu != 0.0 {
                program.add_quad_obj(layout.kappa(i), layout.kappa(j), 2.0 * mu);
            }
        }
    }

    // Box 0 ≤ κ ≤ 1.
    for i in 0..layout.num_candidates {
        program.add_constraint(ConicConstraint::AffineLe(
            LinExpr::constant(0.0).term(layout.kappa(i), -1.0),
        ));
        program.add_constraint(ConicConstraint::AffineLe(
            LinExpr::constant(-1.0).term(layout.kappa(i), 1.0),
        ));
    }

    // Interference cone and linearized SINR coupling, per candidate.
    for (i, &k) in candidates.iter().enumerate() {
        let hbar = &realization.normalized_channels[k];
        let re_row = re_inner_row(hbar);
        let im_row = im_inner_row(hbar);

        let mut quad = Vec::with_capacity(2 * (layout.num_candidates - 1));
        for (j, _) in candidates.iter().enumerate().filter(|&(j, _)| j != i) {
            quad.push(expr_from_row(&re_row, layout.beam(j)));
            quad.push(expr_from_row(&im_row, layout.beam(j)));
        }
        program.add_constraint(ConicConstraint::QuadLeAffine {
            quad,
            affine: LinExpr::constant(-1.0).term(layout.phi(i), 1.0),
        });

        let z = inner(hbar, &prev_weights[k]);
        let phi_prev = prev_phi[k];
        // 2Re(conj(z)·h̄ᴴw)/φᵗ = (2/φᵗ)(Re(z)·re_row + Im(z)·im_row)·x
        let mut coupling = LinExpr::constant(0.0)
            .term(layout.kappa(i), gamma_tilde[k])
            .term(layout.phi(i), (z.norm() / phi_prev).powi(2));
        let s = 2.0 / phi_prev;
        for (idx, (&a, &b)) in re_row.iter().zip(&im_row).enumerate() {
            let c = -s * (z.re * a + z.im * b);
            if c != 0.0 {
                coupling.coeffs.push((layout.beam(i) + idx, c));
            }
        }
        program.add_constraint(ConicConstraint::AffineLe(coupling));
    }

    // Total power: ‖all beams‖ ≤ √P.
    let mut args = Vec::with_capacity(layout.num_candidates * 2 * layout.num_antennas);
    for i in 0..layout.num_candidates {
        for idx in 0..2 * layout.num_antennas {
            args.push(LinExpr::constant(0.0).term(layout.beam(i) + idx, 1.0));
        }
    }
    program.add_constraint(ConicConstraint::Soc {
        bound: LinExpr::constant(power_budget.sqrt()),
        args,
    });

    Ok((program, layout))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerFeasibility {
    /// Minimum power fits the budget.
    Feasible,
    /// SINR targets reachable but only above the budget.
    OverBudget,
    /// SINR targets unreachable at any power.
    Infeasible,
    /// Solver stopped without an answer.
    Indeterminate,
}

/// Result of the power-minimization feasibility oracle.
#[derive(Debug, Clone)]
pub struct MinPowerOutcome {
    pub feasibility: PowerFeasibility,
    /// Minimum total transmit power (infinite when infeasible).
    pub power: f64,
    /// Beams for all K users; zero outside the queried subset.
    pub weights: Vec<Vec<Complex64>>,
}

impl MinPowerOutcome {
    pub fn feasible(&self) -> bool {
        self.feasibility == PowerFeasibility::Feasible
    }
}

/// Minimize `Σ_{k∈subset} ‖w_k‖²` subject to `γ_k ≥ γ̃_k` for the subset.
///
/// Each SINR constraint is the SOC form
/// `Re(h̄_kᴴw_k) ≥ √γ̃_k·‖[(h̄_kᴴw_l)_{l≠k}; 1]‖`, fixing the phase of
/// `h̄_kᴴw_k` to real nonnegative, which loses no generality.
pub fn min_power_feasible(
    realization: &ChannelRealization,
    subset: &[usize],
    gamma_tilde: &[f64],
    power_budget: f64,
) -> Result<MinPowerOutcome> {
    if subset.is_empty() {
        return Err(Error::Program("subset must be nonempty".into()));
    }
    let nt = realization.num_antennas();
    let n_sub = subset.len();
    let beam = |i: usize| i * 2 * nt;

    let mut program = ConicProgram::new(n_sub * 2 * nt);
    for v in 0..program.num_vars {
        program.add_quad_obj(v, v, 2.0); // ½xᵀ(2I)x = Σ‖w‖²
    }

    for (i, &k) in subset.iter().enumerate() {
        let hbar = &realization.normalized_channels[k];
        let re_row = re_inner_row(hbar);
        let im_row = im_inner_row(hbar);
        let root = gamma_tilde[k].sqrt();
        let mut args = Vec::with_capacity(2 * (n_sub - 1) + 1);
        for (j, _) in subset.iter().enumerate().filter(|&(j, _)| j != i) {
            args.push(scaled_expr(&re_row, beam(j), root));
            args.push(scaled_expr(&im_row, beam(j), root));
        }
        args.push(LinExpr::constant(root));
        program.add_constraint(ConicConstraint::Soc {
            bound: expr_from_row(&re_row, beam(i)),
            args,
        });
    }

    let solution = solve(&program)?;
    let k_total = realization.num_users();
    match solution.status {
        ConicStatus::Optimal => {
            let power = solution.objective_value.max(0.0);
            let mut weights = vec![vec![Complex64::new(0.0, 0.0); nt]; k_total];
            for (i, &k) in subset.iter().enumerate() {
                let o = beam(i);
                weights[k] = unembed(&solution.primal[o..o + 2 * nt]);
            }
            let feasibility = if power <= power_budget + 1e-9 {
                PowerFeasibility::Feasible
            } else {
                PowerFeasibility::OverBudget
            };
            Ok(MinPowerOutcome {
                feasibility,
                power,
                weights,
            })
        }
        ConicStatus::Infeasible => Ok(MinPowerOutcome {
            feasibility: PowerFeasibility::Infeasible,
            power: f64::INFINITY,
            weights: vec![vec![Complex64::new(0.0, 0.0); nt]; k_total],
        }),
        ConicStatus::NumericalFailure => Ok(MinPowerOutcome {
            feasibility: PowerFeasibility::Indeterminate,
            power: f64::NAN,
            weights: vec![vec![Complex64::new(0.0, 0.0); nt]; k_total],
        }),
    }
}

fn scaled_expr(row: &[f64], offset: usize, scale: f64) -> LinExpr {
    let mut e = LinExpr::default();
    for (i, &c) in row.iter().enumerate() {
        if c != 0.0 {
            e.coeffs.push((offset + i, c * scale));
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channels, sinr, NetworkConfig};
    use approx::assert_relative_eq;

    #[test]
    fn single_user_min_power_is_mrt() {
        // γ̃ = 3, deterministic channel with ‖h̄‖² = 2 ⇒ min power 1.5.
        let h = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let r = ChannelRealization {
            channels: vec![h.clone()],
            distances_m: vec![30.0],
            noise_sigmas: vec![1.0],
            normalized_channels: vec![h],
        };
        let out = min_power_feasible(&r, &[0], &[3.0], 10.0).unwrap();
        assert!(out.feasible());
        assert_relative_eq!(out.power, 1.5, epsilon = 1e-6);
        let achieved = sinr(&out.weights, &r, &[0], 0).unwrap();
        assert!(achieved >= 3.0 - 1e-6);
    }

    #[test]
    fn orthogonal_users_decouple() {
        let e1 = vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)];
        let e2 = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)];
        let r = ChannelRealization {
            channels: vec![e1.clone(), e2.clone()],
            distances_m: vec![30.0, 30.0],
            noise_sigmas: vec![1.0, 1.0],
            normalized_channels: vec![e1, e2],
        };
        let gt = [3.0, 2.0];
        let out = min_power_feasible(&r, &[0, 1], &gt, 10.0).unwrap();
        assert!(out.feasible());
        // Σ γ̃_k/‖h̄_k‖² = 3/4 + 2/1.
        assert_relative_eq!(out.power, 0.75 + 2.0, epsilon = 1e-6);
    }

    #[test]
    fn over_budget_is_reported() {
        let h = vec![Complex64::new(0.1, 0.0)];
        let r = ChannelRealization {
            channels: vec![h.clone()],
            distances_m: vec![200.0],
            noise_sigmas: vec![1.0],
            normalized_channels: vec![h],
        };
        // min power = 5/0.01 = 500 ≫ 10.
        let out = min_power_feasible(&r, &[0], &[5.0], 10.0).unwrap();
        assert_eq!(out.feasibility, PowerFeasibility::OverBudget);
        assert!(!out.feasible());
        assert_relative_eq!(out.power, 500.0, max_relative = 1e-5);
    }

    #[test]
    fn subset_monotone_power() {
        let c = NetworkConfig::new(4, 4);
        for seed in 0..10u64 {
            let r = draw_channels(&c, seed).unwrap();
            let gt = [1.5; 4];
            let full: Vec<usize> = (0..4).collect();
            let whole = min_power_feasible(&r, &full, &gt, 1e9).unwrap();
            if !whole.feasible() {
                continue;
            }
            for drop in 0..4usize {
                let sub: Vec<usize> = full.iter().copied().filter(|&u| u != drop).collect();
                let part = min_power_feasible(&r, &sub, &gt, 1e9).unwrap();
                assert!(part.feasible());
                assert!(part.power <= whole.power + 1e-6);
            }
        }
    }

    #[test]
    fn phase_rotation_preserves_feasibility_and_power() {
        let c = NetworkConfig::new(3, 3);
        let r = draw_channels(&c, 5).unwrap();
        let gt = [1.0, 1.0, 1.0];
        let out = min_power_feasible(&r, &[0, 1, 2], &gt, 1e9).unwrap();
        assert!(out.feasible());
        let mut rotated = out.weights.clone();
        for (k, w) in rotated.iter_mut().enumerate() {
            let z = inner(&r.normalized_channels[k], w);
            if z.norm() > 0.0 {
                let rot = z.conj() / z.norm();
                for c in w.iter_mut() {
                    *c *= rot;
                }
            }
        }
        let power_rot: f64 = rotated
            .iter()
            .map(|w| w.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum();
        assert_relative_eq!(power_rot, out.power, epsilon = 1e-9);
        for k in 0..3 {
            let a = sinr(&out.weights, &r, &[0, 1, 2], k).unwrap();
            let b = sinr(&rotated, &r, &[0, 1, 2], k).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn sca_subproblem_shapes_and_degenerate_linearization() {
        let c = NetworkConfig::new(2, 1);
        let r = draw_channels(&c, 1).unwrap();
        let zeros = vec![vec![Complex64::new(0.0, 0.0); 2]; 1];
        // w⁽ᵗ⁾ = 0 degenerates the coupling to κγ̃ ≤ 0, forcing κ = 0.
        let (p, layout) =
            build_sca_subproblem(&r, &[3.0], &[0], &[0.5], &zeros, &[1.0], 0.05, 10.0).unwrap();
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, ConicStatus::Optimal);
        assert!(sol.primal[layout.kappa(0)].abs() < 1e-6);

        // Non-positive previous φ rejected.
        assert!(
            build_sca_subproblem(&r, &[3.0], &[0], &[0.5], &zeros, &[0.0], 0.05, 10.0).is_err()
        );
    }

    #[test]
    fn sca_objective_reduces_to_neg_sum_kappa_at_mu_zero() {
        let c = NetworkConfig::new(2, 2);
        let r = draw_channels(&c, 2).unwrap();
        let prev_w: Vec<Vec<Complex64>> = r.normalized_channels.clone();
        let prev_phi = vec![2.0, 2.0];
        let prev_k = vec![0.3, 0.7];
        let (p, layout) = build_sca_subproblem(
            &r, &[1.0, 1.0], &[0, 1], &prev_k, &prev_w, &prev_phi, 0.0, 10.0,
        )
        .unwrap();
        assert!(p.quad_obj.is_empty());
        assert_eq!(p.obj_constant, 0.0);
        let mut x = vec![0.0; p.num_vars];
        x[layout.kappa(0)] = 0.25;
        x[layout.kappa(1)] = 0.5;
        assert_relative_eq!(p.objective_value(&x), -0.75, epsilon = 1e-12);
    }
}
