//! Real-embedded convex programs and their interior-point solution.
//!
//! Complex beamformers are embedded as stacked real vectors
//! `w ↦ [Re(w); Im(w)]`, turning `Re(hᴴw)` and `Im(hᴴw)` into real linear
//! forms and `|hᴴw|²` into a sum of two squared linear forms. On top of
//! that embedding this module builds two programs:
//!
//! * the per-iteration convex scheduling subproblem (a convex QP objective
//!   over box, cone, and linearized-SINR constraints), and
//! * the power-minimization SOCP used as the feasibility oracle for a fixed
//!   user subset.
//!
//! Programs are stored in a small backend-independent form and lowered to
//! the Clarabel interior-point solver in [`solve`].

mod build;
mod lower;

pub use build::{
    build_sca_subproblem, min_power_feasible, MinPowerOutcome, PowerFeasibility, ScaVarLayout,
};
pub use lower::solve;

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Sparse affine expression `Σ coeffs·x + constant`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinExpr {
    pub coeffs: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn constant(c: f64) -> Self {
        Self {
            coeffs: Vec::new(),
            constant: c,
        }
    }

    pub fn term(mut self, var: usize, coeff: f64) -> Self {
        if coeff != 0.0 {
            self.coeffs.push((var, coeff));
        }
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, c)| c * x[i]).sum::<f64>() + self.constant
    }

    fn max_var(&self) -> Option<usize> {
        self.coeffs.iter().map(|&(i, _)| i).max()
    }
}

/// One conic constraint record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConicConstraint {
    /// expr ≤ 0.
    AffineLe(LinExpr),
    /// ‖args‖₂ ≤ bound.
    Soc { bound: LinExpr, args: Vec<LinExpr> },
    /// Σ quadᵢ² ≤ affine (quadratic-vs-affine, lowered to a cone).
    QuadLeAffine { quad: Vec<LinExpr>, affine: LinExpr },
}

impl ConicConstraint {
    /// Signed violation at `x`; nonpositive means satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        match self {
            ConicConstraint::AffineLe(e) => e.eval(x),
            ConicConstraint::Soc { bound, args } => {
                let norm = args.iter().map(|a| a.eval(x).powi(2)).sum::<f64>().sqrt();
                norm - bound.eval(x)
            }
            ConicConstraint::QuadLeAffine { quad, affine } => {
                let q = quad.iter().map(|a| a.eval(x).powi(2)).sum::<f64>();
                q - affine.eval(x)
            }
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            ConicConstraint::AffineLe(e) => e.max_var(),
            ConicConstraint::Soc { bound, args } => args
                .iter()
                .chain(std::iter::once(bound))
                .filter_map(LinExpr::max_var)
                .max(),
            ConicConstraint::QuadLeAffine { quad, affine } => quad
                .iter()
                .chain(std::iter::once(affine))
                .filter_map(LinExpr::max_var)
                .max(),
        }
    }
}

/// Convex program: minimize `½xᵀPx + qᵀx + c` over the constraints.
///
/// `quad_obj` holds the upper-triangular entries of P, which must be
/// positive semidefinite.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConicProgram {
    pub num_vars: usize,
    pub quad_obj: Vec<(usize, usize, f64)>,
    pub lin_obj: Vec<f64>,
    pub obj_constant: f64,
    pub constraints: Vec<ConicConstraint>,
}

impl ConicProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            quad_obj: Vec::new(),
            lin_obj: vec![0.0; num_vars],
            obj_constant: 0.0,
            constraints: Vec::new(),
        }
    }

    pub fn add_quad_obj(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.quad_obj.push((i, j, value));
    }

    pub fn add_constraint(&mut self, c: ConicConstraint) {
        self.constraints.push(c);
    }

    /// Objective value ½xᵀPx + qᵀx + c at a point.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let mut quad = 0.0;
        for &(i, j, v) in &self.quad_obj {
            quad += if i == j {
                0.5 * v * x[i] * x[i]
            } else {
                v * x[i] * x[j]
            };
        }
        quad + self
            .lin_obj
            .iter()
            .zip(x)
            .map(|(q, xi)| q * xi)
            .sum::<f64>()
            + self.obj_constant
    }

    /// Largest signed constraint violation at a point.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.violation(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Structural checks: variable references in range, objective PSD.
    pub fn validate(&self) -> Result<()> {
        if self.lin_obj.len() != self.num_vars {
            return Err(Error::Program("linear objective length mismatch".into()));
        }
        for &(i, j, _) in &self.quad_obj {
            if i > j || j >= self.num_vars {
                return Err(Error::Program(format!(
                    "quadratic objective entry ({i},{j}) out of range"
                )));
            }
        }
        for (idx, c) in self.constraints.iter().enumerate() {
            if let Some(m) = c.max_var() {
                if m >= self.num_vars {
                    return Err(Error::Program(format!(
                        "constraint {idx} references undeclared variable {m}"
                    )));
                }
            }
        }
        if !self.quad_objective_is_psd() {
            return Err(Error::Program("quadratic objective is not PSD".into()));
        }
        Ok(())
    }

    /// Semidefinite Cholesky on the dense symmetric P (problem sizes here
    /// stay small). Pivots below a relative floor are treated as zero; a
    /// clearly negative pivot fails.
    fn quad_objective_is_psd(&self) -> bool {
        let n = self.num_vars;
        if n == 0 || self.quad_obj.is_empty() {
            return true;
        }
        let mut a = vec![0.0f64; n * n];
        let mut scale = 0.0f64;
        for &(i, j, v) in &self.quad_obj {
            a[i * n + j] += v;
            if i != j {
                a[j * n + i] += v;
            }
            scale = scale.max(v.abs());
        }
        let tol = 1e-10 * scale.max(1.0);
        let mut l = vec![0.0f64; n * n];
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d < -tol {
                return false;
            }
            if d <= tol {
                // semidefinite direction: the whole column must vanish
                for i in (j + 1)..n {
                    let mut s = a[i * n + j];
                    for k in 0..j {
                        s -= l[i * n + k] * l[j * n + k];
                    }
                    if s.abs() > 1e3 * tol {
                        return false;
                    }
                }
                continue;
            }
            let dj = d.sqrt();
            l[j * n + j] = dj;
            for i in (j + 1)..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / dj;
            }
        }
        true
    }

    /// Debug dump for offline inspection.
    pub fn dump(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Outcome of one interior-point solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub status: ConicStatus,
    pub primal: Vec<f64>,
    pub objective_value: f64,
    pub solve_tolerance: f64,
}

// ---------------------------------------------------------------------
// Complex ↔ real embedding helpers
// ---------------------------------------------------------------------

/// Stack a complex vector as `[Re(v); Im(v)]`.
pub fn embed(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|c| c.re).chain(v.iter().map(|c| c.im)).collect()
}

/// Inverse of [`embed`].
pub fn unembed(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect()
}

/// Coefficient row `a` with `a·embed(w) = Re(hᴴw)`.
pub fn re_inner_row(h: &[Complex64]) -> Vec<f64> {
    h.iter().map(|c| c.re).chain(h.iter().map(|c| c.im)).collect()
}

/// Coefficient row `b` with `b·embed(w) = Im(hᴴw)`.
pub fn im_inner_row(h: &[Complex64]) -> Vec<f64> {
    h.iter()
        .map(|c| -c.im)
        .chain(h.iter().map(|c| c.re))
        .collect()
}

/// Place a dense coefficient row over the variable block starting at `offset`.
pub(crate) fn expr_from_row(row: &[f64], offset: usize) -> LinExpr {
    let mut e = LinExpr::default();
    for (i, &c) in row.iter().enumerate() {
        if c != 0.0 {
            e.coeffs.push((offset + i, c));
        }
    }
    e
}
