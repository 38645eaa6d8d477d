//! Lowering of [`ConicProgram`] to the Clarabel interior-point solver.
//!
//! Clarabel solves `min ½xᵀPx + qᵀx  s.t.  Ax + s = b, s ∈ K`. Affine
//! inequalities map to a nonnegative cone block, SOC constraints map
//! directly, and quadratic-vs-affine constraints `‖v‖² ≤ t` are rewritten
//! as `‖[v; (t−1)/2]‖ ≤ (t+1)/2` before lowering.

use super::{ConicConstraint, ConicProgram, ConicSolution, ConicStatus, LinExpr};
use crate::error::Result;
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

const SOLVE_TOLERANCE: f64 = 1e-8;

struct RowBuilder {
    triplets: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
}

impl RowBuilder {
    fn new() -> Self {
        Self {
            triplets: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// Append a row with slack value `s = expr(x)`: since `s = b − Ax`,
    /// the A-row is the negated coefficients and b is the constant.
    fn push_expr(&mut self, e: &LinExpr) {
        let row = self.rhs.len();
        for &(col, coeff) in &e.coeffs {
            self.triplets.push((row, col, -coeff));
        }
        self.rhs.push(e.constant);
    }
}

fn scaled(e: &LinExpr, s: f64) -> LinExpr {
    LinExpr {
        coeffs: e.coeffs.iter().map(|&(i, c)| (i, c * s)).collect(),
        constant: e.constant * s,
    }
}

fn shifted(e: &LinExpr, d: f64) -> LinExpr {
    LinExpr {
        coeffs: e.coeffs.clone(),
        constant: e.constant + d,
    }
}

/// Solve a program; statuses other than optimal/infeasible are reported as
/// numerical failure and carry whatever iterate the solver stopped at.
pub fn solve(program: &ConicProgram) -> Result<ConicSolution> {
    program.validate()?;

    let n = program.num_vars;
    let mut rows = RowBuilder::new();
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();

    // Nonnegative block first: s = −expr(x) ≥ 0 for every expr ≤ 0.
    let mut affine_count = 0usize;
    for c in &program.constraints {
        if let ConicConstraint::AffineLe(e) = c {
            // expr ≤ 0 ⇔ s = −expr ≥ 0: a_row = coeffs, b_row = −constant.
            let row = rows.rhs.len();
            for &(col, coeff) in &e.coeffs {
                rows.triplets.push((row, col, coeff));
            }
            rows.rhs.push(-e.constant);
            affine_count += 1;
        }
    }
    if affine_count > 0 {
        cones.push(SupportedConeT::NonnegativeConeT(affine_count));
    }

    for c in &program.constraints {
        match c {
            ConicConstraint::AffineLe(_) => {}
            ConicConstraint::Soc { bound, args } => {
                rows.push_expr(bound);
                for a in args {
                    rows.push_expr(a);
                }
                cones.push(SupportedConeT::SecondOrderConeT(1 + args.len()));
            }
            ConicConstraint::QuadLeAffine { quad, affine } => {
                // ‖v‖² ≤ t  ⇔  ‖[v; (t−1)/2]‖ ≤ (t+1)/2
                rows.push_expr(&shifted(&scaled(affine, 0.5), 0.5));
                for qrow in quad {
                    rows.push_expr(qrow);
                }
                rows.push_expr(&shifted(&scaled(affine, 0.5), -0.5));
                cones.push(SupportedConeT::SecondOrderConeT(2 + quad.len()));
            }
        }
    }

    let m = rows.rhs.len();
    let a = csc_from_triplets(m, n, &rows.triplets);

    let mut p_triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(program.quad_obj.len());
    for &(i, j, v) in &program.quad_obj {
        p_triplets.push((i, j, v));
    }
    let p = csc_from_triplets(n, n, &p_triplets);

    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .max_iter(200)
        .tol_feas(SOLVE_TOLERANCE)
        .tol_gap_abs(SOLVE_TOLERANCE)
        .tol_gap_rel(SOLVE_TOLERANCE)
        .build()
        .expect("static solver settings");

    let mut solver = DefaultSolver::new(&p, &program.lin_obj, &a, &rows.rhs, &cones, settings);
    solver.solve();
    let sol = &solver.solution;

    let status = match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => ConicStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            ConicStatus::Infeasible
        }
        _ => ConicStatus::NumericalFailure,
    };

    Ok(ConicSolution {
        status,
        primal: sol.x.clone(),
        objective_value: sol.obj_val + program.obj_constant,
        solve_tolerance: SOLVE_TOLERANCE,
    })
}

/// Build a CSC matrix from (row, col, value) triplets, summing duplicates.
fn csc_from_triplets(m: usize, n: usize, triplets: &[(usize, usize, f64)]) -> CscMatrix<f64> {
    let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
    sorted.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));

    let mut colptr = vec![0usize; n + 1];
    let mut rowval: Vec<usize> = Vec::with_capacity(sorted.len());
    let mut nzval: Vec<f64> = Vec::with_capacity(sorted.len());
    let mut last: Option<(usize, usize)> = None;
    for &(r, c, v) in &sorted {
        debug_assert!(r < m && c < n);
        if last == Some((c, r)) {
            *nzval.last_mut().unwrap() += v;
        } else {
            rowval.push(r);
            nzval.push(v);
            colptr[c + 1] += 1;
            last = Some((c, r));
        }
    }
    for c in 0..n {
        colptr[c + 1] += colptr[c];
    }
    CscMatrix::new(m, n, colptr, rowval, nzval)
}
