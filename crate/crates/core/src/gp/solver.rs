//! Log-domain barrier solver for standard geometric programs.
//!
//! With `y = log x` a GP becomes convex: a monomial objective turns into a
//! linear form, posynomial constraints into log-sum-exp functions, and
//! monomial constraints into affine inequalities. The problems produced by
//! the waveform optimizer are tiny (tens of variables, a handful of
//! constraints), so a dense phase-1/phase-2 barrier method with Newton
//! centering is used rather than an external solver.

use nalgebra::{DMatrix, DVector};

use super::{log_sum_exp, Monomial, Posynomial};
use crate::error::{Error, Result};

/// Maximize a monomial subject to posynomial and monomial upper bounds.
///
/// All constraints are of the form `f(x) <= 1` on the strictly positive
/// orthant. The feasible set must have nonempty interior for the barrier
/// method to certify optimality.
#[derive(Debug, Clone)]
pub struct GpProblem {
    objective: Monomial,
    posynomial_constraints: Vec<Posynomial>,
    monomial_constraints: Vec<Monomial>,
}

impl GpProblem {
    pub fn new(
        objective: Monomial,
        posynomial_constraints: Vec<Posynomial>,
        monomial_constraints: Vec<Monomial>,
    ) -> Result<Self> {
        let n_vars = objective.n_vars();
        if n_vars == 0 {
            return Err(Error::InvalidParameter(
                "GP needs at least one variable".into(),
            ));
        }
        for p in &posynomial_constraints {
            if p.n_vars() != n_vars {
                return Err(Error::DimensionMismatch {
                    expected: n_vars,
                    got: p.n_vars(),
                });
            }
        }
        for m in &monomial_constraints {
            if m.n_vars() != n_vars {
                return Err(Error::DimensionMismatch {
                    expected: n_vars,
                    got: m.n_vars(),
                });
            }
        }
        if posynomial_constraints.is_empty() && monomial_constraints.is_empty() {
            return Err(Error::UnconstrainedGp);
        }
        Ok(Self {
            objective,
            posynomial_constraints,
            monomial_constraints,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.objective.n_vars()
    }

    pub fn objective(&self) -> &Monomial {
        &self.objective
    }

    pub fn posynomial_constraints(&self) -> &[Posynomial] {
        &self.posynomial_constraints
    }

    pub fn monomial_constraints(&self) -> &[Monomial] {
        &self.monomial_constraints
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpStatus {
    /// KKT residual and duality gap below the requested tolerance.
    Optimal,
    /// Newton budget exhausted; the iterate is feasible but not certified.
    MaxIterations,
    /// Phase-1 found no strictly feasible point.
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct GpSolution {
    pub variables: Vec<f64>,
    pub objective_value: f64,
    pub kkt_residual: f64,
    pub status: GpStatus,
    pub newton_iterations: usize,
}

/// One constraint `u(y) = log sum_k exp(b_k + a_k . y) <= 0` in log variables.
/// A monomial constraint is the single-term case, which makes `u` affine.
struct LogConstraint {
    term_offsets: Vec<f64>,
    term_exponents: Vec<DVector<f64>>,
}

impl LogConstraint {
    fn from_posynomial(p: &Posynomial) -> Self {
        Self {
            term_offsets: p.terms().iter().map(|t| t.coefficient().ln()).collect(),
            term_exponents: p
                .terms()
                .iter()
                .map(|t| DVector::from_column_slice(t.exponents()))
                .collect(),
        }
    }

    fn from_monomial(m: &Monomial) -> Self {
        Self {
            term_offsets: vec![m.coefficient().ln()],
            term_exponents: vec![DVector::from_column_slice(m.exponents())],
        }
    }

    fn value(&self, y: &DVector<f64>) -> f64 {
        let logs: Vec<f64> = self
            .term_offsets
            .iter()
            .zip(&self.term_exponents)
            .map(|(b, a)| b + a.dot(y))
            .collect();
        log_sum_exp(&logs)
    }

    /// Value, gradient, and Hessian of the log-sum-exp at `y`.
    fn derivatives(&self, y: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = y.len();
        let logs: Vec<f64> = self
            .term_offsets
            .iter()
            .zip(&self.term_exponents)
            .map(|(b, a)| b + a.dot(y))
            .collect();
        let u = log_sum_exp(&logs);
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for (log_k, a) in logs.iter().zip(&self.term_exponents) {
            let p = (log_k - u).exp();
            grad.axpy(p, a, 1.0);
            hess.syger(p, a, a, 1.0);
        }
        hess.syger(-1.0, &grad, &grad, 1.0);
        // syger fills the lower triangle; mirror it.
        for i in 0..n {
            for j in (i + 1)..n {
                hess[(i, j)] = hess[(j, i)];
            }
        }
        (u, grad, hess)
    }
}

const BARRIER_MU: f64 = 30.0;
const CENTERING_TOL: f64 = 1e-12;
const ARMIJO_SLOPE: f64 = 0.25;
const MIN_STEP: f64 = 1e-24;
const PHASE1_FEAS_MARGIN: f64 = 1e-10;
/// Per-iteration cap on the log-variable move; ridge-regularized steps on a
/// singular Hessian would otherwise teleport iterates out of f64 range.
const STEP_CAP: f64 = 20.0;
/// Newton iterations allowed within one centering before accepting the
/// iterate as-is; the duality-gap certificate stays honest either way.
const MAX_ITERS_PER_CENTERING: usize = 60;

/// Solve a standard GP to relative tolerance `tol` on the objective.
///
/// Phase 1 searches for a strictly feasible point; phase 2 follows the
/// central path until the duality-gap estimate drops below `tol`.
/// `max_newton_iters` caps the total Newton step count across both phases.
pub fn solve_gp(problem: &GpProblem, tol: f64, max_newton_iters: usize) -> Result<GpSolution> {
    solve_gp_from(problem, tol, max_newton_iters, None)
}

/// [`solve_gp`] with an optional strictly feasible warm start in the
/// original (positive) variables. An infeasible start falls back to phase 1.
pub fn solve_gp_from(
    problem: &GpProblem,
    tol: f64,
    max_newton_iters: usize,
    start: Option<&[f64]>,
) -> Result<GpSolution> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter("gp tolerance must be > 0".into()));
    }
    if max_newton_iters == 0 {
        return Err(Error::InvalidParameter(
            "newton budget must be at least 1".into(),
        ));
    }
    let n = problem.n_vars();
    let constraints: Vec<LogConstraint> = problem
        .posynomial_constraints()
        .iter()
        .map(LogConstraint::from_posynomial)
        .chain(
            problem
                .monomial_constraints()
                .iter()
                .map(LogConstraint::from_monomial),
        )
        .collect();

    let mut budget = NewtonBudget {
        used: 0,
        cap: max_newton_iters,
    };

    // Starting point: caller-supplied when strictly feasible, else phase 1.
    let y0 = start.and_then(|x| {
        if x.len() != n || x.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return None;
        }
        let y = DVector::from_iterator(n, x.iter().map(|v| v.ln()));
        let strictly_inside = constraints.iter().all(|c| c.value(&y) < -1e-12);
        strictly_inside.then_some(y)
    });
    let y0 = match y0 {
        Some(y) => y,
        None => match phase1(&constraints, n, &mut budget) {
            Phase1Outcome::Feasible(y) => y,
            Phase1Outcome::Infeasible => {
                return Ok(GpSolution {
                    variables: vec![1.0; n],
                    objective_value: f64::NAN,
                    kkt_residual: f64::INFINITY,
                    status: GpStatus::Infeasible,
                    newton_iterations: budget.used,
                });
            }
            Phase1Outcome::BudgetExhausted => {
                return Ok(GpSolution {
                    variables: vec![1.0; n],
                    objective_value: f64::NAN,
                    kkt_residual: f64::INFINITY,
                    status: GpStatus::MaxIterations,
                    newton_iterations: budget.used,
                });
            }
        },
    };

    // Phase 2: minimize t * (-a0 . y) + barrier, increasing t geometrically.
    let a0 = DVector::from_column_slice(problem.objective().exponents());
    let m = constraints.len() as f64;
    let gap_target = 0.25 * tol;
    let mut t = 1.0;
    let mut y = y0;
    let mut exhausted = false;
    let mut final_decrement;
    loop {
        let outcome = center(&constraints, &a0, t, &mut y, &mut budget);
        final_decrement = outcome.decrement;
        if !outcome.converged && budget.exhausted() {
            exhausted = true;
            break;
        }
        if m / t <= gap_target {
            break;
        }
        t *= BARRIER_MU;
    }

    // Suboptimality certificate: the duality gap m/t of the exact t-center
    // plus the centering error, which the final Newton decrement bounds.
    let kkt_residual = (m + 0.5 * final_decrement.max(0.0)) / t;
    let objective_value = (problem.objective().coefficient().ln() + a0.dot(&y)).exp();
    let status = if exhausted {
        GpStatus::MaxIterations
    } else if kkt_residual <= tol {
        GpStatus::Optimal
    } else {
        GpStatus::MaxIterations
    };
    Ok(GpSolution {
        variables: y.iter().map(|v| v.exp()).collect(),
        objective_value,
        kkt_residual,
        status,
        newton_iterations: budget.used,
    })
}

struct NewtonBudget {
    used: usize,
    cap: usize,
}

impl NewtonBudget {
    fn exhausted(&self) -> bool {
        self.used >= self.cap
    }
}

enum Phase1Outcome {
    Feasible(DVector<f64>),
    Infeasible,
    BudgetExhausted,
}

/// Minimize the slack `w` subject to `u_i(y) <= w`; any iterate with
/// `max_i u_i(y)` below a negative margin is strictly feasible.
fn phase1(constraints: &[LogConstraint], n: usize, budget: &mut NewtonBudget) -> Phase1Outcome {
    let mut y = DVector::zeros(n);
    let max_u = |y: &DVector<f64>| {
        constraints
            .iter()
            .map(|c| c.value(y))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    if max_u(&y) < -PHASE1_FEAS_MARGIN {
        return Phase1Outcome::Feasible(y);
    }
    let mut w = max_u(&y) + 1.0;
    let m = constraints.len() as f64;
    let mut t = 1.0;

    loop {
        // Newton centering in (y, w).
        for _ in 0..MAX_ITERS_PER_CENTERING {
            if budget.exhausted() {
                return Phase1Outcome::BudgetExhausted;
            }
            budget.used += 1;

            let mut g = DVector::zeros(n + 1);
            let mut h = DMatrix::zeros(n + 1, n + 1);
            g[n] = t;
            for c in constraints {
                let (u, cg, ch) = c.derivatives(&y);
                let d = w - u;
                let inv = 1.0 / d;
                for i in 0..n {
                    g[i] += cg[i] * inv;
                    for j in 0..n {
                        h[(i, j)] += ch[(i, j)] * inv + cg[i] * cg[j] * inv * inv;
                    }
                    h[(i, n)] -= cg[i] * inv * inv;
                    h[(n, i)] -= cg[i] * inv * inv;
                }
                g[n] -= inv;
                h[(n, n)] += inv * inv;
            }
            let step = match solve_newton_system(&h, &g) {
                Some(s) => s,
                None => return Phase1Outcome::Infeasible,
            };
            let decrement = g.dot(&step);
            if decrement * 0.5 <= CENTERING_TOL {
                break;
            }

            let value = |y: &DVector<f64>, w: f64| -> Option<f64> {
                let mut f = t * w;
                for c in constraints {
                    let d = w - c.value(y);
                    if d <= 0.0 {
                        return None;
                    }
                    f -= d.ln();
                }
                Some(f)
            };
            let f0 = value(&y, w).expect("phase-1 iterate left the domain");
            let mut alpha = (STEP_CAP / step.amax()).min(1.0);
            let stalled;
            loop {
                let y_trial = &y - alpha * step.rows(0, n);
                let w_trial = w - alpha * step[n];
                if let Some(f) = value(&y_trial, w_trial) {
                    if f <= f0 - ARMIJO_SLOPE * alpha * decrement {
                        stalled = alpha * step.amax() <= 1e-15 * (1.0 + w.abs().max(y.amax()));
                        y = y_trial;
                        w = w_trial;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < MIN_STEP {
                    stalled = true;
                    break;
                }
            }

            if max_u(&y) < -PHASE1_FEAS_MARGIN {
                return Phase1Outcome::Feasible(y);
            }
            if stalled {
                break;
            }
        }
        if max_u(&y) < -PHASE1_FEAS_MARGIN {
            return Phase1Outcome::Feasible(y);
        }
        if m / t <= 1e-10 {
            // Slack minimized to high accuracy and still nonnegative.
            return Phase1Outcome::Infeasible;
        }
        t *= BARRIER_MU;
    }
}

struct CenterOutcome {
    converged: bool,
    /// Newton decrement squared at the stopping iterate.
    decrement: f64,
}

/// Newton-center `t * (-a0 . y) - sum log(-u_i)` from the current iterate.
fn center(
    constraints: &[LogConstraint],
    a0: &DVector<f64>,
    t: f64,
    y: &mut DVector<f64>,
    budget: &mut NewtonBudget,
) -> CenterOutcome {
    let n = y.len();
    let mut decrement = f64::INFINITY;
    for _ in 0..MAX_ITERS_PER_CENTERING {
        if budget.exhausted() {
            return CenterOutcome {
                converged: false,
                decrement,
            };
        }
        budget.used += 1;

        let mut g = -t * a0;
        let mut h = DMatrix::zeros(n, n);
        for c in constraints {
            let (u, cg, ch) = c.derivatives(y);
            let inv = 1.0 / (-u);
            h.syger(inv * inv, &cg, &cg, 1.0);
            for i in 0..n {
                g[i] += cg[i] * inv;
                for j in 0..=i {
                    h[(i, j)] += ch[(i, j)] * inv;
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                h[(i, j)] = h[(j, i)];
            }
        }

        let step = match solve_newton_system(&h, &g) {
            Some(s) => s,
            None => {
                return CenterOutcome {
                    converged: true,
                    decrement,
                }
            }
        };
        decrement = g.dot(&step);
        if decrement * 0.5 <= CENTERING_TOL {
            return CenterOutcome {
                converged: true,
                decrement,
            };
        }

        let value = |y: &DVector<f64>| -> Option<f64> {
            let mut f = -t * a0.dot(y);
            for c in constraints {
                let u = c.value(y);
                if u >= 0.0 {
                    return None;
                }
                f -= (-u).ln();
            }
            Some(f)
        };
        let f0 = value(y).expect("barrier iterate left the feasible interior");
        let mut alpha = (STEP_CAP / step.amax()).min(1.0);
        loop {
            let trial = &*y - alpha * &step;
            if let Some(f) = value(&trial) {
                if f <= f0 - ARMIJO_SLOPE * alpha * decrement {
                    let moved = alpha * step.amax();
                    *y = trial;
                    if moved <= 1e-15 * (1.0 + y.amax()) {
                        // At the floating-point noise floor for this t.
                        return CenterOutcome {
                            converged: true,
                            decrement,
                        };
                    }
                    break;
                }
            }
            alpha *= 0.5;
            if alpha < MIN_STEP {
                // Line search stalled at numerical precision; accept.
                return CenterOutcome {
                    converged: true,
                    decrement,
                };
            }
        }
    }
    CenterOutcome {
        converged: true,
        decrement,
    }
}

/// Solve `H d = g` with a Cholesky factorization, adding a diagonal ridge
/// when `H` is numerically semidefinite.
fn solve_newton_system(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let n = h.nrows();
    let scale = h.diagonal().amax().max(1e-300);
    let mut ridge = 0.0;
    for _ in 0..8 {
        let mut hr = h.clone();
        if ridge > 0.0 {
            for i in 0..n {
                hr[(i, i)] += ridge;
            }
        }
        if let Some(chol) = hr.cholesky() {
            let d = chol.solve(g);
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        ridge = if ridge == 0.0 {
            scale * 1e-12
        } else {
            ridge * 100.0
        };
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(c: f64, e: &[f64]) -> Monomial {
        Monomial::new(c, e.to_vec()).unwrap()
    }

    fn posy(terms: &[(f64, &[f64])]) -> Posynomial {
        Posynomial::new(
            terms
                .iter()
                .map(|(c, e)| Monomial::new(*c, e.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_active_monomial_constraint() {
        // maximize x1 s.t. x1 <= 1
        let problem =
            GpProblem::new(mono(1.0, &[1.0]), vec![], vec![mono(1.0, &[1.0])]).unwrap();
        let sol = solve_gp(&problem, 1e-8, 400).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        assert!((sol.variables[0] - 1.0).abs() < 1e-6);
        assert!((sol.objective_value - 1.0).abs() < 1e-6);
        assert!(sol.kkt_residual <= 1e-8);
    }

    #[test]
    fn symmetric_quadratic_ball() {
        // maximize x1*x2 s.t. 0.5 x1^2 + 0.5 x2^2 <= 1 -> x = (1, 1)
        let problem = GpProblem::new(
            mono(1.0, &[1.0, 1.0]),
            vec![posy(&[(0.5, &[2.0, 0.0]), (0.5, &[0.0, 2.0])])],
            vec![],
        )
        .unwrap();
        let sol = solve_gp(&problem, 1e-9, 400).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        assert!((sol.variables[0] - 1.0).abs() < 1e-6);
        assert!((sol.variables[1] - 1.0).abs() < 1e-6);
        assert!((sol.objective_value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn redundant_constraint_ignored() {
        // maximize x1 s.t. x1/2 <= 1 and x1 <= 1
        let problem = GpProblem::new(
            mono(1.0, &[1.0]),
            vec![],
            vec![mono(0.5, &[1.0]), mono(1.0, &[1.0])],
        )
        .unwrap();
        let sol = solve_gp(&problem, 1e-8, 400).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        assert!((sol.variables[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_bounds_detected() {
        // x <= 0.5 and x >= 2 cannot hold together.
        let problem = GpProblem::new(
            mono(1.0, &[1.0]),
            vec![],
            vec![mono(2.0, &[1.0]), mono(2.0, &[-1.0])],
        )
        .unwrap();
        let sol = solve_gp(&problem, 1e-8, 2000).unwrap();
        assert_eq!(sol.status, GpStatus::Infeasible);
    }

    #[test]
    fn exhausted_budget_reports_max_iterations() {
        let problem = GpProblem::new(
            mono(1.0, &[1.0, 1.0]),
            vec![posy(&[(0.5, &[2.0, 0.0]), (0.5, &[0.0, 2.0])])],
            vec![],
        )
        .unwrap();
        let sol = solve_gp(&problem, 1e-9, 2).unwrap();
        assert_eq!(sol.status, GpStatus::MaxIterations);
    }

    #[test]
    fn warm_start_matches_cold_start() {
        let problem = GpProblem::new(
            mono(2.0, &[1.0, 0.5]),
            vec![posy(&[(0.25, &[2.0, 0.0]), (0.75, &[0.0, 1.0])])],
            vec![mono(0.2, &[1.0, 0.0])],
        )
        .unwrap();
        let cold = solve_gp(&problem, 1e-9, 600).unwrap();
        let warm = solve_gp_from(&problem, 1e-9, 600, Some(&[0.5, 0.5])).unwrap();
        assert_eq!(cold.status, GpStatus::Optimal);
        assert_eq!(warm.status, GpStatus::Optimal);
        let rel = (cold.objective_value - warm.objective_value).abs() / cold.objective_value;
        assert!(rel < 1e-7, "cold vs warm objective differ by {rel}");
    }

    #[test]
    fn solution_is_feasible() {
        let problem = GpProblem::new(
            mono(1.0, &[2.0, 1.0, 0.0]),
            vec![posy(&[
                (0.3, &[2.0, 0.0, 0.0]),
                (0.3, &[0.0, 2.0, 0.0]),
                (0.4, &[0.0, 0.0, 2.0]),
            ])],
            vec![mono(0.7, &[0.0, 1.0, -1.0])],
        )
        .unwrap();
        let sol = solve_gp(&problem, 1e-8, 600).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        let x = &sol.variables;
        let ball = 0.3 * x[0] * x[0] + 0.3 * x[1] * x[1] + 0.4 * x[2] * x[2];
        assert!(ball <= 1.0 + 1e-9);
        assert!(0.7 * x[1] / x[2] <= 1.0 + 1e-9);
    }

    /// Doubling a per-variable bound's coefficient halves that variable at
    /// the optimum and leaves the others untouched: the affine constraint in
    /// log space shifts by exactly log 2.
    #[test]
    fn monomial_coefficient_scaling_shifts_log_constraint() {
        let objective = mono(1.0, &[1.0, 2.0, 0.5]);
        let bounds = |c0: f64| -> Vec<Monomial> {
            vec![
                mono(c0, &[1.0, 0.0, 0.0]),
                mono(0.25, &[0.0, 1.0, 0.0]),
                mono(0.125, &[0.0, 0.0, 1.0]),
            ]
        };
        let base = GpProblem::new(objective.clone(), vec![], bounds(0.5)).unwrap();
        let scaled = GpProblem::new(objective, vec![], bounds(1.0)).unwrap();
        let sol_base = solve_gp(&base, 1e-10, 800).unwrap();
        let sol_scaled = solve_gp(&scaled, 1e-10, 800).unwrap();
        assert_eq!(sol_base.status, GpStatus::Optimal);
        assert_eq!(sol_scaled.status, GpStatus::Optimal);
        let ratio = sol_base.variables[0] / sol_scaled.variables[0];
        assert!((ratio - 2.0).abs() < 1e-6, "ratio {ratio}");
        for v in 1..3 {
            let rel = (sol_base.variables[v] - sol_scaled.variables[v]).abs()
                / sol_base.variables[v];
            assert!(rel < 1e-6);
        }
        let obj_ratio = sol_base.objective_value / sol_scaled.objective_value;
        assert!((obj_ratio - 2.0).abs() < 1e-6);
    }

    /// Brute-force verification on a 2-D problem: log-spaced grid search
    /// with local refinement around the best cell.
    #[test]
    fn matches_grid_search_on_2d_problem() {
        let problem = GpProblem::new(
            mono(1.5, &[1.0, 1.5]),
            vec![posy(&[
                (0.4, &[2.0, 0.0]),
                (0.2, &[0.0, 2.0]),
                (0.1, &[1.0, 1.0]),
            ])],
            vec![mono(0.9, &[1.0, -1.0])],
        )
        .unwrap();

        let objective = |x: &[f64]| 1.5 * x[0] * x[1].powf(1.5);
        let feasible = |x: &[f64]| {
            0.4 * x[0] * x[0] + 0.2 * x[1] * x[1] + 0.1 * x[0] * x[1] <= 1.0
                && 0.9 * x[0] / x[1] <= 1.0
        };
        let search = |lo: [f64; 2], hi: [f64; 2], steps: usize, best: &mut (f64, [f64; 2])| {
            for i in 0..=steps {
                for j in 0..=steps {
                    let x = [
                        lo[0] * (hi[0] / lo[0]).powf(i as f64 / steps as f64),
                        lo[1] * (hi[1] / lo[1]).powf(j as f64 / steps as f64),
                    ];
                    if feasible(&x) {
                        let v = objective(&x);
                        if v > best.0 {
                            *best = (v, x);
                        }
                    }
                }
            }
        };
        let mut best = (0.0f64, [0.0, 0.0]);
        search([1e-3, 1e-3], [10.0, 10.0], 400, &mut best);
        let coarse = best.1;
        search(
            [coarse[0] * 0.95, coarse[1] * 0.95],
            [coarse[0] * 1.05, coarse[1] * 1.05],
            400,
            &mut best,
        );

        let sol = solve_gp(&problem, 1e-9, 800).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        let rel = (sol.objective_value - best.0).abs() / best.0;
        assert!(rel < 1e-3, "solver {} vs grid {}", sol.objective_value, best.0);
        assert!(
            sol.objective_value >= best.0 * (1.0 - 1e-9),
            "solver must not be beaten by the grid"
        );
    }

    #[test]
    fn no_constraints_rejected() {
        let r = GpProblem::new(mono(1.0, &[1.0]), vec![], vec![]);
        assert!(matches!(r, Err(Error::UnconstrainedGp)));
    }
}
