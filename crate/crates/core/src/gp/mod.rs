//! Posynomial algebra and geometric programming.
//!
//! A monomial is `g(x) = c * x_1^{a_1} * ... * x_V^{a_V}` with `c > 0` and
//! real exponents; a posynomial is a sum of monomials. Both live on the
//! strictly positive orthant. This module provides evaluation, the weighted
//! arithmetic-geometric-mean condensation that under-approximates a
//! posynomial by a single monomial (exact at the anchor point), and a
//! log-domain barrier solver for the resulting standard GP (see [`solver`]).

mod solver;

pub use solver::{solve_gp, solve_gp_from, GpProblem, GpSolution, GpStatus};

use crate::error::{Error, Result};

/// Condensation weights below this floor are dropped from the condensed
/// monomial; `gamma^gamma -> 1` as `gamma -> 0`, so the limit value is kept.
pub const ZERO_WEIGHT_FLOOR: f64 = 1e-300;

/// Exponent magnitude above which monomial evaluation switches to log space
/// to dodge overflow/underflow of large powers.
const LOG_EVAL_EXPONENT_LIMIT: f64 = 8.0;

/// A single power-law term `c * prod_v x_v^{a_v}` with positive coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    coefficient: f64,
    exponents: Vec<f64>,
}

impl Monomial {
    pub fn new(coefficient: f64, exponents: Vec<f64>) -> Result<Self> {
        if !(coefficient > 0.0) {
            return Err(Error::NonPositive("monomial coefficient".into()));
        }
        if !coefficient.is_finite() {
            return Err(Error::NonFinite("monomial coefficient".into()));
        }
        if exponents.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("monomial exponent".into()));
        }
        Ok(Self {
            coefficient,
            exponents,
        })
    }

    /// A constant monomial `c * x^0` over `n_vars` variables.
    pub fn constant(c: f64, n_vars: usize) -> Result<Self> {
        Self::new(c, vec![0.0; n_vars])
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn n_vars(&self) -> usize {
        self.exponents.len()
    }

    /// Evaluate at a strictly positive point.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_point(x, self.n_vars())?;
        if self
            .exponents
            .iter()
            .any(|a| a.abs() > LOG_EVAL_EXPONENT_LIMIT)
        {
            let log_x: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            return Ok(self.log_evaluate(&log_x).exp());
        }
        let mut value = self.coefficient;
        for (xv, a) in x.iter().zip(&self.exponents) {
            value *= xv.powf(*a);
        }
        Ok(value)
    }

    /// `log g(x)` given `y = log x`; always safe for extreme exponents.
    pub fn log_evaluate(&self, log_x: &[f64]) -> f64 {
        let mut acc = self.coefficient.ln();
        for (y, a) in log_x.iter().zip(&self.exponents) {
            acc += a * y;
        }
        acc
    }
}

/// A sum of monomials over a shared variable space.
#[derive(Debug, Clone, PartialEq)]
pub struct Posynomial {
    terms: Vec<Monomial>,
}

impl Posynomial {
    pub fn new(terms: Vec<Monomial>) -> Result<Self> {
        let first = terms.first().ok_or(Error::EmptyPosynomial)?;
        let n_vars = first.n_vars();
        for term in &terms {
            if term.n_vars() != n_vars {
                return Err(Error::DimensionMismatch {
                    expected: n_vars,
                    got: term.n_vars(),
                });
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn n_vars(&self) -> usize {
        self.terms[0].n_vars()
    }

    /// Evaluate `f(x) = sum_k g_k(x)` at a strictly positive point.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_point(x, self.n_vars())?;
        let mut sum = 0.0;
        for term in &self.terms {
            sum += term.evaluate(x)?;
        }
        Ok(sum)
    }

    /// `log f(x)` via max-shifted log-sum-exp over the terms' logs.
    pub fn log_evaluate(&self, log_x: &[f64]) -> f64 {
        let logs: Vec<f64> = self.terms.iter().map(|t| t.log_evaluate(log_x)).collect();
        log_sum_exp(&logs)
    }

    /// Weighted AM-GM condensation anchored at a strictly positive point.
    ///
    /// With weights `gamma_k = g_k(anchor) / f(anchor)`, the monomial
    /// `prod_k (g_k(x)/gamma_k)^{gamma_k}` underestimates `f` everywhere on
    /// the positive orthant and touches it at the anchor. Weights below
    /// [`ZERO_WEIGHT_FLOOR`] are dropped from the product.
    pub fn condense(&self, anchor: &[f64]) -> Result<(Monomial, CondensationWeights)> {
        check_point(anchor, self.n_vars())?;
        let log_anchor: Vec<f64> = anchor.iter().map(|v| v.ln()).collect();
        let term_logs: Vec<f64> = self
            .terms
            .iter()
            .map(|t| t.log_evaluate(&log_anchor))
            .collect();
        let log_total = log_sum_exp(&term_logs);

        let mut weights: Vec<f64> = term_logs.iter().map(|l| (l - log_total).exp()).collect();
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }

        let mut log_coeff = 0.0;
        let mut exponents = vec![0.0; self.n_vars()];
        for (term, &gamma) in self.terms.iter().zip(&weights) {
            if gamma < ZERO_WEIGHT_FLOOR {
                continue;
            }
            log_coeff += gamma * (term.coefficient.ln() - gamma.ln());
            for (e, a) in exponents.iter_mut().zip(&term.exponents) {
                *e += gamma * a;
            }
        }

        let monomial = Monomial::new(log_coeff.exp(), exponents)?;
        Ok((monomial, CondensationWeights::new(weights)?))
    }
}

/// Normalized weights from a single condensation; one entry per monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensationWeights {
    weights: Vec<f64>,
}

impl CondensationWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidWeights(
                "weights must be nonnegative and finite".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { weights })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Max-shifted log-sum-exp.
pub(crate) fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = logs.iter().map(|l| (l - max).exp()).sum();
    max + sum.ln()
}

fn check_point(x: &[f64], n_vars: usize) -> Result<()> {
    if x.len() != n_vars {
        return Err(Error::DimensionMismatch {
            expected: n_vars,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositiveEvaluationPoint);
    }
    Ok(())
}
