//! Successive convex approximation over the condensed GP, and tracing of the
//! SNR-energy tradeoff region.
//!
//! Each sweep point maximizes the matched-phase DC surrogate subject to the
//! transmit power cap and an SNR floor. The surrogate and the SNR are
//! posynomials, and a posynomial lower bound is not GP-compatible, so both
//! are replaced by their AM-GM condensations anchored at the current
//! iterate: weights `gamma_k = g_k(anchor) / z(anchor)` and
//! `beta_n = f_n(anchor) / rho(anchor)`, then one standard GP solve, then
//! re-anchor. Condensation only shrinks the feasible set and is exact at the
//! anchor, so every iterate satisfies the original constraints and the true
//! objective never decreases. The loop stops when successive objective
//! values differ by less than `epsilon` (with a relative backstop) and
//! yields a KKT point, not a certified global optimum.

use crate::channel::ChannelState;
use crate::error::{Error, Result};
use crate::gp::{solve_gp_from, GpProblem, GpStatus, Monomial, Posynomial};
use crate::rectenna::{z_dc_matched, z_dc_posynomial, DiodeCoefficients};
use crate::waveform::{ass_snr, matched_phases, snr, snr_posynomial, PowerBudget, Waveform};

/// Relative shave applied to targets at (or above) the single-sinewave SNR:
/// the exact endpoint has an empty strict interior, which the barrier
/// method cannot work with. Must sit well above the barrier's own
/// feasibility margins or the shaved window collapses too.
const ENDPOINT_SHAVE: f64 = 1e-7;

/// Initial points are scaled to this fraction below the power cap so the
/// barrier starts strictly inside.
const INTERIOR_PULLBACK: f64 = 1e-9;

/// Amplitudes below this fraction of the full-power amplitude are reported
/// as exact zeros.
const ZERO_SNAP: f64 = 1e-12;

/// Relative convergence backstop on top of the absolute `epsilon` test.
const RELATIVE_EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Absolute convergence threshold on successive surrogate values.
    pub epsilon: f64,
    /// Iteration cap for the outer SCA loop.
    pub i_max: usize,
    /// Relative tolerance of the inner GP solves.
    pub gp_tol: f64,
    /// Strict-feasibility bump applied when constructing initial points.
    pub snr_feasibility_margin: f64,
    /// Independent SCA starts per target; best objective wins.
    pub multi_start: usize,
    /// Newton budget per inner GP solve.
    pub gp_max_newton_iters: usize,
    /// Reuse each sweep point's solution to initialize the next target.
    pub warm_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            i_max: 100,
            gp_tol: 1e-8,
            snr_feasibility_margin: 1e-6,
            multi_start: 1,
            gp_max_newton_iters: 400,
            warm_start: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::NonPositive("epsilon".into()));
        }
        if self.i_max == 0 {
            return Err(Error::InvalidParameter("i_max must be at least 1".into()));
        }
        if !(self.gp_tol > 0.0) || !self.gp_tol.is_finite() {
            return Err(Error::NonPositive("gp_tol".into()));
        }
        if !(self.snr_feasibility_margin > 0.0) || !self.snr_feasibility_margin.is_finite() {
            return Err(Error::NonPositive("snr_feasibility_margin".into()));
        }
        if self.multi_start == 0 {
            return Err(Error::InvalidParameter(
                "multi_start must be at least 1".into(),
            ));
        }
        if self.gp_max_newton_iters == 0 {
            return Err(Error::InvalidParameter(
                "gp_max_newton_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaStatus {
    Converged,
    IterationCapped,
    /// The SNR target exceeds what any feasible waveform achieves.
    InfeasibleTarget,
}

/// One solved waveform-design instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaResult {
    pub waveform: Waveform,
    pub z_dc: f64,
    pub achieved_snr: f64,
    pub iterations: usize,
    /// True surrogate value after each inner solve; nondecreasing up to
    /// solver tolerance.
    pub z_dc_trajectory: Vec<f64>,
    /// Amplitude vector after each inner solve (full tone space).
    pub amplitude_iterates: Vec<Vec<f64>>,
    pub status: ScaStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionPointStatus {
    Converged,
    IterationCapped,
    InfeasibleTarget,
    /// The inner solver failed; the point carries no usable data.
    Failed,
}

impl RegionPointStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::IterationCapped => "iteration_capped",
            Self::InfeasibleTarget => "infeasible_target",
            Self::Failed => "failed",
        }
    }

    pub fn is_usable(&self) -> bool {
        matches!(self, Self::Converged | Self::IterationCapped)
    }
}

/// One point of the traced SNR-energy boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub snr_target: f64,
    pub achieved_snr: f64,
    pub z_dc: f64,
    pub waveform: Waveform,
    pub status: RegionPointStatus,
}

/// Maximize the DC surrogate subject to the power budget and an SNR floor.
///
/// Phases are fixed to the channel-matched choice up front; the GP runs over
/// amplitudes of tones with nonzero forward gain (dead tones are pinned to
/// zero). `s_init` is used when it is strictly feasible for the target,
/// otherwise an initial point is constructed by blending the uniform
/// allocation toward the single-sinewave one until strictly feasible.
pub fn sca_optimize(
    ch: &ChannelState,
    budget: &PowerBudget,
    coeffs: &DiodeCoefficients,
    r_ant: f64,
    snr_target: f64,
    cfg: &SolverConfig,
    s_init: Option<&[f64]>,
) -> Result<ScaResult> {
    cfg.validate()?;
    if !snr_target.is_finite() || snr_target < 0.0 {
        return Err(Error::InvalidParameter(
            "snr_target must be finite and nonnegative".into(),
        ));
    }
    if !(r_ant > 0.0) || !r_ant.is_finite() {
        return Err(Error::NonPositive("antenna resistance".into()));
    }
    let n = ch.n_tones();
    let active: Vec<usize> = (0..n).filter(|&i| ch.forward_amplitude(i) > 0.0).collect();

    // Nothing reaches the tag: the zero waveform is the only sensible
    // output, and any positive SNR target is unreachable.
    if active.is_empty() {
        let waveform = Waveform::new(vec![0.0; n], matched_phases(ch), ch.grid())?;
        let status = if snr_target > 0.0 {
            ScaStatus::InfeasibleTarget
        } else {
            ScaStatus::Converged
        };
        return Ok(ScaResult {
            waveform,
            z_dc: 0.0,
            achieved_snr: 0.0,
            iterations: 0,
            z_dc_trajectory: vec![],
            amplitude_iterates: vec![],
            status,
        });
    }

    let best_snr = ass_snr(ch, budget);
    if snr_target > best_snr * (1.0 + cfg.snr_feasibility_margin) {
        let waveform = crate::waveform::ass_waveform(ch, budget);
        let z = z_dc_matched(waveform.amplitudes(), ch, coeffs, r_ant)?;
        return Ok(ScaResult {
            achieved_snr: snr(waveform.amplitudes(), ch)?,
            waveform,
            z_dc: z,
            iterations: 0,
            z_dc_trajectory: vec![],
            amplitude_iterates: vec![],
            status: ScaStatus::InfeasibleTarget,
        });
    }

    // Effective SNR floor: zero drops the constraint; targets at the
    // single-sinewave limit are shaved to keep a strict interior.
    let target_eff = if snr_target <= 0.0 || best_snr <= 0.0 {
        None
    } else {
        Some(snr_target.min(best_snr * (1.0 - ENDPOINT_SHAVE)))
    };

    let z_full = z_dc_posynomial(ch, coeffs, r_ant)?;
    let z_active = restrict_variables(&z_full, &active, n)?;
    let snr_active = match target_eff {
        Some(_) => Some(restrict_variables(&snr_posynomial(ch)?, &active, n)?),
        None => None,
    };
    let power_active = power_posynomial(&active, budget)?;

    let ass_index = active
        .iter()
        .copied()
        .max_by(|&a, &b| {
            let ga = ch.forward_amplitude(a) * ch.backward_amplitude(a);
            let gb = ch.forward_amplitude(b) * ch.backward_amplitude(b);
            ga.total_cmp(&gb)
        })
        .expect("active set is nonempty");

    let context = ScaContext {
        ch,
        budget,
        coeffs,
        r_ant,
        cfg,
        active: &active,
        z_active: &z_active,
        snr_active: snr_active.as_ref(),
        power_active: &power_active,
        target_eff,
        best_snr,
        ass_index,
    };

    let base_start = context.initial_point(s_init)?;
    let mut best: Option<ScaResult> = None;
    for k in 0..cfg.multi_start {
        let start = if k == 0 {
            base_start.clone()
        } else {
            // Extra starts sweep the blend further toward the single tone.
            let alpha = k as f64 / cfg.multi_start as f64;
            let candidate = context.blend(alpha);
            if context.is_strictly_feasible(&candidate) {
                candidate
            } else {
                continue;
            }
        };
        let result = context.run(start)?;
        let better = match &best {
            Some(b) => result.z_dc > b.z_dc,
            None => true,
        };
        if better {
            best = Some(result);
        }
    }
    Ok(best.expect("at least the primary start runs"))
}

struct ScaContext<'a> {
    ch: &'a ChannelState,
    budget: &'a PowerBudget,
    coeffs: &'a DiodeCoefficients,
    r_ant: f64,
    cfg: &'a SolverConfig,
    active: &'a [usize],
    z_active: &'a Posynomial,
    snr_active: Option<&'a Posynomial>,
    power_active: &'a Posynomial,
    /// SNR floor after endpoint shaving; `None` drops the constraint.
    target_eff: Option<f64>,
    best_snr: f64,
    /// Strongest concatenated tone among the active ones.
    ass_index: usize,
}

impl ScaContext<'_> {
    /// Amplitudes over active tones: uniform blended toward the strongest
    /// tone by `alpha`, rescaled to a hair below full power.
    fn blend(&self, alpha: f64) -> Vec<f64> {
        let v = self.active.len();
        let p = self.budget.watts() * (1.0 - INTERIOR_PULLBACK);
        let uniform = (2.0 * p / v as f64).sqrt();
        let single = (2.0 * p).sqrt();
        let mut mix: Vec<f64> = self
            .active
            .iter()
            .map(|&tone| {
                let e = if tone == self.ass_index { single } else { 0.0 };
                alpha * e + (1.0 - alpha) * uniform
            })
            .collect();
        let norm: f64 = mix.iter().map(|x| x * x).sum();
        let scale = (2.0 * p / norm).sqrt();
        for x in &mut mix {
            *x *= scale;
        }
        mix
    }

    fn snr_of_active(&self, s_active: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (&tone, &amp) in self.active.iter().zip(s_active) {
            let gain = self.ch.forward_amplitude(tone) * self.ch.backward_amplitude(tone);
            acc += (gain * amp).powi(2);
        }
        acc / self.ch.noise_power_w()
    }

    fn power_of_active(&self, s_active: &[f64]) -> f64 {
        0.5 * s_active.iter().map(|x| x * x).sum::<f64>()
    }

    /// Strictly positive, strictly within power, and strictly above the
    /// effective SNR floor.
    fn is_strictly_feasible(&self, s_active: &[f64]) -> bool {
        if s_active.len() != self.active.len() {
            return false;
        }
        if s_active.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return false;
        }
        if self.power_of_active(s_active) >= self.budget.watts() {
            return false;
        }
        match self.target_eff {
            Some(t) => self.snr_of_active(s_active) > t,
            None => true,
        }
    }

    /// The strict-feasibility bump, capped so that the bumped floor stays
    /// below the single-sinewave SNR.
    fn margin_eff(&self, target: f64) -> f64 {
        self.cfg
            .snr_feasibility_margin
            .min(0.5 * (self.best_snr / target - 1.0))
    }

    fn initial_point(&self, s_init: Option<&[f64]>) -> Result<Vec<f64>> {
        if let Some(s) = s_init {
            if s.len() == self.ch.n_tones() {
                let restricted: Vec<f64> = self.active.iter().map(|&i| s[i]).collect();
                let needed = match self.target_eff {
                    Some(t) => t * (1.0 + self.margin_eff(t)),
                    None => 0.0,
                };
                if restricted.iter().all(|&x| x > 0.0 && x.is_finite())
                    && self.power_of_active(&restricted) <= self.budget.watts()
                    && (self.target_eff.is_none() || self.snr_of_active(&restricted) >= needed)
                {
                    // Pull boundary points fractionally inside; the barrier
                    // needs strict interiority.
                    let shrink = (self.budget.watts() * (1.0 - INTERIOR_PULLBACK)
                        / self.power_of_active(&restricted))
                    .sqrt()
                    .min(1.0);
                    return Ok(restricted.iter().map(|&x| x * shrink).collect());
                }
            }
        }

        let Some(target) = self.target_eff else {
            return Ok(self.blend(0.0));
        };
        let needed = target * (1.0 + self.margin_eff(target));
        let uniform = self.blend(0.0);
        if self.snr_of_active(&uniform) >= needed {
            return Ok(uniform);
        }
        // Bisect the blend parameter: the uniform end misses the floor and
        // the (almost) single-tone end exceeds it.
        let mut lo = 0.0;
        let mut hi = 1.0 - 1e-12;
        if self.snr_of_active(&self.blend(hi)) < needed {
            return Err(Error::GpSolveFailed(format!(
                "no strictly feasible start for SNR floor {needed}"
            )));
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.snr_of_active(&self.blend(mid)) >= needed {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(self.blend(hi))
    }

    fn run(&self, start: Vec<f64>) -> Result<ScaResult> {
        let cfg = self.cfg;
        let mut anchor = start;
        let mut z_prev = 0.0;
        let mut trajectory = Vec::new();
        let mut iterates = Vec::new();
        let mut status = ScaStatus::IterationCapped;
        let mut iterations = 0;

        for i in 1..=cfg.i_max {
            iterations = i;
            let (objective, _gamma) = self.z_active.condense(&anchor)?;
            let mut monomial_constraints = Vec::new();
            if let (Some(target), Some(snr_posy)) = (self.target_eff, self.snr_active) {
                let (condensed_snr, _beta) = snr_posy.condense(&anchor)?;
                // target / rho_tilde(s) <= 1, a monomial in s.
                let exponents: Vec<f64> = condensed_snr.exponents().iter().map(|e| -e).collect();
                monomial_constraints
                    .push(Monomial::new(target / condensed_snr.coefficient(), exponents)?);
            }
            let problem = GpProblem::new(
                objective,
                vec![self.power_active.clone()],
                monomial_constraints,
            )?;
            let solution =
                solve_gp_from(&problem, cfg.gp_tol, cfg.gp_max_newton_iters, Some(&anchor))?;
            match solution.status {
                GpStatus::Optimal => {}
                GpStatus::Infeasible => {
                    return Err(Error::GpSolveFailed(
                        "inner GP reported infeasible despite a feasible anchor".into(),
                    ))
                }
                GpStatus::MaxIterations => {
                    return Err(Error::GpSolveFailed(format!(
                        "inner GP exhausted its Newton budget of {}",
                        cfg.gp_max_newton_iters
                    )))
                }
            }
            let s_new = solution.variables;
            let z_new = self.z_active.evaluate(&s_new)?;
            trajectory.push(z_new);
            iterates.push(self.embed(&s_new));
            anchor = s_new;

            let delta = (z_new - z_prev).abs();
            if delta < cfg.epsilon || delta < RELATIVE_EPSILON * z_new.abs() {
                status = ScaStatus::Converged;
                break;
            }
            z_prev = z_new;
        }

        // Report clean zeros for amplitudes at the numerical floor.
        let snap = ZERO_SNAP * self.budget.full_power_amplitude();
        let mut s_full = self.embed(&anchor);
        for x in &mut s_full {
            if *x < snap {
                *x = 0.0;
            }
        }
        let z_final = z_dc_matched(&s_full, self.ch, self.coeffs, self.r_ant)?;
        let achieved_snr = snr(&s_full, self.ch)?;
        let waveform = Waveform::new(s_full, matched_phases(self.ch), self.ch.grid())?;
        waveform.check_budget(self.budget)?;
        Ok(ScaResult {
            waveform,
            z_dc: z_final,
            achieved_snr,
            iterations,
            z_dc_trajectory: trajectory,
            amplitude_iterates: iterates,
            status,
        })
    }

    /// Scatter active-tone amplitudes back into the full tone space.
    fn embed(&self, s_active: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.ch.n_tones()];
        for (&tone, &amp) in self.active.iter().zip(s_active) {
            full[tone] = amp;
        }
        full
    }
}

/// `sum_n s_n^2 / (2P) <= 1` over the active tones.
fn power_posynomial(active: &[usize], budget: &PowerBudget) -> Result<Posynomial> {
    let v = active.len();
    let coefficient = 1.0 / (2.0 * budget.watts());
    let terms: Result<Vec<Monomial>> = (0..v)
        .map(|j| {
            let mut exponents = vec![0.0; v];
            exponents[j] = 2.0;
            Monomial::new(coefficient, exponents)
        })
        .collect();
    Posynomial::new(terms?)
}

/// Project a posynomial over the full tone space onto the active variables.
/// Dead-tone columns never carry nonzero exponents by construction.
fn restrict_variables(p: &Posynomial, active: &[usize], n_full: usize) -> Result<Posynomial> {
    debug_assert!(active.iter().all(|&i| i < n_full));
    let terms: Result<Vec<Monomial>> = p
        .terms()
        .iter()
        .map(|t| {
            let exponents: Vec<f64> = active.iter().map(|&i| t.exponents()[i]).collect();
            Monomial::new(t.coefficient(), exponents)
        })
        .collect();
    Posynomial::new(terms?)
}

/// Trace the tradeoff boundary over `n_points` SNR targets spanning
/// `[0, ass_snr]` inclusive, ascending. Failures are tagged per point; the
/// sweep never aborts.
pub fn trace_region(
    ch: &ChannelState,
    budget: &PowerBudget,
    coeffs: &DiodeCoefficients,
    r_ant: f64,
    cfg: &SolverConfig,
    n_points: usize,
) -> Result<Vec<RegionPoint>> {
    cfg.validate()?;
    if n_points < 2 {
        return Err(Error::InvalidParameter(
            "region trace needs at least 2 points".into(),
        ));
    }
    let top = ass_snr(ch, budget);
    let mut points = Vec::with_capacity(n_points);
    let mut previous: Option<Vec<f64>> = None;
    for k in 0..n_points {
        let snr_target = top * k as f64 / (n_points - 1) as f64;
        let warm = if cfg.warm_start {
            previous.as_deref()
        } else {
            None
        };
        match sca_optimize(ch, budget, coeffs, r_ant, snr_target, cfg, warm) {
            Ok(result) => {
                if result.status != ScaStatus::InfeasibleTarget {
                    previous = Some(result.waveform.amplitudes().to_vec());
                }
                points.push(RegionPoint {
                    snr_target,
                    achieved_snr: result.achieved_snr,
                    z_dc: result.z_dc,
                    waveform: result.waveform,
                    status: match result.status {
                        ScaStatus::Converged => RegionPointStatus::Converged,
                        ScaStatus::IterationCapped => RegionPointStatus::IterationCapped,
                        ScaStatus::InfeasibleTarget => RegionPointStatus::InfeasibleTarget,
                    },
                });
            }
            Err(_) => {
                let waveform =
                    Waveform::new(vec![0.0; ch.n_tones()], matched_phases(ch), ch.grid())?;
                points.push(RegionPoint {
                    snr_target,
                    achieved_snr: f64::NAN,
                    z_dc: f64::NAN,
                    waveform,
                    status: RegionPointStatus::Failed,
                });
            }
        }
    }

    // Monotone repair: SCA reaches a KKT point, not always the global one,
    // so a solution found under a tighter SNR floor may harvest more than
    // one found under a looser floor. Such a solution is feasible for every
    // lower target; carry it down. The traced boundary becomes non-
    // increasing in the target by construction.
    let mut best_above: Option<RegionPoint> = None;
    for point in points.iter_mut().rev() {
        if !point.status.is_usable() {
            continue;
        }
        match &best_above {
            Some(better) if better.z_dc > point.z_dc => {
                point.achieved_snr = better.achieved_snr;
                point.z_dc = better.z_dc;
                point.waveform = better.waveform.clone();
                point.status = better.status;
            }
            _ => best_above = Some(point.clone()),
        }
    }
    Ok(points)
}

/// Whether region `a` covers region `b` within a relative tolerance: every
/// usable point of `b` must be matched, at its SNR, by `a`'s boundary
/// (piecewise-linear interpolation through `a`'s Pareto points) with a DC
/// value no more than `tol` (relative) below, and must not exceed `a`'s SNR
/// reach by more than `tol` (relative).
pub fn region_dominates(a: &[RegionPoint], b: &[RegionPoint], tol: f64) -> Result<bool> {
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter("tolerance must be >= 0".into()));
    }
    let boundary = pareto_boundary(a)?;
    let b_usable: Vec<&RegionPoint> = b.iter().filter(|p| p.status.is_usable()).collect();
    if b_usable.is_empty() {
        return Err(Error::InvalidParameter(
            "region b has no usable points".into(),
        ));
    }
    let snr_max = boundary.last().expect("boundary is nonempty").0;
    for point in b_usable {
        if point.achieved_snr > snr_max * (1.0 + tol) {
            return Ok(false);
        }
        let z_a = interpolate_boundary(&boundary, point.achieved_snr.min(snr_max));
        if z_a < point.z_dc * (1.0 - tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Usable points of a region reduced to a Pareto staircase, sorted by SNR
/// ascending with strictly decreasing z.
fn pareto_boundary(points: &[RegionPoint]) -> Result<Vec<(f64, f64)>> {
    let mut usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.status.is_usable())
        .map(|p| (p.achieved_snr, p.z_dc))
        .collect();
    if usable.is_empty() {
        return Err(Error::InvalidParameter("region has no usable points".into()));
    }
    usable.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut boundary = Vec::with_capacity(usable.len());
    let mut best_z = f64::NEG_INFINITY;
    for &(snr, z) in usable.iter().rev() {
        if z > best_z {
            boundary.push((snr, z));
            best_z = z;
        }
    }
    boundary.reverse();
    Ok(boundary)
}

fn interpolate_boundary(boundary: &[(f64, f64)], x: f64) -> f64 {
    let first = boundary[0];
    if x <= first.0 {
        // Below the lowest sampled SNR the whole z range is reachable.
        return first.1;
    }
    for pair in boundary.windows(2) {
        let (x0, z0) = pair[0];
        let (x1, z1) = pair[1];
        if x <= x1 {
            let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 1.0 };
            return z0 + t * (z1 - z0);
        }
    }
    boundary.last().expect("boundary is nonempty").1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelState, ToneGrid};
    use crate::rectenna::{derive_coefficients, RectennaParams};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const R_ANT: f64 = 50.0;

    fn coeffs() -> DiodeCoefficients {
        derive_coefficients(&RectennaParams::default()).unwrap()
    }

    fn state(fwd: Vec<Complex64>, bwd: Vec<Complex64>, noise: f64) -> ChannelState {
        let grid = ToneGrid::new(5.18e9, 1e6, fwd.len()).unwrap();
        ChannelState::new(fwd, bwd, noise, grid).unwrap()
    }

    fn random_state(n: usize, seed: u64) -> ChannelState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |scale: f64| {
            Complex64::new(
                scale * (rng.random::<f64>() - 0.5),
                scale * (rng.random::<f64>() - 0.5),
            )
        };
        let fwd: Vec<Complex64> = (0..n).map(|_| draw(2e-3)).collect();
        let bwd: Vec<Complex64> = (0..n).map(|_| draw(2e-3)).collect();
        state(fwd, bwd, 4e-12)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    /// Brute-force oracle for the two-tone power split: both objectives are
    /// monotone in overall scale, so the optimum saturates the power budget
    /// and a 1-D split search is exhaustive.
    fn two_tone_grid_oracle(
        ch: &ChannelState,
        budget: &PowerBudget,
        snr_target: f64,
        steps: usize,
    ) -> f64 {
        let p = budget.watts();
        let eval = |t: f64| -> Option<f64> {
            let s = [(2.0 * p * t).sqrt(), (2.0 * p * (1.0 - t)).sqrt()];
            if snr(&s, ch).unwrap() < snr_target {
                return None;
            }
            Some(z_dc_matched(&s, ch, &coeffs(), R_ANT).unwrap())
        };
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            if let Some(z) = eval(t) {
                if z > best.0 {
                    best = (z, t);
                }
            }
        }
        // local refinement around the best cell
        let lo = (best.1 - 1.0 / steps as f64).max(0.0);
        let hi = (best.1 + 1.0 / steps as f64).min(1.0);
        for i in 0..=steps {
            let t = lo + (hi - lo) * i as f64 / steps as f64;
            if let Some(z) = eval(t) {
                if z > best.0 {
                    best = (z, t);
                }
            }
        }
        best.0
    }

    #[test]
    fn single_tone_saturates_power_at_any_target() {
        let ch = random_state(1, 4);
        let budget = PowerBudget::new(2.0).unwrap();
        let full = budget.full_power_amplitude();
        let a0 = ch.forward_amplitude(0);
        let expected = 0.5 * coeffs().k2 * R_ANT * full * full * a0 * a0
            + 0.375 * coeffs().k4 * R_ANT * R_ANT * full.powi(4) * a0.powi(4);
        for target_frac in [0.0, 0.4, 1.0] {
            let target = target_frac * ass_snr(&ch, &budget);
            let r = sca_optimize(
                &ch,
                &budget,
                &coeffs(),
                R_ANT,
                target,
                &SolverConfig::default(),
                None,
            )
            .unwrap();
            assert_eq!(r.status, ScaStatus::Converged);
            assert!(rel(r.waveform.amplitudes()[0], full) < 1e-6);
            assert!(rel(r.z_dc, expected) < 1e-6);
        }
    }

    #[test]
    fn unconstrained_two_tone_matches_grid_search() {
        let ch = random_state(2, 11);
        let budget = PowerBudget::new(3.981).unwrap();
        let cfg = SolverConfig {
            epsilon: 1e-14,
            ..SolverConfig::default()
        };
        let r = sca_optimize(&ch, &budget, &coeffs(), R_ANT, 0.0, &cfg, None).unwrap();
        assert_eq!(r.status, ScaStatus::Converged);
        let oracle = two_tone_grid_oracle(&ch, &budget, 0.0, 10_000);
        assert!(rel(r.z_dc, oracle) < 0.01, "sca {} vs grid {oracle}", r.z_dc);
    }

    #[test]
    fn constrained_two_tone_matches_grid_search() {
        let ch = random_state(2, 12);
        let budget = PowerBudget::new(3.981).unwrap();
        let target = 0.5 * ass_snr(&ch, &budget);
        let cfg = SolverConfig {
            epsilon: 1e-14,
            ..SolverConfig::default()
        };
        let r = sca_optimize(&ch, &budget, &coeffs(), R_ANT, target, &cfg, None).unwrap();
        assert_eq!(r.status, ScaStatus::Converged);
        assert!(r.achieved_snr >= target * (1.0 - 1e-6));
        let oracle = two_tone_grid_oracle(&ch, &budget, target, 10_000);
        assert!(rel(r.z_dc, oracle) < 0.01, "sca {} vs grid {oracle}", r.z_dc);
    }

    #[test]
    fn ass_target_concentrates_power() {
        let ch = random_state(8, 21);
        let budget = PowerBudget::new(3.981).unwrap();
        let target = ass_snr(&ch, &budget);
        let r = sca_optimize(
            &ch,
            &budget,
            &coeffs(),
            R_ANT,
            target,
            &SolverConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.status, ScaStatus::Converged);
        let tone = crate::waveform::strongest_tone(&ch);
        let total = r.waveform.power_w();
        let on_tone = 0.5 * r.waveform.amplitudes()[tone].powi(2);
        assert!(on_tone / total >= 0.999, "concentration {}", on_tone / total);
        let full = budget.full_power_amplitude();
        let a = ch.forward_amplitude(tone);
        let closed = 0.5 * coeffs().k2 * R_ANT * (full * a).powi(2)
            + 0.375 * coeffs().k4 * R_ANT * R_ANT * (full * a).powi(4);
        assert!(rel(r.z_dc, closed) < 1e-3, "z {} vs closed {closed}", r.z_dc);
    }

    #[test]
    fn infeasible_target_is_flagged() {
        let ch = random_state(4, 9);
        let budget = PowerBudget::new(1.0).unwrap();
        let r = sca_optimize(
            &ch,
            &budget,
            &coeffs(),
            R_ANT,
            ass_snr(&ch, &budget) * 1.01,
            &SolverConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.status, ScaStatus::InfeasibleTarget);
    }

    #[test]
    fn trajectory_is_monotone_and_iterates_feasible() {
        let ch = random_state(8, 33);
        let budget = PowerBudget::new(3.981).unwrap();
        let cfg = SolverConfig::default();
        let target = 0.7 * ass_snr(&ch, &budget);
        let r = sca_optimize(&ch, &budget, &coeffs(), R_ANT, target, &cfg, None).unwrap();
        assert!(r.iterations >= 1);
        assert_eq!(r.z_dc_trajectory.len(), r.amplitude_iterates.len());
        for pair in r.z_dc_trajectory.windows(2) {
            assert!(
                pair[1] >= pair[0] * (1.0 - 10.0 * cfg.gp_tol),
                "trajectory decreased: {pair:?}"
            );
        }
        for s in &r.amplitude_iterates {
            let power = 0.5 * s.iter().map(|x| x * x).sum::<f64>();
            assert!(power <= budget.watts() * (1.0 + 1e-9));
            assert!(snr(s, &ch).unwrap() >= target * (1.0 - 1e-6));
        }
    }

    #[test]
    fn flat_channel_region_is_rectangular() {
        let a = Complex64::new(2e-3, 0.0);
        let ar = Complex64::new(1e-3, 0.0);
        let ch = state(vec![a; 4], vec![ar; 4], 4e-12);
        let budget = PowerBudget::new(3.981).unwrap();
        let cfg = SolverConfig {
            epsilon: 1e-14,
            ..SolverConfig::default()
        };
        let points = trace_region(&ch, &budget, &coeffs(), R_ANT, &cfg, 5).unwrap();
        let z0 = points[0].z_dc;
        for p in &points {
            assert_eq!(p.status, RegionPointStatus::Converged);
            assert!(rel(p.z_dc, z0) < 1e-3, "z varied: {} vs {z0}", p.z_dc);
        }
    }

    #[test]
    fn trace_endpoints_are_energy_max_and_single_tone() {
        let ch = random_state(4, 55);
        let budget = PowerBudget::new(3.981).unwrap();
        let cfg = SolverConfig {
            epsilon: 1e-14,
            ..SolverConfig::default()
        };
        let points = trace_region(&ch, &budget, &coeffs(), R_ANT, &cfg, 2).unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].snr_target, 0.0);
        let top = ass_snr(&ch, &budget);
        assert!(rel(points[1].snr_target, top) < 1e-12);
        assert!(rel(points[1].achieved_snr, top) < 1e-6);
        // Low end harvests at least as much as the constrained top end.
        assert!(points[0].z_dc >= points[1].z_dc * (1.0 - 1e-9));
        let tone = crate::waveform::strongest_tone(&ch);
        let on_tone = 0.5 * points[1].waveform.amplitudes()[tone].powi(2);
        assert!(on_tone / points[1].waveform.power_w() > 0.999);
    }

    #[test]
    fn traced_z_is_non_increasing_in_target() {
        let ch = random_state(8, 77);
        let budget = PowerBudget::new(3.981).unwrap();
        let cfg = SolverConfig {
            epsilon: 1e-14,
            ..SolverConfig::default()
        };
        let points = trace_region(&ch, &budget, &coeffs(), R_ANT, &cfg, 9).unwrap();
        for pair in points.windows(2) {
            assert!(pair[1].z_dc <= pair[0].z_dc * (1.0 + 2.0 * cfg.gp_tol));
        }
    }

    #[test]
    fn trace_is_deterministic() {
        let ch = random_state(4, 88);
        let budget = PowerBudget::new(3.981).unwrap();
        let cfg = SolverConfig::default();
        let first = trace_region(&ch, &budget, &coeffs(), R_ANT, &cfg, 6).unwrap();
        let second = trace_region(&ch, &budget, &coeffs(), R_ANT, &cfg, 6).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn region_dominates_itself() {
        let ch = random_state(4, 66);
        let budget = PowerBudget::new(3.981).unwrap();
        let points =
            trace_region(&ch, &budget, &coeffs(), R_ANT, &SolverConfig::default(), 6).unwrap();
        assert!(region_dominates(&points, &points, 0.0).unwrap());
        assert!(region_dominates(&points, &points, 0.01).unwrap());
    }

    #[test]
    fn region_dominance_rejects_empty_inputs() {
        let ch = random_state(2, 5);
        let budget = PowerBudget::new(1.0).unwrap();
        let points =
            trace_region(&ch, &budget, &coeffs(), R_ANT, &SolverConfig::default(), 2).unwrap();
        assert!(region_dominates(&[], &points, 0.01).is_err());
        assert!(region_dominates(&points, &[], 0.01).is_err());
    }

    #[test]
    fn wider_region_dominates_narrower_but_not_conversely() {
        // Same physical channel sampled with 8 vs 1 tones.
        let pdp = crate::channel::PowerDelayProfile::model_b_like();
        let fwd = pdp.realize(3);
        let bwd = pdp.realize(1003);
        let budget_db = crate::channel::LinkBudget {
            center_frequency_hz: 5.18e9,
            eirp_dbm: 36.0,
            tx_antenna_gain_dbi: 0.0,
            tag_antenna_gain_dbi: 2.0,
            reader_antenna_gain_dbi: 2.0,
            path_loss_forward_db: 58.0,
            path_loss_backward_db: 58.0,
            noise_power_dbm: -84.0,
        };
        let ch8 = crate::channel::build_channel_state(&fwd, &bwd, &budget_db, 8, 10e6).unwrap();
        let ch1 = crate::channel::build_channel_state(&fwd, &bwd, &budget_db, 1, 10e6).unwrap();
        let budget = PowerBudget::new(budget_db.transmit_power_w()).unwrap();
        let cfg = SolverConfig {
            epsilon: 1e-14,
            ..SolverConfig::default()
        };
        let r8 = trace_region(&ch8, &budget, &coeffs(), R_ANT, &cfg, 9).unwrap();
        let r1 = trace_region(&ch1, &budget, &coeffs(), R_ANT, &cfg, 9).unwrap();
        assert!(region_dominates(&r8, &r1, 0.01).unwrap());
        assert!(!region_dominates(&r1, &r8, 0.01).unwrap());
    }

    #[test]
    fn dead_forward_channel_yields_zero_waveform() {
        let ch = state(
            vec![Complex64::new(0.0, 0.0); 2],
            vec![Complex64::new(1.0, 0.0); 2],
            1.0,
        );
        let budget = PowerBudget::new(1.0).unwrap();
        let r = sca_optimize(
            &ch,
            &budget,
            &coeffs(),
            R_ANT,
            0.0,
            &SolverConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.status, ScaStatus::Converged);
        assert_eq!(r.z_dc, 0.0);
        assert!(r.waveform.amplitudes().iter().all(|&x| x == 0.0));
        let r = sca_optimize(
            &ch,
            &budget,
            &coeffs(),
            R_ANT,
            1.0,
            &SolverConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.status, ScaStatus::InfeasibleTarget);
    }

    #[test]
    fn zero_backward_tone_still_carries_harvest_power() {
        // Tone 1 is invisible to the reader but has the stronger forward
        // gain; unconstrained harvesting should favor it.
        let fwd = vec![Complex64::new(1e-3, 0.0), Complex64::new(3e-3, 0.0)];
        let bwd = vec![Complex64::new(1e-3, 0.0), Complex64::new(0.0, 0.0)];
        let ch = state(fwd, bwd, 4e-12);
        let budget = PowerBudget::new(3.981).unwrap();
        let r = sca_optimize(
            &ch,
            &budget,
            &coeffs(),
            R_ANT,
            0.0,
            &SolverConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.status, ScaStatus::Converged);
        assert!(r.waveform.amplitudes()[1] > r.waveform.amplitudes()[0]);
        // With an SNR floor, tone 0 must still carry the link.
        let target = 0.9 * ass_snr(&ch, &budget);
        let r = sca_optimize(
            &ch,
            &budget,
            &coeffs(),
            R_ANT,
            target,
            &SolverConfig::default(),
            None,
        )
        .unwrap();
        assert!(r.achieved_snr >= target * (1.0 - 1e-6));
    }

    #[test]
    fn multi_start_is_no_worse_than_single() {
        let ch = random_state(6, 101);
        let budget = PowerBudget::new(3.981).unwrap();
        let target = 0.3 * ass_snr(&ch, &budget);
        let single = sca_optimize(
            &ch,
            &budget,
            &coeffs(),
            R_ANT,
            target,
            &SolverConfig::default(),
            None,
        )
        .unwrap();
        let multi_cfg = SolverConfig {
            multi_start: 4,
            ..SolverConfig::default()
        };
        let multi =
            sca_optimize(&ch, &budget, &coeffs(), R_ANT, target, &multi_cfg, None).unwrap();
        assert!(multi.z_dc >= single.z_dc * (1.0 - 1e-9));
    }

    #[test]
    fn sca_rejects_bad_inputs() {
        let ch = random_state(2, 1);
        let budget = PowerBudget::new(1.0).unwrap();
        assert!(sca_optimize(
            &ch,
            &budget,
            &coeffs(),
            R_ANT,
            f64::NAN,
            &SolverConfig::default(),
            None
        )
        .is_err());
        let bad_cfg = SolverConfig {
            epsilon: 0.0,
            ..SolverConfig::default()
        };
        assert!(sca_optimize(&ch, &budget, &coeffs(), R_ANT, 0.0, &bad_cfg, None).is_err());
        assert!(trace_region(&ch, &budget, &coeffs(), R_ANT, &SolverConfig::default(), 1).is_err());
    }
}
