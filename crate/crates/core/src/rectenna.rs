//! Rectifier nonlinearity model at the tag.
//!
//! A single-diode rectifier with ideal matching is modeled by a 4th-order
//! Taylor truncation of the diode exponential. The harvested-DC-current
//! surrogate is
//!
//! `z = k2 R E{y^2} + k4 R^2 E{y^4}`
//!
//! with `k_i = i_s / (i! (n v_t)^i)` and `y(t)` the received multisine at the
//! tag antenna. Expanding the time averages over an evenly spaced tone grid
//! gives a quadratic term per tone plus a quartic sum over index quadruples
//! `(n0, n1, n2, n3)` with `n0 + n1 = n2 + n3`. With transmit phases matched
//! to the forward channel all cosine factors hit 1 and the expression is a
//! posynomial in the amplitudes, which is what the optimizer consumes.
//! [`z_dc_time_average`] evaluates the same quantity by synthesizing `y(t)`
//! and averaging numerically; it exists as an independent test oracle.

use std::collections::BTreeMap;

use crate::channel::ChannelState;
use crate::error::{Error, Result};
use crate::gp::{Monomial, Posynomial};

/// Diode and antenna constants. Only 4th-order truncation is supported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectennaParams {
    /// Reverse saturation current, amperes.
    pub i_s: f64,
    /// Diode ideality factor.
    pub ideality: f64,
    /// Thermal voltage, volts.
    pub v_t: f64,
    /// Antenna resistance, ohms; ideal matching makes it the rectifier
    /// input resistance too.
    pub r_ant: f64,
    pub truncation_order: u32,
}

impl Default for RectennaParams {
    fn default() -> Self {
        Self {
            i_s: 5e-6,
            ideality: 1.05,
            v_t: 25.86e-3,
            r_ant: 50.0,
            truncation_order: 4,
        }
    }
}

impl RectennaParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("saturation current", self.i_s),
            ("ideality factor", self.ideality),
            ("thermal voltage", self.v_t),
            ("antenna resistance", self.r_ant),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositive(name.into()));
            }
        }
        if self.truncation_order != 4 {
            return Err(Error::InvalidParameter(format!(
                "truncation order {} unsupported; only 4 is implemented",
                self.truncation_order
            )));
        }
        Ok(())
    }
}

/// Taylor coefficients of the diode current at orders 2 and 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiodeCoefficients {
    pub k2: f64,
    pub k4: f64,
}

/// `k_i = i_s / (i! (n v_t)^i)` for i = 2, 4.
pub fn derive_coefficients(params: &RectennaParams) -> Result<DiodeCoefficients> {
    params.validate()?;
    let nvt = params.ideality * params.v_t;
    Ok(DiodeCoefficients {
        k2: params.i_s / (2.0 * nvt.powi(2)),
        k4: params.i_s / (24.0 * nvt.powi(4)),
    })
}

/// Index quadruples with `n0 + n1 = n2 + n3`; exactly the intermodulation
/// products that survive time averaging of `y^4`.
pub(crate) fn quartic_index_tuples(n_tones: usize) -> Vec<[usize; 4]> {
    let mut tuples = Vec::new();
    for n0 in 0..n_tones {
        for n1 in 0..n_tones {
            for n2 in 0..n_tones {
                let sum = n0 + n1;
                if sum >= n2 && sum - n2 < n_tones {
                    tuples.push([n0, n1, n2, sum - n2]);
                }
            }
        }
    }
    tuples
}

fn check_amplitudes(s: &[f64], n_tones: usize) -> Result<()> {
    if s.len() != n_tones {
        return Err(Error::DimensionMismatch {
            expected: n_tones,
            got: s.len(),
        });
    }
    if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter(
            "amplitudes must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

/// DC-current surrogate for arbitrary transmit phases `phi`.
///
/// The tone phases seen at the tag are `psi_n = phi_n + arg h_n`; each
/// quartic product is weighted by `cos(psi_{n0} + psi_{n1} - psi_{n2} -
/// psi_{n3})`.
pub fn z_dc(
    s: &[f64],
    phi: &[f64],
    ch: &ChannelState,
    coeffs: &DiodeCoefficients,
    r_ant: f64,
) -> Result<f64> {
    let n = ch.n_tones();
    check_amplitudes(s, n)?;
    if phi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: phi.len(),
        });
    }
    let psi: Vec<f64> = (0..n).map(|i| phi[i] + ch.forward_phase(i)).collect();
    let b: Vec<f64> = (0..n).map(|i| s[i] * ch.forward_amplitude(i)).collect();

    let quadratic: f64 = b.iter().map(|v| v * v).sum();
    let mut quartic = 0.0;
    for [n0, n1, n2, n3] in quartic_index_tuples(n) {
        quartic += b[n0] * b[n1] * b[n2] * b[n3] * (psi[n0] + psi[n1] - psi[n2] - psi[n3]).cos();
    }
    Ok(0.5 * coeffs.k2 * r_ant * quadratic + 0.375 * coeffs.k4 * r_ant * r_ant * quartic)
}

/// DC-current surrogate with channel-matched phases: every cosine factor is
/// 1, leaving a sum of positive products.
pub fn z_dc_matched(
    s: &[f64],
    ch: &ChannelState,
    coeffs: &DiodeCoefficients,
    r_ant: f64,
) -> Result<f64> {
    let n = ch.n_tones();
    check_amplitudes(s, n)?;
    let b: Vec<f64> = (0..n).map(|i| s[i] * ch.forward_amplitude(i)).collect();
    let quadratic: f64 = b.iter().map(|v| v * v).sum();
    let mut quartic = 0.0;
    for [n0, n1, n2, n3] in quartic_index_tuples(n) {
        quartic += b[n0] * b[n1] * b[n2] * b[n3];
    }
    Ok(0.5 * coeffs.k2 * r_ant * quadratic + 0.375 * coeffs.k4 * r_ant * r_ant * quartic)
}

/// The matched-phase surrogate as a posynomial in the amplitudes.
///
/// One quadratic monomial per tone with nonzero forward gain, plus the
/// quartic intermodulation terms merged by exponent vector (tuples sharing a
/// multiset of indices produce the same monomial; their coefficients are
/// summed). Tones with zero forward gain contribute no terms.
pub fn z_dc_posynomial(
    ch: &ChannelState,
    coeffs: &DiodeCoefficients,
    r_ant: f64,
) -> Result<Posynomial> {
    let n = ch.n_tones();
    let a: Vec<f64> = (0..n).map(|i| ch.forward_amplitude(i)).collect();
    let mut terms = Vec::new();
    for (i, &amp) in a.iter().enumerate() {
        if amp > 0.0 {
            let mut exponents = vec![0.0; n];
            exponents[i] = 2.0;
            terms.push(Monomial::new(
                0.5 * coeffs.k2 * r_ant * amp * amp,
                exponents,
            )?);
        }
    }
    let mut quartic: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    for [n0, n1, n2, n3] in quartic_index_tuples(n) {
        let gain = a[n0] * a[n1] * a[n2] * a[n3];
        if gain == 0.0 {
            continue;
        }
        let mut key = vec![0u8; n];
        for idx in [n0, n1, n2, n3] {
            key[idx] += 1;
        }
        *quartic.entry(key).or_insert(0.0) += 0.375 * coeffs.k4 * r_ant * r_ant * gain;
    }
    for (key, coefficient) in quartic {
        let exponents: Vec<f64> = key.into_iter().map(f64::from).collect();
        terms.push(Monomial::new(coefficient, exponents)?);
    }
    Posynomial::new(terms)
}

/// Lowest admissible sampling density for [`z_dc_time_average`]: eight times
/// the highest harmonic of `y^4` on the synthesis grid.
pub fn oracle_min_samples(n_tones: usize) -> usize {
    let carrier_index = n_tones;
    8 * 4 * (carrier_index + n_tones - 1)
}

/// Reference evaluation by waveform synthesis and numerical time averaging.
///
/// The tone grid is remapped to harmonics `N..2N-1` of the spacing, which
/// leaves the surviving intermodulation products unchanged (the surrogate is
/// carrier-independent) while making `y(t)` exactly periodic. Uniform
/// sampling of a trigonometric polynomial integrates it exactly once the
/// density exceeds its highest harmonic, so the result matches the closed
/// form to rounding error. This is a test oracle, not a production path.
pub fn z_dc_time_average(
    s: &[f64],
    phi: &[f64],
    ch: &ChannelState,
    coeffs: &DiodeCoefficients,
    r_ant: f64,
    samples_per_period: usize,
) -> Result<f64> {
    let n = ch.n_tones();
    check_amplitudes(s, n)?;
    if phi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: phi.len(),
        });
    }
    let required = oracle_min_samples(n);
    if samples_per_period < required {
        return Err(Error::OracleSamplingTooCoarse {
            required,
            got: samples_per_period,
        });
    }
    let psi: Vec<f64> = (0..n).map(|i| phi[i] + ch.forward_phase(i)).collect();
    let b: Vec<f64> = (0..n).map(|i| s[i] * ch.forward_amplitude(i)).collect();
    let carrier_index = n;

    let mut mean2 = 0.0;
    let mut mean4 = 0.0;
    for m in 0..samples_per_period {
        let theta = m as f64 / samples_per_period as f64;
        let mut y = 0.0;
        for i in 0..n {
            let harmonic = (carrier_index + i) as f64;
            y += b[i] * (2.0 * std::f64::consts::PI * harmonic * theta + psi[i]).cos();
        }
        let y2 = y * y;
        mean2 += y2;
        mean4 += y2 * y2;
    }
    mean2 /= samples_per_period as f64;
    mean4 /= samples_per_period as f64;
    Ok(coeffs.k2 * r_ant * mean2 + coeffs.k4 * r_ant * r_ant * mean4)
}
