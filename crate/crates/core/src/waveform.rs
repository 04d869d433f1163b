//! Transmit waveform, power budget, reader SNR, and the single-sinewave
//! baseline.
//!
//! A multisine waveform is an amplitude vector `s` and phase vector `phi`
//! over a tone grid, constrained by `||s||^2 / 2 <= P`. The reader combines
//! tones with MRC, so its SNR `sum_n A_{r,n}^2 A_n^2 s_n^2 / sigma^2` depends
//! on amplitudes only; SNR alone is maximized by putting all power on the
//! strongest concatenated tone (the adaptive single-sinewave choice).

use crate::channel::{ChannelState, ToneGrid};
use crate::error::{Error, Result};
use crate::gp::{Monomial, Posynomial};

/// Transmit power constraint `P` in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    watts: f64,
}

impl PowerBudget {
    pub fn new(watts: f64) -> Result<Self> {
        if !(watts > 0.0) || !watts.is_finite() {
            return Err(Error::NonPositive("transmit power".into()));
        }
        Ok(Self { watts })
    }

    pub fn watts(&self) -> f64 {
        self.watts
    }

    /// Amplitude of a single tone carrying the whole budget.
    pub fn full_power_amplitude(&self) -> f64 {
        (2.0 * self.watts).sqrt()
    }
}

/// Amplitudes and phases over a tone grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    amplitudes: Vec<f64>,
    phases: Vec<f64>,
    grid: ToneGrid,
}

impl Waveform {
    pub fn new(amplitudes: Vec<f64>, phases: Vec<f64>, grid: ToneGrid) -> Result<Self> {
        if amplitudes.len() != grid.n_tones {
            return Err(Error::DimensionMismatch {
                expected: grid.n_tones,
                got: amplitudes.len(),
            });
        }
        if phases.len() != grid.n_tones {
            return Err(Error::DimensionMismatch {
                expected: grid.n_tones,
                got: phases.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidParameter(
                "amplitudes must be finite and nonnegative".into(),
            ));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("waveform phase".into()));
        }
        Ok(Self {
            amplitudes,
            phases,
            grid,
        })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn grid(&self) -> ToneGrid {
        self.grid
    }

    /// `||s||^2 / 2`, the average transmit power.
    pub fn power_w(&self) -> f64 {
        0.5 * self.amplitudes.iter().map(|a| a * a).sum::<f64>()
    }

    /// Enforce `power <= P` within 1e-9 relative slack.
    pub fn check_budget(&self, budget: &PowerBudget) -> Result<()> {
        let p = self.power_w();
        if p > budget.watts() * (1.0 + 1e-9) {
            return Err(Error::InvalidParameter(format!(
                "waveform power {p} W exceeds budget {} W",
                budget.watts()
            )));
        }
        Ok(())
    }
}

/// Post-MRC reader SNR `sum_n A_{r,n}^2 A_n^2 s_n^2 / sigma^2`.
pub fn snr(s: &[f64], ch: &ChannelState) -> Result<f64> {
    let n = ch.n_tones();
    if s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.len(),
        });
    }
    let mut acc = 0.0;
    for i in 0..n {
        let gain = ch.forward_amplitude(i) * ch.backward_amplitude(i);
        acc += (gain * s[i]).powi(2);
    }
    Ok(acc / ch.noise_power_w())
}

/// Channel-matched transmit phases `phi_n = -arg h_n`, which zero every
/// cosine argument in the quartic DC term.
pub fn matched_phases(ch: &ChannelState) -> Vec<f64> {
    (0..ch.n_tones()).map(|i| -ch.forward_phase(i)).collect()
}

/// Index of the strongest concatenated tone (ties to the lowest index).
pub fn strongest_tone(ch: &ChannelState) -> usize {
    let mut best = 0;
    let mut best_gain = f64::NEG_INFINITY;
    for i in 0..ch.n_tones() {
        let gain = ch.forward_amplitude(i) * ch.backward_amplitude(i);
        if gain > best_gain {
            best_gain = gain;
            best = i;
        }
    }
    best
}

/// Adaptive single-sinewave waveform: the whole budget on the strongest
/// concatenated tone, phases matched. Maximizes the reader SNR.
pub fn ass_waveform(ch: &ChannelState, budget: &PowerBudget) -> Waveform {
    let n = ch.n_tones();
    let mut amplitudes = vec![0.0; n];
    amplitudes[strongest_tone(ch)] = budget.full_power_amplitude();
    Waveform::new(amplitudes, matched_phases(ch), ch.grid())
        .expect("single-tone waveform is always valid")
}

/// The SNR [`ass_waveform`] achieves.
pub fn ass_snr(ch: &ChannelState, budget: &PowerBudget) -> f64 {
    let n = strongest_tone(ch);
    let gain = ch.forward_amplitude(n) * ch.backward_amplitude(n);
    2.0 * budget.watts() * gain * gain / ch.noise_power_w()
}

/// The SNR as a posynomial in the amplitudes: one monomial
/// `(A_n A_{r,n} / sigma)^2 s_n^2` per tone with nonzero concatenated gain.
/// Zero-gain tones carry no SNR and are omitted (a posynomial coefficient
/// must be positive); they remain legitimate energy-harvesting variables.
pub fn snr_posynomial(ch: &ChannelState) -> Result<Posynomial> {
    let n = ch.n_tones();
    let mut terms = Vec::new();
    for i in 0..n {
        let gain = ch.forward_amplitude(i) * ch.backward_amplitude(i);
        if gain > 0.0 {
            let mut exponents = vec![0.0; n];
            exponents[i] = 2.0;
            terms.push(Monomial::new(gain * gain / ch.noise_power_w(), exponents)?);
        }
    }
    if terms.is_empty() {
        return Err(Error::AllTonesZeroGain);
    }
    Posynomial::new(terms)
}
