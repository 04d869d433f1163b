//! Frequency-selective channel simulation and link-budget scaling.
//!
//! Channels are tapped delay lines drawn from a power delay profile: tap `l`
//! gets an independent circularly symmetric complex Gaussian gain with
//! variance `beta_l`, and the frequency response is
//! `h(f) = sum_l g_l exp(-j 2 pi f tau_l)`. Responses are evaluated at tone
//! offsets from the carrier; the carrier-scale phase is absorbed into the tap
//! gains, since only relative tone phases matter downstream.
//!
//! [`build_channel_state`] folds the link budget (EIRP, antenna gains, path
//! loss, noise power) into per-tone forward and backward gains so that at
//! full transmit power the average received power matches the budget.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Average multipath power per delay, normalized to unit total power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    taps: Vec<PdpTap>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdpTap {
    pub delay_s: f64,
    pub power: f64,
}

impl PowerDelayProfile {
    /// Build from `(delay seconds, linear power)` pairs. Delays must be
    /// nonnegative and strictly increasing; powers must sum to 1 within 1e-9.
    pub fn new(taps: Vec<PdpTap>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidPdp("profile has no taps".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for tap in &taps {
            if !tap.delay_s.is_finite() || tap.delay_s < 0.0 {
                return Err(Error::InvalidPdp(format!(
                    "tap delay {} is negative or not finite",
                    tap.delay_s
                )));
            }
            if tap.delay_s <= prev {
                return Err(Error::InvalidPdp(
                    "tap delays must be strictly increasing".into(),
                ));
            }
            if !tap.power.is_finite() || tap.power < 0.0 {
                return Err(Error::InvalidPdp(format!(
                    "tap power {} is negative or not finite",
                    tap.power
                )));
            }
            prev = tap.delay_s;
        }
        let total: f64 = taps.iter().map(|t| t.power).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPdp(format!(
                "tap powers sum to {total}, expected 1 (within 1e-9)"
            )));
        }
        Ok(Self { taps })
    }

    /// Build from unnormalized powers, rescaling them to sum to 1.
    pub fn new_normalized(mut taps: Vec<PdpTap>) -> Result<Self> {
        let total: f64 = taps.iter().map(|t| t.power).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidPdp(format!(
                "total tap power {total} cannot be normalized"
            )));
        }
        for tap in &mut taps {
            tap.power /= total;
        }
        // The unit-sum invariant is checked to 1e-9; push the rounding
        // residual into the strongest tap.
        let total: f64 = taps.iter().map(|t| t.power).sum();
        if let Some(strongest) = taps.iter_mut().max_by(|a, b| a.power.total_cmp(&b.power)) {
            strongest.power += 1.0 - total;
        }
        Self::new(taps)
    }

    /// Indoor-NLOS-style default: 18 taps at 10 ns spacing with exponentially
    /// decaying power (100 ns decay constant), normalized.
    pub fn model_b_like() -> Self {
        let spacing = 10e-9;
        let decay = 100e-9;
        let taps = (0..18)
            .map(|l| {
                let delay_s = l as f64 * spacing;
                PdpTap {
                    delay_s,
                    power: (-delay_s / decay).exp(),
                }
            })
            .collect();
        Self::new_normalized(taps).expect("built-in profile is valid")
    }

    /// Frequency-flat single tap at zero delay.
    pub fn single_tap() -> Self {
        Self::new(vec![PdpTap {
            delay_s: 0.0,
            power: 1.0,
        }])
        .expect("single tap profile is valid")
    }

    pub fn taps(&self) -> &[PdpTap] {
        &self.taps
    }

    /// Draw an independent Rayleigh-fading realization; deterministic in the
    /// seed.
    pub fn realize(&self, rng_seed: u64) -> ChannelRealization {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let tap_gains = self
            .taps
            .iter()
            .map(|tap| {
                let scale = (tap.power / 2.0).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * scale, im * scale)
            })
            .collect();
        ChannelRealization {
            tap_gains,
            pdp: self.clone(),
        }
    }

    /// Parse the tap-list file format: `#` comments, a `normalize:` header,
    /// then one `delay_ns power_linear` record per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut normalize: Option<bool> = None;
        let mut taps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("normalize:") {
                normalize = Some(match rest.trim() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Error::InvalidPdp(format!(
                            "line {}: normalize must be true or false, got {other:?}",
                            idx + 1
                        )))
                    }
                });
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(delay), Some(power), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::InvalidPdp(format!(
                    "line {}: expected `delay_ns power_linear`, got {line:?}",
                    idx + 1
                )));
            };
            let delay_ns: f64 = delay
                .parse()
                .map_err(|_| Error::InvalidPdp(format!("line {}: bad delay {delay:?}", idx + 1)))?;
            let power: f64 = power
                .parse()
                .map_err(|_| Error::InvalidPdp(format!("line {}: bad power {power:?}", idx + 1)))?;
            taps.push(PdpTap {
                delay_s: delay_ns * 1e-9,
                power,
            });
        }
        let Some(normalize) = normalize else {
            return Err(Error::InvalidPdp(
                "missing `normalize: true|false` header".into(),
            ));
        };
        if normalize {
            Self::new_normalized(taps)
        } else {
            Self::new(taps)
        }
    }
}

/// One fading realization: a complex gain per tap of its profile.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    tap_gains: Vec<Complex64>,
    pdp: PowerDelayProfile,
}

impl ChannelRealization {
    pub fn tap_gains(&self) -> &[Complex64] {
        &self.tap_gains
    }

    pub fn pdp(&self) -> &PowerDelayProfile {
        &self.pdp
    }

    /// `h(f) = sum_l g_l exp(-j 2 pi f tau_l)` at each requested frequency.
    /// Callers pass offsets from the carrier (baseband convention).
    pub fn frequency_response(&self, frequencies_hz: &[f64]) -> Vec<Complex64> {
        frequencies_hz
            .iter()
            .map(|&f| {
                self.tap_gains
                    .iter()
                    .zip(self.pdp.taps())
                    .map(|(g, tap)| {
                        g * Complex64::from_polar(
                            1.0,
                            -2.0 * std::f64::consts::PI * f * tap.delay_s,
                        )
                    })
                    .sum()
            })
            .collect()
    }

    #[cfg(test)]
    pub(crate) fn with_tap_gains(mut self, gains: Vec<Complex64>) -> Self {
        assert_eq!(gains.len(), self.pdp.taps().len());
        self.tap_gains = gains;
        self
    }
}

/// Scenario constants fixing absolute power levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub center_frequency_hz: f64,
    pub eirp_dbm: f64,
    /// Transmitter antenna gain beyond what EIRP already includes; 0 dBi
    /// when `eirp_dbm` is a true EIRP.
    pub tx_antenna_gain_dbi: f64,
    /// Tag antenna gain, applied on forward reception and backscatter
    /// transmission alike (single tag antenna).
    pub tag_antenna_gain_dbi: f64,
    pub reader_antenna_gain_dbi: f64,
    pub path_loss_forward_db: f64,
    pub path_loss_backward_db: f64,
    pub noise_power_dbm: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("center_frequency_hz", self.center_frequency_hz),
            ("eirp_dbm", self.eirp_dbm),
            ("tx_antenna_gain_dbi", self.tx_antenna_gain_dbi),
            ("tag_antenna_gain_dbi", self.tag_antenna_gain_dbi),
            ("reader_antenna_gain_dbi", self.reader_antenna_gain_dbi),
            ("path_loss_forward_db", self.path_loss_forward_db),
            ("path_loss_backward_db", self.path_loss_backward_db),
            ("noise_power_dbm", self.noise_power_dbm),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::NonFinite(name.into()));
            }
        }
        if self.path_loss_forward_db <= 0.0 || self.path_loss_backward_db <= 0.0 {
            return Err(Error::NonPositive("path loss (dB)".into()));
        }
        if self.center_frequency_hz <= 0.0 {
            return Err(Error::NonPositive("center frequency".into()));
        }
        Ok(())
    }

    /// Transmit power constraint in watts (EIRP converted; transmitter
    /// antenna gain folded into the forward link gain).
    pub fn transmit_power_w(&self) -> f64 {
        dbm_to_watts(self.eirp_dbm)
    }

    /// Forward link power gain: tx gain - forward path loss + tag gain.
    pub fn forward_gain_linear(&self) -> f64 {
        db_to_linear(
            self.tx_antenna_gain_dbi - self.path_loss_forward_db + self.tag_antenna_gain_dbi,
        )
    }

    /// Backward link power gain: tag gain - backward path loss + reader gain.
    pub fn backward_gain_linear(&self) -> f64 {
        db_to_linear(
            self.tag_antenna_gain_dbi - self.path_loss_backward_db + self.reader_antenna_gain_dbi,
        )
    }

    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Uniform tone grid centered on the carrier: `N` tones spaced `spacing_hz`
/// apart, symmetric about `center_hz` (no tone sits on the carrier when `N`
/// is even).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneGrid {
    pub center_hz: f64,
    pub spacing_hz: f64,
    pub n_tones: usize,
}

impl ToneGrid {
    pub fn new(center_hz: f64, spacing_hz: f64, n_tones: usize) -> Result<Self> {
        if n_tones == 0 {
            return Err(Error::InvalidParameter("tone count must be >= 1".into()));
        }
        if !(spacing_hz > 0.0) || !spacing_hz.is_finite() {
            return Err(Error::NonPositive("tone spacing".into()));
        }
        if !center_hz.is_finite() {
            return Err(Error::NonFinite("center frequency".into()));
        }
        Ok(Self {
            center_hz,
            spacing_hz,
            n_tones,
        })
    }

    /// Offset of tone `n` from the carrier.
    pub fn offset_hz(&self, n: usize) -> f64 {
        (n as f64 - (self.n_tones as f64 - 1.0) / 2.0) * self.spacing_hz
    }

    pub fn offsets_hz(&self) -> Vec<f64> {
        (0..self.n_tones).map(|n| self.offset_hz(n)).collect()
    }

    pub fn frequencies_hz(&self) -> Vec<f64> {
        (0..self.n_tones)
            .map(|n| self.center_hz + self.offset_hz(n))
            .collect()
    }
}

/// Per-tone forward and backward channel gains plus reader noise power:
/// everything both objectives need from the propagation environment.
#[derive(Debug, Clone)]
pub struct ChannelState {
    forward: Vec<Complex64>,
    backward: Vec<Complex64>,
    noise_power_w: f64,
    grid: ToneGrid,
}

impl ChannelState {
    pub fn new(
        forward: Vec<Complex64>,
        backward: Vec<Complex64>,
        noise_power_w: f64,
        grid: ToneGrid,
    ) -> Result<Self> {
        if forward.len() != grid.n_tones {
            return Err(Error::DimensionMismatch {
                expected: grid.n_tones,
                got: forward.len(),
            });
        }
        if backward.len() != grid.n_tones {
            return Err(Error::DimensionMismatch {
                expected: grid.n_tones,
                got: backward.len(),
            });
        }
        if !(noise_power_w > 0.0) || !noise_power_w.is_finite() {
            return Err(Error::NonPositive("noise power".into()));
        }
        Ok(Self {
            forward,
            backward,
            noise_power_w,
            grid,
        })
    }

    pub fn n_tones(&self) -> usize {
        self.grid.n_tones
    }

    pub fn grid(&self) -> ToneGrid {
        self.grid
    }

    pub fn forward(&self) -> &[Complex64] {
        &self.forward
    }

    pub fn backward(&self) -> &[Complex64] {
        &self.backward
    }

    /// Forward amplitude `A_n`.
    pub fn forward_amplitude(&self, n: usize) -> f64 {
        self.forward[n].norm()
    }

    /// Forward phase `psi_bar_n`.
    pub fn forward_phase(&self, n: usize) -> f64 {
        self.forward[n].arg()
    }

    /// Backward amplitude `A_{r,n}`.
    pub fn backward_amplitude(&self, n: usize) -> f64 {
        self.backward[n].norm()
    }

    pub fn noise_power_w(&self) -> f64 {
        self.noise_power_w
    }

    pub fn tone_frequencies_hz(&self) -> Vec<f64> {
        self.grid.frequencies_hz()
    }
}

/// Sample forward/backward realizations on an `n_tones` grid spanning
/// `bandwidth_hz` (spacing `B/N`) and apply link-budget scaling, so that at
/// full transmit power the expected received power is the budgeted level at
/// the tag and at the reader.
pub fn build_channel_state(
    forward: &ChannelRealization,
    backward: &ChannelRealization,
    budget: &LinkBudget,
    n_tones: usize,
    bandwidth_hz: f64,
) -> Result<ChannelState> {
    budget.validate()?;
    if !(bandwidth_hz > 0.0) || !bandwidth_hz.is_finite() {
        return Err(Error::NonPositive("bandwidth".into()));
    }
    let grid = ToneGrid::new(
        budget.center_frequency_hz,
        bandwidth_hz / n_tones as f64,
        n_tones,
    )?;
    let offsets = grid.offsets_hz();
    let fwd_scale = budget.forward_gain_linear().sqrt();
    let bwd_scale = budget.backward_gain_linear().sqrt();
    let fwd: Vec<Complex64> = forward
        .frequency_response(&offsets)
        .into_iter()
        .map(|h| h * fwd_scale)
        .collect();
    let bwd: Vec<Complex64> = backward
        .frequency_response(&offsets)
        .into_iter()
        .map(|h| h * bwd_scale)
        .collect();
    ChannelState::new(fwd, bwd, budget.noise_power_w(), grid)
}
