//! Waveform design for wirelessly powered backscatter links.
//!
//! An RF transmitter feeds a multisine waveform through a frequency-selective
//! forward channel to an energy-harvesting tag, which backscatters toward a
//! reader. Harvested DC current at the tag and post-MRC SNR at the reader pull
//! the amplitude allocation in different directions; this crate computes the
//! full tradeoff boundary by sweeping SNR targets and maximizing a rectifier
//! DC-current surrogate at each one via condensed geometric programming.
//!
//! Module map:
//! - [`gp`]: posynomial algebra, AM-GM condensation, log-domain GP solver.
//! - [`channel`]: tapped-delay-line channel realizations and link budget.
//! - [`rectenna`]: diode Taylor coefficients and the DC-current surrogate.
//! - [`waveform`]: transmit waveform, power budget, SNR, single-tone baseline.
//! - [`optimizer`]: successive convex approximation and region tracing.

pub mod channel;
pub mod error;
pub mod gp;
pub mod optimizer;
pub mod rectenna;
pub mod waveform;

pub use error::{Error, Result};
