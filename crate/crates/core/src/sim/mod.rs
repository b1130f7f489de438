//! Monte-Carlo simulation of a resonantly pulsed two-level emitter.
//!
//! [`simulate_emissions`] produces per-pulse emission times from a
//! quantum-jump (Monte-Carlo wavefunction) integration of the driven
//! two-level system; [`detect`] turns emission records into a detected
//! [`TimeTagStream`] by applying loss, beam splitting, timing jitter and
//! optional background; [`simulate_detected`] fuses the two so multi-million
//! pulse runs never materialize the record list. [`simulate_reference`]
//! provides coherent / thermal / Fock oracle sources for validating the
//! analysis chain.

mod detect;
mod emitter;
mod reference;

pub use detect::{detect, simulate_detected, DetectionConfig, DEFAULT_SIGNAL_DELAY_PS};
pub use emitter::{simulate_emissions, PulseShape};
pub use reference::{simulate_reference, ReferenceSource};

use crate::error::{Error, Result};
use crate::pn::{DistLevel, PhotonNumberDist};
use crate::timetag::DEFAULT_CLOCK_PERIOD_PS;

/// Driving-pulse and emitter parameters.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct EmitterConfig {
    /// Pulse area in radians (integral of the Rabi rate over one pulse).
    pub pulse_area: f64,
    pub pulse_duration_ps: f64,
    pub pulse_shape: PulseShape,
    /// Radiative lifetime of the excited state.
    pub lifetime_ps: f64,
    pub repetition_period_ps: u64,
    pub n_pulses: u64,
    pub seed: u64,
}

impl Default for EmitterConfig {
    fn default() -> Self {
        EmitterConfig {
            pulse_area: std::f64::consts::PI,
            pulse_duration_ps: 8.0,
            pulse_shape: PulseShape::Square,
            lifetime_ps: 204.0,
            repetition_period_ps: DEFAULT_CLOCK_PERIOD_PS,
            n_pulses: 100_000,
            seed: 1,
        }
    }
}

impl EmitterConfig {
    /// Set the pulse area in units of pi.
    pub fn with_area_pi(mut self, area_over_pi: f64) -> Self {
        self.pulse_area = area_over_pi * std::f64::consts::PI;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.pulse_area.is_finite() || self.pulse_area < 0.0 {
            return Err(Error::Config(format!(
                "pulse_area: must be finite and >= 0, got {}",
                self.pulse_area
            )));
        }
        if !self.pulse_duration_ps.is_finite() || self.pulse_duration_ps <= 0.0 {
            return Err(Error::Config(format!(
                "pulse_duration_ps: must be positive, got {}",
                self.pulse_duration_ps
            )));
        }
        if self.pulse_duration_ps * 10.0 > self.repetition_period_ps as f64 {
            return Err(Error::Config(format!(
                "pulse_duration_ps: {} is not small against repetition_period_ps {}",
                self.pulse_duration_ps, self.repetition_period_ps
            )));
        }
        if !self.lifetime_ps.is_finite() || self.lifetime_ps <= 0.0 {
            return Err(Error::Config(format!(
                "lifetime_ps: must be positive, got {}",
                self.lifetime_ps
            )));
        }
        if self.repetition_period_ps == 0 {
            return Err(Error::Config("repetition_period_ps: must be positive".into()));
        }
        if self.n_pulses == 0 {
            return Err(Error::Config("n_pulses: must be at least 1".into()));
        }
        Ok(())
    }
}

/// Source-level emissions of one excitation pulse, times relative to the
/// pulse start. Strictly increasing; empty when the pulse emitted nothing.
#[derive(Clone, Debug, PartialEq)]
pub struct EmissionRecord {
    pub pulse_index: u64,
    pub emission_times: Vec<f64>,
}

/// Histogram of per-pulse photon numbers, truncated at four photons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhotonNumberCounts {
    /// Pulses that emitted 0..=4 photons (5+ folded into the last slot).
    pub counts: [u64; 5],
    /// How many pulses had more than four emissions and were folded.
    pub folded: u64,
    pub n_pulses: u64,
}

impl PhotonNumberCounts {
    #[inline]
    pub fn record(&mut self, n_emissions: usize) {
        if n_emissions > 4 {
            self.counts[4] += 1;
            self.folded += 1;
        } else {
            self.counts[n_emissions] += 1;
        }
        self.n_pulses += 1;
    }

    pub fn merge(&mut self, other: &PhotonNumberCounts) {
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
        self.folded += other.folded;
        self.n_pulses += other.n_pulses;
    }

    /// True when photon numbers above four were folded into `p4`.
    pub fn truncated(&self) -> bool {
        self.folded > 0
    }

    pub fn to_dist(&self) -> Result<PhotonNumberDist> {
        if self.n_pulses == 0 {
            return Err(Error::Data("photon-number histogram over zero pulses".into()));
        }
        let n = self.n_pulses as f64;
        let p = [
            self.counts[0] as f64 / n,
            self.counts[1] as f64 / n,
            self.counts[2] as f64 / n,
            self.counts[3] as f64 / n,
            self.counts[4] as f64 / n,
        ];
        PhotonNumberDist::new(p, DistLevel::Source, None)
    }
}

/// Per-pulse photon-number histogram of an emission-record sequence.
pub fn photon_number_histogram(records: &[EmissionRecord]) -> Result<PhotonNumberCounts> {
    if records.is_empty() {
        return Err(Error::Data("no emission records".into()));
    }
    let mut counts = PhotonNumberCounts::default();
    for r in records {
        counts.record(r.emission_times.len());
    }
    Ok(counts)
}
