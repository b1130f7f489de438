//! Reference photon sources with known statistics.
//!
//! These bypass the two-level dynamics entirely: the per-pulse photon number
//! is drawn from a closed-form distribution and emission times from the
//! radiative decay, which makes them exact oracles for the correlator
//! (coherent light must analyze to `g^(m)(0) = 1`, thermal light to `m!`,
//! a single-photon Fock state to `g^(2)(0) = 0`).

use rayon::prelude::*;

use super::detect::DetectionConfig;
use crate::error::{Error, Result};
use crate::rng::{domain, SubRng};
use crate::timetag::{TimeTag, TimeTagStream, CLOCK_CHANNEL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceSource {
    /// Poissonian photon number with the given mean per pulse.
    Coherent { mean: f64 },
    /// Bose-Einstein photon number with the given mean per pulse.
    Thermal { mean: f64 },
    /// Exactly `n` photons per pulse.
    Fock { n: u32 },
}

impl ReferenceSource {
    fn validate(&self) -> Result<()> {
        match self {
            ReferenceSource::Coherent { mean } | ReferenceSource::Thermal { mean } => {
                if !mean.is_finite() || *mean < 0.0 {
                    return Err(Error::Config(format!(
                        "reference mean: must be >= 0, got {mean}"
                    )));
                }
            }
            ReferenceSource::Fock { .. } => {}
        }
        Ok(())
    }
}

/// Simulate a reference source through the standard detection chain.
pub fn simulate_reference(
    source: ReferenceSource,
    n_pulses: u64,
    clock_period: u64,
    lifetime_ps: f64,
    det: &DetectionConfig,
    seed: u64,
) -> Result<TimeTagStream> {
    source.validate()?;
    det.validate()?;
    if clock_period == 0 {
        return Err(Error::Config("clock_period: must be positive".into()));
    }
    if lifetime_ps <= 0.0 || !lifetime_ps.is_finite() {
        return Err(Error::Config(format!(
            "lifetime_ps: must be positive, got {lifetime_ps}"
        )));
    }

    let cum = {
        let mut acc = 0.0;
        det.splitting
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect::<Vec<f64>>()
    };

    let chunk = (n_pulses / (rayon::current_num_threads() as u64 * 16)).max(4096);
    let starts: Vec<u64> = (0..n_pulses).step_by(chunk as usize).collect();
    let parts: Vec<Vec<TimeTag>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(n_pulses);
            let mut out = Vec::with_capacity((end - start) as usize * 5 / 4);
            let mut times: Vec<f64> = Vec::with_capacity(8);
            for i in start..end {
                let pulse_start = i * clock_period;
                out.push(TimeTag::new(pulse_start, CLOCK_CHANNEL));

                let mut src = SubRng::new(seed, i, domain::REFERENCE);
                let n = match source {
                    ReferenceSource::Coherent { mean } => src.poisson(mean),
                    ReferenceSource::Thermal { mean } => src.thermal(mean),
                    ReferenceSource::Fock { n } => n as u64,
                };
                if n == 0 {
                    continue;
                }
                times.clear();
                for _ in 0..n {
                    times.push(src.exponential(lifetime_ps));
                }
                times.sort_by(|a, b| a.partial_cmp(b).unwrap());

                let mut rng = SubRng::new(seed, i, domain::DETECTION);
                for &t in &times {
                    if !rng.bernoulli(det.eta_t) {
                        continue;
                    }
                    let ch = rng.pick(&cum) as u16 + 1;
                    let jitter = if det.jitter_ps > 0.0 {
                        rng.gaussian(det.jitter_ps)
                    } else {
                        0.0
                    };
                    let time = pulse_start as f64 + det.signal_delay_ps + t + jitter;
                    out.push(TimeTag::new(time.round().max(0.0) as u64, ch));
                }
            }
            out
        })
        .collect();

    let mut tags: Vec<TimeTag> = Vec::with_capacity(parts.iter().map(Vec::len).sum());
    for p in parts {
        tags.extend(p);
    }
    tags.sort_unstable();
    TimeTagStream::new(tags, clock_period, det.n_detectors)
}
