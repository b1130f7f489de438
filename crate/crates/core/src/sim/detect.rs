//! Detection chain: loss, beam splitting, jitter, background, clock tags.

use rayon::prelude::*;

use super::emitter::PulsePlan;
use super::{EmissionRecord, EmitterConfig, PhotonNumberCounts};
use crate::error::{Error, Result};
use crate::rng::{domain, SubRng};
use crate::timetag::{TimeTag, TimeTagStream, CLOCK_CHANNEL};

/// Detection-path delay applied to every detector tag, in ps after the clock
/// edge. The default keeps the decay onset of a 15 ps pulse near 150 ps, so
/// gate scans have headroom on both sides.
pub const DEFAULT_SIGNAL_DELAY_PS: f64 = 135.0;

/// Loss, splitting and timing model of the detection setup.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct DetectionConfig {
    /// Probability that an emitted photon produces a click anywhere.
    pub eta_t: f64,
    pub n_detectors: u16,
    /// Per-detector routing probabilities; must sum to 1.
    pub splitting: Vec<f64>,
    /// Gaussian timing jitter (1 sigma), ps.
    pub jitter_ps: f64,
    /// Uniform background rate, counts per second over all detectors.
    pub background_cps: f64,
    /// Clock-to-signal alignment delay, ps.
    pub signal_delay_ps: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            eta_t: 0.25,
            n_detectors: 4,
            splitting: vec![0.25; 4],
            jitter_ps: 0.0,
            background_cps: 0.0,
            signal_delay_ps: DEFAULT_SIGNAL_DELAY_PS,
        }
    }
}

impl DetectionConfig {
    /// Even splitting over `n` detectors with the default loss.
    pub fn balanced(n_detectors: u16) -> Self {
        DetectionConfig {
            n_detectors,
            splitting: vec![1.0 / n_detectors as f64; n_detectors as usize],
            ..DetectionConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta_t) {
            return Err(Error::Config(format!(
                "eta_t: must be within [0, 1], got {}",
                self.eta_t
            )));
        }
        if self.n_detectors == 0 || self.n_detectors > 4 {
            return Err(Error::Config(format!(
                "n_detectors: must be 1..=4, got {}",
                self.n_detectors
            )));
        }
        if self.splitting.len() != self.n_detectors as usize {
            return Err(Error::Config(format!(
                "splitting: expected {} entries, got {}",
                self.n_detectors,
                self.splitting.len()
            )));
        }
        if self.splitting.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("splitting: entries must be within [0, 1]".into()));
        }
        let total: f64 = self.splitting.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "splitting: entries must sum to 1, got {total}"
            )));
        }
        if !self.jitter_ps.is_finite() || self.jitter_ps < 0.0 {
            return Err(Error::Config(format!(
                "jitter_ps: must be >= 0, got {}",
                self.jitter_ps
            )));
        }
        if !self.background_cps.is_finite() || self.background_cps < 0.0 {
            return Err(Error::Config(format!(
                "background_cps: must be >= 0, got {}",
                self.background_cps
            )));
        }
        if !self.signal_delay_ps.is_finite() || self.signal_delay_ps < 0.0 {
            return Err(Error::Config(format!(
                "signal_delay_ps: must be >= 0, got {}",
                self.signal_delay_ps
            )));
        }
        Ok(())
    }

    fn cumulative_splitting(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.splitting
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }
}

/// Detect the emissions of one pulse into `out`. Emits the clock tag first,
/// then each surviving photon with routing, delay and jitter applied.
#[inline]
fn detect_pulse(
    pulse_index: u64,
    emission_times: &[f64],
    det: &DetectionConfig,
    cum_split: &[f64],
    clock_period: u64,
    seed: u64,
    out: &mut Vec<TimeTag>,
) {
    let pulse_start = pulse_index * clock_period;
    out.push(TimeTag::new(pulse_start, CLOCK_CHANNEL));
    if emission_times.is_empty() {
        return;
    }
    let mut rng = SubRng::new(seed, pulse_index, domain::DETECTION);
    for &t in emission_times {
        if !rng.bernoulli(det.eta_t) {
            continue;
        }
        let ch = rng.pick(cum_split) as u16 + 1;
        let jitter = if det.jitter_ps > 0.0 {
            rng.gaussian(det.jitter_ps)
        } else {
            0.0
        };
        let time = pulse_start as f64 + det.signal_delay_ps + t + jitter;
        out.push(TimeTag::new(time.round().max(0.0) as u64, ch));
    }
}

fn background_tags(
    det: &DetectionConfig,
    cum_split: &[f64],
    n_pulses: u64,
    clock_period: u64,
    seed: u64,
) -> Vec<TimeTag> {
    if det.background_cps <= 0.0 {
        return Vec::new();
    }
    let span_ps = n_pulses * clock_period;
    let mut rng = SubRng::new(seed, 0, domain::BACKGROUND);
    let n = rng.poisson(det.background_cps * span_ps as f64 * 1e-12);
    (0..n)
        .map(|_| {
            let time = (rng.next_f64() * span_ps as f64) as u64;
            let ch = rng.pick(cum_split) as u16 + 1;
            TimeTag::new(time, ch)
        })
        .collect()
}

/// Detect a sequence of emission records into a sorted time-tag stream.
pub fn detect(
    records: &[EmissionRecord],
    det: &DetectionConfig,
    clock_period: u64,
    seed: u64,
) -> Result<TimeTagStream> {
    det.validate()?;
    if clock_period == 0 {
        return Err(Error::Config("clock_period: must be positive".into()));
    }
    let cum = det.cumulative_splitting();
    let chunk = (records.len() / (rayon::current_num_threads() * 8)).max(1024);
    let mut tags: Vec<TimeTag> = records
        .par_chunks(chunk)
        .map(|recs| {
            let mut out = Vec::with_capacity(recs.len() + recs.len() / 4);
            for r in recs {
                detect_pulse(
                    r.pulse_index,
                    &r.emission_times,
                    det,
                    &cum,
                    clock_period,
                    seed,
                    &mut out,
                );
            }
            out
        })
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    let n_pulses = records.last().map_or(0, |r| r.pulse_index + 1);
    tags.extend(background_tags(det, &cum, n_pulses, clock_period, seed));
    tags.sort_unstable();
    TimeTagStream::new(tags, clock_period, det.n_detectors)
}

/// Simulate and detect in one fused pass: per-pulse emission records are
/// never materialized, only the output tags and the ground-truth
/// photon-number histogram. Bit-identical to `detect(simulate_emissions(..))`
/// with the same seeds.
pub fn simulate_detected(
    cfg: &EmitterConfig,
    det: &DetectionConfig,
    det_seed: u64,
) -> Result<(TimeTagStream, PhotonNumberCounts)> {
    cfg.validate()?;
    det.validate()?;
    let plan = PulsePlan::new(cfg);
    let cum = det.cumulative_splitting();
    let period = cfg.repetition_period_ps;

    let n = cfg.n_pulses;
    let chunk = (n / (rayon::current_num_threads() as u64 * 16)).max(4096);
    let starts: Vec<u64> = (0..n).step_by(chunk as usize).collect();

    let parts: Vec<(Vec<TimeTag>, PhotonNumberCounts)> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(n);
            let mut tags = Vec::with_capacity((end - start) as usize * 5 / 4);
            let mut counts = PhotonNumberCounts::default();
            let mut times: Vec<f64> = Vec::with_capacity(8);
            for i in start..end {
                times.clear();
                let mut rng = SubRng::new(cfg.seed, i, domain::EMISSION);
                plan.run(&mut rng, &mut times);
                counts.record(times.len());
                detect_pulse(i, &times, det, &cum, period, det_seed, &mut tags);
            }
            (tags, counts)
        })
        .collect();

    let mut tags = Vec::with_capacity(parts.iter().map(|(t, _)| t.len()).sum());
    let mut counts = PhotonNumberCounts::default();
    for (t, c) in parts {
        tags.extend(t);
        counts.merge(&c);
    }
    tags.extend(background_tags(det, &cum, n, period, det_seed));
    tags.sort_unstable();
    let stream = TimeTagStream::new(tags, period, det.n_detectors)?;
    Ok((stream, counts))
}
