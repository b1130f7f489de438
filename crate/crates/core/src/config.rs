//! TOML run-configuration file shared by the CLI and the bindings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{DetectionConfig, EmitterConfig, PulseShape, DEFAULT_SIGNAL_DELAY_PS};
use crate::timetag::DEFAULT_CLOCK_PERIOD_PS;

/// Sweep of the pulse area in units of pi.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ThetaSweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ThetaSweep {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.step <= 0.0 || self.stop < self.start {
            return Err(Error::Config(format!(
                "theta_sweep: need step > 0 and stop >= start, got {self:?}"
            )));
        }
        let n = ((self.stop - self.start) / self.step).round() as usize;
        Ok((0..=n).map(|k| self.start + k as f64 * self.step).collect())
    }
}

/// On-disk simulation configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "d_pulse_area_pi")]
    pub pulse_area_pi: f64,
    #[serde(default = "d_pulse_duration")]
    pub pulse_duration_ps: f64,
    #[serde(default = "d_pulse_shape")]
    pub pulse_shape: String,
    #[serde(default = "d_lifetime")]
    pub lifetime_ps: f64,
    #[serde(default = "d_period")]
    pub repetition_period_ps: u64,
    #[serde(default = "d_n_pulses")]
    pub n_pulses: u64,
    #[serde(default = "d_eta_t")]
    pub eta_t: f64,
    #[serde(default = "d_n_detectors")]
    pub n_detectors: u16,
    #[serde(default)]
    pub splitting: Option<Vec<f64>>,
    #[serde(default)]
    pub jitter_ps: f64,
    #[serde(default)]
    pub background_cps: f64,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default = "d_signal_delay")]
    pub signal_delay_ps: f64,
    #[serde(default)]
    pub theta_sweep: Option<ThetaSweep>,
}

fn d_pulse_area_pi() -> f64 {
    1.0
}
fn d_pulse_duration() -> f64 {
    8.0
}
fn d_pulse_shape() -> String {
    "square".into()
}
fn d_lifetime() -> f64 {
    204.0
}
fn d_period() -> u64 {
    DEFAULT_CLOCK_PERIOD_PS
}
fn d_n_pulses() -> u64 {
    1_000_000
}
fn d_eta_t() -> f64 {
    0.25
}
fn d_n_detectors() -> u16 {
    4
}
fn d_seed() -> u64 {
    1
}
fn d_signal_delay() -> f64 {
    DEFAULT_SIGNAL_DELAY_PS
}

impl Default for SimConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config populates defaults")
    }
}

impl SimConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))?;
        cfg.emitter()?;
        cfg.detection()?;
        Ok(cfg)
    }

    pub fn emitter(&self) -> Result<EmitterConfig> {
        let shape = match self.pulse_shape.as_str() {
            "square" => PulseShape::Square,
            "gaussian" => PulseShape::Gaussian,
            other => {
                return Err(Error::Config(format!(
                    "pulse_shape: expected \"square\" or \"gaussian\", got \"{other}\""
                )))
            }
        };
        if self.pulse_area_pi < 0.0 || !self.pulse_area_pi.is_finite() {
            return Err(Error::Config(format!(
                "pulse_area_pi: must be >= 0, got {}",
                self.pulse_area_pi
            )));
        }
        let cfg = EmitterConfig {
            pulse_area: self.pulse_area_pi * std::f64::consts::PI,
            pulse_duration_ps: self.pulse_duration_ps,
            pulse_shape: shape,
            lifetime_ps: self.lifetime_ps,
            repetition_period_ps: self.repetition_period_ps,
            n_pulses: self.n_pulses,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn detection(&self) -> Result<DetectionConfig> {
        let splitting = match &self.splitting {
            Some(s) => s.clone(),
            None => vec![1.0 / self.n_detectors.max(1) as f64; self.n_detectors as usize],
        };
        let cfg = DetectionConfig {
            eta_t: self.eta_t,
            n_detectors: self.n_detectors,
            splitting,
            jitter_ps: self.jitter_ps,
            background_cps: self.background_cps,
            signal_delay_ps: self.signal_delay_ps,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SimConfig::default();
        assert_eq!(cfg.lifetime_ps, 204.0);
        assert_eq!(cfg.repetition_period_ps, 12_500);
        assert_eq!(cfg.eta_t, 0.25);
        cfg.emitter().unwrap();
        cfg.detection().unwrap();
    }

    #[test]
    fn invalid_eta_names_the_key() {
        let cfg = SimConfig {
            eta_t: 1.5,
            ..SimConfig::default()
        };
        let msg = cfg.detection().unwrap_err().to_string();
        assert!(msg.contains("eta_t"), "{msg}");
    }

    #[test]
    fn parse_round_trips_and_rejects_unknown_keys() {
        let text = r#"
pulse_area_pi = 2.0
pulse_duration_ps = 15.0
n_pulses = 1000
seed = 7
"#;
        let cfg = SimConfig::parse(text).unwrap();
        assert_eq!(cfg.pulse_area_pi, 2.0);
        assert_eq!(cfg.n_pulses, 1000);
        assert!(SimConfig::parse("pulse_area = 2.0").is_err());
    }

    #[test]
    fn sweep_points_cover_the_grid() {
        let sweep = ThetaSweep {
            start: 0.0,
            stop: 6.0,
            step: 0.125,
        };
        let pts = sweep.points().unwrap();
        assert_eq!(pts.len(), 49);
        assert_eq!(pts[0], 0.0);
        assert_eq!(*pts.last().unwrap(), 6.0);
    }
}
