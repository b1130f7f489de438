//! Photon-statistics toolkit for pulsed single-photon sources.
//!
//! The crate has two halves. The simulation half ([`sim`]) runs a quantum-jump
//! Monte Carlo of a resonantly driven two-level emitter and turns the emitted
//! photons into time-tagged detection streams with configurable loss,
//! beam-splitting, timing jitter and background. The analysis half
//! ([`correlator`], [`pn`], [`hom`]) consumes such streams (simulated or from a
//! real time tagger, via the `.ptag` format in [`timetag`]) and produces
//! multi-start multi-stop correlation histograms, normalized `g^(m)(0)`
//! estimates with Poisson uncertainties, photon-number probabilities with loss
//! inversion, lifetime fits, gated purity scans and Hong-Ou-Mandel overlap
//! numbers.
//!
//! All timestamps are integer picoseconds. All randomness is derived from
//! per-pulse counter-based substreams, so a given `(config, seed)` pair
//! reproduces output streams bit-for-bit regardless of thread count.

pub mod config;
pub mod correlator;
pub mod error;
pub mod hom;
pub mod oracle;
pub mod pn;
pub mod rng;
pub mod sim;
pub mod timetag;

pub use error::{Error, Result};
pub use timetag::{GateWindow, TimeTag, TimeTagStream};
