//! Time-tag records, streams, the `.ptag` binary format and stream utilities.
//!
//! A stream is an immutable, time-sorted sequence of `(time, channel)` records
//! plus the repetition-clock metadata every analysis step needs. Channel 0 is
//! reserved for the laser clock; detectors occupy channels 1 and up.
//!
//! Binary format (little-endian):
//!
//! ```text
//! header, 32 bytes: magic "PTAG" | version u16 = 1 | n_channels u16 |
//!                   clock_period_ps u64 | record_count u64 | reserved [8]
//! record, 16 bytes: time_ps u64 | channel u16 | reserved [6] = 0
//! ```
//!
//! Records must be sorted by `(time, channel)`; readers reject files that are
//! not, reporting the first offending record index.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{domain, SubRng};

pub const CLOCK_CHANNEL: u16 = 0;
/// 80 MHz repetition clock.
pub const DEFAULT_CLOCK_PERIOD_PS: u64 = 12_500;

const MAGIC: [u8; 4] = *b"PTAG";
const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 32;
const RECORD_LEN: usize = 16;

/// One detection (or clock) event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeTag {
    /// Picoseconds since acquisition start.
    pub time: u64,
    /// 0 = laser clock, 1.. = detectors.
    pub channel: u16,
}

impl TimeTag {
    pub fn new(time: u64, channel: u16) -> Self {
        TimeTag { time, channel }
    }
}

/// A gating window in pulse phase, relative to the clock edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GateWindow {
    pub t_start: u64,
    pub t_stop: u64,
}

impl GateWindow {
    pub fn new(t_start: u64, t_stop: u64) -> Self {
        GateWindow { t_start, t_stop }
    }

    pub fn validate(&self, clock_period: u64) -> Result<()> {
        if self.t_start >= self.t_stop {
            return Err(Error::Config(format!(
                "gate: t_start ({}) must be below t_stop ({})",
                self.t_start, self.t_stop
            )));
        }
        if self.t_stop > clock_period {
            return Err(Error::Config(format!(
                "gate: t_stop ({}) exceeds clock_period ({})",
                self.t_stop, clock_period
            )));
        }
        Ok(())
    }
}

/// A sorted, immutable stream of time tags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeTagStream {
    tags: Vec<TimeTag>,
    clock_period: u64,
    n_channels: u16,
}

impl TimeTagStream {
    /// Build a stream from tags that are already sorted by `(time, channel)`.
    pub fn new(tags: Vec<TimeTag>, clock_period: u64, n_channels: u16) -> Result<Self> {
        if clock_period == 0 {
            return Err(Error::Config("clock_period must be positive".into()));
        }
        for (i, pair) in tags.windows(2).enumerate() {
            if pair[1] < pair[0] {
                return Err(Error::NonMonotone(i as u64 + 1));
            }
        }
        Ok(TimeTagStream {
            tags,
            clock_period,
            n_channels,
        })
    }

    /// Sort tags by `(time, channel)` and build a stream.
    pub fn from_unsorted(mut tags: Vec<TimeTag>, clock_period: u64, n_channels: u16) -> Result<Self> {
        tags.sort_unstable();
        Self::new(tags, clock_period, n_channels)
    }

    pub fn tags(&self) -> &[TimeTag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn clock_period(&self) -> u64 {
        self.clock_period
    }

    pub fn n_channels(&self) -> u16 {
        self.n_channels
    }

    /// Times of all tags in one channel.
    pub fn channel_times(&self, channel: u16) -> Vec<u64> {
        self.tags
            .iter()
            .filter(|t| t.channel == channel)
            .map(|t| t.time)
            .collect()
    }

    pub fn count_channel(&self, channel: u16) -> u64 {
        self.tags.iter().filter(|t| t.channel == channel).count() as u64
    }

    pub fn detector_count(&self) -> u64 {
        self.tags.iter().filter(|t| t.channel != CLOCK_CHANNEL).count() as u64
    }

    /// Channels present in the stream, ascending.
    pub fn channels_present(&self) -> Vec<u16> {
        let mut chs: Vec<u16> = self.tags.iter().map(|t| t.channel).collect();
        chs.sort_unstable();
        chs.dedup();
        chs
    }

    /// Number of pulse periods covered by the acquisition: the clock-tag
    /// count when clock tags are present, otherwise the spanned period count.
    pub fn n_periods(&self) -> u64 {
        let clocks = self.count_channel(CLOCK_CHANNEL);
        if clocks > 0 {
            clocks
        } else if let Some(last) = self.tags.last() {
            last.time / self.clock_period + 1
        } else {
            0
        }
    }

    /// Keep detector tags whose pulse phase falls inside `[t_start, t_stop)`.
    /// Clock tags always pass. Phase 0 is the clock edge.
    pub fn apply_gate(&self, gate: &GateWindow) -> Result<Self> {
        self.apply_gate_offset(gate, 0)
    }

    /// Gate against a phase origin shifted by `offset_ps` after the clock
    /// edge, for streams whose signal alignment is not at phase 0.
    pub fn apply_gate_offset(&self, gate: &GateWindow, offset_ps: u64) -> Result<Self> {
        gate.validate(self.clock_period)?;
        let p = self.clock_period;
        let off = offset_ps % p;
        let tags = self
            .tags
            .iter()
            .filter(|t| {
                if t.channel == CLOCK_CHANNEL {
                    return true;
                }
                let phase = ((t.time % p) + p - off) % p;
                phase >= gate.t_start && phase < gate.t_stop
            })
            .copied()
            .collect();
        Ok(TimeTagStream {
            tags,
            clock_period: p,
            n_channels: self.n_channels,
        })
    }

    /// Binomial thinning: keep each detector tag with probability `eta`.
    /// Clock tags always survive.
    pub fn thin(&self, eta: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Config(format!("eta must be within [0, 1], got {eta}")));
        }
        let mut rng = SubRng::new(seed, 0, domain::THINNING);
        let tags = self
            .tags
            .iter()
            .filter(|t| t.channel == CLOCK_CHANNEL || rng.bernoulli(eta))
            .copied()
            .collect();
        Ok(TimeTagStream {
            tags,
            clock_period: self.clock_period,
            n_channels: self.n_channels,
        })
    }

    /// Merge two streams with identical clock periods.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.clock_period != other.clock_period {
            return Err(Error::Data(format!(
                "cannot merge streams with clock periods {} and {}",
                self.clock_period, other.clock_period
            )));
        }
        let mut tags = Vec::with_capacity(self.tags.len() + other.tags.len());
        let (mut i, mut j) = (0, 0);
        while i < self.tags.len() && j < other.tags.len() {
            if self.tags[i] <= other.tags[j] {
                tags.push(self.tags[i]);
                i += 1;
            } else {
                tags.push(other.tags[j]);
                j += 1;
            }
        }
        tags.extend_from_slice(&self.tags[i..]);
        tags.extend_from_slice(&other.tags[j..]);
        Ok(TimeTagStream {
            tags,
            clock_period: self.clock_period,
            n_channels: self.n_channels.max(other.n_channels),
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        let mut header = [0u8; HEADER_LEN];
        header[0..4].copy_from_slice(&MAGIC);
        header[4..6].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        header[6..8].copy_from_slice(&self.n_channels.to_le_bytes());
        header[8..16].copy_from_slice(&self.clock_period.to_le_bytes());
        header[16..24].copy_from_slice(&(self.tags.len() as u64).to_le_bytes());
        w.write_all(&header)?;
        let mut rec = [0u8; RECORD_LEN];
        for tag in &self.tags {
            rec[0..8].copy_from_slice(&tag.time.to_le_bytes());
            rec[8..10].copy_from_slice(&tag.channel.to_le_bytes());
            w.write_all(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)
            .map_err(|_| Error::Format("file shorter than the 32-byte header".into()))?;
        if header[0..4] != MAGIC {
            return Err(Error::Format("bad magic, expected \"PTAG\"".into()));
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let n_channels = u16::from_le_bytes([header[6], header[7]]);
        let clock_period = u64::from_le_bytes(header[8..16].try_into().unwrap());
        if clock_period == 0 {
            return Err(Error::Format("clock_period in header is zero".into()));
        }
        let record_count = u64::from_le_bytes(header[16..24].try_into().unwrap());

        let mut tags = Vec::with_capacity(record_count.min(1 << 24) as usize);
        let mut rec = [0u8; RECORD_LEN];
        let mut prev: Option<TimeTag> = None;
        for index in 0..record_count {
            r.read_exact(&mut rec)
                .map_err(|_| Error::Format(format!("truncated record {index}")))?;
            let tag = TimeTag {
                time: u64::from_le_bytes(rec[0..8].try_into().unwrap()),
                channel: u16::from_le_bytes([rec[8], rec[9]]),
            };
            if let Some(p) = prev {
                if tag < p {
                    return Err(Error::NonMonotone(index));
                }
            }
            prev = Some(tag);
            tags.push(tag);
        }
        Ok(TimeTagStream {
            tags,
            clock_period,
            n_channels,
        })
    }

    /// CSV export with a `time_ps,channel` header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "time_ps,channel")?;
        for t in &self.tags {
            writeln!(w, "{},{}", t.time, t.channel)?;
        }
        Ok(())
    }
}
