//! Multi-start multi-stop coincidence histograms.
//!
//! For order `m` over channels `(ch_1..ch_m)`, every ordered tag tuple with
//! one tag per channel contributes one count at the consecutive-channel
//! delay vector `(t_2 - t_1, ..., t_m - t_{m-1})`, provided every delay
//! falls inside the binned axis range. No pairing exclusivity: a tag may
//! appear in many tuples.
//!
//! Internally the histogram keeps the exact integer delay vectors, so peak
//! integration later uses exact lattice arithmetic rather than bin
//! arithmetic; the binned dense array is derived from it on demand.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::timetag::TimeTagStream;

/// One-dimensional binning geometry shared by all axes.
#[derive(Clone, Copy, Debug)]
pub struct BinAxis {
    pub bin_width: u64,
    /// Number of bins on each side of the central bin.
    pub half_bins: i64,
}

impl BinAxis {
    fn new(bin_width: u64, max_delay: u64) -> Result<Self> {
        if bin_width == 0 {
            return Err(Error::Config("bin_width: must be positive".into()));
        }
        if max_delay == 0 || max_delay % bin_width != 0 {
            return Err(Error::Config(format!(
                "bin_width ({bin_width}) must divide max_delay ({max_delay})"
            )));
        }
        Ok(BinAxis {
            bin_width,
            half_bins: (max_delay / bin_width) as i64,
        })
    }

    pub fn n_bins(&self) -> usize {
        (2 * self.half_bins + 1) as usize
    }

    /// Center of bin `b`, in ps.
    pub fn center(&self, b: i64) -> i64 {
        b * self.bin_width as i64
    }

    /// Bin index of a delay, when it falls inside the axis.
    #[inline]
    pub fn bin(&self, tau: i64) -> Option<i64> {
        let w = self.bin_width as i64;
        let b = (tau + w / 2).div_euclid(w);
        (b.abs() <= self.half_bins).then_some(b)
    }

    /// Smallest delay covered by the axis.
    pub fn coverage_lo(&self) -> i64 {
        let w = self.bin_width as i64;
        -self.half_bins * w - w / 2
    }

    /// Largest delay covered by the axis.
    pub fn coverage_hi(&self) -> i64 {
        let w = self.bin_width as i64;
        self.half_bins * w + (w - 1 - w / 2)
    }
}

/// An (m-1)-dimensional coincidence histogram with exact delay retention.
#[derive(Clone, Debug)]
pub struct CorrelationHistogram {
    order: u8,
    axis: BinAxis,
    clock_period: u64,
    channels: Vec<u16>,
    channel_totals: Vec<u64>,
    n_periods: u64,
    /// Exact consecutive-channel delay vectors; unused trailing axes are 0.
    delays: HashMap<[i64; 3], u64>,
}

impl CorrelationHistogram {
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn axis(&self) -> BinAxis {
        self.axis
    }

    pub fn clock_period(&self) -> u64 {
        self.clock_period
    }

    pub fn channels(&self) -> &[u16] {
        &self.channels
    }

    /// Total tag counts of the selected channels over the whole stream.
    pub fn channel_totals(&self) -> &[u64] {
        &self.channel_totals
    }

    pub fn n_periods(&self) -> u64 {
        self.n_periods
    }

    pub fn total_tuples(&self) -> u64 {
        self.delays.values().sum()
    }

    /// Exact delay vectors and their tuple counts.
    pub fn exact_delays(&self) -> impl Iterator<Item = (&[i64; 3], &u64)> {
        self.delays.iter()
    }

    /// Count in one bin of the binned view.
    pub fn bin_count(&self, bins: &[i64]) -> u64 {
        assert_eq!(bins.len(), self.order as usize - 1);
        self.binned()
            .get(&pad(bins))
            .copied()
            .unwrap_or(0)
    }

    /// Binned sparse view: bin-index vector -> counts.
    pub fn binned(&self) -> HashMap<[i64; 3], u64> {
        let naxes = self.order as usize - 1;
        let mut out: HashMap<[i64; 3], u64> = HashMap::new();
        for (delta, count) in &self.delays {
            let mut key = [0i64; 3];
            let mut ok = true;
            for ax in 0..naxes {
                match self.axis.bin(delta[ax]) {
                    Some(b) => key[ax] = b,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                *out.entry(key).or_insert(0) += count;
            }
        }
        out
    }

    /// Dense binned counts in row-major order over the axes (m = 2 or 3).
    pub fn binned_dense(&self) -> Vec<u64> {
        let naxes = self.order as usize - 1;
        let n = self.axis.n_bins();
        let mut out = vec![0u64; n.pow(naxes as u32)];
        let k = self.axis.half_bins;
        for (key, count) in self.binned() {
            let mut idx = 0usize;
            for ax in 0..naxes {
                idx = idx * n + (key[ax] + k) as usize;
            }
            out[idx] += count;
        }
        out
    }

    /// Merge a histogram built over another part of the same stream.
    pub fn merge(&mut self, other: &CorrelationHistogram) -> Result<()> {
        if self.order != other.order
            || self.axis.bin_width != other.axis.bin_width
            || self.axis.half_bins != other.axis.half_bins
            || self.channels != other.channels
        {
            return Err(Error::Data("histogram geometries differ".into()));
        }
        for (k, v) in &other.delays {
            *self.delays.entry(*k).or_insert(0) += v;
        }
        for (a, b) in self.channel_totals.iter_mut().zip(&other.channel_totals) {
            *a += b;
        }
        self.n_periods += other.n_periods;
        Ok(())
    }

    /// CSV export. m=2: `tau_ps,counts` over all bins; m=3:
    /// `tau1_ps,tau2_ps,counts`; m=4: sparse `k1,k2,k3,counts` of nonzero
    /// bins.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let k = self.axis.half_bins;
        match self.order {
            2 => {
                writeln!(w, "tau_ps,counts")?;
                let dense = self.binned_dense();
                for (i, c) in dense.iter().enumerate() {
                    writeln!(w, "{},{}", self.axis.center(i as i64 - k), c)?;
                }
            }
            3 => {
                writeln!(w, "tau1_ps,tau2_ps,counts")?;
                let dense = self.binned_dense();
                let n = self.axis.n_bins();
                for i in 0..n {
                    for j in 0..n {
                        writeln!(
                            w,
                            "{},{},{}",
                            self.axis.center(i as i64 - k),
                            self.axis.center(j as i64 - k),
                            dense[i * n + j]
                        )?;
                    }
                }
            }
            _ => {
                writeln!(w, "k1,k2,k3,counts")?;
                let mut bins: Vec<([i64; 3], u64)> = self.binned().into_iter().collect();
                bins.sort_unstable();
                for (key, c) in bins {
                    writeln!(w, "{},{},{},{}", key[0], key[1], key[2], c)?;
                }
            }
        }
        Ok(())
    }
}

fn pad(bins: &[i64]) -> [i64; 3] {
    let mut key = [0i64; 3];
    key[..bins.len()].copy_from_slice(bins);
    key
}

/// Build the order-`m` multi-start multi-stop histogram over `m` distinct
/// channels. Every qualifying tuple is counted; work is partitioned over the
/// first channel's tags, so the result is independent of thread count.
pub fn build_histogram(
    stream: &TimeTagStream,
    order: u8,
    bin_width: u64,
    max_delay: u64,
    channels: &[u16],
) -> Result<CorrelationHistogram> {
    if !(2..=4).contains(&order) {
        return Err(Error::Config(format!("order: must be 2..=4, got {order}")));
    }
    if channels.len() != order as usize {
        return Err(Error::Config(format!(
            "channels: expected {} entries for order {order}, got {}",
            order,
            channels.len()
        )));
    }
    for (i, a) in channels.iter().enumerate() {
        for b in &channels[i + 1..] {
            if a == b {
                return Err(Error::Config(format!("channels: duplicate channel {a}")));
            }
        }
    }
    let axis = BinAxis::new(bin_width, max_delay)?;

    let times: Vec<Vec<i64>> = channels
        .iter()
        .map(|&ch| {
            stream
                .channel_times(ch)
                .into_iter()
                .map(|t| t as i64)
                .collect::<Vec<i64>>()
        })
        .collect();
    for (i, ts) in times.iter().enumerate() {
        if ts.is_empty() {
            return Err(Error::Data(format!(
                "channel {} has no tags; channels present: {:?}",
                channels[i],
                stream.channels_present()
            )));
        }
    }
    let channel_totals: Vec<u64> = times.iter().map(|t| t.len() as u64).collect();

    let lo = axis.coverage_lo();
    let hi = axis.coverage_hi();
    let naxes = order as usize - 1;

    let anchor = &times[0];
    let chunk = (anchor.len() / (rayon::current_num_threads() * 8)).max(256);
    let delays = anchor
        .par_chunks(chunk)
        .map(|anchors| {
            let mut local: HashMap<[i64; 3], u64> = HashMap::new();
            // advancing window into channel 2; deeper levels binary-search
            let t2 = &times[1];
            let mut w_lo = 0usize;
            let mut w_hi = 0usize;
            for &a in anchors {
                while w_lo < t2.len() && t2[w_lo] < a + lo {
                    w_lo += 1;
                }
                if w_hi < w_lo {
                    w_hi = w_lo;
                }
                while w_hi < t2.len() && t2[w_hi] <= a + hi {
                    w_hi += 1;
                }
                for &b in &t2[w_lo..w_hi] {
                    let d1 = b - a;
                    if naxes == 1 {
                        *local.entry([d1, 0, 0]).or_insert(0) += 1;
                        continue;
                    }
                    let t3 = &times[2];
                    let (s3, e3) = window(t3, b + lo, b + hi);
                    for &c in &t3[s3..e3] {
                        let d2 = c - b;
                        if naxes == 2 {
                            *local.entry([d1, d2, 0]).or_insert(0) += 1;
                            continue;
                        }
                        let t4 = &times[3];
                        let (s4, e4) = window(t4, c + lo, c + hi);
                        for &d in &t4[s4..e4] {
                            *local.entry([d1, d2, d - c]).or_insert(0) += 1;
                        }
                    }
                }
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    Ok(CorrelationHistogram {
        order,
        axis,
        clock_period: stream.clock_period(),
        channels: channels.to_vec(),
        channel_totals,
        n_periods: stream.n_periods(),
        delays,
    })
}

#[inline]
fn window(times: &[i64], lo: i64, hi: i64) -> (usize, usize) {
    let start = times.partition_point(|&t| t < lo);
    let end = start + times[start..].partition_point(|&t| t <= hi);
    (start, end)
}
