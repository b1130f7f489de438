//! Peak integration on the pulse-period lattice and g^(m)(0) estimation.
//!
//! Under pulsed excitation the delay histogram concentrates on the lattice
//! of repetition-period multiples. Each lattice peak is integrated over a
//! centered hypercube (default side 3 ns) using the exact delay vectors, so
//! no binning artifacts enter. A peak is classified by which of the `m` tags
//! coincide (share a pulse): all of them (the correlated zero peak), none
//! (uncorrelated peaks, which normalize everything) or something in between
//! (mixed peaks, which estimate lower-order correlations and are excluded
//! from the normalization).

use std::collections::BTreeMap;

use super::histogram::CorrelationHistogram;
use super::stats::{poisson_interval, spread_of_mean, GEstimate};
use crate::error::{Error, Result};

/// Coincidence window over which every peak is integrated, per axis.
pub const DEFAULT_PEAK_WINDOW_PS: u64 = 3_000;

/// Integrated counts per lattice peak.
#[derive(Clone, Debug)]
pub struct PeakIntegrals {
    order: u8,
    window: u64,
    clock_period: u64,
    /// Largest |k| (periods) whose window is fully inside the delay range.
    extent: i64,
    peaks: BTreeMap<[i64; 3], u64>,
}

impl PeakIntegrals {
    pub fn clock_period(&self) -> u64 {
        self.clock_period
    }
}

/// How the `m` tags of a peak overlap in pulse periods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeakClass {
    /// All tags in one period: the correlated g^(m)(0) peak.
    Zero,
    /// All tags in distinct periods.
    Uncorrelated,
    /// Exactly one pair of tags coincides (m >= 3).
    OnePair,
    /// Three of four tags coincide (m = 4).
    Triple,
    /// Two disjoint pairs coincide (m = 4).
    TwoPairs,
}

/// Classify a lattice position given its consecutive-delay coordinates.
pub fn classify(coords: &[i64]) -> PeakClass {
    // absolute period positions of the m tags relative to the first
    let mut pos = [0i64; 4];
    let m = coords.len() + 1;
    for (i, d) in coords.iter().enumerate() {
        pos[i + 1] = pos[i] + d;
    }
    let pos = &mut pos[..m];
    pos.sort_unstable();
    // multiset of group sizes
    let mut groups: Vec<usize> = Vec::with_capacity(4);
    let mut run = 1usize;
    for i in 1..m {
        if pos[i] == pos[i - 1] {
            run += 1;
        } else {
            groups.push(run);
            run = 1;
        }
    }
    groups.push(run);
    groups.sort_unstable();
    match groups.as_slice() {
        [_] => PeakClass::Zero,
        [1, 3] => PeakClass::Triple,
        [2, 2] => PeakClass::TwoPairs,
        [1, 1, 2] | [1, 2] => PeakClass::OnePair,
        _ => PeakClass::Uncorrelated,
    }
}

impl PeakIntegrals {
    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn extent(&self) -> i64 {
        self.extent
    }

    pub fn counts(&self, coords: &[i64]) -> u64 {
        let mut key = [0i64; 3];
        key[..coords.len()].copy_from_slice(coords);
        self.peaks.get(&key).copied().unwrap_or(0)
    }

    pub fn zero_peak(&self) -> u64 {
        self.counts(&[0, 0, 0][..self.order as usize - 1])
    }

    /// Sum over every integrated peak.
    pub fn total(&self) -> u64 {
        self.peaks.values().sum()
    }

    /// All lattice positions inside the extent, with their class and
    /// integrated counts (zero for positions with no tuples).
    pub fn positions(&self) -> Vec<([i64; 3], PeakClass, u64)> {
        let naxes = self.order as usize - 1;
        let l = self.extent;
        let mut out = Vec::new();
        let mut coords = [0i64; 3];
        let span = 2 * l + 1;
        let total = span.pow(naxes as u32);
        for flat in 0..total {
            let mut rem = flat;
            for ax in 0..naxes {
                coords[ax] = rem % span - l;
                rem /= span;
            }
            let class = classify(&coords[..naxes]);
            out.push((coords, class, self.counts(&coords[..naxes])));
        }
        out
    }

    /// Integrated counts of all uncorrelated peaks (including empty ones).
    pub fn uncorrelated(&self) -> Vec<u64> {
        self.positions()
            .into_iter()
            .filter(|(_, class, _)| *class == PeakClass::Uncorrelated)
            .map(|(_, _, c)| c)
            .collect()
    }
}

/// Integrate every lattice peak of the histogram over a centered hypercube
/// of side `window` per axis, using the exact delays.
pub fn integrate_peaks(h: &CorrelationHistogram, window: u64) -> Result<PeakIntegrals> {
    let period = h.clock_period();
    if window == 0 || window > period {
        return Err(Error::Config(format!(
            "window: must be in 1..={period} ps so peaks cannot overlap, got {window}"
        )));
    }
    let naxes = h.order() as usize - 1;
    let p = period as i64;
    let w = window as i64;

    let axis = h.axis();
    let extent_pos = (2 * axis.coverage_hi() - w) / (2 * p);
    let extent_neg = (-2 * axis.coverage_lo() - w) / (2 * p);
    let extent = extent_pos.min(extent_neg).max(0);

    let mut peaks: BTreeMap<[i64; 3], u64> = BTreeMap::new();
    'outer: for (delta, count) in h.exact_delays() {
        let mut key = [0i64; 3];
        for ax in 0..naxes {
            let tau = delta[ax];
            let k = (2 * tau + p).div_euclid(2 * p);
            let off = tau - k * p;
            // closed window: |off| <= window/2, done at doubled scale so odd
            // windows stay exact
            if 2 * off.abs() > w || k.abs() > extent {
                continue 'outer;
            }
            key[ax] = k;
        }
        *peaks.entry(key).or_insert(0) += count;
    }
    Ok(PeakIntegrals {
        order: h.order(),
        window,
        clock_period: period,
        extent,
        peaks,
    })
}

/// Estimate g^(m)(0): the zero-peak integral over the mean uncorrelated-peak
/// integral, with Poisson uncertainty on the numerator and the peak spread
/// on the denominator, propagated independently.
pub fn g_zero(h: &CorrelationHistogram, window: u64) -> Result<GEstimate> {
    let peaks = integrate_peaks(h, window)?;
    let unc = peaks.uncorrelated();
    if unc.len() < 5 {
        return Err(Error::Data(format!(
            "need at least 5 uncorrelated peaks in range, have {} (extent {})",
            unc.len(),
            peaks.extent()
        )));
    }
    let n_u = unc.iter().sum::<u64>() as f64 / unc.len() as f64;
    if n_u == 0.0 {
        return Err(Error::Data("all uncorrelated peaks are empty".into()));
    }
    let d_nu = spread_of_mean(&unc.iter().map(|&v| v as f64).collect::<Vec<_>>());
    let n_c = peaks.zero_peak();
    let interval = poisson_interval(n_c, 0.683)?;
    Ok(GEstimate::from_counts(
        n_c as f64,
        n_c,
        interval,
        n_u,
        d_nu,
        unc.len(),
    ))
}

/// Lower-order correlation estimates from the mixed peaks of an order-3 or
/// order-4 histogram.
///
/// For m = 3 the three loci where exactly one tag pair coincides each
/// estimate g2(0) (labels name the delay locus). For m = 4, peaks where
/// three tags coincide estimate g3(0,0), peaks with two disjoint
/// coincident pairs estimate g2(0)^2, and single-pair peaks estimate g2(0).
pub fn g_lower_order_slices(
    h: &CorrelationHistogram,
    window: u64,
) -> Result<BTreeMap<String, GEstimate>> {
    if h.order() < 3 {
        return Err(Error::Config("slices need order >= 3".into()));
    }
    let peaks = integrate_peaks(h, window)?;
    let positions = peaks.positions();

    let unc: Vec<u64> = positions
        .iter()
        .filter(|(_, class, _)| *class == PeakClass::Uncorrelated)
        .map(|(_, _, c)| *c)
        .collect();
    if unc.len() < 5 {
        return Err(Error::Data(format!(
            "need at least 5 uncorrelated peaks in range, have {}",
            unc.len()
        )));
    }
    let n_u = unc.iter().sum::<u64>() as f64 / unc.len() as f64;
    if n_u == 0.0 {
        return Err(Error::Data("all uncorrelated peaks are empty".into()));
    }
    let d_nu = spread_of_mean(&unc.iter().map(|&v| v as f64).collect::<Vec<_>>());

    let mut grouped: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for (coords, class, counts) in &positions {
        let label = match (h.order(), class) {
            (3, PeakClass::OnePair) => {
                if coords[0] == 0 {
                    "g2_tau1_zero"
                } else if coords[1] == 0 {
                    "g2_tau2_zero"
                } else {
                    "g2_diagonal"
                }
            }
            (4, PeakClass::OnePair) => "g2_single_pair",
            (4, PeakClass::TwoPairs) => "g2sq_pairwise",
            (4, PeakClass::Triple) => "g3_triple",
            _ => continue,
        };
        grouped.entry(label.to_string()).or_default().push(*counts);
    }

    let mut out = BTreeMap::new();
    for (label, values) in grouped {
        if values.len() < 2 {
            return Err(Error::Data(format!(
                "insufficient peaks on slice {label}: {}",
                values.len()
            )));
        }
        let total: u64 = values.iter().sum();
        let mean = total as f64 / values.len() as f64;
        let d_slice = spread_of_mean(&values.iter().map(|&v| v as f64).collect::<Vec<_>>());
        out.insert(
            label,
            GEstimate::from_counts(mean, total, (d_slice, d_slice), n_u, d_nu, unc.len()),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlator::histogram::build_histogram;
    use crate::timetag::{TimeTag, TimeTagStream};

    fn stream_of(chans: &[(u64, u16)]) -> TimeTagStream {
        let tags = chans.iter().map(|&(t, c)| TimeTag::new(t, c)).collect();
        TimeTagStream::from_unsorted(tags, 12_500, 4).unwrap()
    }

    #[test]
    fn single_count_near_zero_lands_on_lattice_zero() {
        let s = stream_of(&[(1_000, 1), (1_400, 2)]);
        let h = build_histogram(&s, 2, 100, 62_500, &[1, 2]).unwrap();
        let p = integrate_peaks(&h, 3_000).unwrap();
        assert_eq!(p.zero_peak(), 1);
        assert_eq!(p.total(), 1);
    }

    #[test]
    fn count_at_exactly_one_period_lands_on_lattice_one() {
        let s = stream_of(&[(0, 1), (12_500, 2)]);
        let h = build_histogram(&s, 2, 100, 62_500, &[1, 2]).unwrap();
        let p = integrate_peaks(&h, 3_000).unwrap();
        assert_eq!(p.counts(&[1]), 1);
        assert_eq!(p.zero_peak(), 0);
    }

    #[test]
    fn window_boundary_is_closed() {
        // offsets of exactly +-1500 belong to the peak at window 3000
        let s = stream_of(&[(10_000, 1), (11_500, 2), (8_500, 2)]);
        let h = build_histogram(&s, 2, 100, 62_500, &[1, 2]).unwrap();
        let p = integrate_peaks(&h, 3_000).unwrap();
        assert_eq!(p.zero_peak(), 2);
        // at 1501 it does not
        let s2 = stream_of(&[(10_000, 1), (11_501, 2)]);
        let h2 = build_histogram(&s2, 2, 100, 62_500, &[1, 2]).unwrap();
        assert_eq!(integrate_peaks(&h2, 3_000).unwrap().zero_peak(), 0);
    }

    #[test]
    fn overlapping_window_is_rejected() {
        let s = stream_of(&[(0, 1), (10, 2)]);
        let h = build_histogram(&s, 2, 100, 62_500, &[1, 2]).unwrap();
        assert!(integrate_peaks(&h, 13_000).is_err());
    }

    #[test]
    fn classification_by_coincidence_pattern() {
        assert_eq!(classify(&[0]), PeakClass::Zero);
        assert_eq!(classify(&[2]), PeakClass::Uncorrelated);
        assert_eq!(classify(&[0, 0]), PeakClass::Zero);
        assert_eq!(classify(&[0, 2]), PeakClass::OnePair);
        assert_eq!(classify(&[2, 0]), PeakClass::OnePair);
        // consecutive delays (2, -2): tags 1 and 3 share a period
        assert_eq!(classify(&[2, -2]), PeakClass::OnePair);
        assert_eq!(classify(&[1, 2]), PeakClass::Uncorrelated);
        // m = 4
        assert_eq!(classify(&[0, 0, 0]), PeakClass::Zero);
        assert_eq!(classify(&[0, 0, 3]), PeakClass::Triple);
        assert_eq!(classify(&[0, 3, 0]), PeakClass::TwoPairs);
        assert_eq!(classify(&[3, -3, 3]), PeakClass::TwoPairs);
        assert_eq!(classify(&[0, 3, 1]), PeakClass::OnePair);
        assert_eq!(classify(&[1, 1, 1]), PeakClass::Uncorrelated);
        // cumulative collision: delays (1, -2, 1) join tags 1 and 4 only
        assert_eq!(classify(&[1, -2, 1]), PeakClass::OnePair);
    }

    #[test]
    fn g_zero_counts_uncorrelated_positions_including_empty_ones() {
        // one correlated pair and one pair at lattice +1; lattice positions
        // -4..4 exist, so N_u averages over 8 positions with 1 count total
        let s = stream_of(&[
            (0, 0),
            (1_000, 1),
            (1_100, 2),
            (125_000, 0),
            (200_000, 1),
            (212_500, 2),
        ]);
        let h = build_histogram(&s, 2, 100, 62_500, &[1, 2]).unwrap();
        let g = g_zero(&h, 3_000).unwrap();
        assert_eq!(g.n_c, 1);
        assert_eq!(g.n_uncorrelated_peaks, 8);
        assert!((g.n_u_mean - 1.0 / 8.0).abs() < 1e-12);
        assert!((g.value - 8.0).abs() < 1e-9);
    }

    #[test]
    fn too_small_range_is_reported() {
        let s = stream_of(&[(0, 1), (10, 2)]);
        let h = build_histogram(&s, 2, 100, 12_500, &[1, 2]).unwrap();
        match g_zero(&h, 3_000) {
            Err(crate::error::Error::Data(msg)) => assert!(msg.contains("uncorrelated")),
            other => panic!("expected Data error, got {other:?}"),
        }
    }
}
