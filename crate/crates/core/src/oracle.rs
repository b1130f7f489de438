//! Naive reference implementations for self-checks.
//!
//! These enumerate every tag tuple with plain nested loops and bin each one
//! directly, sharing no code with the production correlator. They are meant
//! for validation (the `selftest` command and the test suites), not for
//! large streams.

use std::collections::BTreeMap;

use crate::timetag::TimeTagStream;

/// Brute-force order-`m` histogram: bin-index vector -> counts.
pub fn naive_histogram(
    stream: &TimeTagStream,
    order: u8,
    bin_width: u64,
    max_delay: u64,
    channels: &[u16],
) -> BTreeMap<Vec<i64>, u64> {
    let times: Vec<Vec<i64>> = channels
        .iter()
        .map(|&c| {
            stream
                .channel_times(c)
                .into_iter()
                .map(|t| t as i64)
                .collect()
        })
        .collect();
    let w = bin_width as i64;
    let k = (max_delay / bin_width) as i64;
    let bin = |tau: i64| -> Option<i64> {
        let b = (tau + w / 2).div_euclid(w);
        (b.abs() <= k).then_some(b)
    };

    let mut out = BTreeMap::new();
    let mut count_tuple = |bins: Vec<i64>| {
        *out.entry(bins).or_insert(0u64) += 1;
    };
    for &t1 in &times[0] {
        for &t2 in &times[1] {
            let Some(b1) = bin(t2 - t1) else { continue };
            if order == 2 {
                count_tuple(vec![b1]);
                continue;
            }
            for &t3 in &times[2] {
                let Some(b2) = bin(t3 - t2) else { continue };
                if order == 3 {
                    count_tuple(vec![b1, b2]);
                    continue;
                }
                for &t4 in &times[3] {
                    let Some(b3) = bin(t4 - t3) else { continue };
                    count_tuple(vec![b1, b2, b3]);
                }
            }
        }
    }
    out
}

/// Brute-force peak recount: lattice coordinate vector -> number of tuples
/// with every consecutive delay within `window / 2` of that lattice point,
/// limited to |k| <= `extent` on every axis.
pub fn naive_peak_recount(
    stream: &TimeTagStream,
    order: u8,
    channels: &[u16],
    window: u64,
    extent: i64,
) -> BTreeMap<Vec<i64>, u64> {
    let times: Vec<Vec<i64>> = channels
        .iter()
        .map(|&c| {
            stream
                .channel_times(c)
                .into_iter()
                .map(|t| t as i64)
                .collect()
        })
        .collect();
    let p = stream.clock_period() as i64;
    let w = window as i64;
    let lattice = |tau: i64| -> Option<i64> {
        let k = (2 * tau + p).div_euclid(2 * p);
        (2 * (tau - k * p).abs() <= w && k.abs() <= extent).then_some(k)
    };

    let mut out = BTreeMap::new();
    let mut count_tuple = |ks: Vec<i64>| {
        *out.entry(ks).or_insert(0u64) += 1;
    };
    for &t1 in &times[0] {
        for &t2 in &times[1] {
            let Some(k1) = lattice(t2 - t1) else { continue };
            if order == 2 {
                count_tuple(vec![k1]);
                continue;
            }
            for &t3 in &times[2] {
                let Some(k2) = lattice(t3 - t2) else { continue };
                if order == 3 {
                    count_tuple(vec![k1, k2]);
                    continue;
                }
                for &t4 in &times[3] {
                    let Some(k3) = lattice(t4 - t3) else { continue };
                    count_tuple(vec![k1, k2, k3]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlator::{build_histogram, integrate_peaks};
    use crate::rng::SubRng;
    use crate::timetag::{TimeTag, TimeTagStream};

    fn random_stream(seed: u64, n: usize, span_periods: u64) -> TimeTagStream {
        let mut rng = SubRng::new(seed, 0, 99);
        let span = span_periods * 12_500;
        let mut tags: Vec<TimeTag> = (0..n)
            .map(|_| {
                TimeTag::new(
                    rng.next_u64() % span,
                    1 + (rng.next_u64() % 4) as u16,
                )
            })
            .collect();
        tags.sort_unstable();
        TimeTagStream::new(tags, 12_500, 4).unwrap()
    }

    #[test]
    fn production_histogram_matches_naive_enumeration() {
        for seed in 0..3 {
            let s = random_stream(seed, 600, 400);
            for (order, bw, md) in [(2u8, 125u64, 25_000u64), (3, 3_125, 25_000), (4, 12_500, 25_000)] {
                let chans: Vec<u16> = (1..=order as u16).collect();
                let h = build_histogram(&s, order, bw, md, &chans).unwrap();
                let naive = naive_histogram(&s, order, bw, md, &chans);
                let got = h.binned();
                let total_naive: u64 = naive.values().sum();
                let total_got: u64 = got.values().sum();
                assert_eq!(total_naive, total_got, "totals differ at m={order} seed={seed}");
                for (key, count) in &naive {
                    let mut k = [0i64; 3];
                    k[..key.len()].copy_from_slice(key);
                    assert_eq!(
                        got.get(&k).copied().unwrap_or(0),
                        *count,
                        "bin {key:?} differs at m={order} seed={seed}"
                    );
                }
            }
        }
    }

    #[test]
    fn peak_integrals_match_naive_recount() {
        let s = random_stream(7, 500, 60);
        for order in 2..=3u8 {
            let chans: Vec<u16> = (1..=order as u16).collect();
            let h = build_histogram(&s, order, 125, 3 * 12_500, &chans).unwrap();
            let peaks = integrate_peaks(&h, 3_000).unwrap();
            let naive = naive_peak_recount(&s, order, &chans, 3_000, peaks.extent());
            let naive_total: u64 = naive.values().sum();
            assert_eq!(peaks.total(), naive_total, "m={order}");
            for (key, count) in &naive {
                assert_eq!(peaks.counts(key), *count, "peak {key:?} at m={order}");
            }
        }
    }
}
