//! Gated g2 scans: purity versus count rate as the gate opens later.

use super::histogram::build_histogram;
use super::peaks::g_zero;
use super::stats::GEstimate;
use crate::error::{Error, Result};
use crate::timetag::{GateWindow, TimeTagStream};

#[derive(Clone, Debug, serde::Serialize)]
pub struct GateScanPoint {
    pub t_start: u64,
    pub retained_tags: u64,
    /// Detector counts per second of wall-clock acquisition.
    pub count_rate_hz: f64,
    pub g2: GEstimate,
}

/// For each gate start, apply the gate, rebuild the m = 2 histogram and
/// re-estimate g2(0). The gate end is shared across the scan.
#[allow(clippy::too_many_arguments)]
pub fn gated_g2_scan(
    stream: &TimeTagStream,
    t_starts: &[u64],
    t_stop: u64,
    bin_width: u64,
    max_delay: u64,
    window: u64,
    channels: (u16, u16),
) -> Result<Vec<GateScanPoint>> {
    if t_starts.is_empty() {
        return Err(Error::Config("gate scan needs at least one t_start".into()));
    }
    let acq_seconds = stream.n_periods() as f64 * stream.clock_period() as f64 * 1e-12;
    if acq_seconds <= 0.0 {
        return Err(Error::Data("stream covers zero acquisition time".into()));
    }
    let mut out = Vec::with_capacity(t_starts.len());
    for &t_start in t_starts {
        let gated = stream.apply_gate(&GateWindow::new(t_start, t_stop))?;
        let retained = gated.detector_count();
        if retained == 0 {
            return Err(Error::Data(format!(
                "gate [{t_start}, {t_stop}) retains no detector tags"
            )));
        }
        let h = build_histogram(&gated, 2, bin_width, max_delay, &[channels.0, channels.1])?;
        let g2 = g_zero(&h, window)?;
        out.push(GateScanPoint {
            t_start,
            retained_tags: retained,
            count_rate_hz: retained as f64 / acq_seconds,
            g2,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timetag::{TimeTag, TimeTagStream};

    fn two_channel_stream() -> TimeTagStream {
        // pairs at phase 200 in every 10th period, singles elsewhere
        let mut tags = Vec::new();
        for i in 0..2_000u64 {
            let start = i * 12_500;
            tags.push(TimeTag::new(start, 0));
            tags.push(TimeTag::new(start + 200, 1));
            if i % 10 == 0 {
                tags.push(TimeTag::new(start + 210, 2));
            } else if i % 2 == 0 {
                tags.push(TimeTag::new(start + 400, 2));
            }
        }
        TimeTagStream::from_unsorted(tags, 12_500, 2).unwrap()
    }

    #[test]
    fn gate_start_zero_equals_ungated_analysis() {
        let s = two_channel_stream();
        let full = build_histogram(&s, 2, 100, 62_500, &[1, 2]).unwrap();
        let g_full = g_zero(&full, 3_000).unwrap();
        let scan = gated_g2_scan(&s, &[0], 12_500, 100, 62_500, 3_000, (1, 2)).unwrap();
        assert_eq!(scan[0].g2.n_c, g_full.n_c);
        assert_eq!(scan[0].retained_tags, s.detector_count());
        assert!((scan[0].g2.value - g_full.value).abs() < 1e-12);
    }

    #[test]
    fn gate_beyond_last_phase_is_an_error() {
        let s = two_channel_stream();
        let res = gated_g2_scan(&s, &[500], 12_500, 100, 62_500, 3_000, (1, 2));
        assert!(matches!(res, Err(Error::Data(_))));
    }
}
