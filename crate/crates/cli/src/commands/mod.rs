pub mod correlate;
pub mod extract_pn;
pub mod gate_scan;
pub mod hom;
pub mod selftest;
pub mod simulate;

use photonstat_core::correlator::{build_histogram, g_zero, GEstimate};
use photonstat_core::{Result, TimeTagStream};

/// Default histogram geometry per order: (bin_width, max_delay).
pub fn default_geometry(order: u8, clock_period: u64) -> (u64, u64) {
    match order {
        2 => (25, 6 * clock_period),
        3 => (3_125, 6 * clock_period),
        _ => (clock_period, 10 * clock_period),
    }
}

/// Build the order-m histogram with defaults and estimate g^(m)(0).
pub fn g_for_order(
    stream: &TimeTagStream,
    order: u8,
    bin_width: Option<u64>,
    max_delay: Option<u64>,
    window: u64,
    channels: Option<&[u16]>,
) -> Result<GEstimate> {
    let (dbw, dmd) = default_geometry(order, stream.clock_period());
    let default_channels: Vec<u16> = (1..=order as u16).collect();
    let chans = channels.unwrap_or(&default_channels);
    let h = build_histogram(
        stream,
        order,
        bin_width.unwrap_or(dbw),
        max_delay.unwrap_or(dmd),
        chans,
    )?;
    g_zero(&h, window)
}
