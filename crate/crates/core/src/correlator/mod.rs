//! Coincidence histograms, peak integration, g^(m)(0) estimation, lifetime
//! fitting and gated scans.

mod histogram;
mod lifetime;
mod peaks;
mod scan;
mod stats;

pub use histogram::{build_histogram, BinAxis, CorrelationHistogram};
pub use lifetime::{fit_lifetime, lifetime_histogram, LifetimeFit, LifetimeHistogram};
pub use peaks::{
    classify, g_lower_order_slices, g_zero, integrate_peaks, PeakClass, PeakIntegrals,
    DEFAULT_PEAK_WINDOW_PS,
};
pub use scan::{gated_g2_scan, GateScanPoint};
pub use stats::{poisson_interval, uncorrelated_sigma, GEstimate};
