//! Counting statistics: Poisson confidence intervals and peak-spread errors.

use statrs::distribution::{ContinuousCDF, Gamma};

use crate::error::{Error, Result};

/// A normalized correlation value with asymmetric 1-sigma uncertainties and
/// the raw counts behind it.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct GEstimate {
    pub value: f64,
    pub sigma_low: f64,
    pub sigma_up: f64,
    /// Integrated counts in the correlated peak (for slice estimates, the
    /// total over the pooled peaks).
    pub n_c: u64,
    /// Mean integrated counts over the uncorrelated peaks.
    pub n_u_mean: f64,
    pub n_uncorrelated_peaks: usize,
}

impl GEstimate {
    /// Combine a correlated-count interval with the uncorrelated-mean error
    /// via independent propagation of `value = N_c / N_u`.
    pub(crate) fn from_counts(
        n_c_value: f64,
        n_c_raw: u64,
        (d_nc_low, d_nc_up): (f64, f64),
        n_u: f64,
        d_nu: f64,
        n_peaks: usize,
    ) -> GEstimate {
        let value = n_c_value / n_u;
        let rel = |d_nc: f64| ((d_nc / n_u).powi(2) + (n_c_value * d_nu / (n_u * n_u)).powi(2)).sqrt();
        GEstimate {
            value,
            sigma_low: rel(d_nc_low),
            sigma_up: rel(d_nc_up),
            n_c: n_c_raw,
            n_u_mean: n_u,
            n_uncorrelated_peaks: n_peaks,
        }
    }
}

/// Central confidence interval for a Poisson count, returned as
/// `(sigma_low, sigma_up)` distances from `n_c`.
///
/// Above 100 counts the Gaussian `sqrt(N)` is used; below, the exact
/// (Garwood) interval from chi-square quantiles, evaluated by inverting the
/// regularized incomplete gamma function.
pub fn poisson_interval(n_c: u64, cl: f64) -> Result<(f64, f64)> {
    if !(cl > 0.0 && cl < 1.0) {
        return Err(Error::Config(format!("CL must be in (0, 1), got {cl}")));
    }
    let n = n_c as f64;
    if n_c > 100 {
        return Ok((n.sqrt(), n.sqrt()));
    }
    let alpha = 1.0 - cl;
    let lower = if n_c == 0 {
        0.0
    } else {
        let g = Gamma::new(n, 1.0)
            .map_err(|e| Error::Numerics(format!("gamma({n}): {e}")))?;
        n - g.inverse_cdf(alpha / 2.0)
    };
    let g = Gamma::new(n + 1.0, 1.0)
        .map_err(|e| Error::Numerics(format!("gamma({}): {e}", n + 1.0)))?;
    let upper = g.inverse_cdf(1.0 - alpha / 2.0) - n;
    Ok((lower, upper))
}

/// Uncertainty of the uncorrelated-peak mean: the spread of the peak
/// integrals over the square root of their number.
pub fn uncorrelated_sigma(peaks: &[u64]) -> Result<f64> {
    if peaks.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 uncorrelated peaks, have {}",
            peaks.len()
        )));
    }
    Ok(spread_of_mean(&peaks.iter().map(|&v| v as f64).collect::<Vec<_>>()))
}

pub(crate) fn spread_of_mean(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (var / n).sqrt()
}
