//! Clock-referenced lifetime histogram and mono-exponential decay fit.

use std::io::Write;

use crate::error::{Error, Result};
use crate::timetag::{TimeTagStream, CLOCK_CHANNEL};

/// Histogram of detector arrival times relative to the preceding clock tag.
#[derive(Clone, Debug)]
pub struct LifetimeHistogram {
    pub bin_width: u64,
    pub clock_period: u64,
    pub counts: Vec<u64>,
}

impl LifetimeHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Center time of bin `i`, in ps.
    pub fn bin_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.bin_width as f64
    }

    pub fn mode_bin(&self) -> usize {
        self.counts
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| **c)
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t_ps,counts")?;
        for (i, c) in self.counts.iter().enumerate() {
            writeln!(w, "{},{}", (i as u64) * self.bin_width, c)?;
        }
        Ok(())
    }
}

/// Build the lifetime histogram over one clock period.
pub fn lifetime_histogram(stream: &TimeTagStream, bin_width: u64) -> Result<LifetimeHistogram> {
    if bin_width == 0 {
        return Err(Error::Config("bin_width: must be positive".into()));
    }
    let period = stream.clock_period();
    let n_bins = period.div_ceil(bin_width) as usize;
    let mut counts = vec![0u64; n_bins];
    let mut last_clock: Option<u64> = None;
    let mut seen_clock = false;
    for tag in stream.tags() {
        if tag.channel == CLOCK_CHANNEL {
            last_clock = Some(tag.time);
            seen_clock = true;
            continue;
        }
        let Some(clock) = last_clock else { continue };
        let delta = tag.time - clock;
        let bin = (delta / bin_width) as usize;
        if bin < n_bins {
            counts[bin] += 1;
        }
    }
    if !seen_clock {
        return Err(Error::Data("stream has no clock tags (channel 0)".into()));
    }
    Ok(LifetimeHistogram {
        bin_width,
        clock_period: period,
        counts,
    })
}

/// Result of the weighted mono-exponential fit `A exp(-t/tau) + offset`.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct LifetimeFit {
    pub tau_ps: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// Weighted root-mean-square residual.
    pub residual_norm: f64,
}

/// Weighted least-squares fit of the histogram tail from `fit_start_ps`
/// onward, weights `1/max(count, 1)`.
pub fn fit_lifetime(hist: &LifetimeHistogram, fit_start_ps: u64) -> Result<LifetimeFit> {
    let pts: Vec<(f64, f64)> = hist
        .counts
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i as u64) * hist.bin_width >= fit_start_ps)
        .map(|(i, &c)| (hist.bin_center(i), c as f64))
        .collect();
    if pts.len() < 4 {
        return Err(Error::Data(format!(
            "only {} bins beyond fit_start, need at least 4",
            pts.len()
        )));
    }
    let ymax = pts.iter().map(|(_, y)| *y).fold(0.0, f64::max);
    let ymin = pts.iter().map(|(_, y)| *y).fold(f64::INFINITY, f64::min);
    if ymax == ymin {
        return Err(Error::Numerics(
            "degenerate tail: all bins equal, no decay to fit".into(),
        ));
    }

    // initial guesses: offset from the late tail, tau from the weighted
    // log-slope of the offset-subtracted early part
    let tail_n = (pts.len() / 10).max(2);
    let offset0 = pts[pts.len() - tail_n..]
        .iter()
        .map(|(_, y)| y)
        .sum::<f64>()
        / tail_n as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut sw = 0.0;
    for (t, y) in &pts {
        let v = y - offset0;
        if v <= 0.0 {
            continue;
        }
        let w = v; // Poisson-ish weighting of the log fit
        let ly = v.ln();
        sw += w;
        sx += w * t;
        sy += w * ly;
        sxx += w * t * t;
        sxy += w * t * ly;
    }
    let denom = sw * sxx - sx * sx;
    if sw <= 0.0 || denom.abs() < 1e-30 {
        return Err(Error::Numerics("degenerate tail: no counts above offset".into()));
    }
    let slope = (sw * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / sw;
    let mut tau = if slope < 0.0 { -1.0 / slope } else { hist.clock_period as f64 / 4.0 };
    let mut amp = intercept.exp();
    let mut offset = offset0;

    // Gauss-Newton refinement with step damping
    let mut converged = false;
    for _ in 0..200 {
        let mut jt_j = [[0.0f64; 3]; 3];
        let mut jt_r = [0.0f64; 3];
        for (t, y) in &pts {
            let w = 1.0 / y.max(1.0);
            let e = (-t / tau).exp();
            let model = amp * e + offset;
            let r = model - y;
            let j = [e, amp * t / (tau * tau) * e, 1.0];
            for a in 0..3 {
                for b in 0..3 {
                    jt_j[a][b] += w * j[a] * j[b];
                }
                jt_r[a] += w * j[a] * r;
            }
        }
        let Some(step) = solve3(&jt_j, &jt_r) else {
            return Err(Error::Numerics("singular normal equations in lifetime fit".into()));
        };
        // damp steps that would push tau non-positive
        let mut scale = 1.0;
        while tau - scale * step[1] <= 0.0 && scale > 1e-6 {
            scale *= 0.5;
        }
        amp -= scale * step[0];
        tau -= scale * step[1];
        offset -= scale * step[2];
        if !tau.is_finite() || !amp.is_finite() {
            return Err(Error::Numerics("lifetime fit diverged".into()));
        }
        let rel = (step[0].abs() / amp.abs().max(1e-12))
            .max(step[1].abs() / tau.abs().max(1e-12))
            .max(step[2].abs() / offset.abs().max(1.0));
        if scale * rel < 1e-10 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerics("lifetime fit did not converge".into()));
    }
    if tau <= 0.0 {
        return Err(Error::Numerics(format!("lifetime fit gave tau = {tau}")));
    }
    let mut chi2 = 0.0;
    for (t, y) in &pts {
        let w = 1.0 / y.max(1.0);
        chi2 += w * (amp * (-t / tau).exp() + offset - y).powi(2);
    }
    Ok(LifetimeFit {
        tau_ps: tau,
        amplitude: amp,
        offset,
        residual_norm: (chi2 / pts.len() as f64).sqrt(),
    })
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        let d = m[col][col];
        for k in col..4 {
            m[col][k] /= d;
        }
        for row in 0..3 {
            if row != col {
                let f = m[row][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3], m[1][3], m[2][3]])
}
