//! Photon-number probabilities from measured correlation moments.
//!
//! The measured quantities are the normalized correlations `g2, g3, g4` at
//! zero delay plus the brightness `B'` (probability of at least one click
//! per pulse). Truncating the photon number at four, the factorial moments
//!
//! ```text
//! F2 = <n(n-1)>   = 2 p2 + 6 p3 + 12 p4 = g2 mu^2
//! F3 = <n(n-1)(n-2)> = 6 p3 + 24 p4     = g3 mu^3
//! F4 = <n(n-1)(n-2)(n-3)> = 24 p4       = g4 mu^4
//! ```
//!
//! are triangular in `p1..p4` once the mean `mu` is fixed, so the full
//! system reduces to a one-dimensional root find on `mu` against the
//! brightness constraint. Loss acts as binomial thinning with survival
//! probability `eta`, which is likewise triangular and exactly invertible.

use crate::error::{Error, Result};
use crate::timetag::{TimeTagStream, CLOCK_CHANNEL};

const SUM_TOL: f64 = 1e-9;
/// Measured moments carry noise; negativity up to this size is clamped,
/// anything larger is reported as infeasible input.
const NEG_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistLevel {
    Detected,
    Source,
}

/// Probabilities p0..p4 of emitting (or detecting) 0..4 photons per pulse.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhotonNumberDist {
    pub p: [f64; 5],
    pub level: DistLevel,
    /// The transmission that was applied/inverted to produce this
    /// distribution, when one was.
    pub eta_applied: Option<f64>,
}

impl PhotonNumberDist {
    pub fn new(p: [f64; 5], level: DistLevel, eta_applied: Option<f64>) -> Result<Self> {
        let mut q = p;
        for (i, v) in q.iter_mut().enumerate() {
            if !v.is_finite() || *v < -SUM_TOL || *v > 1.0 + SUM_TOL {
                return Err(Error::Numerics(format!(
                    "p{i} = {} outside [0, 1]",
                    p[i]
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Numerics(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(PhotonNumberDist {
            p: q,
            level,
            eta_applied,
        })
    }

    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Factorial moments (F1..F4) of the truncated distribution.
    pub fn factorial_moments(&self) -> [f64; 4] {
        let p = &self.p;
        [
            p[1] + 2.0 * p[2] + 3.0 * p[3] + 4.0 * p[4],
            2.0 * p[2] + 6.0 * p[3] + 12.0 * p[4],
            6.0 * p[3] + 24.0 * p[4],
            24.0 * p[4],
        ]
    }

    /// Normalized correlations (g2, g3, g4) implied by the distribution.
    pub fn g_values(&self) -> Result<[f64; 3]> {
        let f = self.factorial_moments();
        let mu = f[0];
        if mu <= 0.0 {
            return Err(Error::Data("all-vacuum distribution has no g values".into()));
        }
        Ok([f[1] / mu.powi(2), f[2] / mu.powi(3), f[3] / mu.powi(4)])
    }
}

/// Measured moment set feeding the inversion.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct MomentSet {
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    /// Brightness at the detectors: P(>=1 click per pulse).
    pub b_prime: f64,
}

/// 1-sigma uncertainties on the entries of a [`MomentSet`].
#[derive(Clone, Copy, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct MomentSigmas {
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub b_prime: f64,
}

impl MomentSet {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g2", self.g2), ("g3", self.g3), ("g4", self.g4)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("{name}: must be >= 0, got {v}")));
            }
        }
        if !self.b_prime.is_finite() || self.b_prime <= 0.0 || self.b_prime > 1.0 {
            return Err(Error::Config(format!(
                "b_prime: must be in (0, 1], got {}",
                self.b_prime
            )));
        }
        Ok(())
    }
}

/// Brightness at the detectors: the fraction of pulse periods with at least
/// one detector click. Multiple clicks in one period count once.
pub fn brightness(stream: &TimeTagStream) -> Result<f64> {
    let n_periods = stream.n_periods();
    if n_periods == 0 {
        return Err(Error::Data("stream covers zero pulse periods".into()));
    }
    let p = stream.clock_period();
    let mut hit_periods = 0u64;
    let mut last_hit: Option<u64> = None;
    for t in stream.tags() {
        if t.channel == CLOCK_CHANNEL {
            continue;
        }
        let period = t.time / p;
        if last_hit != Some(period) {
            hit_periods += 1;
            last_hit = Some(period);
        }
    }
    Ok(hit_periods as f64 / n_periods as f64)
}

/// Solve p'1..p'4 from the truncated factorial-moment system given mu.
fn detected_from_mu(m: &MomentSet, mu: f64) -> [f64; 5] {
    let f2 = m.g2 * mu * mu;
    let f3 = m.g3 * mu * mu * mu;
    let f4 = m.g4 * mu * mu * mu * mu;
    let p4 = f4 / 24.0;
    let p3 = (f3 - 24.0 * p4) / 6.0;
    let p2 = (f2 - 6.0 * p3 - 12.0 * p4) / 2.0;
    let p1 = mu - 2.0 * p2 - 3.0 * p3 - 4.0 * p4;
    [1.0 - m.b_prime, p1, p2, p3, p4]
}

/// Invert measured moments into the detected-level photon-number
/// distribution. The mean is found by bisection on the brightness
/// constraint `p'1 + p'2 + p'3 + p'4 = B'`.
pub fn moments_to_detected(m: &MomentSet) -> Result<PhotonNumberDist> {
    m.validate()?;
    let residual = |mu: f64| -> f64 {
        let p = detected_from_mu(m, mu);
        p[1] + p[2] + p[3] + p[4] - m.b_prime
    };

    // bracket the root on (0, 4]
    const GRID: usize = 4000;
    let mut lo = f64::NAN;
    let mut hi = f64::NAN;
    let mut prev_mu = 1e-12;
    let mut prev_res = residual(prev_mu);
    for k in 1..=GRID {
        let mu = 4.0 * k as f64 / GRID as f64;
        let res = residual(mu);
        if prev_res <= 0.0 && res >= 0.0 {
            lo = prev_mu;
            hi = mu;
            break;
        }
        prev_mu = mu;
        prev_res = res;
    }
    if !lo.is_finite() {
        return Err(Error::Numerics(
            "no mean photon number in (0, 4] satisfies the brightness constraint".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut p = detected_from_mu(m, mu);

    for (i, v) in p.iter_mut().enumerate() {
        if *v < -NEG_TOL {
            return Err(Error::Numerics(format!(
                "inconsistent moments: p'{i} = {v}"
            )));
        }
        *v = v.max(0.0);
    }
    // renormalize the photon part onto B' after clamping
    let photon_sum: f64 = p[1..].iter().sum();
    if photon_sum > 0.0 {
        for v in &mut p[1..] {
            *v *= m.b_prime / photon_sum;
        }
    }
    PhotonNumberDist::new(p, DistLevel::Detected, None)
}

/// Binomial loss: every photon independently survives with probability eta.
pub fn apply_loss(d: &PhotonNumberDist, eta: f64) -> Result<PhotonNumberDist> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Config(format!("eta: must be within [0, 1], got {eta}")));
    }
    let p = &d.p;
    let l = 1.0 - eta;
    let q = [
        p[0] + l * p[1] + l * l * p[2] + l * l * l * p[3] + l * l * l * l * p[4],
        eta * p[1]
            + 2.0 * eta * l * p[2]
            + 3.0 * eta * l * l * p[3]
            + 4.0 * eta * l * l * l * p[4],
        eta * eta * p[2] + 3.0 * eta * eta * l * p[3] + 6.0 * eta * eta * l * l * p[4],
        eta * eta * eta * p[3] + 4.0 * eta * eta * eta * l * p[4],
        eta * eta * eta * eta * p[4],
    ];
    PhotonNumberDist::new(q, DistLevel::Detected, Some(eta))
}

/// Raw triangular inversion of the loss map; no validation of the output.
fn invert_loss_raw(p: &[f64; 5], eta: f64) -> [f64; 5] {
    let l = 1.0 - eta;
    let s4 = p[4] / eta.powi(4);
    let s3 = (p[3] - 4.0 * eta.powi(3) * l * s4) / eta.powi(3);
    let s2 = (p[2] - 3.0 * eta * eta * l * s3 - 6.0 * eta * eta * l * l * s4) / (eta * eta);
    let s1 = (p[1] - 2.0 * eta * l * s2 - 3.0 * eta * l * l * s3 - 4.0 * eta * l * l * l * s4)
        / eta;
    let s0 = 1.0 - s1 - s2 - s3 - s4;
    [s0, s1, s2, s3, s4]
}

/// Invert binomial loss exactly, recovering the source-level distribution.
/// The vacuum probability comes from normalization, not from `p'0`.
pub fn invert_loss(d: &PhotonNumberDist, eta: f64) -> Result<PhotonNumberDist> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Config(format!("eta: must be in (0, 1], got {eta}")));
    }
    let mut s = invert_loss_raw(&d.p, eta);
    for (i, v) in s.iter_mut().enumerate() {
        if *v < -NEG_TOL {
            return Err(Error::Numerics(format!(
                "eta = {eta} too small for the data: p{i} = {v}"
            )));
        }
        *v = v.max(0.0);
    }
    let total: f64 = s.iter().sum();
    if (total - 1.0).abs() > NEG_TOL {
        return Err(Error::Numerics(format!(
            "loss inversion lost normalization: sum = {total}"
        )));
    }
    for v in &mut s {
        *v /= total;
    }
    PhotonNumberDist::new(s, DistLevel::Source, Some(eta))
}

/// Estimate the transmission from a detected distribution measured at a pi
/// pulse, assuming the source emits at least one photon per pulse there
/// (source vacuum probability zero).
pub fn estimate_eta(d_pi: &PhotonNumberDist) -> Result<f64> {
    let b_prime: f64 = d_pi.p[1..].iter().sum();
    if b_prime <= 0.0 {
        return Err(Error::Numerics(
            "no feasible eta: detected brightness is zero".into(),
        ));
    }
    // The source photon sum grows as eta shrinks (until the inversion
    // leaves the physical region), so walk down from eta = 1 to bracket the
    // crossing with 1, then bisect inside that bracket.
    let photon_sum = |eta: f64| -> f64 {
        let s = invert_loss_raw(&d_pi.p, eta);
        s[1] + s[2] + s[3] + s[4]
    };
    if photon_sum(1.0) >= 1.0 {
        return Ok(1.0);
    }
    let mut hi = 1.0;
    let mut lo = None;
    let mut eta = 0.9;
    for _ in 0..400 {
        let v = photon_sum(eta);
        if !v.is_finite() {
            break;
        }
        if v >= 1.0 {
            lo = Some(eta);
            break;
        }
        hi = eta;
        eta *= 0.9;
    }
    let Some(mut lo) = lo else {
        return Err(Error::Numerics("no feasible eta in (0, 1]".into()));
    };
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if photon_sum(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Photon-number purities: populations renormalized over the non-vacuum part.
pub fn purities(d: &PhotonNumberDist) -> Result<[f64; 4]> {
    let total: f64 = d.p[1..].iter().sum();
    if total <= 0.0 {
        return Err(Error::Data("all-vacuum distribution has no purities".into()));
    }
    Ok([
        d.p[1] / total,
        d.p[2] / total,
        d.p[3] / total,
        d.p[4] / total,
    ])
}

/// The two-photon-truncated autocorrelation `g2 = 2 p2 / (p1 + 2 p2)^2`.
pub fn bunching_g2(p0: f64, p1: f64, p2: f64) -> Result<f64> {
    if (p0 + p1 + p2 - 1.0).abs() > SUM_TOL {
        return Err(Error::Config(format!(
            "probabilities must sum to 1, got {}",
            p0 + p1 + p2
        )));
    }
    if p0 < 0.0 || p1 < 0.0 || p2 < 0.0 {
        return Err(Error::Config("probabilities must be non-negative".into()));
    }
    let mean = p1 + 2.0 * p2;
    if mean <= 0.0 {
        return Err(Error::Data("p1 = p2 = 0 leaves g2 undefined".into()));
    }
    Ok(2.0 * p2 / (mean * mean))
}

/// Whether a bunching autocorrelation (g2 > 1) is achievable at all for the
/// given vacuum probability in the two-photon-truncated model.
pub fn bunching_possible(p0: f64) -> bool {
    p0 > 0.5
}

/// First-order uncertainties of the detected distribution, propagated from
/// moment sigmas through a numerically differentiated Jacobian.
pub fn detected_sigmas(m: &MomentSet, s: &MomentSigmas) -> Result<[f64; 5]> {
    propagate(m, s, |mm| moments_to_detected(mm).map(|d| d.p))
}

/// Same propagation, continued through the loss inversion to source level.
/// The perturbed inversions skip the feasibility checks: a nominal point on
/// the feasibility boundary (a pi-pulse distribution with zero source
/// vacuum) must still differentiate cleanly.
pub fn source_sigmas(m: &MomentSet, s: &MomentSigmas, eta: f64) -> Result<[f64; 5]> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Config(format!("eta: must be in (0, 1], got {eta}")));
    }
    propagate(m, s, |mm| {
        let d = moments_to_detected(mm)?;
        Ok(invert_loss_raw(&d.p, eta))
    })
}

fn propagate(
    m: &MomentSet,
    s: &MomentSigmas,
    f: impl Fn(&MomentSet) -> Result<[f64; 5]>,
) -> Result<[f64; 5]> {
    let sigmas = [s.g2, s.g3, s.g4, s.b_prime];
    let mut var = [0.0f64; 5];
    for (k, sigma) in sigmas.iter().enumerate() {
        if *sigma == 0.0 {
            continue;
        }
        let h = (sigma * 1e-3).max(1e-9);
        let mut plus = *m;
        let mut minus = *m;
        match k {
            0 => {
                plus.g2 += h;
                minus.g2 = (minus.g2 - h).max(0.0);
            }
            1 => {
                plus.g3 += h;
                minus.g3 = (minus.g3 - h).max(0.0);
            }
            2 => {
                plus.g4 += h;
                minus.g4 = (minus.g4 - h).max(0.0);
            }
            _ => {
                plus.b_prime = (plus.b_prime + h).min(1.0);
                minus.b_prime = (minus.b_prime - h).max(1e-12);
            }
        }
        let fp = f(&plus)?;
        let fm = f(&minus)?;
        for i in 0..5 {
            let deriv = (fp[i] - fm[i]) / (2.0 * h);
            var[i] += (deriv * sigma).powi(2);
        }
    }
    Ok(var.map(f64::sqrt))
}
