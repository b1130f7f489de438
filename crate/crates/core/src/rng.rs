//! Deterministic counter-seeded random substreams.
//!
//! Every stochastic step of the simulator draws from a substream keyed by
//! `(seed, index, domain)`, where `index` is typically a pulse index and
//! `domain` separates independent uses of the same seed (emission vs.
//! detection vs. thinning). Pulses can therefore be simulated in any order,
//! on any number of threads, and still reproduce identical output.
//!
//! The generator is xoshiro256++ seeded through SplitMix64. Not
//! cryptographic; stable across platforms.

/// Substream domain tags. One per independent consumer of randomness.
pub mod domain {
    pub const EMISSION: u64 = 0x01;
    pub const DETECTION: u64 = 0x02;
    pub const BACKGROUND: u64 = 0x03;
    pub const THINNING: u64 = 0x04;
    pub const REFERENCE: u64 = 0x05;
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    mix64(*state)
}

/// A single deterministic substream.
#[derive(Clone, Debug)]
pub struct SubRng {
    s: [u64; 4],
}

impl SubRng {
    pub fn new(seed: u64, index: u64, domain: u64) -> Self {
        // fold the full key into the state before expanding, so every state
        // word depends on (seed, index, domain) and substreams of the same
        // pulse share nothing
        let mut st = mix64(seed ^ 0x9E37_79B9_7F4A_7C15);
        st = mix64(st ^ index.wrapping_mul(0xA24B_AED4_963E_E407));
        st = mix64(st ^ domain.wrapping_mul(0x9FB2_1C65_1E98_DF25));
        let a = splitmix64(&mut st);
        let b = splitmix64(&mut st);
        let c = splitmix64(&mut st);
        let d = splitmix64(&mut st);
        // xoshiro must not start from the all-zero state
        let mut s = [a, b, c, d];
        if s == [0, 0, 0, 0] {
            s = [0x9E37_79B9_7F4A_7C15, 1, 2, 3];
        }
        SubRng { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Exponential with the given mean.
    #[inline]
    pub fn exponential(&mut self, mean: f64) -> f64 {
        // 1 - u is in (0, 1], so ln is finite
        -mean * (1.0 - self.next_f64()).ln()
    }

    /// Gaussian via Box-Muller, one value per call.
    pub fn gaussian(&mut self, sigma: f64) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        sigma * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Poisson by Knuth's product method, chunked so large means stay exact.
    pub fn poisson(&mut self, mut lambda: f64) -> u64 {
        let mut n = 0u64;
        let mut prod = self.next_f64();
        while lambda > 0.0 {
            let chunk = lambda.min(500.0);
            let limit = (-chunk).exp();
            while prod > limit {
                n += 1;
                prod *= self.next_f64();
            }
            prod /= limit;
            lambda -= chunk;
        }
        n
    }

    /// Bose-Einstein (geometric) photon number with the given mean:
    /// `P(n) = mean^n / (1 + mean)^(n+1)`.
    pub fn thermal(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        let u = 1.0 - self.next_f64();
        let q = mean / (1.0 + mean);
        (u.ln() / q.ln()).floor() as u64
    }

    /// Index into a cumulative probability table (last entry covers the rest).
    #[inline]
    pub fn pick(&mut self, cumulative: &[f64]) -> usize {
        let u = self.next_f64();
        for (i, c) in cumulative.iter().enumerate() {
            if u < *c {
                return i;
            }
        }
        cumulative.len().saturating_sub(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let mut a = SubRng::new(7, 42, domain::EMISSION);
        let mut b = SubRng::new(7, 42, domain::EMISSION);
        let mut c = SubRng::new(7, 43, domain::EMISSION);
        let mut d = SubRng::new(7, 42, domain::DETECTION);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, (0..8).map(|_| c.next_u64()).collect::<Vec<_>>());
        assert_ne!(xs, (0..8).map(|_| d.next_u64()).collect::<Vec<_>>());
    }

    #[test]
    fn uniform_mean_is_half() {
        let mut r = SubRng::new(1, 0, 0);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| r.next_f64()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 5e-3, "mean {mean}");
    }

    #[test]
    fn exponential_mean_matches() {
        let mut r = SubRng::new(2, 0, 0);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| r.exponential(204.0)).sum::<f64>() / n as f64;
        assert!((mean - 204.0).abs() < 3.0, "mean {mean}");
    }

    #[test]
    fn poisson_mean_and_variance() {
        let mut r = SubRng::new(3, 0, 0);
        let n = 100_000;
        let xs: Vec<u64> = (0..n).map(|_| r.poisson(2.5)).collect();
        let mean = xs.iter().sum::<u64>() as f64 / n as f64;
        let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 2.5).abs() < 0.05, "mean {mean}");
        assert!((var - 2.5).abs() < 0.1, "var {var}");
    }

    #[test]
    fn thermal_mean_matches() {
        let mut r = SubRng::new(4, 0, 0);
        let n = 200_000;
        let mean = (0..n).map(|_| r.thermal(0.8)).sum::<u64>() as f64 / n as f64;
        assert!((mean - 0.8).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn gaussian_moments() {
        let mut r = SubRng::new(5, 0, 0);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| r.gaussian(30.0)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.5, "mean {mean}");
        assert!((var.sqrt() - 30.0).abs() < 0.3, "sd {}", var.sqrt());
    }
}
