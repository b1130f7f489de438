use photonstat_core::correlator::*;
use photonstat_core::pn::*;
use photonstat_core::sim::*;
use std::time::Instant;

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let cfg = EmitterConfig {
        pulse_duration_ps: 15.0,
        n_pulses: n,
        seed: 7,
        ..EmitterConfig::default()
    }
    .with_area_pi(2.0);
    let det = DetectionConfig::default();
    let (stream, counts) = simulate_detected(&cfg, &det, 7).unwrap();
    let truth = counts.to_dist().unwrap();
    println!("truth p: {:?}", truth.p);
    println!("truth g: {:?}", truth.g_values().unwrap());

    let p = cfg.repetition_period_ps;
    let t0 = Instant::now();
    let h2 = build_histogram(&stream, 2, 25, 6 * p, &[1, 2]).unwrap();
    println!("m2 build: {:?} tuples {}", t0.elapsed(), h2.total_tuples());
    let g2 = g_zero(&h2, 3000).unwrap();
    println!("g2 = {:.3} -{:.3}+{:.3}  (n_c {} n_u {:.2} peaks {})", g2.value, g2.sigma_low, g2.sigma_up, g2.n_c, g2.n_u_mean, g2.n_uncorrelated_peaks);

    let t0 = Instant::now();
    let h3 = build_histogram(&stream, 3, 3125, 6 * p, &[1, 2, 3]).unwrap();
    let g3 = g_zero(&h3, 3000).unwrap();
    println!("m3 build: {:?}; g3 = {:.3} -{:.3}+{:.3} (n_c {} n_u {:.4} peaks {})", t0.elapsed(), g3.value, g3.sigma_low, g3.sigma_up, g3.n_c, g3.n_u_mean, g3.n_uncorrelated_peaks);

    let t0 = Instant::now();
    let h4 = build_histogram(&stream, 4, p, 10 * p, &[1, 2, 3, 4]).unwrap();
    let g4 = g_zero(&h4, 3000).unwrap();
    println!("m4 build: {:?}; g4 = {:.3} -{:.3}+{:.3} (n_c {} n_u {:.6} peaks {})", t0.elapsed(), g4.value, g4.sigma_low, g4.sigma_up, g4.n_c, g4.n_u_mean, g4.n_uncorrelated_peaks);

    let b = brightness(&stream).unwrap();
    println!("B' = {:.6}", b);
    let m = MomentSet { g2: g2.value, g3: g3.value, g4: g4.value, b_prime: b };
    let detected = moments_to_detected(&m).unwrap();
    println!("detected p': {:?}", detected.p);
    let source = invert_loss(&detected, 0.25).unwrap();
    println!("recovered source p: {:?}", source.p);
    println!("purities: {:?}", purities(&source).unwrap());

    // slices on m3
    for (label, est) in g_lower_order_slices(&h3, 3000).unwrap() {
        println!("m3 slice {label}: {:.3} +- {:.3}", est.value, est.sigma_up);
    }
}
