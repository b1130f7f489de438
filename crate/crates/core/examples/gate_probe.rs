use photonstat_core::correlator::*;
use photonstat_core::sim::*;

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5_000_000);
    let cfg = EmitterConfig {
        pulse_duration_ps: 15.0,
        n_pulses: n,
        seed: 31,
        ..EmitterConfig::default()
    }
    .with_area_pi(1.0);
    let det = DetectionConfig {
        jitter_ps: 30.0,
        n_detectors: 2,
        splitting: vec![0.5, 0.5],
        ..DetectionConfig::default()
    };
    let (stream, counts) = simulate_detected(&cfg, &det, 31).unwrap();
    println!("truth p: {:?}", counts.to_dist().unwrap().p);
    let scan = gated_g2_scan(&stream, &[0, 50, 100, 150, 225], 12_400, 25, 6 * 12_500, 3_000, (1, 2)).unwrap();
    let g0 = scan[0].g2.value;
    let r0 = scan[0].count_rate_hz;
    for pt in &scan {
        println!(
            "t_start {:>4}: g2 = {:.4} -{:.4}+{:.4} (n_c {:>4}), rate {:.3e} Hz ({:.1}% of ungated), g2/g2_0 = {:.3}",
            pt.t_start, pt.g2.value, pt.g2.sigma_low, pt.g2.sigma_up, pt.g2.n_c,
            pt.count_rate_hz, 100.0 * pt.count_rate_hz / r0, pt.g2.value / g0
        );
    }
}
