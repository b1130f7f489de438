use photonstat_core::sim::*;
use std::time::Instant;

fn main() {
    let cfg = EmitterConfig {
        pulse_duration_ps: 15.0,
        n_pulses: 1_000_000,
        seed: 7,
        ..EmitterConfig::default()
    }
    .with_area_pi(2.0);
    let det = DetectionConfig::default();
    let t0 = Instant::now();
    let (stream, counts) = simulate_detected(&cfg, &det, 7).unwrap();
    let dt = t0.elapsed();
    println!("1e6 pulses in {:?} -> 1e7 in ~{:?}", dt, dt * 10);
    println!("tags: {}, counts: {:?} folded {}", stream.len(), counts.counts, counts.folded);
    let n = counts.n_pulses as f64;
    println!("p0..p4: {:?}", counts.counts.map(|c| c as f64 / n));
}
