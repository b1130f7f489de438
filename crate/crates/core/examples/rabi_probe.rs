use photonstat_core::sim::*;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let nper = 100_000u64;
    let mut worst: (f64, f64) = (0.0, 0.0); // (dev/tol, theta)
    let tol = 3.0 * 0.5 / (nper as f64).sqrt();
    for k in 0..=48 {
        let area_pi = 6.0 * k as f64 / 48.0;
        let cfg = EmitterConfig {
            pulse_duration_ps: 0.5,
            n_pulses: nper,
            seed: 1000 + k,
            ..EmitterConfig::default()
        }
        .with_area_pi(area_pi);
        let records = simulate_emissions(&cfg).unwrap();
        let p1 = records.iter().filter(|r| !r.emission_times.is_empty()).count() as f64 / nper as f64;
        let model = (area_pi * std::f64::consts::PI / 2.0).sin().powi(2);
        let dev = (p1 - model).abs();
        if dev / tol > worst.0 {
            worst = (dev / tol, area_pi);
        }
        if k % 8 == 0 {
            println!("theta {:>5.3} pi: p1 {:.5} model {:.5} dev {:.2e} (tol {:.2e})", area_pi, p1, model, dev, tol);
        }
    }
    println!("worst dev/tol = {:.3} at theta = {} pi; elapsed {:?}", worst.0, worst.1, t0.elapsed());
}
