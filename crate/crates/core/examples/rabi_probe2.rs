use photonstat_core::correlator::*;
use photonstat_core::sim::*;

fn main() {
    // part 1 with the sigma-hat + Gamma*Tp tolerance
    let nper = 100_000u64;
    let gamma_tp = 0.5 / 204.0;
    let mut worst = (0.0f64, 0.0f64);
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
        let p_for_sigma = p1.max(model).max(1.0 / nper as f64).min(1.0 - 1.0 / nper as f64);
        let sigma = (p_for_sigma * (1.0 - p_for_sigma) / nper as f64).sqrt();
        let tol = 3.0 * sigma + gamma_tp;
        let ratio = (p1 - model).abs() / tol;
        if ratio > worst.0 { worst = (ratio, area_pi); }
    }
    println!("part1 worst dev/tol = {:.3} at theta = {} pi", worst.0, worst.1);

    // part 2: sub/super-Poissonian alternation at T_p = 15 ps
    for k in 1..=6u64 {
        let cfg = EmitterConfig {
            pulse_duration_ps: 15.0,
            n_pulses: 1_000_000,
            seed: 2000 + k,
            ..EmitterConfig::default()
        }
        .with_area_pi(k as f64);
        let det = DetectionConfig { n_detectors: 2, splitting: vec![0.5, 0.5], ..DetectionConfig::default() };
        let (stream, _) = simulate_detected(&cfg, &det, 2000 + k).unwrap();
        let h = build_histogram(&stream, 2, 25, 6 * 12_500, &[1, 2]).unwrap();
        let g = g_zero(&h, 3_000).unwrap();
        println!("theta {k} pi: g2 = {:.3} -{:.3}+{:.3} (n_c {})", g.value, g.sigma_low, g.sigma_up, g.n_c);
    }
}
