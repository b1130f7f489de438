use photonstat_core::correlator::*;
use photonstat_core::sim::*;

fn main() {
    // thermal mu=1: g4 central = 24, pairwise lines = [g2]^2 = 4, triple = g3 = 6
    let det = DetectionConfig::default();
    let s = simulate_reference(ReferenceSource::Thermal { mean: 1.0 }, 1_000_000, 12_500, 204.0, &det, 41).unwrap();
    let h4 = build_histogram(&s, 4, 12_500, 10 * 12_500, &[1, 2, 3, 4]).unwrap();
    let g4 = g_zero(&h4, 3_000).unwrap();
    println!("thermal g4 central = {:.2} -{:.2}+{:.2} (n_c {})", g4.value, g4.sigma_low, g4.sigma_up, g4.n_c);
    for (label, est) in g_lower_order_slices(&h4, 3_000).unwrap() {
        println!("  slice {label}: {:.3} +- {:.3} (pooled n_c {})", est.value, est.sigma_up, est.n_c);
    }
    // m3 slices vs direct g2 on the same stream
    let h3 = build_histogram(&s, 3, 3_125, 6 * 12_500, &[1, 2, 3]).unwrap();
    let h2 = build_histogram(&s, 2, 25, 6 * 12_500, &[1, 2]).unwrap();
    let g2 = g_zero(&h2, 3_000).unwrap();
    println!("direct g2 = {:.3} +- {:.3}", g2.value, g2.sigma_up);
    for (label, est) in g_lower_order_slices(&h3, 3_000).unwrap() {
        println!("  m3 slice {label}: {:.3} +- {:.3}", est.value, est.sigma_up);
    }

    // QD at 6 pi with eta 1: is g4(0,0,0) > pairwise > g2 resolvable at 2e6 pulses?
    let cfg = EmitterConfig { pulse_duration_ps: 15.0, n_pulses: 2_000_000, seed: 43, ..EmitterConfig::default() }.with_area_pi(6.0);
    let det1 = DetectionConfig { eta_t: 1.0, ..DetectionConfig::default() };
    let (qd, counts) = simulate_detected(&cfg, &det1, 43).unwrap();
    println!("6pi truth p: {:?}", counts.to_dist().unwrap().p);
    let h4q = build_histogram(&qd, 4, 12_500, 10 * 12_500, &[1, 2, 3, 4]).unwrap();
    let g4q = g_zero(&h4q, 3_000).unwrap();
    println!("6pi g4 central = {:.1} (n_c {}), sigma -{:.1}+{:.1}", g4q.value, g4q.n_c, g4q.sigma_low, g4q.sigma_up);
    for (label, est) in g_lower_order_slices(&h4q, 3_000).unwrap() {
        println!("  slice {label}: {:.2} +- {:.2} (n_c {})", est.value, est.sigma_up, est.n_c);
    }
}
