use photonstat_core::correlator::*;
use photonstat_core::sim::*;

fn main() {
    let det = DetectionConfig::default();
    for (mu, n, seed) in [(0.1, 4_000_000u64, 21u64), (1.0, 1_000_000, 22), (1.0, 1_000_000, 23)] {
        let s = simulate_reference(ReferenceSource::Thermal { mean: mu }, n, 12_500, 204.0, &det, seed).unwrap();
        let h2 = build_histogram(&s, 2, 25, 6 * 12_500, &[1, 2]).unwrap();
        let g2 = g_zero(&h2, 3000).unwrap();
        let h3 = build_histogram(&s, 3, 3_125, 6 * 12_500, &[1, 2, 3]).unwrap();
        let g3 = g_zero(&h3, 3000).unwrap();
        let h4 = build_histogram(&s, 4, 12_500, 10 * 12_500, &[1, 2, 3, 4]).unwrap();
        let g4 = g_zero(&h4, 3000).unwrap();
        println!("mu={mu} n={n} seed={seed}: g2={:.3}+-{:.3} (nc {}), g3={:.3}+-{:.3} (nc {}), g4={:.2}+-{:.2} (nc {})",
            g2.value, g2.sigma_up, g2.n_c, g3.value, g3.sigma_up, g3.n_c, g4.value, g4.sigma_up, g4.n_c);
    }
}
