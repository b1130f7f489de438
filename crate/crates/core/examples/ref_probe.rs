use photonstat_core::correlator::*;
use photonstat_core::sim::*;
use std::time::Instant;

fn g_m(stream: &photonstat_core::TimeTagStream, m: u8) -> GEstimate {
    let p = stream.clock_period();
    let chans: Vec<u16> = (1..=m as u16).collect();
    let (bw, md) = match m {
        2 => (25, 6 * p),
        3 => (3_125, 6 * p),
        _ => (p, 10 * p),
    };
    let h = build_histogram(stream, m, bw, md, &chans).unwrap();
    g_zero(&h, 3000).unwrap()
}

fn main() {
    let det = DetectionConfig::default();
    let n = 1_000_000u64;
    let t0 = Instant::now();

    let coh = simulate_reference(ReferenceSource::Coherent { mean: 0.1 }, n, 12_500, 204.0, &det, 11).unwrap();
    for m in 2..=4 {
        let g = g_m(&coh, m);
        println!("coherent g{m} = {:.3} -{:.3}+{:.3} (n_c {})", g.value, g.sigma_low, g.sigma_up, g.n_c);
    }
    let th = simulate_reference(ReferenceSource::Thermal { mean: 0.1 }, n, 12_500, 204.0, &det, 12).unwrap();
    for m in 2..=4 {
        let g = g_m(&th, m);
        println!("thermal g{m} = {:.3} -{:.3}+{:.3} (n_c {})", g.value, g.sigma_low, g.sigma_up, g.n_c);
    }
    let fk = simulate_reference(ReferenceSource::Fock { n: 1 }, n, 12_500, 204.0, &det, 13).unwrap();
    let g = g_m(&fk, 2);
    println!("fock g2 = {:.4} +{:.4} (n_c {})", g.value, g.sigma_up, g.n_c);
    println!("total refs: {:?}", t0.elapsed());
}
