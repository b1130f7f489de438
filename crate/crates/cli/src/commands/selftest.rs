use photonstat_core::correlator::build_histogram;
use photonstat_core::oracle::naive_histogram;
use photonstat_core::pn::{apply_loss, invert_loss, DistLevel, PhotonNumberDist};
use photonstat_core::rng::SubRng;
use photonstat_core::sim::{simulate_reference, DetectionConfig, ReferenceSource};
use photonstat_core::timetag::{TimeTag, TimeTagStream};
use photonstat_core::{Error, Result};

use crate::commands::g_for_order;
use crate::SelftestArgs;

struct Table {
    failures: usize,
}

impl Table {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        println!("{} {:<44} {detail}", if pass { "PASS" } else { "FAIL" }, name);
        if !pass {
            self.failures += 1;
        }
    }
}

fn random_stream(seed: u64) -> TimeTagStream {
    let mut rng = SubRng::new(seed, 0, 0xFE);
    let span = 400u64 * 12_500;
    let mut tags: Vec<TimeTag> = (0..600)
        .map(|_| TimeTag::new(rng.next_u64() % span, 1 + (rng.next_u64() % 4) as u16))
        .collect();
    tags.sort_unstable();
    TimeTagStream::new(tags, 12_500, 4).unwrap()
}

pub fn run(args: SelftestArgs) -> Result<()> {
    let mut table = Table { failures: 0 };

    // histogram oracle equivalence on random streams
    for order in 2..=4u8 {
        let mut equal = true;
        for seed in 0..5u64 {
            let s = random_stream(seed);
            let chans: Vec<u16> = (1..=order as u16).collect();
            let (bw, md) = crate::commands::default_geometry(order, 12_500);
            let bw = bw.max(125);
            let h = build_histogram(&s, order, bw, md.min(25_000), &chans)?;
            let naive = naive_histogram(&s, order, bw, md.min(25_000), &chans);
            let got = h.binned();
            equal &= naive.iter().all(|(key, count)| {
                let mut k = [0i64; 3];
                k[..key.len()].copy_from_slice(key);
                got.get(&k).copied().unwrap_or(0) == *count
            }) && naive.values().sum::<u64>() == got.values().sum::<u64>();
        }
        table.check(
            &format!("histogram m={order} equals naive enumeration"),
            equal,
            "5 random streams".into(),
        );
    }

    // reference sources
    let det = DetectionConfig::default();
    let n = args.pulses;
    let coh = simulate_reference(ReferenceSource::Coherent { mean: 1.0 }, n, 12_500, 204.0, &det, 3)?;
    let g2 = g_for_order(&coh, 2, None, None, 3_000, None)?;
    table.check(
        "coherent source analyzes to g2 = 1",
        (g2.value - 1.0).abs() < 4.0 * g2.sigma_up.max(1e-3),
        format!("g2 = {:.3} (-{:.3}/+{:.3})", g2.value, g2.sigma_low, g2.sigma_up),
    );
    let th = simulate_reference(ReferenceSource::Thermal { mean: 1.0 }, n, 12_500, 204.0, &det, 4)?;
    let g2t = g_for_order(&th, 2, None, None, 3_000, None)?;
    table.check(
        "thermal source analyzes to g2 = 2",
        (g2t.value - 2.0).abs() < 4.0 * g2t.sigma_up.max(1e-3),
        format!("g2 = {:.3} (-{:.3}/+{:.3})", g2t.value, g2t.sigma_low, g2t.sigma_up),
    );
    let fk = simulate_reference(ReferenceSource::Fock { n: 1 }, n, 12_500, 204.0, &det, 5)?;
    let g2f = g_for_order(&fk, 2, None, None, 3_000, None)?;
    table.check(
        "single-photon source has zero coincidences",
        g2f.n_c == 0,
        format!("N_c = {}", g2f.n_c),
    );

    // loss map round trip
    let mut rng = SubRng::new(9, 0, 0xFD);
    let mut max_err: f64 = 0.0;
    for _ in 0..200 {
        let mut p = [0.0f64; 5];
        let mut total = 0.0;
        for v in &mut p {
            *v = rng.next_f64();
            total += *v;
        }
        for v in &mut p {
            *v /= total;
        }
        let eta = 0.1 + 0.8 * rng.next_f64();
        let d = PhotonNumberDist::new(p, DistLevel::Source, None)?;
        let back = invert_loss(&apply_loss(&d, eta)?, eta)?;
        for i in 0..5 {
            max_err = max_err.max((back.p[i] - p[i]).abs());
        }
    }
    table.check(
        "loss map round-trips exactly",
        max_err < 1e-12,
        format!("max |error| = {max_err:.2e}"),
    );

    println!(
        "\n{} checks failed",
        if table.failures == 0 { "0".to_string() } else { table.failures.to_string() }
    );
    if table.failures > 0 {
        return Err(Error::Numerics(format!("{} selftest checks failed", table.failures)));
    }
    Ok(())
}
