//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `--nocapture` to see them).
//!
//! The heavy fixtures (two 10^7-pulse streams) are built once and shared.

use std::sync::OnceLock;
use std::time::Instant;

use photonstat_core::correlator::{
    build_histogram, fit_lifetime, g_lower_order_slices, g_zero, integrate_peaks,
    lifetime_histogram, poisson_interval, GEstimate,
};
use photonstat_core::oracle::{naive_histogram, naive_peak_recount};
use photonstat_core::pn::{
    apply_loss, brightness, bunching_g2, bunching_possible, estimate_eta, invert_loss,
    moments_to_detected, purities, source_sigmas, DistLevel, MomentSet, MomentSigmas,
    PhotonNumberDist,
};
use photonstat_core::rng::SubRng;
use photonstat_core::sim::{
    photon_number_histogram, simulate_detected, simulate_emissions, simulate_reference,
    DetectionConfig, EmitterConfig, PhotonNumberCounts, ReferenceSource,
};
use photonstat_core::timetag::{TimeTag, TimeTagStream, DEFAULT_CLOCK_PERIOD_PS};

const PERIOD: u64 = DEFAULT_CLOCK_PERIOD_PS;
const WINDOW: u64 = 3_000;

fn qd_config(area_pi: f64, n_pulses: u64, seed: u64) -> EmitterConfig {
    EmitterConfig {
        pulse_duration_ps: 15.0,
        n_pulses,
        seed,
        ..EmitterConfig::default()
    }
    .with_area_pi(area_pi)
}

fn qd_detection() -> DetectionConfig {
    DetectionConfig {
        jitter_ps: 30.0,
        ..DetectionConfig::default()
    }
}

struct Fixture {
    stream: TimeTagStream,
    truth: PhotonNumberCounts,
}

fn two_pi_run() -> &'static Fixture {
    static FIX: OnceLock<Fixture> = OnceLock::new();
    FIX.get_or_init(|| {
        let cfg = qd_config(2.0, 10_000_000, 20_260_202);
        let (stream, truth) = simulate_detected(&cfg, &qd_detection(), cfg.seed).unwrap();
        Fixture { stream, truth }
    })
}

fn pi_run() -> &'static Fixture {
    static FIX: OnceLock<Fixture> = OnceLock::new();
    FIX.get_or_init(|| {
        let cfg = qd_config(1.0, 10_000_000, 20_260_101);
        let (stream, truth) = simulate_detected(&cfg, &qd_detection(), cfg.seed).unwrap();
        Fixture { stream, truth }
    })
}

fn g_of(stream: &TimeTagStream, order: u8) -> GEstimate {
    let (bw, md) = match order {
        2 => (25, 6 * PERIOD),
        3 => (3_125, 6 * PERIOD),
        _ => (PERIOD, 10 * PERIOD),
    };
    let chans: Vec<u16> = (1..=order as u16).collect();
    let h = build_histogram(stream, order, bw, md, &chans).unwrap();
    g_zero(&h, WINDOW).unwrap()
}

/// |value - target| within 3 combined sigma, using the estimate's error bar
/// on the side facing the target.
fn within_3sigma(est: &GEstimate, target: f64) -> bool {
    let sigma = if est.value < target {
        est.sigma_up
    } else {
        est.sigma_low
    };
    (est.value - target).abs() <= 3.0 * sigma
}

#[test]
fn criterion_01_histograms_match_naive_oracle() {
    let start = Instant::now();
    let mut rng = SubRng::new(0xACCE, 0, 1);
    let mut checked = 0u64;
    for stream_idx in 0..50u64 {
        // alternate uniform (cw-like) and pulsed lattice streams
        let n_tags = 200 + (rng.next_u64() % 9_800) as usize;
        let span = (600 + rng.next_u64() % 600) * PERIOD;
        let mut tags: Vec<TimeTag> = Vec::with_capacity(n_tags);
        if stream_idx % 2 == 0 {
            for _ in 0..n_tags {
                tags.push(TimeTag::new(
                    rng.next_u64() % span,
                    1 + (rng.next_u64() % 4) as u16,
                ));
            }
        } else {
            for _ in 0..n_tags {
                let period = rng.next_u64() % (span / PERIOD);
                let phase = 150 + (rng.exponential(204.0) as u64).min(PERIOD - 200);
                tags.push(TimeTag::new(
                    period * PERIOD + phase,
                    1 + (rng.next_u64() % 4) as u16,
                ));
            }
        }
        tags.sort_unstable();
        let stream = TimeTagStream::new(tags, PERIOD, 4).unwrap();

        for order in 2..=4u8 {
            let chans: Vec<u16> = (1..=order as u16).collect();
            let (bw, md) = match order {
                2 => (125, 3 * PERIOD),
                3 => (3_125, 2 * PERIOD),
                _ => (12_500, 2 * PERIOD),
            };
            let h = build_histogram(&stream, order, bw, md, &chans).unwrap();
            let naive = naive_histogram(&stream, order, bw, md, &chans);
            let got = h.binned();
            assert_eq!(
                naive.values().sum::<u64>(),
                got.values().sum::<u64>(),
                "stream {stream_idx} m={order}: totals differ"
            );
            for (key, count) in &naive {
                let mut k = [0i64; 3];
                k[..key.len()].copy_from_slice(key);
                assert_eq!(
                    got.get(&k).copied().unwrap_or(0),
                    *count,
                    "stream {stream_idx} m={order}: bin {key:?}"
                );
            }
            // peak integration against the tuple-level recount
            let peaks = integrate_peaks(&h, WINDOW).unwrap();
            let recount = naive_peak_recount(&stream, order, &chans, WINDOW, peaks.extent());
            assert_eq!(
                peaks.total(),
                recount.values().sum::<u64>(),
                "stream {stream_idx} m={order}: peak totals"
            );
            for (key, count) in &recount {
                assert_eq!(peaks.counts(key), *count, "stream {stream_idx} m={order} peak {key:?}");
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "oracle equivalence took {elapsed:?}, budget 60 s"
    );
    println!(
        "criterion 1 PASS: {checked} histograms match the naive oracle bin-for-bin in {elapsed:?}"
    );
}

#[test]
fn criterion_02_reference_source_statistics() {
    let start = Instant::now();
    let det = DetectionConfig::default();
    let n = 1_000_000u64;

    let coh =
        simulate_reference(ReferenceSource::Coherent { mean: 0.1 }, n, PERIOD, 204.0, &det, 61)
            .unwrap();
    let mut report = String::new();
    for (order, target) in [(2u8, 1.0), (3, 1.0), (4, 1.0)] {
        let g = g_of(&coh, order);
        assert!(
            within_3sigma(&g, target),
            "coherent g{order} = {} (-{}/+{}), want {target}",
            g.value,
            g.sigma_low,
            g.sigma_up
        );
        report.push_str(&format!("coherent g{order}={:.2} ", g.value));
    }
    let th =
        simulate_reference(ReferenceSource::Thermal { mean: 0.1 }, n, PERIOD, 204.0, &det, 62)
            .unwrap();
    for (order, target) in [(2u8, 2.0), (3, 6.0), (4, 24.0)] {
        let g = g_of(&th, order);
        assert!(
            within_3sigma(&g, target),
            "thermal g{order} = {} (-{}/+{}), want {target}",
            g.value,
            g.sigma_low,
            g.sigma_up
        );
        report.push_str(&format!("thermal g{order}={:.2} ", g.value));
    }
    let fock =
        simulate_reference(ReferenceSource::Fock { n: 1 }, n, PERIOD, 204.0, &det, 63).unwrap();
    let g = g_of(&fock, 2);
    assert_eq!(g.n_c, 0, "fock(1) produced coincidences");
    assert_eq!(g.value, 0.0);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "reference sources took {elapsed:?}");
    println!("criterion 2 PASS: {report}fock N_c=0, in {elapsed:?}");
}

#[test]
fn criterion_03_g2_is_loss_invariant() {
    let fix = two_pi_run();
    let full = g_of(&fix.stream, 2);
    let mut report = format!("g2(full) = {:.3}", full.value);
    for (k, eta) in [0.9f64, 0.5, 0.1].into_iter().enumerate() {
        let thinned = fix.stream.thin(eta, 7_000 + k as u64).unwrap();
        let g = g_of(&thinned, 2);
        let sigma = (full.sigma_up.powi(2) + g.sigma_up.max(g.sigma_low).powi(2)).sqrt();
        assert!(
            (g.value - full.value).abs() < 3.0 * sigma,
            "eta {eta}: g2 {} vs {} (3 sigma = {})",
            g.value,
            full.value,
            3.0 * sigma
        );
        report.push_str(&format!(", eta {eta}: {:.3}", g.value));
    }
    println!("criterion 3 PASS: {report}");
}

#[test]
fn criterion_04_rabi_curve_and_parity_alternation() {
    // ultrashort pulse: the >=1-photon probability follows sin^2(Theta/2);
    // tolerance is 3 binomial sigma plus Gamma*T_p, the physical bound on
    // the re-excitation probability the undamped target does not include
    let n = 100_000u64;
    let t_p = 0.5;
    let gamma_tp = t_p / 204.0;
    let mut worst = 0.0f64;
    for k in 0..=48u64 {
        let area_pi = 6.0 * k as f64 / 48.0;
        let cfg = EmitterConfig {
            pulse_duration_ps: t_p,
            n_pulses: n,
            seed: 44_000 + k,
            ..EmitterConfig::default()
        }
        .with_area_pi(area_pi);
        let records = simulate_emissions(&cfg).unwrap();
        let p1 = records.iter().filter(|r| !r.emission_times.is_empty()).count() as f64
            / n as f64;
        let model = (area_pi * std::f64::consts::PI / 2.0).sin().powi(2);
        let p_sig = p1.max(model).clamp(1.0 / n as f64, 1.0 - 1.0 / n as f64);
        let tol = 3.0 * (p_sig * (1.0 - p_sig) / n as f64).sqrt() + gamma_tp;
        let dev = (p1 - model).abs();
        assert!(
            dev <= tol,
            "theta = {area_pi} pi: p(>=1) = {p1}, sin^2 = {model}, dev {dev:.2e} > tol {tol:.2e}"
        );
        worst = worst.max(dev / tol);
    }

    // 15 ps pulses: g2(0) alternates below/above 1 with pulse-area parity
    let det = DetectionConfig {
        n_detectors: 2,
        splitting: vec![0.5, 0.5],
        ..qd_detection()
    };
    let mut gs = Vec::new();
    for k in 1..=6u64 {
        let cfg = qd_config(k as f64, 400_000, 46_000 + k);
        let (stream, _) = simulate_detected(&cfg, &det, cfg.seed).unwrap();
        let g = g_of(&stream, 2);
        if k % 2 == 1 {
            assert!(
                g.value + 3.0 * g.sigma_up < 1.0,
                "theta = {k} pi should be sub-Poissonian, g2 = {} +{}",
                g.value,
                g.sigma_up
            );
        } else {
            assert!(
                g.value - 3.0 * g.sigma_low > 1.0,
                "theta = {k} pi should be super-Poissonian, g2 = {} -{}",
                g.value,
                g.sigma_low
            );
        }
        gs.push(g.value);
    }
    println!(
        "criterion 4 PASS: 49-point Rabi curve worst dev/tol = {worst:.2}; g2 over theta/pi 1..6 = {gs:.3?}"
    );
}

#[test]
fn criterion_05_photon_number_pipeline_closure() {
    let start = Instant::now();
    let fix = two_pi_run();
    let truth = fix.truth.to_dist().unwrap();
    let n = fix.truth.n_pulses as f64;

    let g2 = g_of(&fix.stream, 2);
    let g3 = g_of(&fix.stream, 3);
    let g4 = g_of(&fix.stream, 4);
    let b = brightness(&fix.stream).unwrap();
    let moments = MomentSet {
        g2: g2.value,
        g3: g3.value,
        g4: g4.value,
        b_prime: b,
    };
    let sigmas = MomentSigmas {
        g2: 0.5 * (g2.sigma_low + g2.sigma_up),
        g3: 0.5 * (g3.sigma_low + g3.sigma_up),
        g4: 0.5 * (g4.sigma_low + g4.sigma_up),
        b_prime: (b * (1.0 - b) / n).sqrt(),
    };
    let detected = moments_to_detected(&moments).unwrap();
    let source = invert_loss(&detected, 0.25).unwrap();
    let sigma_src = source_sigmas(&moments, &sigmas, 0.25).unwrap();

    for i in 0..5 {
        let sampling = (truth.p[i] * (1.0 - truth.p[i]) / n).sqrt();
        let sigma = (sigma_src[i].powi(2) + sampling.powi(2)).sqrt();
        assert!(
            (source.p[i] - truth.p[i]).abs() <= 3.0 * sigma,
            "p{i}: recovered {} vs truth {} (3 sigma = {})",
            source.p[i],
            truth.p[i],
            3.0 * sigma
        );
    }
    let pur = purities(&source).unwrap();
    assert!(
        pur[1] >= 10.0 * pur[2],
        "purity ordering pi2 = {} < 10 pi3 = {}",
        pur[1],
        10.0 * pur[2]
    );
    assert!(
        pur[2] >= 5.0 * pur[3],
        "purity ordering pi3 = {} < 5 pi4 = {}",
        pur[2],
        5.0 * pur[3]
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "pipeline closure took {elapsed:?}");
    println!(
        "criterion 5 PASS: recovered p = {:.5?} vs truth {:.5?}; purities {:.4?} in {elapsed:?}",
        source.p, truth.p, pur
    );
}

#[test]
fn criterion_06_eta_estimation_at_pi_pulse() {
    let fix = pi_run();
    let g2 = g_of(&fix.stream, 2);
    let g3 = g_of(&fix.stream, 3);
    let g4 = g_of(&fix.stream, 4);
    let b = brightness(&fix.stream).unwrap();
    let detected = moments_to_detected(&MomentSet {
        g2: g2.value,
        g3: g3.value,
        g4: g4.value,
        b_prime: b,
    })
    .unwrap();
    let eta = estimate_eta(&detected).unwrap();
    assert!(
        (0.24..=0.26).contains(&eta),
        "eta estimate {eta} outside [0.24, 0.26] for configured 0.25"
    );
    println!("criterion 6 PASS: eta estimated {eta:.4} for configured 0.25");
}

#[test]
fn criterion_07_bunching_needs_majority_vacuum() {
    let n = 200;
    let mut bunching_cells = 0u64;
    for i in 0..=n {
        for j in 0..=(n - i) {
            let p0 = i as f64 / n as f64;
            let p1 = j as f64 / n as f64;
            let p2 = 1.0 - p0 - p1;
            if p2 < 0.0 {
                continue;
            }
            if let Ok(g) = bunching_g2(p0, p1, p2) {
                if g > 1.0 {
                    bunching_cells += 1;
                    assert!(
                        bunching_possible(p0),
                        "bunching g2 = {g} at p0 = {p0} <= 0.5"
                    );
                }
            }
        }
    }
    assert!(bunching_cells > 0, "grid never bunched; scan is broken");
    println!(
        "criterion 7 PASS: {bunching_cells} bunching cells on the 200x200 simplex, all at p0 > 0.5"
    );
}

#[test]
fn criterion_08_lifetime_fit_recovers_tau() {
    let cfg = qd_config(1.0, 1_000_000, 20_260_808);
    let (stream, _) = simulate_detected(&cfg, &qd_detection(), cfg.seed).unwrap();
    let hist = lifetime_histogram(&stream, 25).unwrap();
    // decay onset sits at signal delay + pulse end (~150 ps); fit past it
    let fit = fit_lifetime(&hist, 250).unwrap();
    let rel = (fit.tau_ps - 204.0).abs() / 204.0;
    assert!(
        rel < 0.02,
        "tau fitted {} ps, {}% off 204 ps",
        fit.tau_ps,
        rel * 100.0
    );
    println!(
        "criterion 8 PASS: tau fitted {:.2} ps ({:.2}% from 204 ps) on 1e6 pulses",
        fit.tau_ps,
        rel * 100.0
    );
}

#[test]
fn criterion_09_gating_trades_little_rate_for_much_purity() {
    let fix = pi_run();
    let scan = photonstat_core::correlator::gated_g2_scan(
        &fix.stream,
        &[0, 150],
        12_400,
        25,
        6 * PERIOD,
        WINDOW,
        (1, 2),
    )
    .unwrap();
    let (ungated, gated) = (&scan[0], &scan[1]);
    let g_ratio = gated.g2.value / ungated.g2.value;
    let rate_ratio = gated.count_rate_hz / ungated.count_rate_hz;
    assert!(
        g_ratio <= 0.7,
        "g2 only dropped to {g_ratio:.2} of ungated, need <= 0.7"
    );
    assert!(
        rate_ratio >= 0.8,
        "count rate fell to {rate_ratio:.2} of ungated, need >= 0.8"
    );
    println!(
        "criterion 9 PASS: at t_start = 150 ps g2 {:.4} -> {:.4} ({:.0}% reduction) while rate keeps {:.1}%",
        ungated.g2.value,
        gated.g2.value,
        (1.0 - g_ratio) * 100.0,
        rate_ratio * 100.0
    );
}

#[test]
fn criterion_10_poisson_interval_coverage() {
    // Monte-Carlo coverage of the 68.3% interval at three rates. NOTE: at
    // small rates Poisson discreteness forces any deterministic central
    // interval to over-cover (at lambda = 0.5 the achievable coverages jump
    // from 0.61 straight to 0.91), so the nominal band cannot hold there;
    // the exact (Garwood) interval is kept and the measured coverage is
    // asserted against the band as specified.
    let n = 100_000u64;
    let mut failures = Vec::new();
    let mut report = String::new();
    for (lam_idx, lambda) in [0.5f64, 3.0, 20.0].into_iter().enumerate() {
        let mut rng = SubRng::new(0xC0DE + lam_idx as u64, 0, 5);
        let mut covered = 0u64;
        for _ in 0..n {
            let k = rng.poisson(lambda);
            let (lo, up) = poisson_interval(k, 0.683).unwrap();
            if k as f64 - lo <= lambda && lambda <= k as f64 + up {
                covered += 1;
            }
        }
        let coverage = covered as f64 / n as f64;
        report.push_str(&format!("lambda {lambda}: {coverage:.4}  "));
        if !(0.66..=0.71).contains(&coverage) {
            failures.push(format!("lambda {lambda}: coverage {coverage:.4} outside [0.66, 0.71]"));
        }
    }
    println!("criterion 10 coverage: {report}");
    assert!(
        failures.is_empty(),
        "exact-interval coverage misses the nominal band (discreteness over-coverage, \
         unattainable for any monotone interval at small rates): {failures:?}"
    );
    println!("criterion 10 PASS: {report}");
}

#[test]
fn criterion_11_loss_map_roundtrip() {
    let mut rng = SubRng::new(0x105, 0, 6);
    let mut max_err = 0.0f64;
    for _ in 0..1_000 {
        let mut p = [0.0f64; 5];
        let mut total = 0.0;
        for v in &mut p {
            *v = rng.next_f64();
            total += *v;
        }
        for v in &mut p {
            *v /= total;
        }
        let d = PhotonNumberDist::new(p, DistLevel::Source, None).unwrap();
        for k in 1..=19 {
            let eta = k as f64 * 0.05;
            let back = invert_loss(&apply_loss(&d, eta).unwrap(), eta).unwrap();
            for i in 0..5 {
                max_err = max_err.max((back.p[i] - p[i]).abs());
            }
        }
    }
    assert!(max_err < 1e-12, "round-trip error {max_err:.2e} exceeds 1e-12");
    println!("criterion 11 PASS: loss-map round trip max |error| = {max_err:.2e}");
}

#[test]
fn criterion_12_performance_and_thread_invariance() {
    let fix = two_pi_run();
    assert!(
        fix.stream.len() >= 10_000_000,
        "fixture stream has {} tags, need >= 1e7",
        fix.stream.len()
    );

    let t0 = Instant::now();
    let h2 = build_histogram(&fix.stream, 2, 25, 6 * PERIOD, &[1, 2]).unwrap();
    let g2 = g_zero(&h2, WINDOW).unwrap();
    let m2_time = t0.elapsed();
    assert!(
        m2_time.as_secs_f64() < 10.0,
        "m=2 correlation on 1e7 tags took {m2_time:?}, budget 10 s"
    );

    let t0 = Instant::now();
    let h4 = build_histogram(&fix.stream, 4, PERIOD, 10 * PERIOD, &[1, 2, 3, 4]).unwrap();
    let peaks = integrate_peaks(&h4, WINDOW).unwrap();
    let m4_time = t0.elapsed();
    assert!(
        m4_time.as_secs_f64() < 60.0,
        "m=4 peak integration took {m4_time:?}, budget 60 s"
    );

    // bit-identical output under a single-thread pool
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let h2_single = pool
        .install(|| build_histogram(&fix.stream, 2, 25, 6 * PERIOD, &[1, 2]))
        .unwrap();
    assert_eq!(h2.binned_dense(), h2_single.binned_dense());
    let cfg = qd_config(2.0, 20_000, 99);
    let det = qd_detection();
    let (s_multi, _) = simulate_detected(&cfg, &det, cfg.seed).unwrap();
    let (s_single, _) = pool.install(|| simulate_detected(&cfg, &det, cfg.seed)).unwrap();
    assert_eq!(s_multi, s_single);

    println!(
        "criterion 12 PASS: m=2 in {m2_time:?} (g2 = {:.3}), m=4 peaks in {m4_time:?} ({} peak positions), outputs thread-invariant",
        g2.value,
        peaks.positions().len()
    );
}

// Supporting invariants tied to the same fixtures.

#[test]
fn source_histogram_g2_matches_correlator_estimate() {
    let fix = two_pi_run();
    let truth_g = fix.truth.to_dist().unwrap().g_values().unwrap();
    let measured = g_of(&fix.stream, 2);
    let sampling = truth_g[0] / (fix.truth.counts[2] as f64).sqrt();
    let sigma = (measured.sigma_up.powi(2) + sampling.powi(2)).sqrt();
    assert!(
        (measured.value - truth_g[0]).abs() < 3.0 * sigma,
        "correlator g2 {} vs source-level {} (3 sigma = {})",
        measured.value,
        truth_g[0],
        3.0 * sigma
    );
    println!(
        "invariant PASS: detected-stream g2 {:.3} matches source factorial-moment g2 {:.3}",
        measured.value, truth_g[0]
    );
}

#[test]
fn slice_estimates_are_consistent_across_orders() {
    // thermal light resolves every slice: m=3 mixed peaks estimate g2, m=4
    // pairwise lines estimate g2^2, the m=4 central peak estimates 4!
    let det = DetectionConfig::default();
    let s = simulate_reference(ReferenceSource::Thermal { mean: 1.0 }, 1_000_000, PERIOD, 204.0, &det, 71)
        .unwrap();
    let g2 = g_of(&s, 2);
    let h3 = build_histogram(&s, 3, 3_125, 6 * PERIOD, &[1, 2, 3]).unwrap();
    let slices3 = g_lower_order_slices(&h3, WINDOW).unwrap();
    for (label, est) in &slices3 {
        let sigma = (est.sigma_up.powi(2) + g2.sigma_up.powi(2)).sqrt();
        assert!(
            (est.value - g2.value).abs() < 3.0 * sigma,
            "{label}: {} vs direct g2 {} (3 sigma = {})",
            est.value,
            g2.value,
            3.0 * sigma
        );
    }
    let h4 = build_histogram(&s, 4, PERIOD, 10 * PERIOD, &[1, 2, 3, 4]).unwrap();
    let slices4 = g_lower_order_slices(&h4, WINDOW).unwrap();
    let pairwise = &slices4["g2sq_pairwise"];
    let target = g2.value * g2.value;
    let sigma = (pairwise.sigma_up.powi(2) + (2.0 * g2.value * g2.sigma_up).powi(2)).sqrt();
    assert!(
        (pairwise.value - target).abs() < 3.0 * sigma,
        "pairwise lines {} vs g2^2 {} (3 sigma = {})",
        pairwise.value,
        target,
        sigma * 3.0
    );
    let central = g_zero(&h4, WINDOW).unwrap();
    assert!(
        within_3sigma(&central, 24.0),
        "thermal g4 central {} (-{}/+{})",
        central.value,
        central.sigma_low,
        central.sigma_up
    );
    assert!(
        central.value > pairwise.value,
        "thermal central peak should dominate pairwise lines"
    );
    println!(
        "invariant PASS: m3 slices {:?} ~ g2 {:.3}; m4 pairwise {:.2} ~ g2^2 {:.2}; central {:.1} ~ 24",
        slices3.values().map(|e| (e.value * 1e3).round() / 1e3).collect::<Vec<_>>(),
        g2.value,
        pairwise.value,
        target
    );
}

#[test]
fn hom_overlap_rises_under_gating() {
    // model-level check on pi-pulse emission records
    let cfg = qd_config(1.0, 300_000, 20_260_909);
    let records = simulate_emissions(&cfg).unwrap();
    let tau = cfg.lifetime_ps;
    let t_p = cfg.pulse_duration_ps;
    let ungated = photonstat_core::hom::pulse_pair_overlap(&records, tau, t_p, None).unwrap();
    assert!(ungated < 1.0, "re-excitation should dilute the overlap, got {ungated}");
    let mut prev = ungated;
    for t_start in [50.0, 100.0, 150.0, 300.0] {
        let m = photonstat_core::hom::pulse_pair_overlap(&records, tau, t_p, Some(t_start)).unwrap();
        assert!(
            m >= prev - 1e-12,
            "overlap fell from {prev} to {m} at gate {t_start}"
        );
        prev = m;
    }
    let gated = photonstat_core::hom::pulse_pair_overlap(&records, tau, t_p, Some(150.0)).unwrap();
    assert!(gated > ungated, "gating at 150 ps should raise the overlap");
    println!("invariant PASS: pulse-pair overlap {ungated:.5} ungated -> {gated:.5} gated at 150 ps");
}
