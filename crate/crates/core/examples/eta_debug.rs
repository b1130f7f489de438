use photonstat_core::pn::*;
use photonstat_core::correlator::*;
use photonstat_core::TimeTagStream;

fn g(stream: &TimeTagStream, m: u8) -> GEstimate {
    let p = stream.clock_period();
    let chans: Vec<u16> = (1..=m as u16).collect();
    let (bw, md) = match m { 2 => (25, 6*p), 3 => (3_125, 6*p), _ => (p, 10*p) };
    g_zero(&build_histogram(stream, m, bw, md, &chans).unwrap(), 3000).unwrap()
}

fn main() {
    let s = TimeTagStream::read("/tmp/clitest/run.ptag").unwrap();
    let m = MomentSet {
        g2: g(&s, 2).value, g3: g(&s, 3).value, g4: g(&s, 4).value,
        b_prime: brightness(&s).unwrap(),
    };
    println!("moments: {m:?}");
    let d = moments_to_detected(&m).unwrap();
    println!("detected: {:?} (sum {})", d.p, d.p.iter().sum::<f64>());
    let eta = estimate_eta(&d).unwrap();
    println!("eta_hat = {eta}");
    for test in [eta - 1e-6, eta, eta + 1e-6, eta + 4e-7] {
        let r = invert_loss(&d, test);
        match r {
            Ok(src) => println!("eta {test}: ok p0 = {}", src.p[0]),
            Err(e) => println!("eta {test}: {e}"),
        }
    }
}
