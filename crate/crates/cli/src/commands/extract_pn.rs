use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use photonstat_core::correlator::GEstimate;
use photonstat_core::pn::{
    brightness, detected_sigmas, estimate_eta, invert_loss, moments_to_detected, purities,
    source_sigmas, DistLevel, MomentSet, MomentSigmas, PhotonNumberDist,
};
use photonstat_core::{Error, Result, TimeTagStream};

use crate::commands::g_for_order;
use crate::manifest::with_manifest;
use crate::ExtractPnArgs;

#[derive(serde::Serialize)]
pub struct PnReport {
    pub moments: MomentSet,
    pub moment_sigmas: MomentSigmas,
    pub g_estimates: Vec<GEstimate>,
    pub mu_detected: f64,
    pub eta: f64,
    pub eta_source: String,
    pub detected: PhotonNumberDist,
    pub detected_sigma: [f64; 5],
    pub source: PhotonNumberDist,
    pub source_sigma: [f64; 5],
    pub purities: [f64; 4],
}

#[derive(serde::Deserialize)]
struct EtaOnly {
    eta: f64,
}

struct Extraction {
    moments: MomentSet,
    sigmas: MomentSigmas,
    gs: Vec<GEstimate>,
    detected: PhotonNumberDist,
}

fn measure(stream: &TimeTagStream, window: u64) -> Result<Extraction> {
    let mut gs = Vec::new();
    for order in 2..=4u8 {
        gs.push(g_for_order(stream, order, None, None, window, None)?);
    }
    let b = brightness(stream)?;
    let n_periods = stream.n_periods() as f64;
    let moments = MomentSet {
        g2: gs[0].value,
        g3: gs[1].value,
        g4: gs[2].value,
        b_prime: b,
    };
    let sigmas = MomentSigmas {
        g2: 0.5 * (gs[0].sigma_low + gs[0].sigma_up),
        g3: 0.5 * (gs[1].sigma_low + gs[1].sigma_up),
        g4: 0.5 * (gs[2].sigma_low + gs[2].sigma_up),
        b_prime: (b * (1.0 - b) / n_periods).sqrt(),
    };
    let detected = moments_to_detected(&moments)?;
    Ok(Extraction {
        moments,
        sigmas,
        gs,
        detected,
    })
}

fn resolve_eta(
    args: &ExtractPnArgs,
    detected: &PhotonNumberDist,
) -> Result<(f64, String)> {
    if let Some(eta) = args.eta {
        return Ok((eta, "given".into()));
    }
    if let Some(path) = &args.eta_from {
        let text = std::fs::read_to_string(path)?;
        let parsed: EtaOnly = serde_json::from_str(&text)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        return Ok((parsed.eta, format!("from {}", path.display())));
    }
    if args.estimate_eta {
        return Ok((estimate_eta(detected)?, "estimated at pi pulse".into()));
    }
    Err(Error::Config(
        "eta: pass --eta, --eta-from or --estimate-eta".into(),
    ))
}

fn report_for(ex: Extraction, eta: f64, eta_source: String) -> Result<PnReport> {
    let source = invert_loss(&ex.detected, eta)?;
    Ok(PnReport {
        mu_detected: ex.detected.mean(),
        detected_sigma: detected_sigmas(&ex.moments, &ex.sigmas)?,
        source_sigma: source_sigmas(&ex.moments, &ex.sigmas, eta)?,
        purities: purities(&source)?,
        moments: ex.moments,
        moment_sigmas: ex.sigmas,
        g_estimates: ex.gs,
        eta,
        eta_source,
        detected: ex.detected,
        source,
    })
}

pub fn run(args: ExtractPnArgs) -> Result<()> {
    with_manifest("extract-pn", &args.out, |m| {
        if let Some(sweep_dir) = &args.sweep {
            m.input(sweep_dir);
            return run_sweep(&args, sweep_dir, m);
        }
        let input = args
            .input
            .as_ref()
            .ok_or_else(|| Error::Config("input: pass --input or --sweep".into()))?;
        m.input(input);
        let stream = TimeTagStream::read(input)?;
        let ex = measure(&stream, args.window)?;
        let (eta, eta_source) = resolve_eta(&args, &ex.detected)?;
        let report = report_for(ex, eta, eta_source)?;
        serde_json::to_writer_pretty(BufWriter::new(File::create(&args.out)?), &report)
            .map_err(|e| Error::Data(e.to_string()))?;
        m.output(&args.out);
        println!(
            "eta = {:.4} ({}); source p = {:?}",
            report.eta, report.eta_source, report.source.p
        );
        Ok(())
    })
}

fn run_sweep(
    args: &ExtractPnArgs,
    sweep_dir: &Path,
    m: &mut crate::manifest::ManifestWriter,
) -> Result<()> {
    let index = sweep_dir.join("sweep.csv");
    let text = std::fs::read_to_string(&index)
        .map_err(|_| Error::Data(format!("missing sweep index {}", index.display())))?;
    let mut points: Vec<(f64, String)> = Vec::new();
    for line in text.lines().skip(1) {
        let Some((theta, path)) = line.split_once(',') else { continue };
        let theta: f64 = theta
            .trim()
            .parse()
            .map_err(|_| Error::Data(format!("bad sweep line: {line}")))?;
        points.push((theta, path.trim().to_string()));
    }
    if points.is_empty() {
        return Err(Error::Data("sweep index has no points".into()));
    }

    // transmission is calibrated once, at the point closest to pi
    let (eta, eta_source) = if let Some(eta) = args.eta {
        (eta, "given".to_string())
    } else if let Some(path) = &args.eta_from {
        let text = std::fs::read_to_string(path)?;
        let parsed: EtaOnly = serde_json::from_str(&text)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        (parsed.eta, format!("from {}", path.display()))
    } else {
        let (theta, path) = points
            .iter()
            .min_by(|a, b| {
                (a.0 - 1.0)
                    .abs()
                    .partial_cmp(&(b.0 - 1.0).abs())
                    .unwrap()
            })
            .unwrap();
        let stream = TimeTagStream::read(path)?;
        let ex = measure(&stream, args.window)?;
        (
            estimate_eta(&ex.detected)?,
            format!("estimated at theta = {theta} pi"),
        )
    };

    let mut w = BufWriter::new(File::create(&args.out)?);
    writeln!(w, "theta_over_pi,p0,p1,pi2,pi3,pi4")?;
    for (theta, path) in &points {
        let stream = TimeTagStream::read(path)?;
        let ex = measure(&stream, args.window)?;
        let source = invert_loss(&ex.detected, eta)?;
        let pur = purities(&source).unwrap_or([f64::NAN; 4]);
        debug_assert_eq!(source.level, DistLevel::Source);
        writeln!(
            w,
            "{theta:.3},{:.6},{:.6},{:.6},{:.6},{:.6}",
            source.p[0], source.p[1], pur[1], pur[2], pur[3]
        )?;
    }
    w.flush()?;
    m.output(&args.out);
    println!("eta = {eta:.4} ({eta_source}); {} sweep points", points.len());
    Ok(())
}
