use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use photonstat_core::hom::{correct_visibility, pulse_pair_overlap, visibility_from_counts};
use photonstat_core::sim::EmissionRecord;
use photonstat_core::{Error, Result, TimeTagStream};

use crate::manifest::with_manifest;
use crate::HomArgs;

fn read_emissions_csv(path: &Path) -> Result<Vec<EmissionRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut records: Vec<EmissionRecord> = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (Some(pulse), Some(_), Some(time)) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Data(format!(
                "{}:{}: expected pulse_index,emission_index,time_ps",
                path.display(),
                lineno + 1
            )));
        };
        let pulse: u64 = pulse
            .trim()
            .parse()
            .map_err(|_| Error::Data(format!("{}:{}: bad pulse index", path.display(), lineno + 1)))?;
        let time: f64 = time
            .trim()
            .parse()
            .map_err(|_| Error::Data(format!("{}:{}: bad time", path.display(), lineno + 1)))?;
        match records.last_mut() {
            Some(last) if last.pulse_index == pulse => last.emission_times.push(time),
            _ => records.push(EmissionRecord {
                pulse_index: pulse,
                emission_times: vec![time],
            }),
        }
    }
    if records.is_empty() {
        return Err(Error::Data(format!(
            "{}: no emission records",
            path.display()
        )));
    }
    Ok(records)
}

#[derive(serde::Deserialize)]
struct GReportSlim {
    g: GSlim,
}

#[derive(serde::Deserialize)]
struct GSlim {
    value: f64,
}

pub fn run(args: HomArgs) -> Result<()> {
    with_manifest("hom", &args.out, |m| {
        m.input(&args.emissions);
        let records = read_emissions_csv(&args.emissions)?;
        let overlap = pulse_pair_overlap(&records, args.tau, args.pulse_duration, None)?;
        let gated = match args.t_start {
            Some(t) => Some(pulse_pair_overlap(
                &records,
                args.tau,
                args.pulse_duration,
                Some(t),
            )?),
            None => None,
        };

        let g2 = if let Some(g2) = args.g2 {
            Some(g2)
        } else if let Some(path) = &args.g2_from {
            let text = std::fs::read_to_string(path)?;
            let parsed: GReportSlim = serde_json::from_str(&text)
                .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
            Some(parsed.g.value)
        } else {
            None
        };

        // raw visibility: measured from counts when given, otherwise the
        // model-implied value V = M (1 - g2) - g2
        let v_raw = match (args.central, args.reference) {
            (Some(c), Some(r)) => Some(visibility_from_counts(c, r, args.pattern_factor)?),
            _ => g2.map(|g| overlap * (1.0 - g) - g),
        };
        let corrected = match (v_raw, g2) {
            (Some(v), Some(g)) => Some(correct_visibility(v, g)?),
            _ => None,
        };

        let count_rate = match &args.input {
            Some(path) => {
                m.input(path);
                let stream = TimeTagStream::read(path)?;
                let seconds = stream.n_periods() as f64 * stream.clock_period() as f64 * 1e-12;
                Some(stream.detector_count() as f64 / seconds)
            }
            None => None,
        };

        let fmt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
        let mut w = BufWriter::new(File::create(&args.out)?);
        writeln!(w, "theta_over_pi,v_raw,g2,m_overlap,v_gated,count_rate_hz")?;
        writeln!(
            w,
            "{},{},{},{:.6},{},{}",
            fmt(args.theta_over_pi),
            fmt(v_raw),
            fmt(g2),
            corrected.unwrap_or(overlap),
            fmt(gated),
            fmt(count_rate),
        )?;
        w.flush()?;
        m.output(&args.out);
        println!(
            "M = {:.4} (sampled overlap {:.4}{})",
            corrected.unwrap_or(overlap),
            overlap,
            gated.map_or(String::new(), |g| format!(", gated {g:.4}"))
        );
        Ok(())
    })
}
