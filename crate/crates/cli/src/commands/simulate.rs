use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use photonstat_core::config::SimConfig;
use photonstat_core::sim::{simulate_detected, simulate_emissions, EmissionRecord};
use photonstat_core::{Error, Result};

use crate::manifest::with_manifest;
use crate::SimulateArgs;

pub fn run(args: SimulateArgs) -> Result<()> {
    with_manifest("simulate", &args.out, |m| {
        let mut cfg = SimConfig::load(&args.config)?;
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        m.config(&cfg);
        m.seed(cfg.seed);
        m.input(&args.config);

        if let Some(sweep) = cfg.theta_sweep {
            let points = sweep.points()?;
            std::fs::create_dir_all(&args.out)?;
            let index_path = args.out.join("sweep.csv");
            let mut index = BufWriter::new(File::create(&index_path)?);
            writeln!(index, "theta_over_pi,path")?;
            for (k, theta) in points.iter().enumerate() {
                let mut point_cfg = cfg.clone();
                point_cfg.pulse_area_pi = *theta;
                point_cfg.theta_sweep = None;
                // one deterministic substream per sweep point
                point_cfg.seed = cfg.seed.wrapping_add(k as u64);
                let path = args.out.join(format!("theta_{theta:.3}.ptag"));
                write_point(&point_cfg, &path, None)?;
                writeln!(index, "{theta:.3},{}", path.display())?;
                m.output(&path);
            }
            index.flush()?;
            m.output(&index_path);
            Ok(())
        } else {
            write_point(&cfg, &args.out, args.emissions_out.as_deref())?;
            m.output(&args.out);
            if let Some(em) = &args.emissions_out {
                m.output(em);
            }
            Ok(())
        }
    })
}

fn write_point(cfg: &SimConfig, out: &Path, emissions_out: Option<&Path>) -> Result<()> {
    let emitter = cfg.emitter()?;
    let det = cfg.detection()?;
    if let Some(em_path) = emissions_out {
        // record-keeping path: materialize emissions so they can be exported
        let records = simulate_emissions(&emitter)?;
        write_emissions_csv(&records, em_path)?;
        let stream = photonstat_core::sim::detect(
            &records,
            &det,
            emitter.repetition_period_ps,
            emitter.seed,
        )?;
        stream.write(out)
    } else {
        let (stream, _) = simulate_detected(&emitter, &det, emitter.seed)?;
        stream.write(out)
    }
}

fn write_emissions_csv(records: &[EmissionRecord], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "pulse_index,emission_index,time_ps").map_err(Error::Io)?;
    for r in records {
        for (j, t) in r.emission_times.iter().enumerate() {
            writeln!(w, "{},{},{:.4}", r.pulse_index, j, t)?;
        }
    }
    w.flush()?;
    Ok(())
}
