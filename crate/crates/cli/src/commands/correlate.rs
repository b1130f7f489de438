use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;

use photonstat_core::correlator::{
    build_histogram, fit_lifetime, g_lower_order_slices, g_zero, lifetime_histogram, GEstimate,
    LifetimeFit,
};
use photonstat_core::{Result, TimeTagStream};

use crate::commands::default_geometry;
use crate::manifest::with_manifest;
use crate::CorrelateArgs;

#[derive(serde::Serialize)]
struct CorrelateReport {
    order: u8,
    bin_width: u64,
    max_delay: u64,
    window: u64,
    channels: Vec<u16>,
    g: GEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    slices: Option<BTreeMap<String, GEstimate>>,
}

#[derive(serde::Serialize)]
struct LifetimeReport {
    bin_width: u64,
    fit_start_ps: u64,
    total_counts: u64,
    fit: LifetimeFit,
}

pub fn run(args: CorrelateArgs) -> Result<()> {
    with_manifest("correlate", &args.out, |m| {
        m.input(&args.input);
        let stream = TimeTagStream::read(&args.input)?;

        if args.lifetime {
            let hist = lifetime_histogram(&stream, args.bin_width.unwrap_or(25))?;
            if let Some(hist_path) = &args.out_hist {
                hist.write_csv(BufWriter::new(File::create(hist_path)?))?;
                m.output(hist_path);
            }
            let fit = fit_lifetime(&hist, args.fit_start)?;
            let report = LifetimeReport {
                bin_width: hist.bin_width,
                fit_start_ps: args.fit_start,
                total_counts: hist.total(),
                fit,
            };
            serde_json::to_writer_pretty(BufWriter::new(File::create(&args.out)?), &report)
                .map_err(|e| photonstat_core::Error::Data(e.to_string()))?;
            m.output(&args.out);
            println!("tau = {:.2} ps", fit.tau_ps);
            return Ok(());
        }

        let (dbw, dmd) = default_geometry(args.order, stream.clock_period());
        let bin_width = args.bin_width.unwrap_or(dbw);
        let max_delay = args.max_delay.unwrap_or(dmd);
        let default_channels: Vec<u16> = (1..=args.order as u16).collect();
        let channels = args.channels.clone().unwrap_or(default_channels);

        let h = build_histogram(&stream, args.order, bin_width, max_delay, &channels)?;
        if let Some(hist_path) = &args.out_hist {
            h.write_csv(BufWriter::new(File::create(hist_path)?))?;
            m.output(hist_path);
        }
        let g = g_zero(&h, args.window)?;
        let slices = if args.slices && args.order >= 3 {
            Some(g_lower_order_slices(&h, args.window)?)
        } else {
            None
        };
        println!(
            "g{}(0) = {:.4} (-{:.4}/+{:.4})  N_c = {}  N_u = {:.3} over {} peaks",
            args.order, g.value, g.sigma_low, g.sigma_up, g.n_c, g.n_u_mean, g.n_uncorrelated_peaks
        );
        let report = CorrelateReport {
            order: args.order,
            bin_width,
            max_delay,
            window: args.window,
            channels,
            g,
            slices,
        };
        serde_json::to_writer_pretty(BufWriter::new(File::create(&args.out)?), &report)
            .map_err(|e| photonstat_core::Error::Data(e.to_string()))?;
        m.output(&args.out);
        Ok(())
    })
}
