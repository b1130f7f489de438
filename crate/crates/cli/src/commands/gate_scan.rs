use std::fs::File;
use std::io::{BufWriter, Write};

use photonstat_core::correlator::gated_g2_scan;
use photonstat_core::{Error, Result, TimeTagStream};

use crate::manifest::with_manifest;
use crate::GateScanArgs;

pub fn run(args: GateScanArgs) -> Result<()> {
    with_manifest("gate-scan", &args.out, |m| {
        m.input(&args.input);
        if args.channels.len() != 2 {
            return Err(Error::Config(format!(
                "channels: gate scan correlates exactly 2 channels, got {:?}",
                args.channels
            )));
        }
        let stream = TimeTagStream::read(&args.input)?;
        let max_delay = args.max_delay.unwrap_or(6 * stream.clock_period());
        let scan = gated_g2_scan(
            &stream,
            &args.t_start,
            args.t_stop,
            args.bin_width,
            max_delay,
            args.window,
            (args.channels[0], args.channels[1]),
        )?;
        let mut w = BufWriter::new(File::create(&args.out)?);
        writeln!(w, "t_start_ps,count_rate_hz,g2,sigma_low,sigma_up")?;
        for pt in &scan {
            writeln!(
                w,
                "{},{:.6e},{:.6},{:.6},{:.6}",
                pt.t_start, pt.count_rate_hz, pt.g2.value, pt.g2.sigma_low, pt.g2.sigma_up
            )?;
            println!(
                "t_start {:>6} ps: rate {:.3e} Hz, g2 = {:.4} (-{:.4}/+{:.4})",
                pt.t_start, pt.count_rate_hz, pt.g2.value, pt.g2.sigma_low, pt.g2.sigma_up
            );
        }
        w.flush()?;
        m.output(&args.out);
        Ok(())
    })
}
