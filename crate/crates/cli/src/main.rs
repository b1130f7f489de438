//! `photonstat` - simulate and analyze photon time-tag streams.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use photonstat_core::Error;

#[derive(Parser)]
#[command(name = "photonstat", version, about = "Photon-statistics toolkit: pulsed-emitter simulation and time-tag stream analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output tag file, or output directory in sweep mode.
    #[arg(long)]
    out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write source-level emission times as CSV.
    #[arg(long)]
    emissions_out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Input tag file.
    #[arg(long)]
    input: PathBuf,
    /// Correlation order m.
    #[arg(long, default_value_t = 2)]
    order: u8,
    /// Histogram bin width in ps (defaults: 25 for m=2, 3125 for m=3, one
    /// clock period for m=4).
    #[arg(long)]
    bin_width: Option<u64>,
    /// Delay range per axis in ps (defaults: 6 periods; 10 for m=4).
    #[arg(long)]
    max_delay: Option<u64>,
    /// Peak integration window in ps.
    #[arg(long, default_value_t = 3_000)]
    window: u64,
    /// Comma-separated detector channels (default 1,2,..,m).
    #[arg(long, value_delimiter = ',')]
    channels: Option<Vec<u16>>,
    /// Write the binned histogram CSV here.
    #[arg(long)]
    out_hist: Option<PathBuf>,
    /// Write the g-estimate JSON report here.
    #[arg(long)]
    out: PathBuf,
    /// Also estimate lower-order correlations from mixed peaks (m >= 3).
    #[arg(long)]
    slices: bool,
    /// Fit the clock-referenced lifetime histogram instead of correlating.
    #[arg(long)]
    lifetime: bool,
    /// Lifetime fit start, ps after the clock edge.
    #[arg(long, default_value_t = 250)]
    fit_start: u64,
}

#[derive(Args)]
struct ExtractPnArgs {
    /// Input tag file (single-file mode).
    #[arg(long, conflicts_with = "sweep")]
    input: Option<PathBuf>,
    /// Sweep directory written by `simulate` in sweep mode.
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Transmission to invert with.
    #[arg(long, conflicts_with = "eta_from")]
    eta: Option<f64>,
    /// Reuse the estimated eta from a previous extract-pn JSON report.
    #[arg(long)]
    eta_from: Option<PathBuf>,
    /// Estimate eta from this data assuming a pi-pulse drive (source emits
    /// at least one photon per pulse). In sweep mode this uses the point
    /// closest to pulse area pi.
    #[arg(long)]
    estimate_eta: bool,
    /// Peak integration window in ps.
    #[arg(long, default_value_t = 3_000)]
    window: u64,
    /// Output JSON report (single-file mode) or CSV (sweep mode).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GateScanArgs {
    /// Input tag file.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated gate starts, ps after the clock edge.
    #[arg(long, value_delimiter = ',')]
    t_start: Vec<u64>,
    /// Shared gate end, ps after the clock edge.
    #[arg(long, default_value_t = 12_400)]
    t_stop: u64,
    #[arg(long, default_value_t = 25)]
    bin_width: u64,
    #[arg(long)]
    max_delay: Option<u64>,
    #[arg(long, default_value_t = 3_000)]
    window: u64,
    /// The two channels to correlate.
    #[arg(long, value_delimiter = ',', default_values_t = [1u16, 2u16])]
    channels: Vec<u16>,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct HomArgs {
    /// Emission-times CSV written by `simulate --emissions-out`.
    #[arg(long)]
    emissions: PathBuf,
    /// Wavepacket decay time in ps.
    #[arg(long, default_value_t = 204.0)]
    tau: f64,
    /// Drive-pulse duration in ps (bounds the re-excitation modes).
    #[arg(long, default_value_t = 15.0)]
    pulse_duration: f64,
    /// Gate start for the gated overlap, ps from the pulse start.
    #[arg(long)]
    t_start: Option<f64>,
    /// Multi-photon correction input.
    #[arg(long, conflicts_with = "g2_from")]
    g2: Option<f64>,
    /// Read g2 from a correlate JSON report.
    #[arg(long)]
    g2_from: Option<PathBuf>,
    /// Measured central-peak coincidences of the interferometer.
    #[arg(long, requires = "reference")]
    central: Option<f64>,
    /// Measured reference coincidences.
    #[arg(long)]
    reference: Option<f64>,
    /// Peak-pattern normalization of the interferometer.
    #[arg(long, default_value_t = 2.0)]
    pattern_factor: f64,
    /// Optional tag file for the count-rate column.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Label for the pulse-area column.
    #[arg(long)]
    theta_over_pi: Option<f64>,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SelftestArgs {
    /// Pulses per reference source.
    #[arg(long, default_value_t = 200_000)]
    pulses: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a pulsed two-level emitter into a tag file.
    Simulate(SimulateArgs),
    /// Build coincidence histograms and estimate g^(m)(0), or fit the
    /// lifetime decay.
    Correlate(CorrelateArgs),
    /// Extract photon-number probabilities from a tag file.
    ExtractPn(ExtractPnArgs),
    /// Scan the gate start and report count rate and g2 per gate.
    GateScan(GateScanArgs),
    /// Hong-Ou-Mandel overlap and visibility analysis.
    Hom(HomArgs),
    /// Run the built-in oracle and reference-source checks.
    Selftest(SelftestArgs),
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 2,
        Error::Io(_) | Error::Format(_) | Error::NonMonotone(_) | Error::Data(_) => 3,
        Error::Numerics(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: could not configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Correlate(args) => commands::correlate::run(args),
        Command::ExtractPn(args) => commands::extract_pn::run(args),
        Command::GateScan(args) => commands::gate_scan::run(args),
        Command::Hom(args) => commands::hom::run(args),
        Command::Selftest(args) => commands::selftest::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
