use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iris_hmd::synth::{write_dataset, SessionStyle};
use iris_hmd::{DistanceKind, EncoderKind};
use iris_hmd_cli::{bench, prepare, report, trust, verify, CliError, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "iris-hmd", version, about = "Iris verification and continuous-trust pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean labels, fit circles and unroll every capture.
    Prepare(Common),
    /// Split, encode, score and compute metrics for each setting.
    Verify(Common),
    /// Simulate genuine and impostor trust sessions.
    Trust(Common),
    /// Time encoders and matchers on prepared data.
    Bench(Common),
    /// Summarize all outputs as markdown.
    Report(Common),
    /// Write a synthetic dataset in the expected layout.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated IMR thresholds.
    #[arg(long = "imr-th", value_delimiter = ',')]
    imr_th: Option<Vec<f64>>,
    /// Comma-separated encoders (LG, DCT, CSBCA).
    #[arg(long, value_delimiter = ',')]
    encoder: Option<Vec<EncoderKind>>,
    /// Comma-separated distances (HD, SHD).
    #[arg(long, value_delimiter = ',')]
    distance: Option<Vec<DistanceKind>>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 28)]
    identities: usize,
    #[arg(long, default_value_t = 86)]
    frames: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn load_config(c: Common) -> Result<RunConfig, CliError> {
    let mut config = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    config.apply(Overrides {
        dataset: c.dataset,
        out: c.out,
        imr_thresholds: c.imr_th,
        encoders: c.encoder,
        distances: c.distance,
        seed: c.seed,
    });
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Prepare(c) => {
            let s = prepare::cmd_prepare(&load_config(c)?)?;
            println!(
                "prepared {} captures from {} identities ({} failed geometry)",
                s.captures, s.identities, s.failures
            );
        }
        Command::Verify(c) => {
            let s = verify::cmd_verify(&load_config(c)?)?;
            for r in &s.reports {
                println!(
                    "{}-{} IMR {:.2}: EER {:.4} (T {:.4}) FMR10 {:.4} AUC {:.4}  [{} genuine, {} impostor]",
                    r.encoder,
                    r.distance_kind,
                    r.imr_threshold,
                    r.metrics.eer,
                    r.metrics.eer_threshold,
                    r.metrics.fmr10,
                    r.metrics.auc,
                    r.metrics.n_genuine,
                    r.metrics.n_impostor
                );
            }
            println!("lowest selected-reference IMR: {:.4}", s.min_reference_imr);
        }
        Command::Trust(c) => {
            let s = trust::cmd_trust(&load_config(c)?)?;
            for p in &s.points {
                println!("IMR {:.2}: T = {:.4}", p.imr_threshold, p.threshold);
            }
            println!("wrote {} rows to {}", s.identities.len(), trust::SESSIONS_FILE);
        }
        Command::Bench(c) => {
            let r = bench::cmd_bench(&load_config(c)?)?;
            print!("{}", bench::render_bench(&r));
        }
        Command::Report(c) => {
            print!("{}", report::cmd_report(&load_config(c)?)?);
        }
        Command::Synth(a) => {
            write_dataset(&a.out, a.identities, a.frames, a.seed, &SessionStyle::default())
                .map_err(|e| CliError::Dataset(e.to_string()))?;
            println!("wrote {} x {} captures to {}", a.identities, a.frames, a.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
