use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tsr_sim::commands::{run_compare, run_design, run_doublet, run_nsd, DesignInput};
use tsr_sim::config::Format;
use tsr_sim::output::{write_report, Report};
use tsr_sim::{CliError, RunConfig};

/// Twin-signal-recycling interferometer simulator.
#[derive(Debug, Parser)]
#[command(name = "tsr-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Resonance doublet of the coupled recycling cavities.
    Doublet(Common),
    /// Coupling-mirror transmission for a requested splitting.
    Design {
        #[command(flatten)]
        io: OutputArgs,
        /// TSR config supplying defaults for the flags below.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Splitting f_sp in Hz.
        #[arg(long)]
        fsp: Option<f64>,
        /// Length of the input cavity in m.
        #[arg(long)]
        l1: Option<f64>,
        /// Length of the inner cavity in m.
        #[arg(long)]
        l2: Option<f64>,
        /// Amplitude reflectivity of the end mirror.
        #[arg(long = "rho-end")]
        rho_end: Option<f64>,
    },
    /// Quantum noise spectral density.
    Nsd(Common),
    /// TSR against detuned SR of both sidebands.
    Compare(Common),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    io: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; overrides the config. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; overrides the config.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TSR_SIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "TSR_SIM_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size thread pool: {e}")))
}

fn emit(report: &Report, cfg: Option<&RunConfig>, io: &OutputArgs) -> Result<(), CliError> {
    let format = io
        .format
        .map(Format::from)
        .or(cfg.map(|c| c.output.format))
        .unwrap_or_default();
    let path = io
        .out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.path.clone()));
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match path {
        Some(path) => {
            let file = File::create(&path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            write_report(report, format, &mut w)?;
            w.flush().map_err(|source| CliError::Io { path, source })?;
            print!("{}", report.summary_text());
        }
        None => {
            let stdout = io::stdout();
            write_report(report, format, stdout.lock())?;
            eprint!("{}", report.summary_text());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Doublet(c) => {
            let cfg = RunConfig::load(&c.config)?;
            emit(&run_doublet(&cfg)?, Some(&cfg), &c.io)
        }
        Command::Nsd(c) => {
            let cfg = RunConfig::load(&c.config)?;
            emit(&run_nsd(&cfg)?, Some(&cfg), &c.io)
        }
        Command::Compare(c) => {
            let cfg = RunConfig::load(&c.config)?;
            emit(&run_compare(&cfg)?, Some(&cfg), &c.io)
        }
        Command::Design {
            io,
            config,
            fsp,
            l1,
            l2,
            rho_end,
        } => {
            let cfg = config.as_deref().map(RunConfig::load).transpose()?;
            let input = DesignInput::from_parts(cfg.as_ref(), fsp, l1, l2, rho_end)?;
            emit(&run_design(&input)?, cfg.as_ref(), &io)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
