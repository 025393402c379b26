use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chordal::commands::{cmd_cdf, cmd_margin, cmd_mc, cmd_nyquist, cmd_sysid, CommonOpts};
use chordal::config::ExperimentConfig;
use chordal::error::Error;

#[derive(Parser)]
#[command(
    name = "chordal",
    version,
    about = "Distribution of the chordal distance between uncertain and nominal frequency responses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the CDF of the chordal distance by quadrature
    Cdf {
        /// JSON experiment config
        #[arg(long)]
        config: PathBuf,
        /// Quadrature route: double-integral, ball, both, or mc
        #[arg(long, default_value = "ball")]
        method: String,
        #[command(flatten)]
        common: Common,
    },
    /// Sample the chordal distance; compare against cdf.csv when present
    Mc {
        #[arg(long)]
        config: PathBuf,
        /// Number of draws (default 1e6)
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Frequency response of the configured plant over the grid
    Nyquist {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Repeated-identification study: fits, kappa surface, gap histogram
    Sysid {
        #[arg(long)]
        config: PathBuf,
        /// Number of trials (default 200)
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Pointwise margins and the degradation inequality over sampled plants
    Margin {
        #[arg(long)]
        config: PathBuf,
        /// Perturbation draws per frequency (default 100)
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Base seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Quadrature tolerance override (sets both abs and rel)
    #[arg(long)]
    tol: Option<f64>,
    /// Also write SVG plots
    #[arg(long)]
    svg: bool,
}

impl Common {
    fn opts(&self) -> CommonOpts {
        CommonOpts {
            seed: self.seed,
            out_dir: self.out_dir.clone(),
            tol: self.tol,
            svg: self.svg,
        }
    }
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Cdf {
            config,
            method,
            common,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            cmd_cdf(&cfg, method.parse()?, &common.opts())
        }
        Command::Mc {
            config,
            samples,
            common,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            cmd_mc(&cfg, samples, &common.opts())
        }
        Command::Nyquist { config, common } => {
            let cfg = ExperimentConfig::load(&config)?;
            cmd_nyquist(&cfg, &common.opts())
        }
        Command::Sysid {
            config,
            trials,
            common,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            cmd_sysid(&cfg, trials, &common.opts())
        }
        Command::Margin {
            config,
            samples,
            common,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            cmd_margin(&cfg, samples, &common.opts())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
