//! Command-line front end. Exit codes: 0 success, 1 runtime failure, 2 usage.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::estimators::{self, DEFAULT_ETA};
use crate::io;
use crate::mp_law::{MpLaw, Probability};
use crate::simulate::{self, ExperimentConfig, NoiseKind, Schedule};
use crate::spectral;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "usvt", version, about = "Noise-level estimation and adaptive singular value thresholding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a quantile of the Marčenko–Pastur law.
    MpQuantile {
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
    /// Print the noise-level estimate of a matrix file.
    EstimateSigma {
        #[arg(long)]
        input: PathBuf,
    },
    /// Threshold a matrix file and write the estimate plus a JSON report.
    Denoise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: f64,
        /// Known noise level; when absent the level is estimated.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Run a Monte Carlo study and write per-cell results and a summary.
    Simulate(SimulateArgs),
    /// Print singular values, largest first, one per line.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary: PathBuf,
    /// Write a gnuplot script over the summary CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Evaluate cells on the calling thread only.
    #[arg(long)]
    serial: bool,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(Error::Io(e))
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing data to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::MpQuantile { gamma, p } => {
            let law = MpLaw::new(gamma).map_err(|e| Failure::Usage(e.to_string()))?;
            let p = Probability::new(p).map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(out, "{}", io::format_significant(law.quantile(p), 15))?;
        }
        Command::EstimateSigma { input } => {
            let x = io::read_matrix(&input)?;
            writeln!(out, "{}", io::format_float(estimators::estimate_sigma(&x)?))?;
        }
        Command::Denoise {
            input,
            eta,
            sigma,
            output,
            report,
        } => {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Failure::Usage(format!("--eta must lie in (0, 1], got {eta}")));
            }
            if let Some(s) = sigma {
                if !(s >= 0.0 && s.is_finite()) {
                    return Err(Failure::Usage(format!("--sigma must be finite and >= 0, got {s}")));
                }
            }
            let x = io::read_matrix(&input)?;
            let (estimate, audit) = match sigma {
                Some(s) => estimators::usvt_denoise(&x, s, eta)?,
                None => estimators::usvt_adaptive(&x, eta)?,
            };
            io::write_matrix(&output, &estimate)?;
            fs::write(&report, io::render_report(&audit))?;
        }
        Command::Simulate(args) => simulate(args)?,
        Command::Spectrum { input } => {
            let x = io::read_matrix(&input)?;
            for v in spectral::singular_values(&x)? {
                writeln!(out, "{}", io::format_float(v))?;
            }
        }
    }
    Ok(())
}

fn config_from(args: &SimulateArgs) -> Result<ExperimentConfig, Failure> {
    let usage = |e: Error| Failure::Usage(e.to_string());
    let mut config = match &args.preset {
        Some(name) => ExperimentConfig::preset(name).map_err(usage)?,
        None => {
            let missing: Vec<&str> = [
                ("--m", args.m.is_none()),
                ("--n", args.n.is_none()),
                ("--ranks", args.ranks.is_none()),
                ("--sigmas", args.sigmas.is_none()),
            ]
            .into_iter()
            .filter_map(|(flag, absent)| absent.then_some(flag))
            .collect();
            if !missing.is_empty() {
                return Err(Failure::Usage(format!(
                    "without --preset the following flags are required: {}",
                    missing.join(", ")
                )));
            }
            ExperimentConfig {
                m: 0,
                n: 0,
                ranks: Vec::new(),
                sigmas: Vec::new(),
                replications: 1,
                eta: DEFAULT_ETA,
                noise_kind: NoiseKind::Gaussian,
                seed: 0,
            }
        }
    };
    if let Some(m) = args.m {
        config.m = m;
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(r) = &args.ranks {
        config.ranks = r.clone();
    }
    if let Some(s) = &args.sigmas {
        config.sigmas = s.clone();
    }
    if let Some(r) = args.reps {
        config.replications = r;
    }
    if let Some(eta) = args.eta {
        config.eta = eta;
    }
    if let Some(noise) = &args.noise {
        config.noise_kind = noise.parse().map_err(usage)?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate().map_err(usage)?;
    Ok(config)
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let config = config_from(&args)?;
    let schedule = if args.serial {
        Schedule::Serial
    } else {
        Schedule::Parallel
    };
    let records = simulate::run_experiment_with(&config, schedule)?;
    let summary = simulate::aggregate(&records)?;
    fs::write(&args.out, io::render_results(&records))?;
    fs::write(&args.summary, io::render_summary(&summary))?;
    if let Some(plot) = &args.plot {
        let summary_path = args.summary.to_string_lossy();
        fs::write(plot, io::render_plot_script(&summary_path, &config.ranks))?;
    }
    Ok(())
}
