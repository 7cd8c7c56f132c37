//! Runs the attitude-fusion noise sweep and writes one CSV row per `τ`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use lieflow::experiments::{self, ExperimentConfig, ObservationKind};
use lieflow::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Euclidean,
    Group,
}

#[derive(Debug, Parser)]
#[command(about = "Plain vs. group-corrected Kalman update on SO(3) over a noise sweep")]
struct Args {
    #[arg(long, value_enum)]
    model: Model,
    /// Samples per noise level
    #[arg(long, default_value_t = experiments::DEFAULT_SAMPLES)]
    n: usize,
    #[arg(long, default_value_t = experiments::DEFAULT_TAU_MIN)]
    tau_min: f64,
    #[arg(long, default_value_t = experiments::DEFAULT_TAU_MAX)]
    tau_max: f64,
    #[arg(long, default_value_t = experiments::DEFAULT_TAU_POINTS)]
    tau_points: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write `<out>.gp`, a gnuplot script for the CSV
    #[arg(long)]
    emit_gnuplot: bool,
    /// Fill the wall_ms column with measured times (output is then no longer
    /// reproducible byte for byte)
    #[arg(long)]
    wall_time: bool,
}

fn run(args: &Args) -> lieflow::Result<()> {
    let cfg = ExperimentConfig {
        model: match args.model {
            Model::Euclidean => ObservationKind::Euclidean,
            Model::Group => ObservationKind::Group,
        },
        samples: args.n,
        taus: experiments::tau_grid(args.tau_min, args.tau_max, args.tau_points)?,
        seed: args.seed,
        wall_time: args.wall_time,
    };
    let records = experiments::run_sweep(&cfg)?;
    experiments::emit_csv(&records, &args.out)?;
    if args.emit_gnuplot {
        let mut script = args.out.clone().into_os_string();
        script.push(".gp");
        experiments::emit_gnuplot(&args.out, &PathBuf::from(script))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ExclusionBound { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
