use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thz_isac::experiment::{run_with_workers, to_csv, write_atomic, ExperimentConfig};
use thz_isac::Error;

/// THz ISAC waveform simulator: PAPR, sensing, BER and spectrum experiments.
#[derive(Parser)]
#[command(name = "thz-isac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a built-in experiment.
    Preset {
        #[arg(value_enum)]
        name: Preset,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// PAPR CCDF of the four waveforms.
    Fig3,
    /// Range RMSE of the four waveforms at 10 m, 20 km/h.
    Fig4,
}

#[derive(Args)]
struct Overrides {
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Frames or trials per waveform and grid.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        e if e.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

fn prepare(cmd: Command) -> Result<(ExperimentConfig, String, usize), Error> {
    let (mut cfg, default_name, ov) = match cmd {
        Command::Run { config, overrides } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let name = format!("{}.csv", cfg.experiment);
            (cfg, name, overrides)
        }
        Command::Preset { name, overrides } => match name {
            Preset::Fig3 => (ExperimentConfig::fig3(), "fig3.csv".to_string(), overrides),
            Preset::Fig4 => (ExperimentConfig::fig4(), "fig4.csv".to_string(), overrides),
        },
    };
    if let Some(out) = ov.out {
        cfg.output = Some(out);
    }
    if let Some(seed) = ov.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = ov.trials {
        cfg.trials = trials;
    }
    if ov.workers == 0 {
        return Err(Error::Config("--workers must be at least 1".into()));
    }
    cfg.validate()?;
    Ok((cfg, default_name, ov.workers))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, default_name, workers) = match prepare(cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let path = cfg.output_path(&default_name);
    let result = run_with_workers(&cfg, workers).and_then(|res| {
        write_atomic(&path, &to_csv(&res.records))?;
        Ok(res)
    });
    match result {
        Ok(res) => {
            for line in &res.summary {
                println!("{line}");
            }
            println!("wrote {} rows to {}", res.records.len(), path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
