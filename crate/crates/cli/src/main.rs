use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wehnet::sim::SimSettings;
use wehnet_cli::commands::{self, Z_LIMIT};
use wehnet_cli::{load_config, load_sweep, CliError, SweepMode, SweepSimulation};

#[derive(Parser)]
#[command(name = "wehnet", version, about = "Message exchange and energy harvesting in dense random networks")]
struct Cli {
    /// Worker threads for Monte-Carlo runs (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every analytic metric of a configuration as JSON.
    Analytic {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare Monte-Carlo estimates with the analytic model (CSV).
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[command(flatten)]
        sim: SimFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a parameter sweep (CSV, one row per grid point).
    Sweep {
        #[arg(long)]
        sweep: PathBuf,
        /// analytic, simulate, both or timeseries
        #[arg(long, default_value = "analytic")]
        mode: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[command(flatten)]
        sim: SimFlags,
        /// Samples along the time axis in timeseries mode.
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intensity maximizing the rectified harvested power (JSON).
    Optimal {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SimFlags {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Torus side in meters.
    #[arg(long, default_value_t = 200.0)]
    side: f64,
    /// Interferers beyond this distance (m) enter through their mean; 0 sums all of them.
    #[arg(long, default_value_t = 20.0)]
    radius: f64,
    /// Receivers sampled per point set and slot; 0 uses every node.
    #[arg(long, default_value_t = 256)]
    probes: usize,
}

impl SimFlags {
    fn settings(&self) -> SimSettings {
        SimSettings {
            side: self.side,
            interference_radius: (self.radius > 0.0).then_some(self.radius),
            probes: (self.probes > 0).then_some(self.probes),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    match cli.command {
        Command::Analytic { config, out } => {
            let cfg = load_config(&config)?;
            emit(out.as_deref(), &commands::analytic(&cfg)?)
        }
        Command::Optimal { config, out } => {
            let cfg = load_config(&config)?;
            emit(out.as_deref(), &commands::optimal_json(&cfg)?)
        }
        Command::Validate { config, n, sim, out } => {
            let cfg = load_config(&config)?;
            let table = commands::validate(&cfg, n, sim.seed, &sim.settings())?;
            emit(out.as_deref(), &table.to_csv()?)?;
            let worst = table.max_abs_z();
            if worst > Z_LIMIT {
                let names: Vec<&str> = table
                    .rows
                    .iter()
                    .filter(|r| r.z_score.abs() > Z_LIMIT)
                    .map(|r| r.metric.as_str())
                    .collect();
                return Err(CliError::Disagreement(format!(
                    "|z| > {Z_LIMIT} for {} (worst {worst:.2})",
                    names.join(", ")
                )));
            }
            Ok(())
        }
        Command::Sweep { sweep, mode, n, sim, points, out } => {
            let spec = load_sweep(&sweep)?;
            let mode: SweepMode = mode.parse()?;
            let options = SweepSimulation { n, seed: sim.seed, settings: sim.settings() };
            emit(out.as_deref(), &commands::sweep(&spec, mode, &options, points)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
