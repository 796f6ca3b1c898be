use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ringcap_cli::{advise, run_sweep, write_csv, Engine, ExperimentConfig, StrategyChoice};

/// Segment utilization and capacity of a WDM packet ring with a hotspot.
#[derive(Parser)]
#[command(name = "ringcap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every point of a config and write CSV.
    Sweep(Common),
    /// Print the routing recommendation for a single scenario.
    Advise(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Override a config entry, e.g. `--set traffic.gamma=0.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyChoice>,
    /// Worker threads; simulation results depend on seed and thread count.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut overrides = self.set.clone();
        if let Some(s) = self.seed {
            overrides.push(format!("run.seed={s}"));
        }
        if let Some(e) = self.engine {
            overrides.push(format!("run.engine=\"{e}\""));
        }
        if let Some(s) = self.strategy {
            let name = match s {
                StrategyChoice::Sp => "sp",
                StrategyChoice::Oc => "oc",
                StrategyChoice::Auto => "auto",
                StrategyChoice::Both => "both",
            };
            overrides.push(format!("run.strategy=\"{name}\""));
        }
        if let Some(t) = self.threads {
            overrides.push(format!("run.threads={t}"));
        }
        Ok(ExperimentConfig::load(&self.config, &overrides)?)
    }

    fn sink(&self, cfg: &ExperimentConfig) -> Result<Box<dyn Write>> {
        match self.out.as_ref().or(cfg.output.as_ref()) {
            Some(path) => {
                let f =
                    File::create(path).with_context(|| format!("creating {}", path.display()))?;
                Ok(Box::new(BufWriter::new(f)))
            }
            None => Ok(Box::new(io::stdout().lock())),
        }
    }
}

/// Exit status 2: finished, but some simulation hit its sample cap.
const FLAGGED: u8 = 2;

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = args.load()?;
            let out = run_sweep(&cfg)?;
            let mut sink = args.sink(&cfg)?;
            write_csv(&out.rows, &mut sink)?;
            sink.flush()?;
            if out.flagged > 0 {
                eprintln!("warning: {} row(s) did not converge", out.flagged);
                return Ok(FLAGGED);
            }
            Ok(0)
        }
        Command::Advise(args) => {
            let cfg = args.load()?;
            let advice = advise(&cfg)?;
            let mut sink = args.sink(&cfg)?;
            writeln!(sink, "{advice}")?;
            sink.flush()?;
            Ok(if advice.flagged() { FLAGGED } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
