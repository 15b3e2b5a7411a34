use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use pldg::config::{ExperimentConfig, Mode};
use pldg::presets::{preset, presets};
use pldg::report::{convergence_csv, projection_csv};
use pldg::{run_convergence_suite, run_projection_suite};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// p-version LDG convergence and projection studies.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the CSV report here (overrides the config's output path).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for the sweep (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// CFL number for the explicit time stepper.
    #[arg(long, global = true)]
    cfl: Option<f64>,

    /// Skip the time-step halving audit.
    #[arg(long, global = true)]
    no_audit: bool,

    /// Default directory for reports (`<dir>/<experiment>.csv`).
    #[arg(long, env = "PLDG_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an LDG convergence sweep described by a TOML file.
    Converge { config: PathBuf },
    /// Run a projection-rate sweep described by a TOML file.
    Project { config: PathBuf },
    /// Run a builtin experiment.
    Preset {
        name: String,
        /// Print the preset's configuration instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// List builtin experiments.
    ListPresets,
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ExperimentConfig::from_toml(&text)?)
}

fn run(cli: &Cli, mut cfg: ExperimentConfig, expected: Option<Mode>) -> Result<bool> {
    if let Some(mode) = expected {
        if cfg.mode != mode {
            bail!("{}: configuration has mode {:?}", cfg.name, cfg.mode);
        }
    }
    if let Some(cfl) = cli.cfl {
        cfg.run.cfl = cfl;
    }
    if cli.no_audit {
        cfg.run.audit = false;
    }
    let (csv, passed) = match cfg.mode {
        Mode::Converge => {
            let report = run_convergence_suite(&cfg, cli.workers)?;
            (convergence_csv(&report, &cfg), report.passed)
        }
        Mode::Project => {
            let report = run_projection_suite(&cfg)?;
            (projection_csv(&report), report.passed())
        }
    };
    let target = cli
        .out
        .clone()
        .or_else(|| cfg.run.output.clone())
        .or_else(|| {
            cli.out_dir
                .as_ref()
                .map(|d| d.join(format!("{}.csv", cfg.name)))
        });
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(&path, &csv).with_context(|| format!("writing {}", path.display()))?;
            for line in csv.lines().filter(|l| l.starts_with('#')) {
                println!("{line}");
            }
        }
        None => print!("{csv}"),
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Converge { config } => {
            load(config).and_then(|c| run(&cli, c, Some(Mode::Converge)))
        }
        Command::Project { config } => load(config).and_then(|c| run(&cli, c, Some(Mode::Project))),
        Command::Preset { name, print } => match preset(name) {
            None => Err(anyhow::anyhow!("unknown preset {name:?}; see list-presets")),
            Some(cfg) if *print => {
                print!("{}", cfg.to_toml());
                Ok(true)
            }
            Some(cfg) => run(&cli, cfg, None),
        },
        Command::ListPresets => {
            for p in presets() {
                let mode = match p.mode {
                    Mode::Converge => "converge",
                    Mode::Project => "project",
                };
                println!("{:<24} {mode}", p.name);
            }
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
