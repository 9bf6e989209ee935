use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cutsplit::experiments::{
    condition_study, run_delta_sweep, run_fd_study, run_interface_study, write_csv, write_markdown,
    Table,
};
use cutsplit::{Discretization, ExperimentConfig, MeshHierarchy, PreconditionerKind, ProblemKind};

#[derive(Parser)]
#[command(
    name = "cutsplit",
    version,
    about = "CutFEM subspace-splitting preconditioner studies"
)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config; missing keys take their defaults.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output_dir`, default `results`).
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,

    /// Finest level of the level studies.
    #[arg(long, global = true)]
    max_level: Option<usize>,

    /// Drop the ghost penalty (beta = 0) and use gamma = 100.
    #[arg(long, global = true)]
    unstabilized: bool,

    /// Preconditioners to run, comma separated (sgs, pa, pd, pb).
    #[arg(long, global = true, value_delimiter = ',')]
    preconditioners: Option<Vec<PreconditionerKind>>,

    /// Skip condition number estimates.
    #[arg(long, global = true)]
    no_condition: bool,

    /// Do not print the Markdown table.
    #[arg(short, long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Interface,
    Fictitious,
}

impl From<Problem> for ProblemKind {
    fn from(p: Problem) -> Self {
        match p {
            Problem::Interface => ProblemKind::Interface,
            Problem::Fictitious => ProblemKind::Fictitious,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions, errors, orders, condition numbers and PCG iterations per level.
    InterfaceStudy,
    /// The same table for the fictitious-domain problem.
    FdStudy,
    /// Interface problem with the ball centred at (d, 2d, 3d).
    DeltaSweep {
        /// Mesh level (overrides `delta_level`).
        #[arg(long)]
        level: Option<usize>,
    },
    /// Condition numbers of A_hat, of the block-scaled and of the scaled A1 matrix.
    Cond {
        #[arg(long, value_enum)]
        problem: Option<Problem>,
    },
    /// Matrix Market files of A, L, A_hat, A0, A1 and the mesh dump.
    ExportMatrices {
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, value_enum)]
        problem: Option<Problem>,
        /// Shift the ball centre to (d, 2d, 3d).
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Print the default config as TOML.
    DefaultConfig,
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(l) = common.max_level {
        cfg.max_level = l;
    }
    if common.unstabilized {
        cfg = cfg.unstabilized();
    }
    if let Some(p) = &common.preconditioners {
        cfg.preconditioners = p.clone();
    }
    if common.no_condition {
        cfg.condition = false;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("results"))
}

/// Writes `<name>.csv`, `<name>.md` and the raw rows as `<name>.json`.
fn emit(table: &Table, json: String, dir: &Path, name: &str, quiet: bool) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv = dir.join(format!("{name}.csv"));
    let md = dir.join(format!("{name}.md"));
    let js = dir.join(format!("{name}.json"));
    write_csv(table, &csv).with_context(|| format!("writing {}", csv.display()))?;
    write_markdown(table, &md).with_context(|| format!("writing {}", md.display()))?;
    std::fs::write(&js, json).with_context(|| format!("writing {}", js.display()))?;
    if !quiet {
        print!("{}", table.to_markdown());
    }
    eprintln!(
        "wrote {}, {} and {}",
        csv.display(),
        md.display(),
        js.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli.common)?;
    let dir = output_dir(&cfg);
    let quiet = cli.common.quiet;
    match cli.command {
        Command::InterfaceStudy => {
            let rows = run_interface_study(&cfg)?;
            emit(
                &Table::from_levels(&rows),
                serde_json::to_string_pretty(&rows)?,
                &dir,
                "interface_study",
                quiet,
            )?;
        }
        Command::FdStudy => {
            let rows = run_fd_study(&cfg)?;
            emit(
                &Table::from_levels(&rows),
                serde_json::to_string_pretty(&rows)?,
                &dir,
                "fd_study",
                quiet,
            )?;
        }
        Command::DeltaSweep { level } => {
            if let Some(l) = level {
                cfg.delta_level = l;
                cfg.validate()?;
            }
            let rows = run_delta_sweep(&cfg)?;
            emit(
                &Table::from_deltas(&rows),
                serde_json::to_string_pretty(&rows)?,
                &dir,
                "delta_sweep",
                quiet,
            )?;
        }
        Command::Cond { problem } => {
            if let Some(p) = problem {
                cfg.problem = p.into();
            }
            let rows = condition_study(&cfg)?;
            emit(
                &Table::from_conditions(&rows),
                serde_json::to_string_pretty(&rows)?,
                &dir,
                "condition",
                quiet,
            )?;
        }
        Command::ExportMatrices {
            level,
            problem,
            delta,
        } => {
            let kind = problem.map_or(cfg.problem, Into::into);
            let center = delta.map_or(cfg.center, |d| [d, 2.0 * d, 3.0 * d]);
            let d = Discretization::new(
                MeshHierarchy::standard(level),
                kind,
                center,
                &cfg.coefficients,
                cfg.quadrature_order,
            )?;
            for path in d.export(&dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::DefaultConfig => print!("{}", ExperimentConfig::default().to_toml_string()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
