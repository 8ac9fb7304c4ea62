use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "finetti", version, about = "Symmetric-extension tests and Martin-boundary checks for U(n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a bipartite state for l-extendability at levels 2..=LEVELS.
    ExtendCheck {
        /// Bipartite state in matrix JSON, legs [m, n].
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Separability verdicts along the Werner family.
    ScanWerner {
        /// Grid of p values as start:stop:step.
        #[arg(long, default_value = "0:1:0.05")]
        grid: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Boundary report for a group-like matrix or a sequence bundle.
    Boundary {
        /// Invertible n x n matrix, or a bundle {header, entries}.
        #[arg(long)]
        state: PathBuf,
        /// Cross-check the prefix validator against the subharmonic test.
        #[arg(long)]
        verify_bridge: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Schur–Weyl decomposition of (C^n)^{⊗l} for l = 1..=LEVELS.
    SchurTable {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Highest level (for `boundary`, also the truncation L).
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 20_000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
}

#[derive(Args)]
struct CommonArgs {
    /// `trace` (default), `normalized-trace`, `random` (seeded), or a
    /// density matrix file. Bundles default to the functional in their header.
    #[arg(long)]
    rho: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sub,
}

/// Exit status when `--verify-bridge` finds the two membership tests disagreeing.
const BRIDGE_MISMATCH: u8 = 3;

fn run(cli: Cli) -> finetti_core::Result<ExitCode> {
    match cli.command {
        Command::ExtendCheck { state, solver, common } => {
            commands::extend_check(RunConfig::new("extend-check", &solver, &common).with_state(state))?
        }
        Command::ScanWerner { grid, solver, common } => {
            commands::scan_werner(RunConfig::new("scan-werner", &solver, &common).with_grid(grid))?
        }
        Command::Boundary { state, verify_bridge, solver, common } => {
            let mut cfg = RunConfig::new("boundary", &solver, &common).with_state(state);
            cfg.verify_bridge = Some(verify_bridge);
            if !commands::boundary(cfg)? {
                return Ok(ExitCode::from(BRIDGE_MISMATCH));
            }
        }
        Command::SchurTable { n, levels, out } => commands::schur_table(RunConfig::schur_table(n, levels, out))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
