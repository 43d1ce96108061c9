//! Command-line entry point for dimer-network construction and analysis.

mod commands;
mod reports;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{exit_code, StateOpts};

#[derive(Parser)]
#[command(
    name = "dimernet",
    version,
    about = "Dimer-network states: coverings, reduced density matrices, \
             entanglement certificates, telecloning bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct StateArgs {
    /// Lattice: chain:L, square:RxC, complete:N, inline JSON, or a JSON file
    #[arg(long)]
    lattice: String,

    /// Defect pattern: sym:P or fixed:i,j
    #[arg(long, default_value = "sym:0")]
    defects: String,

    /// Interpretation of a bare --defects count: symmetric | fixed
    #[arg(long)]
    mode: Option<String>,

    /// Seed for every randomized check
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Mixedness tolerance for certification
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Node budget override (or env DIMERNET_MAX_NODES)
    #[arg(long)]
    max_nodes: Option<usize>,
}

impl From<StateArgs> for StateOpts {
    fn from(a: StateArgs) -> Self {
        StateOpts {
            lattice: a.lattice,
            defects: a.defects,
            mode: a.mode,
            seed: a.seed,
            tol: a.tol,
            out: a.out,
            max_nodes: a.max_nodes,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Construct the state; --out dumps amplitudes as binary
    BuildState {
        #[command(flatten)]
        args: StateArgs,
    },
    /// Count dimer coverings per defect placement
    Coverings {
        #[command(flatten)]
        args: StateArgs,
        /// Emit each covering as a JSON line on stdout
        #[arg(long)]
        list: bool,
    },
    /// Reduced density matrix over --keep nodes, with the fitted form
    Rdm {
        #[command(flatten)]
        args: StateArgs,
        /// Comma-separated node subset, e.g. 0,1
        #[arg(long)]
        keep: String,
    },
    /// PPT, log-negativity and entropies for a node pair
    Entanglement {
        #[command(flatten)]
        args: StateArgs,
        /// Comma-separated node pair, e.g. 0,1
        #[arg(long)]
        keep: String,
    },
    /// Exhaustive bipartition-mixedness certificate
    Gme {
        #[command(flatten)]
        args: StateArgs,
        /// Include every bipartition purity in the report
        #[arg(long)]
        full: bool,
    },
    /// Telecloning ceilings on bipartite entanglement
    Bounds {
        #[command(subcommand)]
        cmd: BoundsCommand,
    },
    /// Invariance + SSA + GME verification suite; exit 1 on failure
    Verify {
        #[command(flatten)]
        args: StateArgs,
        /// Haar unitaries per invariance check
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// CSV of the maximum permissible log-negativity over (M, p'3)
    Fig1 {
        /// Copy counts, e.g. 4,20,100,inf
        #[arg(long, default_value = "4,20,100,inf")]
        m: String,
        /// p'3 grid as start:end:step
        #[arg(long = "p3-grid", default_value = "0.5:1.0:0.005")]
        p3_grid: String,
        /// Fixed p'1 weight
        #[arg(long = "p1", default_value_t = 0.0)]
        p1: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bound quantities at one (p'1, p'3, M) point
    Report {
        #[arg(long = "p1", default_value_t = 0.0)]
        p1: f64,
        #[arg(long = "p3")]
        p3: f64,
        /// Copy count or inf
        #[arg(long)]
        m: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BuildState { args } => {
            commands::build_ctx(args.into()).and_then(commands::build_state_cmd)
        }
        Command::Coverings { args, list } => {
            commands::build_ctx(args.into()).and_then(|ctx| commands::coverings(ctx, list))
        }
        Command::Rdm { args, keep } => {
            commands::build_ctx(args.into()).and_then(|ctx| commands::rdm_cmd(ctx, &keep))
        }
        Command::Entanglement { args, keep } => commands::build_ctx(args.into())
            .and_then(|ctx| commands::entanglement_cmd(ctx, &keep)),
        Command::Gme { args, full } => {
            commands::build_ctx(args.into()).and_then(|ctx| commands::gme_cmd(ctx, full))
        }
        Command::Bounds { cmd } => match cmd {
            BoundsCommand::Fig1 {
                m,
                p3_grid,
                p1,
                out,
                seed,
            } => commands::bounds_fig1(&m, &p3_grid, p1, out.as_deref(), seed),
            BoundsCommand::Report { p1, p3, m, out } => {
                commands::bounds_report_cmd(p1, p3, &m, out.as_deref())
            }
        },
        Command::Verify { args, trials } => {
            commands::build_ctx(args.into()).and_then(|ctx| commands::verify_cmd(ctx, trials))
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
