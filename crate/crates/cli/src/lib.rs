//! Command-line front end: argument parsing, dispatch and exit codes.

pub mod commands;
pub mod input;

use std::io::Write;
use std::path::PathBuf;

use biunitary::exec::DEFAULT_CAP;
use biunitary::{Config, Error, Exec, Scalar, DEFAULT_TOL};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::Outcome;
use input::{InputFile, Loaded, Model};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "biunitary", version, about = "Biunitary checks and standard-invariant computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Approximate-mode zero threshold.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    /// Largest number of ambient matrix entries a computation may touch.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Seed for the block decomposition.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Lattice row used for the principal graph.
    #[arg(long, global = true, default_value_t = 0)]
    pub row: usize,
    /// Run cells one after another.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Star and twisted conditions, and the sequence u_0, u_1, ...
    Check { file: PathBuf, #[command(flatten)] flags: Flags },
    /// Dimensions and block structure of every lattice cell.
    Lattice { file: PathBuf, #[command(flatten)] flags: Flags },
    /// Relative commutants computed directly from the tower.
    Oracle {
        file: PathBuf,
        #[arg(long, requires = "j")]
        i: Option<usize>,
        #[arg(long, requires = "i")]
        j: Option<usize>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Cell-by-cell comparison of the intertwiner and direct paths.
    Compare { file: PathBuf, #[command(flatten)] flags: Flags },
    /// Bratteli diagram and principal graph as DOT, plus a JSON summary.
    Graph {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Builds the operator from group generators and compares all three grids.
    Group { file: PathBuf, #[command(flatten)] flags: Flags },
}

impl Flags {
    fn config(&self, exact: bool) -> Config {
        let exec = if self.sequential { Exec::Sequential } else { Exec::default() };
        Config { tol: if exact { 0.0 } else { self.tol }, cap: self.cap, seed: self.seed, exec }
    }
}

impl Command {
    fn parts(&self) -> (&PathBuf, &Flags) {
        match self {
            Command::Check { file, flags }
            | Command::Lattice { file, flags }
            | Command::Oracle { file, flags, .. }
            | Command::Compare { file, flags }
            | Command::Graph { file, flags, .. }
            | Command::Group { file, flags } => (file, flags),
        }
    }
}

fn dispatch<S: Scalar>(cmd: &Command, model: &Model<S>) -> biunitary::Result<Outcome> {
    let flags = cmd.parts().1;
    let cfg = flags.config(S::EXACT);
    match cmd {
        Command::Check { .. } => commands::check(model),
        Command::Lattice { .. } => commands::lattice_cmd(model, &cfg, flags.depth),
        Command::Oracle { i, j, .. } => commands::oracle(model, &cfg, flags.depth, i.zip(*j)),
        Command::Compare { .. } => commands::compare(model, &cfg, flags.depth),
        Command::Graph { out, .. } => commands::graph(model, &cfg, flags.depth, flags.row, out.as_deref()),
        Command::Group { .. } => commands::group(model, &cfg, flags.depth),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else if matches!(e, Error::StarFails | Error::TwistedFails) {
        EXIT_FALSE
    } else {
        EXIT_INPUT
    }
}

/// Runs one command, writing the report to `out` and errors to `err`.
pub fn run(cli: &Cli, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let (file, flags) = cli.command.parts();
    let result = InputFile::read(file).and_then(|f| f.load(flags.tol)).and_then(|loaded| match loaded {
        Loaded::Exact(m) => dispatch(&cli.command, &m),
        Loaded::Approx(m) => dispatch(&cli.command, &m),
    });
    match result {
        Ok(o) => {
            let text = serde_json::to_string_pretty(&o.report).expect("serializable");
            let _ = writeln!(out, "{text}");
            if o.ok {
                EXIT_OK
            } else {
                EXIT_FALSE
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", json!({ "kind": e.kind(), "message": e.to_string() }));
            exit_code(&e)
        }
    }
}
