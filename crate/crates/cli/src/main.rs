//! `qtopo`: batch front end. Reports go to stdout as JSON, diagnostics to
//! stderr. Exit status 0 means the property holds (or nothing was found),
//! 1 that it fails (or a witness was found), 2 an input error.

mod commands;
mod verdict;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "qtopo",
    version,
    about = "Finite topologies and {0,1}-valued quasimetric families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Topology,
    Qmetric,
    Semigroup,
    Positives,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Direct,
    Metric,
    #[value(name = "literal_r3")]
    LiteralR3,
    #[value(name = "literal_r4")]
    LiteralR4,
    #[value(name = "literal_r5")]
    LiteralR5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Right,
    Left,
    Cauchy,
    Topological,
    Product,
    Statistical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnumKind {
    Topologies,
    Preorders,
}

#[derive(Subcommand)]
enum Command {
    /// Run the axiom checker for a document.
    Check {
        file: String,
        #[arg(long, value_enum)]
        kind: Option<CheckKind>,
    },
    /// Print the canonical quasimetric family of a topology.
    Canonical { file: String },
    /// Print the topology generated by a quasimetric family.
    Topology { file: String },
    /// Compare a topology with the topology of its canonical family.
    Roundtrip {
        file: Option<String>,
        /// Check every topology on this many points instead of a file.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Separation axioms by one method, compared against the topology.
    Separation {
        file: String,
        #[arg(long, value_enum, default_value = "direct")]
        method: Method,
    },
    /// Convergence of a sequence (or finite net) in a space.
    Converge {
        sequence: String,
        space: String,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Report undecided verdicts with exit status 1.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = qtopo::topology::DEFAULT_HORIZON)]
        horizon: u64,
    },
    /// Stream every topology or preorder on n points, one document per line.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "topologies")]
        kind: EnumKind,
        #[arg(long)]
        count_only: bool,
    },
    /// Search small families for a pair where two predicates disagree.
    Discrepancy {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        indices: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Check { file, kind } => commands::check(&file, kind),
        Command::Canonical { file } => commands::canonical(&file),
        Command::Topology { file } => commands::topology(&file),
        Command::Roundtrip { file, n } => commands::roundtrip(file.as_deref(), n),
        Command::Separation { file, method } => commands::separation(&file, method),
        Command::Converge {
            sequence,
            space,
            point,
            mode,
            strict,
            horizon,
        } => commands::converge(&sequence, &space, point.as_deref(), mode, strict, horizon),
        Command::Enumerate {
            n,
            kind,
            count_only,
        } => commands::enumerate(n, kind, count_only),
        Command::Discrepancy {
            left,
            right,
            n,
            indices,
        } => commands::discrepancy(&left, &right, n, indices),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
