//! `fairsynth` command-line front end.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "fairsynth",
    version,
    about = "Fairness analysis and asynchronous-automaton synthesis"
)]
struct Cli {
    /// Print machine-readable JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

/// A specification: either one document with `alphabet` and `dfa`, or a
/// bare DFA paired with `--alphabet`.
#[derive(Args, Debug, Clone)]
struct SpecArgs {
    /// Specification JSON.
    spec: PathBuf,
    /// Alphabet JSON; makes SPEC a bare DFA document.
    #[arg(long)]
    alphabet: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Fair,
    Unfair,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CutArg {
    Standard,
    Optimised,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LocalityArg {
    Neighbourhood,
    Chopstick,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report diamond violations, untrim states and architecture problems.
    Validate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Tree-of-bags architecture JSON.
        #[arg(long)]
        arch: Option<PathBuf>,
    },
    /// Print the least fairness parameter, or `unfair`.
    Fairness {
        #[command(flatten)]
        spec: SpecArgs,
        /// Print the parameter of every bag of this architecture instead.
        #[arg(long)]
        arch: Option<PathBuf>,
        /// Also print a word whose trace is not K-fair, if one exists.
        #[arg(long, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
        witness: Option<u64>,
    },
    /// Synthesise an asynchronous automaton and dump its reachable part.
    Synthesize {
        #[command(flatten)]
        spec: SpecArgs,
        /// Fairness parameter; defaults to the least one.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: Option<u64>,
        #[arg(long, value_enum, default_value = "fair")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "standard")]
        cut: CutArg,
        /// Use the tree-of-bags construction over this architecture.
        #[arg(long)]
        arch: Option<PathBuf>,
        /// Override a bag parameter, as BAG=K. Repeatable.
        #[arg(long = "bag-k", value_name = "BAG=K")]
        bag_k: Vec<String>,
        /// Maximum number of global states to materialise.
        #[arg(long, default_value_t = fairsynth::aa::DEFAULT_STATE_CAP)]
        cap: usize,
        /// Write the automaton JSON here and print only statistics.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a word on an automaton.
    Run {
        /// Automaton JSON.
        aa: PathBuf,
        /// The word; letters may be concatenated or separated by spaces or commas.
        #[arg(default_value = "")]
        word: String,
    },
    /// Take a seeded random walk through an automaton.
    Explore {
        aa: PathBuf,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the reachable global semantics of an automaton as a specification.
    Semantics {
        aa: PathBuf,
        #[arg(long, default_value_t = fairsynth::aa::DEFAULT_STATE_CAP)]
        cap: usize,
    },
    /// Compare the language of an automaton with a specification.
    Equiv {
        aa: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = fairsynth::aa::DEFAULT_STATE_CAP)]
        cap: usize,
    },
    /// Write a DOT graph of a specification or of an automaton's semantics.
    Dot {
        input: PathBuf,
        #[arg(long, default_value_t = fairsynth::aa::DEFAULT_STATE_CAP)]
        cap: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print a built-in specification.
    Gen {
        #[command(subcommand)]
        fixture: Fixture,
        #[arg(long, short, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug, Clone)]
enum Fixture {
    /// Two processes, fairness parameter 3.
    Fig1,
    /// The running example, fairness parameter 4.
    Fig3,
    /// Fig1 alphabet with an unfair language.
    #[command(name = "appendixG")]
    AppendixG,
    /// Two distinct local letters, then a global `c`, repeated; n processes.
    Example8 {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Lower-bound family L_n over n+1 processes; n divisible by 4.
    Lowerbound {
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Dining philosophers around a table.
    Philosophers {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Forbid putting a chopstick back before eating.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value = "neighbourhood")]
        locality: LocalityArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli.command, cli.json) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
