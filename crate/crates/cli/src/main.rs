use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod input;

/// Why a command did not succeed; maps to the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1: the input is well-formed but the property does not hold.
    Property(String),
    /// Exit 2: bad flags or unreadable input.
    Usage(String),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn property(msg: impl Into<String>) -> Self {
        Failure::Property(msg.into())
    }
}

#[derive(Parser)]
#[command(
    name = "cra",
    version,
    about = "Data words, class register automata and local logics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
pub struct Common {
    /// Built-in signature name, or a file naming one.
    #[arg(long)]
    pub sig: Option<String>,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Clone, Default)]
pub struct AlphabetFlags {
    /// Labels, separated by spaces or commas.
    #[arg(long, num_args = 1..)]
    pub alphabet: Vec<String>,
    /// Data values per position.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a word, formula or automaton.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ab: AlphabetFlags,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        automaton: Option<String>,
    },
    /// Print the relations and distances of G(w).
    Graph {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ab: AlphabetFlags,
        #[arg(long)]
        word: String,
        /// Write the graph in DOT format to this file.
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Evaluate a sentence on a word.
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ab: AlphabetFlags,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        word: String,
    },
    /// Search for an accepting run and print it as a table.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        automaton: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = cra_core::automata::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Membership in an automaton or in a compiled sentence table.
    Member {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "table", required_unless_present = "table")]
        automaton: Option<String>,
        /// Table written by `compile --out`.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = cra_core::automata::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Spheres per position and the canonical run of the sphere automaton.
    Spheres {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ab: AlphabetFlags,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// Directory receiving one DOT file per position.
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// The Hanf type of a word.
    HanfType {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ab: AlphabetFlags,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[arg(long, default_value_t = 1)]
        threshold: usize,
    },
    /// Compile a local EMSO sentence into a sphere automaton and type table.
    Compile {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ab: AlphabetFlags,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        max_vals: Option<usize>,
        /// Parameter escalations tried after an inconsistency.
        #[arg(long, default_value_t = 3)]
        escalations: usize,
        /// Answer for words whose types are missing from the table.
        #[arg(long, value_enum, default_value_t = Policy::Error)]
        policy: Policy,
        /// Where to write the table; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the normalized words up to a length and value bound.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ab: AlphabetFlags,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 2)]
        max_vals: usize,
        /// Also print the truth value of this sentence.
        #[arg(long)]
        formula: Option<String>,
    },
    /// Run the cross-validation suite.
    Oracle {
        #[arg(long)]
        json: bool,
        /// Run only these criteria.
        #[arg(long, num_args = 1..)]
        only: Vec<u8>,
    },
    /// Browse the built-in fixtures.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    List {
        #[arg(long)]
        json: bool,
    },
    Show {
        name: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Policy {
    Error,
    Reject,
}

fn dispatch(cmd: Command) -> Result<String, Failure> {
    use commands as c;
    match cmd {
        Command::Validate {
            common,
            ab,
            word,
            formula,
            automaton,
        } => c::validate(
            &common,
            &ab,
            word.as_deref(),
            formula.as_deref(),
            automaton.as_deref(),
        ),
        Command::Graph {
            common,
            ab,
            word,
            emit_dot,
        } => c::graph(&common, &ab, &word, emit_dot),
        Command::Eval {
            common,
            ab,
            formula,
            word,
        } => c::eval(&common, &ab, &formula, &word),
        Command::Run {
            common,
            automaton,
            word,
            budget,
        } => c::run(&common, &automaton, &word, budget),
        Command::Member {
            common,
            automaton,
            table,
            word,
            budget,
        } => c::member(&common, automaton.as_deref(), table, &word, budget),
        Command::Spheres {
            common,
            ab,
            word,
            radius,
            emit_dot,
        } => c::spheres(&common, &ab, &word, radius, emit_dot),
        Command::HanfType {
            common,
            ab,
            word,
            radius,
            threshold,
        } => c::hanf_type(&common, &ab, &word, radius, threshold),
        Command::Compile {
            common,
            ab,
            formula,
            radius,
            threshold,
            max_len,
            max_vals,
            escalations,
            policy,
            out,
        } => c::compile(
            &common,
            &ab,
            &formula,
            c::ParamFlags {
                radius,
                threshold,
                max_len,
                max_vals,
            },
            escalations,
            policy,
            out,
        ),
        Command::Enumerate {
            common,
            ab,
            max_len,
            max_vals,
            formula,
        } => c::enumerate(&common, &ab, max_len, max_vals, formula.as_deref()),
        Command::Oracle { json, only } => c::oracle(json, &only),
        Command::Examples { action } => match action {
            ExamplesAction::List { json } => c::examples_list(json),
            ExamplesAction::Show { name } => c::examples_show(&name),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Property(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
