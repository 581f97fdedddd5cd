//! `pgf`: builds the groups, runs the checks and prints JSON reports.

pub mod cache;
pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use cache::Cache;
use commands::{Context, Suite, EXIT_USAGE};
use report::render_pretty;

#[derive(Debug, Parser)]
#[command(name = "pgf", version, about = "Class-3 p-groups from finite fields: invariants, structure checks, isoclinism")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for cached enumerations.
    #[arg(long, global = true, env = "PGF_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Lift the default size limit of the isoclinism search.
    #[arg(long, global = true)]
    pub force: bool,

    /// Render the JSON report as indented text.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Leave the timings map empty so reports are byte-comparable.
    #[arg(long, global = true)]
    pub no_timings: bool,

    /// Where `verify` writes `params-<spec>.json`.
    #[arg(long, global = true, default_value = ".")]
    pub params_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Order, center, derived subgroup, class and conjugate type.
    Invariants { spec: String },
    /// Run a check suite; exit 0 iff every check passes.
    Verify {
        spec: String,
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Decide isoclinism; exit 0 isoclinic, 1 not, 4 inconclusive.
    Isoclinic { a: String, b: String },
    /// Structure constants of the field of order p^m.
    Kappa {
        p: u64,
        m: usize,
        /// Explicit modulus `c0,c1,...,cm` instead of the default.
        #[arg(long)]
        modulus: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let ctx = Context {
        cache: Cache::new(cli.cache_dir.clone()),
        seed: cli.seed,
        force: cli.force,
        timings: !cli.no_timings,
        params_dir: cli.params_dir.clone(),
    };
    let result = match &cli.command {
        Command::Invariants { spec } => commands::cmd_invariants(&ctx, spec),
        Command::Verify { spec, suite } => commands::cmd_verify(&ctx, spec, *suite),
        Command::Isoclinic { a, b } => commands::cmd_isoclinic(&ctx, a, b),
        Command::Kappa { p, m, modulus } => commands::cmd_kappa(*p, *m, modulus.as_deref()),
    };
    match result {
        Ok((report, code)) => {
            let json = report.to_json();
            let stdout = if cli.pretty {
                render_pretty(&serde_json::from_str(&json).expect("own output parses"))
            } else {
                json + "\n"
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: e.code, stdout: String::new(), stderr: format!("error: {}\n", e.message) },
    }
}
