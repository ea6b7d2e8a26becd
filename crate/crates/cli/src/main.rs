//! `pometh`: check probabilistic knowledge formulas over partially observed
//! Markov chains and run the bounded semi-decision procedures.
//!
//! Exit status: 0 when the query is answered positively, 1 when it is
//! answered negatively (including "no witness up to the bound"), 2 on any
//! input error.

mod commands;
mod report;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pometh_core::belief::DEFAULT_MAX_PATHS;
use pometh_core::Semantics;

use commands::{CliError, Ctx};
use report::{Format, Report};

const MAX_PATHS_ENV: &str = "POMETH_MAX_PATHS";

#[derive(Parser)]
#[command(name = "pometh", version, about = "Exact probabilistic knowledge model checking")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value = "plain")]
    format: Format,
    /// Worker threads for witness search.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a formula at every initial point, or search for a witness of a
    /// mixed-time atom.
    Check(CheckArgs),
    /// Evaluate a polynomial over probability terms at one point.
    EvalTerm(EvalTermArgs),
    /// Print knowledge cells with their measures and beliefs.
    Beliefs(BeliefsArgs),
    /// Turn a PFA into a model and check the cut-point reachability formula.
    ReducePfa(PfaArgs),
    /// Encode a Diophantine polynomial over the four-state chain and search
    /// for a root.
    ReduceDioph(DiophArgs),
    /// Encode a linear recurrence as `exists t . Pr(p@t) = c` and search.
    Skolem(SkolemArgs),
    /// Decide a qualitative query by graph analysis.
    Qualitative(QualArgs),
}

fn parse_semantics(s: &str) -> Result<Semantics, String> {
    s.parse()
}

#[derive(Args)]
pub struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_parser = parse_semantics)]
    semantics: Option<Semantics>,
    #[arg(long)]
    formula: String,
    /// Cut unbounded operators at this horizon when no qualitative reading
    /// applies.
    #[arg(long)]
    horizon: Option<u32>,
    /// Largest time value tried for mixed-time atoms.
    #[arg(long)]
    bound: Option<u64>,
}

#[derive(Args)]
pub struct EvalTermArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_parser = parse_semantics)]
    semantics: Semantics,
    /// Polynomial over `Pr[agent](formula)` terms.
    #[arg(long)]
    term: String,
    /// Comma-separated state ids of the run prefix.
    #[arg(long)]
    path: String,
    /// Evaluation time; defaults to the end of the path.
    #[arg(long)]
    time: Option<usize>,
}

#[derive(Args)]
pub struct BeliefsArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    agent: String,
    #[arg(long, value_parser = parse_semantics)]
    semantics: Semantics,
    #[arg(long)]
    time: Option<usize>,
    /// Comma-separated observation history (spr).
    #[arg(long)]
    history: Option<String>,
    /// Current observation (clk).
    #[arg(long)]
    obs: Option<String>,
}

#[derive(Args)]
pub struct PfaArgs {
    #[arg(long)]
    pfa: PathBuf,
    #[arg(long)]
    horizon: Option<u32>,
    /// Print the generated model and formula.
    #[arg(long)]
    emit: bool,
}

#[derive(Args)]
pub struct DiophArgs {
    /// e.g. `p(n1,n2) = n1^2 - 2*n2`
    #[arg(long)]
    poly: String,
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long)]
    emit: bool,
}

#[derive(Args)]
pub struct SkolemArgs {
    /// Comma-separated recurrence coefficients `a_1,…,a_k`.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: String,
    /// Comma-separated initial terms `u_0,…,u_{k-1}`.
    #[arg(long, allow_hyphen_values = true)]
    init: String,
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long)]
    emit: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum QualQuery {
    /// `Pr(F target) = 1`
    AlmostSureEventually,
    /// some `t` with `Pr(p@t) = 0`
    ExistsZero,
    /// some `t` with `Pr(p@t) > 0`
    ExistsPositive,
    /// every `t` has `Pr(p@t) = 0`
    ForallZero,
    /// every `t` has `Pr(p@t) > 0`
    ForallPositive,
}

#[derive(Args)]
pub struct QualArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    query: QualQuery,
    /// Target proposition (a propositional formula for
    /// `almost-sure-eventually`).
    #[arg(long)]
    prop: String,
}

fn max_paths() -> Result<u64, CliError> {
    match std::env::var(MAX_PATHS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_PATHS_ENV}: not a number: `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_PATHS),
    }
}

fn run(cli: &Cli, rep: &mut Report) -> Result<bool, CliError> {
    let ctx = Ctx {
        max_paths: max_paths()?,
        jobs: cli.jobs.into(),
    };
    match &cli.command {
        Command::Check(a) => commands::check_cmd(a, &ctx, rep),
        Command::EvalTerm(a) => commands::eval_term_cmd(a, &ctx, rep),
        Command::Beliefs(a) => commands::beliefs_cmd(a, &ctx, rep),
        Command::ReducePfa(a) => commands::reduce_pfa_cmd(a, &ctx, rep),
        Command::ReduceDioph(a) => commands::reduce_dioph_cmd(a, &ctx, rep),
        Command::Skolem(a) => commands::skolem_cmd(a, &ctx, rep),
        Command::Qualitative(a) => commands::qualitative_cmd(a, &ctx, rep),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    let mut rep = Report::new(cli.format);
    let result = run(&cli, &mut rep);
    // partial output is still useful when a later step fails
    if let Err(e) = rep.write_to(&mut io::stdout().lock()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
