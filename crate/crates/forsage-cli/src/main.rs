//! Command-line front end: simulate, replay, analyze, visualize.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 malformed input
//! or replay failure. Errors print one machine-readable JSON line to stderr.
//! No subcommand mutates its inputs, nothing is written implicitly, and
//! identical invocations produce byte-identical outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ledger_analytics::{full_report, FeeModel, PAPER_MEAN_FEE, PAPER_MEDIAN_FEE};
use matrix_core::{new_state, state_digest, Address, Level, MatrixKind, Wei};
use sim_driver::{build_schedule, default_owner, run as run_schedule, RecruitKind, RecruitmentModel};
use txlog_io::{
    export_dot, export_report, parse_txlog, replay, write_events, write_skipped, write_txlog,
    ReplayMode, ReplayOutcome,
};

#[derive(Parser)]
#[command(name = "forsage", version, about = "Matrix contract simulator, replayer and analyzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic population and write schedule, events, report
    /// and digest into a directory.
    Simulate(SimulateArgs),
    /// Replay a transaction log and print the final state digest.
    Replay(ReplayArgs),
    /// Replay a transaction log and write the JSON analytics report.
    Analyze(AnalyzeArgs),
    /// Replay a transaction log and write a DOT rendering of one slot tree.
    Visualize(VisualizeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Uniform,
    Preferential,
    Chain,
}

#[derive(Clone, Copy, ValueEnum)]
enum FeeModelArg {
    Constant,
    Lognormal,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixArg {
    X3,
    X4,
}

impl From<MatrixArg> for MatrixKind {
    fn from(m: MatrixArg) -> Self {
        match m {
            MatrixArg::X3 => MatrixKind::X3,
            MatrixArg::X4 => MatrixKind::X4,
        }
    }
}

#[derive(Args)]
struct FeeArgs {
    /// Synthetic fee model
    #[arg(long = "fee-model", value_enum, default_value = "constant")]
    fee_model: FeeModelArg,
    /// Mean fee in wei (default: the measured chain-wide mean, 0.0116 ETH)
    #[arg(long = "mean-fee-wei")]
    mean_fee_wei: Option<u128>,
    /// Median fee in wei, lognormal only (default: 0.00883 ETH)
    #[arg(long = "median-fee-wei")]
    median_fee_wei: Option<u128>,
}

impl FeeArgs {
    fn build(&self) -> Result<FeeModel, CliError> {
        let mean = Wei(self.mean_fee_wei.unwrap_or(PAPER_MEAN_FEE.as_u128()));
        let median = Wei(self.median_fee_wei.unwrap_or(PAPER_MEDIAN_FEE.as_u128()));
        let model = match self.fee_model {
            FeeModelArg::Constant => FeeModel::Constant { fee: mean },
            FeeModelArg::Lognormal => FeeModel::LogNormal { mean, median },
        };
        model
            .validate()
            .map_err(|e| CliError::Args(e.to_string()))?;
        Ok(model)
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of registrations to generate
    #[arg(long)]
    arrivals: u32,
    /// Seed for the schedule generator (mandatory: no wall-clock default)
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    model: ModelArg,
    /// Probability of buying the next level right after a slot fills
    #[arg(long = "purchase-prob", default_value_t = 0.3)]
    purchase_prob: f64,
    /// Highest level the purchase policy may buy
    #[arg(long = "max-level", default_value_t = 12)]
    max_level: u8,
    #[command(flatten)]
    fees: FeeArgs,
    /// Rows in the top-earners table of the report
    #[arg(long, default_value_t = 5)]
    top: usize,
    /// Output directory for schedule.csv, events.csv, report.json, digest.txt
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    /// Transaction log to replay
    #[arg(long = "in")]
    input: PathBuf,
    /// Halt on the first failing transaction (default)
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Skip failing transactions and record them in skipped.csv
    #[arg(long)]
    lenient: bool,
    /// Owner address of the replayed contract
    #[arg(long, default_value_t = default_owner())]
    owner: Address,
    /// Optional output directory for events.csv and digest.txt
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Transaction log to analyze
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    #[arg(long)]
    lenient: bool,
    #[arg(long, default_value_t = default_owner())]
    owner: Address,
    #[command(flatten)]
    fees: FeeArgs,
    /// Rows in the top-earners table
    #[arg(long, default_value_t = 5)]
    top: usize,
    /// Report file to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VisualizeArgs {
    /// Transaction log to replay before rendering
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    #[arg(long)]
    lenient: bool,
    #[arg(long, default_value_t = default_owner())]
    owner: Address,
    /// Which matrix to render
    #[arg(long, value_enum)]
    matrix: MatrixArg,
    /// Which level to render
    #[arg(long)]
    level: u8,
    /// Restrict the rendering to this user's subtree
    #[arg(long)]
    focus: Option<Address>,
    /// DOT file to write
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    Args(String),
    Io { path: PathBuf, message: String },
    Data { code: &'static str, message: String },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Args(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Data { .. } => 4,
        }
    }

    fn report(&self) {
        let (code, message) = match self {
            CliError::Args(m) => ("bad-arguments", m.clone()),
            CliError::Io { path, message } => {
                ("io-failure", format!("{}: {message}", path.display()))
            }
            CliError::Data { code, message } => (*code, message.clone()),
        };
        eprintln!(
            "{}",
            serde_json::json!({ "error": code, "message": message })
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            err.report();
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Replay(args) => do_replay(args),
        Command::Analyze(args) => analyze(args),
        Command::Visualize(args) => visualize(args),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let kind = match args.model {
        ModelArg::Uniform => RecruitKind::UniformUpline,
        ModelArg::Preferential => RecruitKind::PreferentialByPartners,
        ModelArg::Chain => RecruitKind::Chain,
    };
    let model = RecruitmentModel {
        kind,
        arrivals: args.arrivals,
        purchase_prob: args.purchase_prob,
        max_level: Level::new(args.max_level).map_err(|e| CliError::Args(e.to_string()))?,
        seed: args.seed,
    };
    let fees = args.fees.build()?;
    let schedule =
        build_schedule(&model, &fees).map_err(|e| CliError::Args(e.to_string()))?;
    let result = run_schedule(&schedule).map_err(|e| CliError::Data {
        code: "simulation-failed",
        message: e.to_string(),
    })?;
    let digest = state_digest(&result.state);
    let report = full_report(&result.state, &result.events, &result.log, None, args.top)
        .map_err(|e| CliError::Data {
            code: "analytics-failed",
            message: e.to_string(),
        })?;

    create_dir(&args.out)?;
    write_file(&args.out.join("schedule.csv"), &write_txlog(&schedule))?;
    write_file(&args.out.join("events.csv"), &write_events(&result.events))?;
    write_file(&args.out.join("report.json"), &export_report(&report))?;
    write_file(&args.out.join("digest.txt"), &format!("{digest}\n"))?;
    println!("{digest}");
    Ok(())
}

fn replay_input(
    input: &Path,
    owner: &Address,
    lenient: bool,
) -> Result<(matrix_core::ContractState, ReplayOutcome), CliError> {
    let text = read_file(input)?;
    let records = parse_txlog(&text).map_err(|e| CliError::Data {
        code: "parse-failed",
        message: e.to_string(),
    })?;
    let mode = if lenient {
        ReplayMode::Lenient
    } else {
        ReplayMode::Strict
    };
    let mut state = new_state(owner.clone());
    let outcome = replay(&mut state, &records, mode).map_err(|e| CliError::Data {
        code: "replay-failed",
        message: e.to_string(),
    })?;
    Ok((state, outcome))
}

fn do_replay(args: ReplayArgs) -> Result<(), CliError> {
    let (state, outcome) = replay_input(&args.input, &args.owner, args.lenient)?;
    let digest = state_digest(&state);
    if let Some(out) = &args.out {
        create_dir(out)?;
        write_file(&out.join("events.csv"), &write_events(&outcome.events))?;
        write_file(&out.join("digest.txt"), &format!("{digest}\n"))?;
        if args.lenient {
            write_file(&out.join("skipped.csv"), &write_skipped(&outcome.skipped))?;
        }
    }
    println!("{digest}");
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let (state, outcome) = replay_input(&args.input, &args.owner, args.lenient)?;
    let fees = args.fees.build()?;
    let report = full_report(
        &state,
        &outcome.events,
        &outcome.applied,
        Some(&fees),
        args.top,
    )
    .map_err(|e| CliError::Data {
        code: "analytics-failed",
        message: e.to_string(),
    })?;
    write_file(&args.out, &export_report(&report))?;
    Ok(())
}

fn visualize(args: VisualizeArgs) -> Result<(), CliError> {
    let (state, _) = replay_input(&args.input, &args.owner, args.lenient)?;
    let level = Level::new(args.level).map_err(|e| CliError::Args(e.to_string()))?;
    let dot = export_dot(&state, args.focus.as_ref(), args.matrix.into(), level).map_err(|e| {
        CliError::Data {
            code: e.code(),
            message: e.to_string(),
        }
    })?;
    write_file(&args.out, &dot)?;
    Ok(())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
