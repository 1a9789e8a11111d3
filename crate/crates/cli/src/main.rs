//! `chipsplit`: ICM and DCM tournament equity from the command line.

mod render;

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chipsplit_core::analysis::{compare_models, finish_distribution, DecisionScenario};
use chipsplit_core::oracle::{oracle_equities, OracleConfig, OracleMethod};
use chipsplit_core::wire::{DecisionOutput, DecisionResponse, EquityResponse, PositionsResponse};
use chipsplit_core::{
    dcm_run, icm_equities, Budget, DcmConfig, Error, Execution, LeafPolicy, Model, PrizeSchedule,
    StackVector,
};
use chipsplit_service::ServiceConfig;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "chipsplit", version, about = "Tournament prize equity under ICM and DCM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Independent Chip Model equity.
    Icm(EquityArgs),
    /// Dependent Chip Model equity.
    Dcm(EquityArgs),
    /// ICM and DCM side by side with percent differences.
    Compare(EquityArgs),
    /// Probability of each player finishing in each position.
    Positions(PositionsArgs),
    /// Call or fold an all-in, under one or both models.
    Decide(DecideArgs),
    /// Solve the DCM game exactly as a Markov chain and compare with the tree.
    Oracle(OracleArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
struct EngineArgs {
    /// Hands deep before a branch is settled by the leaf policy.
    #[arg(long, default_value_t = 50)]
    max_depth: u32,
    /// Branches less likely than this are settled by the leaf policy.
    #[arg(long, default_value_t = 1e-15)]
    min_prob: f64,
    /// How pruned branches are settled: forced, icm or analytic2.
    #[arg(long, default_value = "forced")]
    leaf_policy: String,
    /// Settle two-player nodes in closed form.
    #[arg(long)]
    two_player_shortcut: bool,
    /// Walk the first levels of the tree on all cores.
    #[arg(long)]
    parallel: bool,
    /// Reserved; the engines are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct EquityArgs {
    /// Comma-separated chip counts, one per player.
    #[arg(long)]
    stacks: String,
    /// Comma-separated prizes, best first.
    #[arg(long)]
    prizes: String,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct PositionsArgs {
    #[arg(long)]
    stacks: String,
    #[arg(long, value_enum, default_value_t = ModelArg::Dcm)]
    model: ModelArg,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct DecideArgs {
    #[arg(long)]
    prizes: String,
    /// Seat of the deciding player, counting from 1.
    #[arg(long)]
    hero: usize,
    /// Stacks if the hero folds.
    #[arg(long)]
    fold_stacks: String,
    /// Stacks if the hero calls and wins.
    #[arg(long)]
    win_stacks: String,
    /// Stacks if the hero calls and loses; 0 marks a busted player.
    #[arg(long)]
    lose_stacks: String,
    /// Hero's chance of winning the hand, as 0.4 or 40%.
    #[arg(long)]
    equity: String,
    #[arg(long, value_enum, default_value_t = DecideModel::Both)]
    model: DecideModel,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    stacks: String,
    #[arg(long)]
    prizes: String,
    /// Always use the rational solver, however many states there are.
    #[arg(long)]
    exact_oracle: bool,
    /// Give up after this many distinct states.
    #[arg(long, default_value_t = 1_000_000)]
    state_budget: usize,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct ServeArgs {
    /// Listening port; CHIPSPLIT_PORT takes precedence.
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    /// Per-request wall-clock budget in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
    /// Per-request cap on tree nodes.
    #[arg(long, default_value_t = 100_000_000)]
    max_nodes: u64,
    /// Origin allowed by CORS; any origin when omitted.
    #[arg(long)]
    cors_origin: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Table,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModelArg {
    Icm,
    Dcm,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Icm => Model::Icm,
            ModelArg::Dcm => Model::Dcm,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DecideModel {
    Icm,
    Dcm,
    Both,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Internal(m) => m,
        }
    }
}

/// Engine errors, prefixed with the flag they came from.
fn engine(context: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let msg = format!("{context}: {e}");
        if e.is_validation() {
            Failure::Validation(msg)
        } else {
            Failure::Internal(msg)
        }
    }
}

fn parse_list<T: std::str::FromStr>(flag: &str, raw: &str, what: &str) -> Result<Vec<T>, Failure> {
    raw.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse()
                .map_err(|_| Failure::Validation(format!("--{flag}: '{item}' is not {what}")))
        })
        .collect()
}

fn parse_chips(flag: &str, raw: &str) -> Result<Vec<u64>, Failure> {
    parse_list(flag, raw, "a non-negative whole number of chips")
}

fn parse_stacks(raw: &str) -> Result<StackVector, Failure> {
    StackVector::new(parse_chips("stacks", raw)?).map_err(engine("--stacks"))
}

fn parse_prizes(raw: &str) -> Result<PrizeSchedule, Failure> {
    PrizeSchedule::new(parse_list("prizes", raw, "a number")?).map_err(engine("--prizes"))
}

fn parse_equity(raw: &str) -> Result<f64, Failure> {
    let bad = || Failure::Validation(format!("--equity: '{raw}' is not a probability"));
    let value = match raw.trim().strip_suffix('%') {
        Some(pct) => pct.trim().parse::<f64>().map_err(|_| bad())? / 100.0,
        None => raw.trim().parse::<f64>().map_err(|_| bad())?,
    };
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Failure::Validation(format!("--equity: {raw} is outside 0..1")))
    }
}

impl EngineArgs {
    fn config(&self) -> Result<DcmConfig, Failure> {
        let leaf_policy: LeafPolicy = self.leaf_policy.parse().map_err(engine("--leaf-policy"))?;
        let config = DcmConfig {
            max_depth: self.max_depth,
            min_prob: self.min_prob,
            leaf_policy,
            two_player_shortcut: self.two_player_shortcut,
            execution: if self.parallel {
                Execution::Parallel
            } else {
                Execution::Deterministic
            },
        };
        config.validate().map_err(engine("configuration"))?;
        Ok(config)
    }
}

fn elapsed_ms(start: Instant) -> Option<f64> {
    Some(start.elapsed().as_secs_f64() * 1e3)
}

#[derive(Debug, Serialize, Deserialize)]
struct CompareOutput {
    icm: EquityResponse,
    dcm: EquityResponse,
    percent_diff: Vec<Option<f64>>,
    elapsed_ms: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PositionsOutput {
    #[serde(flatten)]
    positions: PositionsResponse,
    elapsed_ms: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DecideOutput {
    #[serde(flatten)]
    decision: DecisionOutput,
    elapsed_ms: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OracleOutput {
    method: String,
    states: usize,
    iterations: Option<usize>,
    equity: Vec<f64>,
    win_prob: Vec<f64>,
    /// Present when the rational solver ran, as "numerator/denominator".
    exact_equity: Option<Vec<String>>,
    dcm: EquityResponse,
    max_abs_diff: f64,
    elapsed_ms: Option<f64>,
}

fn emit<T: Serialize>(format: Format, value: &T, table: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("outputs serialize");
            s.push('\n');
            s
        }
        Format::Table => table(),
    }
}

fn equity(args: &EquityArgs, model: Model) -> Result<String, Failure> {
    let stacks = parse_stacks(&args.stacks)?;
    let prizes = parse_prizes(&args.prizes)?;
    let config = args.engine.config()?;
    let start = Instant::now();
    let report = match model {
        Model::Icm => icm_equities(&stacks, &prizes),
        Model::Dcm => dcm_run(&stacks, &prizes, &config, Budget::default()).map(|o| o.report),
    }
    .map_err(engine(model.as_str()))?;
    let mut out = EquityResponse::from(&report);
    out.elapsed_ms = elapsed_ms(start);
    Ok(emit(args.engine.format, &out, || render::equity(&stacks, &out)))
}

fn compare(args: &EquityArgs) -> Result<String, Failure> {
    let stacks = parse_stacks(&args.stacks)?;
    let prizes = parse_prizes(&args.prizes)?;
    let config = args.engine.config()?;
    let start = Instant::now();
    let report = compare_models(&stacks, &prizes, &config, Budget::default()).map_err(engine("compare"))?;
    let out = CompareOutput {
        icm: EquityResponse::from(&report.icm),
        dcm: EquityResponse::from(&report.dcm),
        percent_diff: report.percent_diff.clone(),
        elapsed_ms: elapsed_ms(start),
    };
    Ok(emit(args.engine.format, &out, || {
        chipsplit_core::analysis::render_comparison(&stacks, &prizes, &report)
    }))
}

fn positions(args: &PositionsArgs) -> Result<String, Failure> {
    let stacks = parse_stacks(&args.stacks)?;
    let config = args.engine.config()?;
    let model = Model::from(args.model);
    let start = Instant::now();
    let m = finish_distribution(&stacks, model, &config, Budget::default()).map_err(engine("positions"))?;
    let out = PositionsOutput {
        positions: PositionsResponse {
            model: model.as_str().to_string(),
            row_sums: m.row_sums(),
            column_sums: m.column_sums(),
            positions: m.q,
        },
        elapsed_ms: elapsed_ms(start),
    };
    Ok(emit(args.engine.format, &out, || render::positions(&out.positions)))
}

fn decide(args: &DecideArgs) -> Result<String, Failure> {
    if args.hero == 0 {
        return Err(Failure::Validation("--hero: seats are numbered from 1".into()));
    }
    let scenario = DecisionScenario {
        prizes: parse_prizes(&args.prizes)?,
        hero: args.hero - 1,
        fold_stacks: parse_chips("fold-stacks", &args.fold_stacks)?,
        win_stacks: parse_chips("win-stacks", &args.win_stacks)?,
        lose_stacks: parse_chips("lose-stacks", &args.lose_stacks)?,
        hero_equity: parse_equity(&args.equity)?,
    };
    scenario.validate().map_err(engine("decide"))?;
    let config = args.engine.config()?;
    let start = Instant::now();
    let run = |model| {
        chipsplit_core::analysis::decision_ev(&scenario, model, &config, Budget::default())
            .map(|r| DecisionResponse::from(&r))
            .map_err(engine(model.as_str()))
    };
    let decision = match args.model {
        DecideModel::Icm => DecisionOutput::Single(run(Model::Icm)?),
        DecideModel::Dcm => DecisionOutput::Single(run(Model::Dcm)?),
        DecideModel::Both => DecisionOutput::Both {
            icm: run(Model::Icm)?,
            dcm: run(Model::Dcm)?,
        },
    };
    let out = DecideOutput {
        decision,
        elapsed_ms: elapsed_ms(start),
    };
    Ok(emit(args.engine.format, &out, || render::decision(&out.decision)))
}

fn oracle(args: &OracleArgs) -> Result<String, Failure> {
    let stacks = parse_stacks(&args.stacks)?;
    let prizes = parse_prizes(&args.prizes)?;
    let config = args.engine.config()?;
    let oracle_config = OracleConfig {
        method: if args.exact_oracle {
            OracleMethod::Exact
        } else {
            OracleMethod::Auto
        },
        state_budget: args.state_budget,
        ..OracleConfig::default()
    };
    let start = Instant::now();
    let orc = oracle_equities(&stacks, &prizes, &oracle_config).map_err(engine("oracle"))?;
    let dcm = dcm_run(&stacks, &prizes, &config, Budget::default()).map_err(engine("dcm"))?;
    let max_abs_diff = orc
        .report
        .equity
        .iter()
        .zip(&dcm.report.equity)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let out = OracleOutput {
        method: if orc.exact_equity.is_some() { "exact" } else { "iterative" }.into(),
        states: orc.states,
        iterations: orc.iterations,
        equity: orc.report.equity.clone(),
        win_prob: orc.report.win_prob.clone(),
        exact_equity: orc.exact_equity.as_ref().map(|v| v.iter().map(|r| r.to_string()).collect()),
        dcm: EquityResponse::from(&dcm.report),
        max_abs_diff,
        elapsed_ms: elapsed_ms(start),
    };
    Ok(emit(args.engine.format, &out, || render::oracle(&out)))
}

fn serve(args: &ServeArgs) -> Result<String, Failure> {
    let port = match std::env::var("CHIPSPLIT_PORT") {
        Ok(p) => p
            .trim()
            .parse()
            .map_err(|_| Failure::Validation(format!("CHIPSPLIT_PORT: '{p}' is not a port number")))?,
        Err(_) => args.port,
    };
    let addr = SocketAddr::new(args.host, port);
    let config = ServiceConfig {
        timeout: Duration::from_millis(args.timeout_ms),
        max_nodes: args.max_nodes,
        cors_origin: args.cors_origin.clone(),
    };
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::Internal(format!("runtime: {e}")))?;
    eprintln!("chipsplit: listening on http://{addr}");
    runtime
        .block_on(chipsplit_service::serve(addr, config))
        .map_err(|e| Failure::Internal(format!("serve on {addr}: {e}")))?;
    Ok(String::new())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::Icm(a) => equity(a, Model::Icm),
        Command::Dcm(a) => equity(a, Model::Dcm),
        Command::Compare(a) => compare(a),
        Command::Positions(a) => positions(a),
        Command::Decide(a) => decide(a),
        Command::Oracle(a) => oracle(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("chipsplit: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
