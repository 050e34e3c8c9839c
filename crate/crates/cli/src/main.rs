//! Command-line front end: verdicts, protocol runs, cycle certificates,
//! oracle cross-checks, and round-count benchmarks on weighted digraphs.
//!
//! Exit codes: 0 for success or a positive verdict, 1 for a negative verdict
//! (not doubly stochasticable, not C-regular, run did not converge,
//! disagreeing oracles), 2 for usage, parse, or I/O errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use digraph_balance::balance::{BalancePolicy, RoundTrace};
use digraph_balance::bench::benchmark_rounds;
use digraph_balance::characterize::{
    is_doubly_stochasticable, is_weight_balanceable, DsDecision, DsMethod, DsObstruction,
};
use digraph_balance::cregular::{
    dsify_with_self_loops, run_cregular, run_cregular_with_schedule, CRegularTrace,
    CRegularVerdict,
};
use digraph_balance::cycles::{ds_cycle_set, principal_cycle_set, CycleSetCertificate};
use digraph_balance::flow::flow_feasibility_oracle;
use digraph_balance::graph::{Connectivity, WeightedDigraph};
use digraph_balance::io::{
    parse_choice_sequence, parse_cregular_schedule, parse_graph, serialize_graph, GraphFormat,
    TraceDocument,
};
use digraph_balance::weight::ExactWeight;
use digraph_balance::{run_wbda, run_wbmda};

#[derive(Parser)]
#[command(
    name = "digraph-balance",
    about = "Weight-balanced and doubly stochastic weight assignments on digraphs",
    version
)]
struct Cli {
    /// Seed for every randomized stage (only `bench` draws randomness; the
    /// other commands are deterministic regardless).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report connectivity, weight-balanceability, and doubly
    /// stochasticability of a digraph.
    Check(CheckArgs),
    /// Run a distributed balancing protocol to a weight-balanced assignment.
    Balance(BalanceArgs),
    /// Compute a doubly stochastic assignment (self-loop route or the
    /// load/height protocol).
    Dsify(DsifyArgs),
    /// Compute a principal or DS cycle-set certificate.
    Cycles(CyclesArgs),
    /// Cross-check the doubly-stochasticability deciders against each other.
    Oracle(OracleArgs),
    /// Measure protocol round counts on random digraphs.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
    EdgeList,
}

impl From<FormatArg> for GraphFormat {
    fn from(value: FormatArg) -> GraphFormat {
        match value {
            FormatArg::Json => GraphFormat::Json,
            FormatArg::Dot => GraphFormat::DotSubset,
            FormatArg::EdgeList => GraphFormat::EdgeList,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TraceFormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct InputArgs {
    /// Graph file to read.
    #[arg(long)]
    input: PathBuf,
    /// Graph file format (for both input and output).
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

impl InputArgs {
    fn load(&self) -> Result<WeightedDigraph> {
        let text = std::fs::read_to_string(&self.input)
            .with_context(|| format!("reading {}", self.input.display()))?;
        parse_graph(&text, self.format.into())
            .with_context(|| format!("parsing {}", self.input.display()))
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the resulting graph here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the run trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Trace serialization format.
    #[arg(long, value_enum, default_value = "json")]
    trace_format: TraceFormatArg,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Decision method for doubly stochasticability.
    #[arg(long, value_enum, default_value = "flow")]
    method: MethodArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    CycleCover,
    Flow,
}

impl From<MethodArg> for DsMethod {
    fn from(value: MethodArg) -> DsMethod {
        match value {
            MethodArg::CycleCover => DsMethod::CycleCover,
            MethodArg::Flow => DsMethod::Flow,
        }
    }
}

#[derive(Args)]
struct BalanceArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Which protocol to run.
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// `lowest-index` or `replay=FILE`.
    #[arg(long, default_value = "lowest-index")]
    policy: String,
    /// Round budget (default n^5).
    #[arg(long)]
    max_rounds: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Wbda,
    Wbmda,
}

#[derive(Args)]
struct DsifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Balance with the min-weight protocol, then add self-loops and divide.
    #[arg(long, conflicts_with = "cregular")]
    self_loops: bool,
    /// Run the load/height protocol; requires --c.
    #[arg(long)]
    cregular: bool,
    /// Row/column total for --cregular: a positive integer or `auto`
    /// (|E| - |V| + 1, at which a negative verdict certifies that no doubly
    /// stochastic assignment exists).
    #[arg(long)]
    c: Option<String>,
    /// Replay schedule file for --cregular.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Sweep budget for --cregular.
    #[arg(long)]
    max_steps: Option<usize>,
}

#[derive(Args)]
struct CyclesArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Minimum edge cover by disjoint-cycle unions.
    #[arg(long, conflicts_with = "ds_set")]
    principal: bool,
    /// Minimum edge cover by spanning disjoint-cycle unions.
    #[arg(long)]
    ds_set: bool,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Run every decider and compare the verdicts.
    #[arg(long)]
    cross_check: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,12")]
    sizes: Vec<usize>,
    /// Trials per size.
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

/// Verdict-aware output: `Positive`/`Negative` choose exit code 0/1.
enum Verdict {
    Positive,
    Negative,
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn write_graph(
    g: &WeightedDigraph,
    format: FormatArg,
    output: &Option<PathBuf>,
) -> Result<()> {
    write_or_print(output, &serialize_graph(g, format.into()))
}

fn write_trace(doc: &TraceDocument, args: &OutputArgs) -> Result<()> {
    let Some(path) = &args.trace else {
        return Ok(());
    };
    let content = match args.trace_format {
        TraceFormatArg::Json => doc.to_json(),
        TraceFormatArg::Csv => doc.to_csv(),
    };
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn run_check(args: &CheckArgs) -> Result<Verdict> {
    let g = args.input.load()?;
    let report = g.classify_connectivity();
    let connectivity = match report.class {
        Connectivity::StronglyConnected => "strongly_connected",
        Connectivity::StronglySemiconnected => "strongly_semiconnected",
        Connectivity::Neither => "neither",
    };
    println!("connectivity={connectivity}");
    println!("components={}", report.components.len());
    let (balanceable, witness) = is_weight_balanceable(&g);
    println!("weight_balanceable={balanceable}");
    if let Some((from, to)) = witness {
        println!("edge_outside_cycles={from}->{to}");
    }
    let decision = is_doubly_stochasticable(&g, args.method.into())?;
    match decision {
        DsDecision::Yes { .. } => {
            println!("doubly_stochasticable=true");
            Ok(Verdict::Positive)
        }
        DsDecision::No { obstruction } => {
            println!("doubly_stochasticable=false");
            let reason = match obstruction {
                DsObstruction::NotSemiconnected { witness_edge } => {
                    format!("edge_outside_cycles:{}->{}", witness_edge.0, witness_edge.1)
                }
                DsObstruction::IsolatedVertex { vertex } => format!("isolated_vertex:{vertex}"),
                DsObstruction::ComponentNotCoverable { component } => format!(
                    "component_without_spanning_cover:{}",
                    component
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("+")
                ),
            };
            println!("reason={reason}");
            Ok(Verdict::Negative)
        }
    }
}

fn parse_policy(text: &str) -> Result<BalancePolicy> {
    if text == "lowest-index" || text == "lowest_index" {
        return Ok(BalancePolicy::LowestIndex);
    }
    if let Some(path) = text
        .strip_prefix("replay=")
        .or_else(|| text.strip_prefix("replay:"))
    {
        let content =
            std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let choices = parse_choice_sequence(&content).context("parsing replay file")?;
        return Ok(BalancePolicy::Replay(choices));
    }
    bail!("unknown policy {text:?}; expected `lowest-index` or `replay=FILE`");
}

fn run_balance(args: &BalanceArgs) -> Result<Verdict> {
    let g = args.input.load()?;
    let policy = parse_policy(&args.policy)?;
    let trace: RoundTrace = match args.algo {
        AlgoArg::Wbda => run_wbda(&g, &policy, args.max_rounds)?,
        AlgoArg::Wbmda => run_wbmda(&g, &policy, args.max_rounds)?,
    };
    let doc = TraceDocument::from_balance_trace(&trace);
    println!("algorithm={}", doc.algorithm);
    println!("policy={}", doc.policy);
    println!("rounds={}", trace.rounds());
    println!("converged={}", trace.converged());
    let values: Vec<String> = trace
        .lyapunov_values()
        .iter()
        .map(|v| v.to_string())
        .collect();
    println!("lyapunov={}", values.join(","));
    write_trace(&doc, &args.output)?;
    write_graph(&trace.final_graph, args.input.format, &args.output.output)?;
    Ok(if trace.converged() {
        Verdict::Positive
    } else {
        Verdict::Negative
    })
}

fn parse_c(text: &str, g: &WeightedDigraph) -> Result<u64> {
    if text == "auto" {
        return Ok((g.edge_count() - g.order() + 1) as u64);
    }
    let c: u64 = text
        .parse()
        .map_err(|_| anyhow!("--c expects a positive integer or `auto`, got {text:?}"))?;
    if c == 0 {
        bail!("--c must be positive");
    }
    Ok(c)
}

fn run_dsify(args: &DsifyArgs) -> Result<Verdict> {
    let g = args.input.load()?;
    if args.self_loops {
        let ds = dsify_with_self_loops(&g)?;
        println!("method=self_loops");
        println!("doubly_stochastic=true");
        write_graph(&ds, args.input.format, &args.output.output)?;
        return Ok(Verdict::Positive);
    }
    if !args.cregular {
        bail!("choose --self-loops or --cregular");
    }
    let c_text = args
        .c
        .as_deref()
        .ok_or_else(|| anyhow!("--cregular requires --c N or --c auto"))?;
    let c = parse_c(c_text, &g)?;
    let (verdict, trace): (CRegularVerdict, CRegularTrace) = match &args.schedule {
        Some(path) => {
            let content = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let schedule = parse_cregular_schedule(&content).context("parsing schedule")?;
            run_cregular_with_schedule(&g, c, &schedule)?
        }
        None => run_cregular(&g, c, args.max_steps)?,
    };
    println!("method=cregular");
    println!("c={c}");
    println!("iterations={}", trace.iterations());
    let policy = if args.schedule.is_some() {
        "replay"
    } else {
        "lowest_index"
    };
    let doc = TraceDocument::from_cregular_trace(&verdict, &trace, policy);
    write_trace(&doc, &args.output)?;
    match verdict {
        CRegularVerdict::CRegular { assignment } => {
            println!("verdict=c_regular");
            let scale = ExactWeight::from_integer(c as i64).reciprocal();
            let mut ds = if assignment.allows_self_loops() {
                WeightedDigraph::new_with_self_loops(assignment.order())
            } else {
                WeightedDigraph::new(assignment.order())
            };
            for (i, j, w) in assignment.edges() {
                ds.set_weight(i, j, w * &scale)
                    .expect("assignment edges are in range");
            }
            write_graph(&ds, args.input.format, &args.output.output)?;
            Ok(Verdict::Positive)
        }
        CRegularVerdict::NotCRegular { announcer } => {
            println!("verdict=not_c_regular");
            if let Some(vertex) = announcer {
                println!("announcer={vertex}");
            }
            if c >= (g.edge_count() - g.order() + 1) as u64 {
                println!("doubly_stochasticable=false");
            }
            Ok(Verdict::Negative)
        }
    }
}

fn certificate_json(cert: &CycleSetCertificate) -> String {
    let kind = match cert.kind {
        digraph_balance::cycles::CycleSetKind::Principal => "principal",
        digraph_balance::cycles::CycleSetKind::DoublyStochastic => "ds",
    };
    let members: Vec<Vec<Vec<usize>>> = cert
        .members
        .iter()
        .map(|union| {
            union
                .cycles()
                .iter()
                .map(|cycle| cycle.vertices().to_vec())
                .collect()
        })
        .collect();
    let value = serde_json::json!({
        "kind": kind,
        "cardinality": cert.cardinality,
        "members": members,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("certificate serializes");
    text.push('\n');
    text
}

fn run_cycles(args: &CyclesArgs) -> Result<Verdict> {
    let g = args.input.load()?;
    if args.principal {
        let cert = principal_cycle_set(&g)?;
        write_or_print(&args.output, &certificate_json(&cert))?;
        return Ok(Verdict::Positive);
    }
    if !args.ds_set {
        bail!("choose --principal or --ds-set");
    }
    match ds_cycle_set(&g)? {
        Some(cert) => {
            write_or_print(&args.output, &certificate_json(&cert))?;
            Ok(Verdict::Positive)
        }
        None => {
            println!("ds_cycle_set=none");
            println!("doubly_stochasticable=false");
            Ok(Verdict::Negative)
        }
    }
}

fn run_oracle(args: &OracleArgs) -> Result<Verdict> {
    if !args.cross_check {
        bail!("oracle requires --cross-check");
    }
    let g = args.input.load()?;
    let c = (g.edge_count() - g.order() + 1) as u64;
    let by_cover = is_doubly_stochasticable(&g, DsMethod::CycleCover)?
        .is_doubly_stochasticable();
    let by_flow = is_doubly_stochasticable(&g, DsMethod::Flow)?.is_doubly_stochasticable();
    println!("cycle_cover={by_cover}");
    println!("flow={by_flow}");
    let report = g.classify_connectivity();
    let by_protocol = if report.class == Connectivity::StronglyConnected {
        let (feasible, _) = flow_feasibility_oracle(&g, c)?;
        let (verdict, _) = run_cregular(&g, c, None)?;
        println!("flow_at_cover_bound={feasible}");
        println!("cregular_at_cover_bound={}", verdict.is_c_regular());
        Some(verdict.is_c_regular())
    } else {
        println!("cregular_at_cover_bound=skipped_not_strongly_connected");
        None
    };
    let all_agree =
        by_cover == by_flow && by_protocol.is_none_or(|p| p == by_cover);
    println!("agree={all_agree}");
    if !all_agree {
        bail!("oracles disagree");
    }
    Ok(if by_cover {
        Verdict::Positive
    } else {
        Verdict::Negative
    })
}

fn run_bench(args: &BenchArgs, seed: u64) -> Result<Verdict> {
    if args.sizes.iter().any(|&n| n < 2) {
        bail!("sizes must be at least 2");
    }
    let report = benchmark_rounds(&args.sizes, args.trials, seed);
    let mut out = String::new();
    writeln!(out, "n,trials,mean_rounds,max_rounds,quartic_bound").unwrap();
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{:.2},{},{}",
            row.n, row.trials, row.mean_rounds, row.max_rounds, row.bound
        )
        .unwrap();
    }
    match report.fitted_exponent {
        Some(exponent) => writeln!(out, "fitted_exponent={exponent:.3}").unwrap(),
        None => writeln!(out, "fitted_exponent=n/a").unwrap(),
    }
    print!("{out}");
    Ok(Verdict::Positive)
}

fn dispatch(cli: &Cli) -> Result<Verdict> {
    match &cli.command {
        Command::Check(args) => run_check(args),
        Command::Balance(args) => run_balance(args),
        Command::Dsify(args) => run_dsify(args),
        Command::Cycles(args) => run_cycles(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Bench(args) => run_bench(args, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(Verdict::Positive) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(2)
        }
    }
}
