use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use twavrp::instance::{generate_scenarios, parse_spliet};
use twavrp::oracle::{check_oracle_size, enumeration_oracle};
use twavrp::report::{OutOfSample, RunReport, SavingsRow};
use twavrp::search::{out_of_sample_instance, Evaluation};
use twavrp::separation::{brute_force_delta, solve_separation};
use twavrp::vrptw::solve_vrptw;
use twavrp::{
    evaluate_assignment, parse_instance, solve_twavrp, Assignment, Instance, SearchConfig,
    SearchError, SolveMode, SubproblemSpec, TerminationReason, WindowDomain,
};

#[derive(Parser)]
#[command(
    name = "twavrp",
    version,
    about = "Time window assignment vehicle routing solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print a report.
    Solve(SolveArgs),
    /// Append generated demand scenarios to an instance.
    Generate(GenerateArgs),
    /// Expected cost of a fixed window assignment.
    Evaluate(EvaluateArgs),
    /// Compare the solver against exhaustive enumeration on a small instance.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Spliet,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Heuristic,
}

impl From<Mode> for SolveMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => SolveMode::Exact,
            Mode::Heuristic => SolveMode::Heuristic,
        }
    }
}

#[derive(Args)]
struct InstanceArg {
    /// Instance file.
    instance: PathBuf,
    /// Input layout.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InstanceArg,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Scenario subproblems solved concurrently.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long)]
    no_path_branching: bool,
    /// Path branching margin; 1 for integral travel times, 1e-6 otherwise.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluate the assignment on this many freshly generated scenarios.
    #[arg(long, default_value_t = 0)]
    out_of_sample: usize,
    /// Scenario counts for the savings table, e.g. `1,2,5`.
    #[arg(long, value_delimiter = ',')]
    savings: Vec<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    input: InstanceArg,
    /// Number of scenarios to append.
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InstanceArg,
    /// Assignment document, or a report containing one.
    assignment: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    out_of_sample: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InstanceArg,
    /// Grid step for continuous window starts.
    #[arg(long, default_value_t = 0.25)]
    grid: f64,
    /// Grid step of the separation oracle.
    #[arg(long, default_value_t = 0.01)]
    separation_grid: f64,
    /// Shift the solver's value before comparing.
    #[arg(long, hide = true, default_value_t = 0.0)]
    perturb: f64,
}

/// Reported on stderr with exit code 1.
struct Failure(String);

impl Failure {
    fn error(message: impl Into<String>) -> Self {
        Self(message.into())
    }
}

type Outcome = Result<u8, Failure>;

fn read_instance(arg: &InstanceArg) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(&arg.instance)
        .map_err(|e| Failure::error(format!("{}: {e}", arg.instance.display())))?;
    let parsed = match arg.format {
        Format::Json => parse_instance(&text),
        Format::Spliet => parse_spliet(&text),
    };
    parsed.map_err(|e| Failure::error(format!("{}: {e}", arg.instance.display())))
}

fn instance_label(inst: &Instance, path: &Path) -> String {
    inst.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map_or("instance".into(), |s| s.to_string_lossy().into_owned())
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn first_scenarios(inst: &Instance, k: usize) -> Instance {
    let mut sub = inst.clone();
    sub.scenarios.truncate(k);
    let total: f64 = sub.scenarios.iter().map(|s| s.probability).sum();
    for sc in &mut sub.scenarios {
        sc.probability /= total;
    }
    sub
}

fn evaluate_out_of_sample(
    inst: &Instance,
    tau: &Assignment,
    mode: SolveMode,
    count: usize,
    seed: u64,
) -> Result<OutOfSample, Failure> {
    let fresh =
        out_of_sample_instance(inst, count, seed).map_err(|e| Failure::error(e.to_string()))?;
    let mut out = OutOfSample {
        scenarios: count,
        seed,
        expected_cost: None,
        infeasible: None,
    };
    match evaluate_assignment(&fresh, tau, mode) {
        Ok(ev) => out.expected_cost = Some(ev.expected_cost),
        Err(e @ SearchError::InfeasibleScenario { .. }) => out.infeasible = Some(e.to_string()),
        Err(e) => return Err(Failure::error(e.to_string())),
    }
    Ok(out)
}

fn solve(args: SolveArgs) -> Outcome {
    let inst = read_instance(&args.input)?;
    let cfg = SearchConfig {
        mode: args.mode.into(),
        time_limit: args.time_limit,
        workers: args.threads,
        path_branching: !args.no_path_branching,
        epsilon: args.epsilon,
        seed: args.seed,
        max_nodes: args.max_nodes,
        ..SearchConfig::default()
    };
    let out = solve_twavrp(&inst, &cfg).map_err(|e| Failure::error(e.to_string()))?;
    let mut report = RunReport::new(
        &instance_label(&inst, &args.input.instance),
        &cfg,
        &out,
        &inst,
    );
    if let Some(inc) = &out.incumbent {
        if args.out_of_sample > 0 {
            report.out_of_sample = Some(evaluate_out_of_sample(
                &inst,
                &inc.assignment,
                cfg.mode,
                args.out_of_sample,
                args.seed,
            )?);
        }
    }
    if !args.savings.is_empty() {
        let mut rows = Vec::new();
        for &k in &args.savings {
            if k == 0 || k > inst.scenario_count() {
                return Err(Failure::error(format!(
                    "savings count {k} is outside 1..={}",
                    inst.scenario_count()
                )));
            }
            let sub = solve_twavrp(&first_scenarios(&inst, k), &cfg)
                .map_err(|e| Failure::error(e.to_string()))?;
            let expected_cost = match sub.incumbent {
                Some(inc) => match evaluate_assignment(&inst, &inc.assignment, cfg.mode) {
                    Ok(ev) => Some(ev.expected_cost),
                    Err(SearchError::InfeasibleScenario { .. }) => None,
                    Err(e) => return Err(Failure::error(e.to_string())),
                },
                None => None,
            };
            rows.push(SavingsRow {
                scenarios: k,
                expected_cost,
            });
        }
        report.savings = Some(rows);
    }
    report.check_consistency().map_err(Failure::error)?;
    if let Some(path) = &args.report {
        write_file(path, &report.to_json())?;
    }
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.table());
    }
    match out.termination {
        TerminationReason::Optimal => Ok(0),
        TerminationReason::Infeasible => Err(Failure::error("no feasible assignment exists")),
        TerminationReason::Completed
        | TerminationReason::TimeLimit
        | TerminationReason::NodeLimit => Ok(2),
    }
}

fn generate(args: GenerateArgs) -> Outcome {
    if args.count == 0 {
        return Err(Failure::error("--count must be at least 1"));
    }
    let base = read_instance(&args.input)?;
    let out = generate_scenarios(&base, args.count, args.seed)
        .map_err(|e| Failure::error(e.to_string()))?;
    let text = out.to_json();
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => println!("{text}"),
    }
    Ok(0)
}

fn read_assignment(path: &Path) -> Result<Assignment, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
    if let Some(inner) = value.get_mut("assignment") {
        value = inner.take();
    }
    serde_json::from_value(value)
        .map_err(|e| Failure::error(format!("{}: not an assignment: {e}", path.display())))
}

fn scenario_table(ev: &Evaluation, inst: &Instance) -> String {
    let mut out = format!("{:>8}  {:>11}  {:>10}\n", "scenario", "probability", "cost");
    for (s, c) in ev.scenario_costs.iter().enumerate() {
        out.push_str(&format!(
            "{s:>8}  {:>11.4}  {c:>10.2}\n",
            inst.scenarios[s].probability
        ));
    }
    out
}

fn evaluate(args: EvaluateArgs) -> Outcome {
    let inst = read_instance(&args.input)?;
    let tau = read_assignment(&args.assignment)?;
    let mode: SolveMode = args.mode.into();
    let ev = evaluate_assignment(&inst, &tau, mode).map_err(|e| Failure::error(e.to_string()))?;
    let oos = if args.out_of_sample > 0 {
        Some(evaluate_out_of_sample(
            &inst,
            &tau,
            mode,
            args.out_of_sample,
            args.seed,
        )?)
    } else {
        None
    };
    println!("in-sample expected cost  {:.2}", ev.expected_cost);
    if let Some(o) = &oos {
        match (o.expected_cost, &o.infeasible) {
            (Some(c), _) => println!("out-of-sample ({:>3})      {c:.2}", o.scenarios),
            (None, Some(e)) => println!("out-of-sample ({:>3})      {e}", o.scenarios),
            (None, None) => {}
        }
    }
    print!("\n{}", scenario_table(&ev, &inst));
    if let Some(path) = &args.report {
        let doc = json!({
            "instance": instance_label(&inst, &args.input.instance),
            "assignment": tau,
            "in_sample": ev,
            "out_of_sample": oos,
        });
        write_file(
            path,
            &serde_json::to_string_pretty(&doc).expect("report serializes"),
        )?;
    }
    Ok(0)
}

fn oracle(args: OracleArgs) -> Outcome {
    let inst = read_instance(&args.input)?;
    check_oracle_size(&inst).map_err(Failure::error)?;
    let continuous = inst
        .customers
        .iter()
        .any(|c| matches!(c.domain, WindowDomain::Continuous { .. }));
    let tolerance = if continuous { args.grid } else { 1e-6 };
    let mut mismatches = Vec::new();

    let found = match solve_twavrp(&inst, &SearchConfig::default()) {
        Ok(o) => Some(o.upper_bound + args.perturb),
        Err(SearchError::Infeasible { .. }) => None,
        Err(e) => return Err(Failure::error(e.to_string())),
    };
    let reference = enumeration_oracle(&inst, args.grid)
        .map_err(|e| Failure::error(e.to_string()))?
        .map(|r| r.value);
    let fmt = |v: Option<f64>| v.map_or("infeasible".to_string(), |x| format!("{x:.6}"));
    println!("search      {}", fmt(found));
    println!("enumeration {}", fmt(reference));
    match (found, reference) {
        (Some(a), Some(b)) => {
            // The grid only restricts the enumeration, so it can never beat the solver.
            if a > b + 1e-6 || b - a > tolerance + 1e-6 {
                mismatches.push(format!(
                    "optimum {a} vs enumeration {b} (tolerance {tolerance})"
                ));
            }
        }
        (None, None) => {}
        (a, b) => mismatches.push(format!("optimum {} vs enumeration {}", fmt(a), fmt(b))),
    }

    let params = inst.all_scenario_params();
    let mut sets = Vec::new();
    for p in &params {
        match solve_vrptw(&SubproblemSpec::exogenous(p)) {
            Ok(sol) => sets.push(sol.routes),
            Err(_) => break,
        }
    }
    if sets.len() == params.len() {
        let windows = inst.exogenous_windows();
        let exact = solve_separation(&sets, &windows, &inst)
            .map_err(|e| Failure::error(e.to_string()))?
            .delta;
        let brute = brute_force_delta(&sets, &windows, &inst, args.separation_grid);
        println!("root delta  {exact:.6} (grid {brute:.6})");
        if exact > brute + 1e-6 || exact < brute - args.separation_grid - 1e-6 {
            mismatches.push(format!("root separation {exact} vs grid {brute}"));
        }
    }

    if mismatches.is_empty() {
        println!("match");
        Ok(0)
    } else {
        for m in &mismatches {
            println!("mismatch: {m}");
        }
        Err(Failure::error(format!("{} mismatch(es)", mismatches.len())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Generate(a) => generate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.0);
            ExitCode::from(1)
        }
    }
}
