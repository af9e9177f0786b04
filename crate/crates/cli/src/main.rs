//! Command-line entry point: parse a THF problem, search for orienting
//! parameters (`prove`) or check a given parameter file (`check`), and
//! report `YES` / `MAYBE` / `ERROR` with stable exit codes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use ncpo::enumerate::EnumBounds;
use ncpo::order::{OrderConfig, Session};
use ncpo::params::{parse_params, render_params, validate_params, OrderParams};
use ncpo::problem::validate_rules;
use ncpo::prove::{prove, Backend, SmtConfig, Verdict};
use ncpo::smt::SolverCommand;
use ncpo::structure::Marked;
use ncpo::thf::{infer_arities, parse_problem};
use ncpo::trace::ProofTrace;
use ncpo::Problem;

#[derive(Parser)]
#[command(
    name = "ncpo",
    about = "Termination prover for higher-order rewrite rules on βη-normal forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for order parameters that orient every rule.
    Prove(RunArgs),
    /// Check a given parameter file against the rules.
    Check(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Input problem file(s) in TPTP THF syntax.
    #[arg(required = true)]
    file: Vec<PathBuf>,

    /// Search backend.
    #[arg(long, value_enum, default_value_t = BackendArg::Smt)]
    backend: BackendArg,

    /// External SMT solver command (program plus leading arguments);
    /// defaults to z3, then cvc5, then the bundled ncpo-smt.
    #[arg(long)]
    solver: Option<String>,

    /// Solver timeout in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,

    /// Parameter file (check mode only).
    #[arg(long)]
    params: Option<PathBuf>,

    /// Print the parameter assignment and per-rule proof traces.
    #[arg(long)]
    print_proof: bool,

    /// Write the generated SMT script to this file.
    #[arg(long)]
    dump_smt: Option<PathBuf>,

    /// Suppress the timing line (for byte-identical output).
    #[arg(long)]
    no_timing: bool,

    /// Print judgment counts and memo statistics.
    #[arg(long)]
    stats: bool,

    /// Process input files with this many threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Smt,
    Enum,
}

/// Exit codes: YES = 0, MAYBE = 1, ERROR = 2.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Yes,
    Maybe,
    Error,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Yes => 0,
            Outcome::Maybe => 1,
            Outcome::Error => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (check_mode, args) = match &cli.command {
        Command::Prove(a) => (false, a),
        Command::Check(a) => (true, a),
    };
    if check_mode && args.params.is_none() {
        eprintln!("error: check mode requires --params FILE");
        return ExitCode::from(2);
    }
    if !check_mode && args.params.is_some() {
        eprintln!("error: prove mode does not take --params (use check)");
        return ExitCode::from(2);
    }

    let reports = run_files(check_mode, args);
    let multiple = args.file.len() > 1;
    let mut worst = Outcome::Yes;
    for (path, (outcome, report)) in args.file.iter().zip(&reports) {
        if multiple {
            println!("% file: {}", path.display());
        }
        print!("{report}");
        if outcome.code() > worst.code() {
            worst = *outcome;
        }
    }
    ExitCode::from(worst.code())
}

fn run_files(check_mode: bool, args: &RunArgs) -> Vec<(Outcome, String)> {
    let jobs = args.jobs.max(1).min(args.file.len().max(1));
    if jobs <= 1 {
        return args
            .file
            .iter()
            .map(|f| run_one(check_mode, args, f))
            .collect();
    }
    let mut results: Vec<Option<(Outcome, String)>> = vec![None; args.file.len()];
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= args.file.len() {
                    break;
                }
                let r = run_one(check_mode, args, &args.file[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results.into_iter().map(Option::unwrap).collect()
}

fn run_one(check_mode: bool, args: &RunArgs, path: &Path) -> (Outcome, String) {
    let start = Instant::now();
    match try_run(check_mode, args, path) {
        Ok((outcome, body)) => {
            let mut report = String::new();
            let verdict = match outcome {
                Outcome::Yes => "YES",
                Outcome::Maybe => "MAYBE",
                Outcome::Error => "ERROR",
            };
            writeln!(report, "{verdict}").unwrap();
            if !args.no_timing {
                writeln!(report, "% time: {:.3}", start.elapsed().as_secs_f64()).unwrap();
            }
            report.push_str(&body);
            (outcome, report)
        }
        Err(msg) => {
            let mut report = String::from("ERROR\n");
            if !args.no_timing {
                writeln!(report, "% time: {:.3}", start.elapsed().as_secs_f64()).unwrap();
            }
            writeln!(report, "% {msg}").unwrap();
            (Outcome::Error, report)
        }
    }
}

fn try_run(check_mode: bool, args: &RunArgs, path: &Path) -> Result<(Outcome, String), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let problem = parse_problem(&text, &path.display().to_string())
        .map_err(|e| format!("parse error: {e}"))?;
    let problem = infer_arities(&problem);
    validate_rules(&problem).map_err(|errors| {
        let msgs: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
        format!("invalid rules: {}", msgs.join("; "))
    })?;

    if check_mode {
        check_problem(args, &problem)
    } else {
        prove_problem(args, &problem)
    }
}

fn check_problem(args: &RunArgs, problem: &Problem) -> Result<(Outcome, String), String> {
    let params_path = args.params.as_ref().expect("checked in main");
    let text = std::fs::read_to_string(params_path)
        .map_err(|e| format!("cannot read {}: {e}", params_path.display()))?;
    let params =
        parse_params(&text, problem).map_err(|e| format!("parameter file error: {e}"))?;
    if let Err(violations) = validate_params(problem, &params) {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(format!("inadmissible parameters: {}", msgs.join("; ")));
    }
    let mut traces = Vec::new();
    let mut stats_lines = Vec::new();
    for rule in &problem.rules {
        let mut session = Session::new(&params, OrderConfig::default());
        let trace = session.gt_tau(&rule.lhs, &rule.rhs, &Marked::new());
        if args.stats {
            stats_lines.push(format!(
                "% stats: rule {} calls={} memo_hits={} cycle_cuts={}",
                rule.name, session.stats.calls, session.stats.memo_hits, session.stats.cycle_cuts
            ));
        }
        match trace {
            Some(t) => traces.push(t),
            None => {
                let mut body = String::new();
                writeln!(body, "% rule {} is not orientable", rule.name).unwrap();
                for line in stats_lines {
                    writeln!(body, "{line}").unwrap();
                }
                return Ok((Outcome::Maybe, body));
            }
        }
    }
    let mut body = String::new();
    for line in stats_lines {
        writeln!(body, "{line}").unwrap();
    }
    if args.print_proof {
        body.push_str(&proof_block(problem, &params, &traces));
    }
    Ok((Outcome::Yes, body))
}

fn prove_problem(args: &RunArgs, problem: &Problem) -> Result<(Outcome, String), String> {
    let backend = match args.backend {
        BackendArg::Enum => Backend::Enumeration(EnumBounds::default()),
        BackendArg::Smt => {
            let solver = resolve_solver(args.solver.as_deref())?;
            let mut cfg = SmtConfig::new(solver);
            cfg.timeout = Duration::from_secs(args.timeout);
            cfg.dump_smt = args.dump_smt.clone();
            Backend::Smt(cfg)
        }
    };
    let result = prove(problem, &backend).map_err(|e| e.to_string())?;
    let mut body = String::new();
    if args.stats {
        for d in &result.diagnostics {
            writeln!(body, "% stats: {d}").unwrap();
        }
        for t in &result.traces {
            writeln!(body, "% stats: trace nodes={}", t.node_count()).unwrap();
        }
    }
    let outcome = match result.verdict {
        Verdict::Proved => Outcome::Yes,
        Verdict::NotProvable | Verdict::Unknown => Outcome::Maybe,
    };
    if outcome == Outcome::Maybe {
        for d in &result.diagnostics {
            writeln!(body, "% {d}").unwrap();
        }
    }
    if outcome == Outcome::Yes && args.print_proof {
        let params = result.params.as_ref().expect("proved implies params");
        body.push_str(&proof_block(problem, params, &result.traces));
    }
    Ok((outcome, body))
}

fn proof_block(problem: &Problem, params: &OrderParams, traces: &[ProofTrace]) -> String {
    let mut out = String::new();
    out.push_str(&render_params(params, problem));
    for (rule, trace) in problem.rules.iter().zip(traces) {
        writeln!(out, "% proof of rule {}:", rule.name).unwrap();
        out.push_str(&trace.render());
    }
    out
}

/// Resolution order: an explicit --solver command, then z3 or cvc5 from
/// PATH, then the bundled ncpo-smt binary next to this executable.
fn resolve_solver(explicit: Option<&str>) -> Result<SolverCommand, String> {
    if let Some(cmd) = explicit {
        let mut parts = cmd.split_whitespace().map(str::to_string);
        let program = parts.next().ok_or("empty --solver command")?;
        return Ok(SolverCommand {
            program,
            args: parts.collect(),
        });
    }
    if find_in_path("z3").is_some() {
        return Ok(SolverCommand {
            program: "z3".into(),
            args: vec![],
        });
    }
    if find_in_path("cvc5").is_some() {
        return Ok(SolverCommand {
            program: "cvc5".into(),
            args: vec!["--produce-models".into()],
        });
    }
    let sibling = std::env::current_exe()
        .ok()
        .and_then(|p| p.parent().map(|d| d.join(solver_file_name())))
        .filter(|p| p.is_file());
    match sibling {
        Some(p) => Ok(SolverCommand {
            program: p.display().to_string(),
            args: vec![],
        }),
        None => Err("no SMT solver found (install z3 or cvc5, or pass --solver)".into()),
    }
}

fn solver_file_name() -> &'static str {
    if cfg!(windows) {
        "ncpo-smt.exe"
    } else {
        "ncpo-smt"
    }
}

fn find_in_path(program: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    for dir in std::env::split_paths(&path) {
        let candidate = dir.join(program);
        if candidate.is_file() {
            return Some(candidate);
        }
    }
    None
}
