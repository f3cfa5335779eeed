//! `tribowave`: function approximation and collocation solves of the
//! built-in singular boundary value problems.

mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tribowave::approx::{approx_max_error, project, TestFunction, DEFAULT_QUAD_ORDER};
use tribowave::basis::{Basis, BasisConfig};
use tribowave::par::Execution;
use tribowave::problems::{
    acceptance_targets, all_builtins, builtin, label, perturbation, BenchmarkProblem, Check, NAMES,
};
use tribowave::report::{emit, fmt_sci, run_one, solution_table, ErrorReport, Format, SweepOptions, DEFAULT_GRID_SIZE};
use tribowave::solver::{DEFAULT_MAX_ITER, DEFAULT_TOL};

const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Parser)]
#[command(
    name = "tribowave",
    version,
    about = "Tribonacci wavelet approximation and collocation solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in problems.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Project a test function onto the wavelet basis.
    Approx {
        /// `sinc` or `tlogt`.
        function: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long = "M", default_value_t = 5)]
        m: usize,
        /// Points in the error grid.
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one built-in problem.
    Solve {
        problem: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long = "M", default_value_t = 8)]
        m: usize,
        #[command(flatten)]
        common: SolveArgs,
        /// Points in the solution grid.
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one built-in for several M.
    Sweep {
        problem: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long = "M", value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[command(flatten)]
        common: SolveArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the published tables and check the accuracy targets.
    Bench {
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value = "bench-out")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Perturbation parameter (perturbation only; default 0.03125).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

enum Failure {
    Usage(String),
    NotConverged,
    Solver(String),
    Other(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(EXIT_USAGE)
            }
            Failure::NotConverged => {
                eprintln!("warning: iteration did not converge; best iterate written");
                ExitCode::from(EXIT_NOT_CONVERGED)
            }
            Failure::Solver(msg) => {
                eprintln!("solver error: {msg}");
                ExitCode::from(EXIT_SOLVER)
            }
            Failure::Other(msg) => {
                eprintln!("error: {msg}");
                ExitCode::FAILURE
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List { json } => cmd_list(json),
        Command::Approx {
            function,
            k,
            m,
            grid,
            out,
        } => cmd_approx(&function, k, m, grid, out),
        Command::Solve {
            problem,
            k,
            m,
            common,
            grid,
            out,
        } => cmd_solve(&problem, k, m, &common, grid, out),
        Command::Sweep {
            problem,
            k,
            m,
            common,
            out,
        } => cmd_sweep(&problem, k, &m, &common, out),
        Command::Bench { only, out_dir } => cmd_bench(only.as_deref(), &out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn emit_text(body: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => output::write_atomic(path, body).map_err(|e| Failure::Other(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn cmd_list(as_json: bool) -> Result<(), Failure> {
    let problems: Vec<BenchmarkProblem> = NAMES.iter().map(|n| builtin(n).expect("built-in")).collect();
    if as_json {
        let items: Vec<_> = problems
            .iter()
            .map(|p| {
                json!({
                    "name": p.name,
                    "order": p.spec.order(),
                    "summary": p.summary,
                    "exact_solution": p.exact.is_some(),
                    "k": p.paper_config.k,
                    "m_values": p.paper_config.m_values,
                    "initial_guess": p.paper_config.initial_guess,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&items).expect("plain json"));
    } else {
        for p in &problems {
            println!("{:<18} order {}  {}", p.name, p.spec.order(), p.summary);
        }
    }
    Ok(())
}

fn cmd_approx(function: &str, k: u32, m: usize, grid: usize, out: Option<PathBuf>) -> Result<(), Failure> {
    let func = TestFunction::parse(function)
        .ok_or_else(|| Failure::Usage(format!("unknown function `{function}` (expected sinc or tlogt)")))?;
    let config = BasisConfig::new(k, m).map_err(Failure::Usage)?;
    let basis = Arc::new(Basis::build(config).map_err(|e| Failure::Solver(e.to_string()))?);
    let g = |t: f64| func.eval(t);
    let proj =
        project(&g, basis, DEFAULT_QUAD_ORDER, Execution::from_env()).map_err(|e| Failure::Solver(e.to_string()))?;
    let e = &proj.expansion;

    let mut body = String::from("index,n,m,coefficient\n");
    for (j, c) in e.coeffs().iter().enumerate() {
        let (n, mm) = config.split_index(j);
        let _ = writeln!(body, "{j},{n},{mm},{c:e}");
    }
    let _ = writeln!(
        body,
        "\n# max_abs_error {} gram_condition {}",
        fmt_sci(approx_max_error(e, &g, grid)),
        fmt_sci(proj.gram_condition)
    );
    body.push_str("t,g,approx,abs_error\n");
    let n = grid.max(2) - 1;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        let (gv, av) = (g(t), e.eval(t));
        let _ = writeln!(
            body,
            "{},{},{},{}",
            fmt_sci(t),
            fmt_sci(gv),
            fmt_sci(av),
            fmt_sci((gv - av).abs())
        );
    }
    emit_text(&body, out.as_ref())
}

fn resolve_problem(name: &str, eps: Option<f64>) -> Result<BenchmarkProblem, Failure> {
    match (name, eps) {
        ("perturbation", Some(e)) => perturbation(e).map_err(|e| Failure::Usage(e.to_string())),
        (_, Some(_)) => Err(Failure::Usage("--eps applies to the perturbation problem only".into())),
        (n, None) => builtin(n).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn options(common: &SolveArgs, grid: usize) -> Result<SweepOptions, Failure> {
    if common.tol.is_nan() || common.tol <= 0.0 || common.max_iter == 0 || grid < 2 {
        return Err(Failure::Usage(
            "--tol and --max-iter must be positive, --grid at least 2".into(),
        ));
    }
    Ok(SweepOptions {
        tol: common.tol,
        max_iter: common.max_iter,
        grid_size: grid,
        exec: Execution::from_env(),
    })
}

fn cmd_solve(
    name: &str,
    k: u32,
    m: usize,
    common: &SolveArgs,
    grid: usize,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let problem = resolve_problem(name, common.eps)?;
    BasisConfig::new(k, m).map_err(Failure::Usage)?;
    let opts = options(common, grid)?;
    let (mut report, sol) = run_one(&problem, k, m, &opts).map_err(|e| Failure::Solver(e.to_string()))?;
    report.problem = label(&problem);
    print!("{}", emit(std::slice::from_ref(&report), common.format));
    let table = solution_table(&sol, problem.exact.as_ref(), grid);
    match &out {
        Some(_) => emit_text(&table, out.as_ref())?,
        None => print!("\n{table}"),
    }
    if report.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn cmd_sweep(name: &str, k: u32, ms: &[usize], common: &SolveArgs, out: Option<PathBuf>) -> Result<(), Failure> {
    let problem = resolve_problem(name, common.eps)?;
    if let Some(bad) = ms.iter().find(|&&m| BasisConfig::new(k, m).is_err()) {
        return Err(Failure::Usage(format!("invalid M = {bad} for k = {k}")));
    }
    let opts = options(common, DEFAULT_GRID_SIZE)?;
    let rows = tribowave::report::sweep(&problem, k, ms, &opts);
    let mut reports = Vec::new();
    let mut failed = false;
    for row in rows {
        match row {
            Ok(mut r) => {
                r.problem = label(&problem);
                reports.push(r);
            }
            Err(f) => {
                eprintln!("M = {}: {}", f.m, f.error);
                failed = true;
            }
        }
    }
    emit_text(&emit(&reports, common.format), out.as_ref())?;
    if failed {
        Err(Failure::Solver("one or more sweep rows failed".into()))
    } else if reports.iter().any(|r| !r.converged) {
        Err(Failure::NotConverged)
    } else {
        Ok(())
    }
}

struct SummaryRow {
    problem: String,
    m: usize,
    check: Check,
    value: Option<f64>,
    limit: f64,
    published: Option<f64>,
    pass: bool,
}

fn cmd_bench(only: Option<&str>, out_dir: &std::path::Path) -> Result<(), Failure> {
    if let Some(name) = only {
        builtin(name).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let problems: Vec<BenchmarkProblem> = all_builtins()
        .into_iter()
        .filter(|p| only.is_none_or(|n| n == p.name))
        .collect();

    // Every (problem, M) pair as one job so the pool sees the whole bench.
    let mut jobs: Vec<(usize, usize)> = Vec::new();
    for (pi, p) in problems.iter().enumerate() {
        let mut ms = p.paper_config.m_values.clone();
        ms.extend(acceptance_targets(p).iter().map(|t| t.m));
        ms.sort_unstable();
        ms.dedup();
        jobs.extend(ms.into_iter().map(|m| (pi, m)));
    }
    let opts = SweepOptions::default();
    let exec = Execution::from_env();
    let results = exec.map(&jobs, |&(pi, m)| run_one(&problems[pi], 1, m, &opts).map(|(r, _)| r));

    let mut per_file: Vec<(&'static str, Vec<ErrorReport>)> = Vec::new();
    let mut summary = Vec::new();
    let mut solver_failures = 0;
    for (&(pi, m), res) in jobs.iter().zip(results) {
        let p = &problems[pi];
        let report = match res {
            Ok(mut r) => {
                r.problem = label(p);
                Some(r)
            }
            Err(e) => {
                eprintln!("{} M = {m}: {e}", label(p));
                solver_failures += 1;
                None
            }
        };
        for t in acceptance_targets(p).into_iter().filter(|t| t.m == m) {
            let value = report.as_ref().and_then(|r| match t.check {
                Check::MaxAbsError => r.max_abs_error,
                Check::MaxResidual => Some(r.max_residual),
                Check::Iterations => Some(r.iterations as f64),
            });
            let converged = report.as_ref().is_some_and(|r| r.converged);
            summary.push(SummaryRow {
                problem: label(p),
                m,
                check: t.check,
                value,
                limit: t.limit,
                published: p.published(m).filter(|_| t.check != Check::Iterations).map(|e| e.value),
                pass: converged && value.is_some_and(|v| v <= t.limit),
            });
        }
        if let Some(r) = report {
            match per_file.iter_mut().find(|(n, _)| *n == p.name) {
                Some((_, rows)) => rows.push(r),
                None => per_file.push((p.name, vec![r])),
            }
        }
    }

    for (name, rows) in &per_file {
        let path = out_dir.join(format!("{name}.csv"));
        output::write_atomic(&path, &emit(rows, Format::Csv))
            .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    }
    let mut text = String::from("problem,M,check,value,limit,published,pass\n");
    for r in &summary {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{}",
            r.problem,
            r.m,
            r.check.name(),
            r.value.map(fmt_sci).unwrap_or_default(),
            fmt_sci(r.limit),
            r.published.map(fmt_sci).unwrap_or_default(),
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let path = out_dir.join("summary.csv");
    output::write_atomic(&path, &text).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    print!("{text}");
    let passed = summary.iter().filter(|r| r.pass).count();
    println!("{passed}/{} acceptance rows passed", summary.len());

    if solver_failures > 0 {
        Err(Failure::Solver(format!("{solver_failures} bench rows failed to solve")))
    } else if passed < summary.len() {
        Err(Failure::Other("some acceptance rows failed".into()))
    } else {
        Ok(())
    }
}
