//! Error metrics, M-sweeps and CSV/Markdown tables.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use crate::basis::{Basis, BasisConfig};
use crate::error::{ReportError, SolveError};
use crate::par::Execution;
use crate::problems::{BenchmarkProblem, ExactSolution};
use crate::solver::{solve_with_basis, SolverConfig, WaveletSolution, DEFAULT_MAX_ITER, DEFAULT_TOL};

pub const DEFAULT_GRID_SIZE: usize = 1001;

pub const CSV_HEADER: &str =
    "problem,k,M,max_abs_error,max_residual,iterations,wall_time_ms,condition_estimate,grid_size";

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub problem: String,
    pub k: u32,
    pub m: usize,
    pub max_abs_error: Option<f64>,
    pub max_residual: f64,
    pub iterations: usize,
    pub wall_time_ms: f64,
    pub condition_estimate: f64,
    pub grid_size: usize,
    /// Not part of the table; the CLI uses it for its exit status.
    pub converged: bool,
}

fn uniform_grid(grid_size: usize) -> impl Iterator<Item = f64> {
    let n = grid_size.max(2) - 1;
    (0..=n).map(move |i| i as f64 / n as f64)
}

/// `max |exact(t_i) − s(t_i)|` over a uniform grid including both endpoints.
pub fn max_abs_error(sol: &WaveletSolution, exact: &ExactSolution, grid_size: usize) -> f64 {
    uniform_grid(grid_size)
        .map(|t| (exact.value(t) - sol.value(t)).abs())
        .fold(0.0, f64::max)
}

/// Largest residual of the nonlinear equation over the uniform grid; `t = 0`
/// is skipped when a coefficient is singular there.
pub fn max_residual(sol: &WaveletSolution, problem: &BenchmarkProblem, grid_size: usize) -> f64 {
    let skip_origin = problem.spec.is_singular_at_zero();
    uniform_grid(grid_size)
        .filter(|&t| !(skip_origin && t == 0.0))
        .map(|t| problem.residual(t, &sol.derivatives(t)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub grid_size: usize,
    pub exec: Execution,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            grid_size: DEFAULT_GRID_SIZE,
            exec: Execution::Serial,
        }
    }
}

/// A sweep entry whose solve failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub m: usize,
    pub error: SolveError,
}

/// Solves `problem` with the published initial guess and measures both
/// metrics.
pub fn run_one(
    problem: &BenchmarkProblem,
    k: u32,
    m: usize,
    opts: &SweepOptions,
) -> Result<(ErrorReport, WaveletSolution), SolveError> {
    let basis_config = BasisConfig::new(k, m).map_err(SolveError::InvalidConfig)?;
    let config = SolverConfig::new(basis_config)
        .with_tol(opts.tol)
        .with_max_iter(opts.max_iter)
        .with_guess(problem.initial_guess());
    let start = Instant::now();
    let basis = Arc::new(Basis::build(basis_config)?);
    let sol = solve_with_basis(&problem.spec, &problem.bcs, &config, basis)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = ErrorReport {
        problem: problem.name.to_string(),
        k,
        m,
        max_abs_error: problem.exact.as_ref().map(|e| max_abs_error(&sol, e, opts.grid_size)),
        max_residual: max_residual(&sol, problem, opts.grid_size),
        iterations: sol.iterations(),
        wall_time_ms,
        condition_estimate: sol.condition_estimate(),
        grid_size: opts.grid_size,
        converged: sol.converged(),
    };
    Ok((report, sol))
}

/// One entry per `M`, in input order; failures are kept in place.
pub fn sweep(
    problem: &BenchmarkProblem,
    k: u32,
    m_values: &[usize],
    opts: &SweepOptions,
) -> Vec<Result<ErrorReport, SweepFailure>> {
    opts.exec.map(m_values, |&m| {
        run_one(problem, k, m, opts)
            .map(|(r, _)| r)
            .map_err(|error| SweepFailure { m, error })
    })
}

/// `max residual / max error` stays within `limit` across the reports that
/// carry both metrics.
pub fn metrics_consistent(reports: &[ErrorReport], limit: f64) -> bool {
    let ratios: Vec<f64> = reports
        .iter()
        .filter_map(|r| r.max_abs_error.map(|e| r.max_residual / e))
        .filter(|x| x.is_finite() && *x > 0.0)
        .collect();
    match (
        ratios.iter().copied().reduce(f64::min),
        ratios.iter().copied().reduce(f64::max),
    ) {
        (Some(lo), Some(hi)) => hi / lo <= limit,
        _ => true,
    }
}

/// Six significant digits in scientific notation.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.5e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(format!("unknown format `{other}` (expected csv or markdown)")),
        }
    }
}

fn fields(r: &ErrorReport) -> [String; 9] {
    [
        r.problem.clone(),
        r.k.to_string(),
        r.m.to_string(),
        r.max_abs_error.map(fmt_sci).unwrap_or_default(),
        fmt_sci(r.max_residual),
        r.iterations.to_string(),
        fmt_sci(r.wall_time_ms),
        fmt_sci(r.condition_estimate),
        r.grid_size.to_string(),
    ]
}

pub fn emit(reports: &[ErrorReport], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in reports {
                out.push_str(&fields(r).join(","));
                out.push('\n');
            }
        }
        Format::Markdown => {
            let cols: Vec<&str> = CSV_HEADER.split(',').collect();
            let _ = writeln!(out, "| {} |", cols.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(cols.len()));
            for r in reports {
                let _ = writeln!(out, "| {} |", fields(r).join(" | "));
            }
        }
    }
    out
}

/// Reads back a table written by [`emit`] in CSV form. Lines starting with
/// `#` are ignored; every parsed row is marked converged.
pub fn parse_csv(text: &str) -> Result<Vec<ErrorReport>, ReportError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        Some((i, _)) => {
            return Err(ReportError::Parse {
                line: i + 1,
                message: "unexpected header".into(),
            })
        }
        None => {
            return Err(ReportError::Parse {
                line: 0,
                message: "empty input".into(),
            })
        }
    }
    lines
        .map(|(i, line)| {
            let err = |message: String| ReportError::Parse { line: i + 1, message };
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 9 {
                return Err(err(format!("expected 9 fields, found {}", cells.len())));
            }
            fn num<T: std::str::FromStr>(s: &str, name: &str) -> Result<T, String> {
                s.parse().map_err(|_| format!("bad {name} `{s}`"))
            }
            Ok(ErrorReport {
                problem: cells[0].to_string(),
                k: num(cells[1], "k").map_err(err)?,
                m: num(cells[2], "M").map_err(err)?,
                max_abs_error: if cells[3].is_empty() {
                    None
                } else {
                    Some(num(cells[3], "max_abs_error").map_err(err)?)
                },
                max_residual: num(cells[4], "max_residual").map_err(err)?,
                iterations: num(cells[5], "iterations").map_err(err)?,
                wall_time_ms: num(cells[6], "wall_time_ms").map_err(err)?,
                condition_estimate: num(cells[7], "condition_estimate").map_err(err)?,
                grid_size: num(cells[8], "grid_size").map_err(err)?,
                converged: true,
            })
        })
        .collect()
}

/// Plot-ready `t,exact,approx,abs_error` samples; exact columns are empty
/// when no closed form exists.
pub fn solution_table(sol: &WaveletSolution, exact: Option<&ExactSolution>, grid_size: usize) -> String {
    let mut out = String::from("t,exact,approx,abs_error\n");
    for t in uniform_grid(grid_size) {
        let approx = sol.value(t);
        match exact {
            Some(e) => {
                let v = e.value(t);
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_sci(t),
                    fmt_sci(v),
                    fmt_sci(approx),
                    fmt_sci((v - approx).abs())
                );
            }
            None => {
                let _ = writeln!(out, "{},,{},", fmt_sci(t), fmt_sci(approx));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{builtin, perturbation};
    use crate::solver::{solve, BoundaryConditions, ProblemSpec};
    use proptest::prelude::*;

    fn report(m: usize, err: Option<f64>, res: f64) -> ErrorReport {
        ErrorReport {
            problem: "lane-emden-5".into(),
            k: 1,
            m,
            max_abs_error: err,
            max_residual: res,
            iterations: 5,
            wall_time_ms: 12.345678,
            condition_estimate: 4.2e6,
            grid_size: 1001,
            converged: true,
        }
    }

    #[test]
    fn emit_examples() {
        assert_eq!(emit(&[], Format::Csv), format!("{CSV_HEADER}\n"));
        let csv = emit(&[report(8, None, 1e-3)], Format::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "lane-emden-5,1,8,,1.00000e-3,5,1.23457e1,4.20000e6,1001");
        let md = emit(&[report(8, Some(2.17e-7), 1e-3)], Format::Markdown);
        assert!(md.starts_with("| problem | k | M | max_abs_error |"));
        assert_eq!(md.lines().count(), 3);
        assert!(md.contains("| 2.17000e-7 |"));
    }

    proptest! {
        #[test]
        fn csv_round_trips(err in proptest::option::of(1e-15f64..1e3), res in 1e-15f64..1e3, cond in 1.0f64..1e15, m in 1usize..20) {
            let rows = vec![report(m, err, res), ErrorReport { condition_estimate: cond, ..report(m + 1, None, res) }];
            let text = emit(&rows, Format::Csv);
            let back = parse_csv(&text).unwrap();
            prop_assert_eq!(emit(&back, Format::Csv), text);
            for (a, b) in rows.iter().zip(&back) {
                prop_assert_eq!(a.m, b.m);
                prop_assert!((a.max_residual - b.max_residual).abs() <= 5e-6 * a.max_residual);
                prop_assert_eq!(a.max_abs_error.is_some(), b.max_abs_error.is_some());
            }
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("a,b\n").is_err());
        let bad = format!("{CSV_HEADER}\nx,1,2,,notanumber,1,1,1,1\n");
        assert!(matches!(parse_csv(&bad), Err(ReportError::Parse { line: 2, .. })));
        let commented = format!("# generated 2026-01-01\n{CSV_HEADER}\n");
        assert_eq!(parse_csv(&commented).unwrap(), vec![]);
    }

    #[test]
    fn exact_solution_has_zero_error() {
        let spec = ProblemSpec::new(2)
            .unwrap()
            .with_nonlinear(|_, s| s, |_, _| 1.0)
            .with_forcing(|t| t * t + 2.0 * t + 3.0);
        let bcs = BoundaryConditions::DirichletBoth { left: 1.0, right: 4.0 };
        let sol = solve(&spec, &bcs, &SolverConfig::new(BasisConfig::new(1, 3).unwrap())).unwrap();
        let mut problem = builtin("perturbation").unwrap();
        problem.spec = spec;
        problem.bcs = bcs;
        let exact = crate::problems::ExactSolution::polynomial(vec![1.0, 2.0, 1.0]);
        assert!(max_abs_error(&sol, &exact, 1001) <= 1e-13);
        assert!(max_residual(&sol, &problem, 1001) <= 1e-9);
    }

    #[test]
    fn membrane_cap_residuals() {
        let p = builtin("membrane-cap").unwrap();
        let opts = SweepOptions::default();
        let rows = sweep(&p, 1, &[4, 5], &opts);
        let res: Vec<f64> = rows.iter().map(|r| r.as_ref().unwrap().max_residual).collect();
        assert!(res[0] <= 1e-5, "{}", res[0]);
        assert!(res[1] <= 1e-6, "{}", res[1]);
        assert!(rows.iter().all(|r| r.as_ref().unwrap().max_abs_error.is_none()));
    }

    #[test]
    fn sweep_keeps_order_and_captures_failures() {
        let p = builtin("thermal-explosion").unwrap();
        let opts = SweepOptions {
            exec: Execution::with_threads(3),
            ..SweepOptions::default()
        };
        let rows = sweep(&p, 1, &[2, 4, 6, 8], &opts);
        let errs: Vec<f64> = rows
            .iter()
            .map(|r| r.as_ref().unwrap().max_abs_error.unwrap())
            .collect();
        assert_eq!(
            rows.iter().map(|r| r.as_ref().unwrap().m).collect::<Vec<_>>(),
            vec![2, 4, 6, 8]
        );
        assert!(errs[0] > 1e-3 && errs[0] < 2e-3);
        assert!(errs[3] < 1e-7 && errs[3] > 1e-9);
        assert_eq!(sweep(&p, 1, &[4], &opts).len(), 1);

        let bad = sweep(&p, 1, &[0, 3], &opts);
        assert!(matches!(bad[0], Err(SweepFailure { m: 0, .. })));
        assert!(bad[1].is_ok());
    }

    #[test]
    fn perturbation_sweep_against_published_values() {
        let opts = SweepOptions::default();
        for (eps, published) in [(1.0 / 32.0, 5.75644e-9), (1.0 / 64.0, 2.79873e-8)] {
            let p = perturbation(eps).unwrap();
            let e = run_one(&p, 1, 14, &opts).unwrap().0.max_abs_error.unwrap();
            assert!(e <= 10.0 * published && e >= published / 10.0, "eps {eps}: {e}");
        }
    }

    #[test]
    fn residual_and_error_move_together() {
        let opts = SweepOptions {
            exec: Execution::parallel(),
            ..SweepOptions::default()
        };
        for name in [
            "lane-emden-5",
            "thermal-explosion",
            "efte-first",
            "efte-second",
            "perturbation",
        ] {
            let p = builtin(name).unwrap();
            let rows: Vec<ErrorReport> = sweep(&p, 1, &p.paper_config.m_values, &opts)
                .into_iter()
                .map(Result::unwrap)
                .collect();
            assert!(metrics_consistent(&rows, 1e4), "{name}");
        }
    }

    #[test]
    fn solution_table_shape() {
        let p = builtin("lane-emden-5").unwrap();
        let (_, sol) = run_one(&p, 1, 4, &SweepOptions::default()).unwrap();
        let text = solution_table(&sol, p.exact.as_ref(), 11);
        assert_eq!(text.lines().count(), 12);
        assert!(text.lines().nth(1).unwrap().starts_with("0.00000e0,1.00000e0,"));
        let cap = builtin("membrane-cap").unwrap();
        let (_, sol) = run_one(&cap, 1, 4, &SweepOptions::default()).unwrap();
        assert!(solution_table(&sol, None, 3).lines().nth(1).unwrap().split(',').nth(1) == Some(""));
    }
}
