//! Reference solutions that share nothing with the wavelet solver.
//!
//! The problem is rewritten as a first-order system `y′ = F(t, y)` with
//! `y = (s, s′, …, s^(q−1))` and discretized with the box scheme
//! `(y_{i+1} − y_i) = h_i F(t_{i+½}, (y_i + y_{i+1})/2)` on a grid graded
//! towards the origin. Only midpoints are sampled, so the singular
//! coefficients are never evaluated at `t = 0`. The nonlinear system is
//! solved by damped Newton with a banded LU, once on `N` and once on `2N`
//! intervals; the nested grids allow Richardson extrapolation of the
//! second-order error.

use crate::error::{LinalgError, OracleError};
use crate::par::Execution;
use crate::problems::BenchmarkProblem;
use crate::solver::BoundaryConditions;

pub const DEFAULT_INTERVALS: usize = 4096;
const MAX_NEWTON: usize = 60;
const NEWTON_TOL: f64 = 1e-13;

/// Grid map `x ↦ x/2 + x²/2`: spacing at the origin is half the uniform one.
fn graded(x: f64) -> f64 {
    0.5 * x + 0.5 * x * x
}

pub fn graded_grid(intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|i| graded(i as f64 / intervals as f64)).collect()
}

/// Extrapolated solution at the coarse nodes.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    nodes: Vec<f64>,
    /// `states[i] = (s, s′, …)` at `nodes[i]`.
    states: Vec<Vec<f64>>,
    newton_steps: usize,
}

impl OracleSolution {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> Vec<f64> {
        self.states.iter().map(|y| y[0]).collect()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i]
    }

    /// Newton steps summed over both grids.
    pub fn newton_steps(&self) -> usize {
        self.newton_steps
    }

    /// Cubic Hermite interpolant of `s` built from `s` and `s′`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let i = match self.nodes.partition_point(|&x| x <= t) {
            0 => 0,
            p => (p - 1).min(self.nodes.len() - 2),
        };
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let h = b - a;
        let u = (t - a) / h;
        let (y0, y1) = (&self.states[i], &self.states[i + 1]);
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        h00 * y0[0] + h10 * h * y0[1] + h01 * y1[0] + h11 * h * y1[1]
    }
}

/// Richardson-extrapolated box-scheme solution on `intervals` (and twice
/// as many) graded intervals.
pub fn reference_oracle(
    problem: &BenchmarkProblem,
    intervals: usize,
    exec: Execution,
) -> Result<OracleSolution, OracleError> {
    let intervals = intervals.max(2);
    let runs = exec.map(&[intervals, 2 * intervals], |&n| box_solve(problem, &graded_grid(n)));
    let mut runs = runs.into_iter();
    let (coarse_nodes, coarse, c_steps) = runs.next().expect("two runs")?;
    let (_, fine, f_steps) = runs.next().expect("two runs")?;
    let states = coarse
        .iter()
        .enumerate()
        .map(|(i, yc)| yc.iter().zip(&fine[2 * i]).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
        .collect();
    Ok(OracleSolution {
        nodes: coarse_nodes,
        states,
        newton_steps: c_steps + f_steps,
    })
}

/// Runs the oracle for many problems; results keep input order.
pub fn reference_oracles(
    problems: &[BenchmarkProblem],
    intervals: usize,
    exec: Execution,
) -> Vec<Result<OracleSolution, OracleError>> {
    exec.map(problems, |p| reference_oracle(p, intervals, Execution::Serial))
}

/// `(node, component, coefficient)` rows of a linear boundary functional
/// plus its target value, split into conditions at 0 and at 1.
type Functional = (Vec<(usize, f64)>, f64);

fn boundary_rows(bcs: &BoundaryConditions) -> (Vec<Functional>, Vec<Functional>) {
    match *bcs {
        BoundaryConditions::DirichletBoth { left, right } => {
            (vec![(vec![(0, 1.0)], left)], vec![(vec![(0, 1.0)], right)])
        }
        BoundaryConditions::NeumannRobin {
            slope0,
            robin_a,
            robin_b,
            value,
        } => (
            vec![(vec![(1, 1.0)], slope0)],
            vec![(vec![(0, robin_a), (1, robin_b)], value)],
        ),
        BoundaryConditions::ThirdOrderIvp { s0, ds0, d2s0 } => (
            vec![(vec![(0, 1.0)], s0), (vec![(1, 1.0)], ds0), (vec![(2, 1.0)], d2s0)],
            vec![],
        ),
        BoundaryConditions::ThirdOrderMixed { s0, ds0, s1 } => (
            vec![(vec![(0, 1.0)], s0), (vec![(1, 1.0)], ds0)],
            vec![(vec![(0, 1.0)], s1)],
        ),
    }
}

type BoxRun = (Vec<f64>, Vec<Vec<f64>>, usize);

fn box_solve(problem: &BenchmarkProblem, nodes: &[f64]) -> Result<BoxRun, OracleError> {
    let spec = &problem.spec;
    let q = spec.order();
    let n = nodes.len() - 1;
    let dim = q * (n + 1);
    let (left, right) = boundary_rows(&problem.bcs);
    let n_left = left.len();

    // Unknowns node-major; rows: left BCs, q rows per interval, right BCs.
    let mut y = vec![0.0; dim];
    for i in 0..=n {
        y[i * q] = problem.paper_config.initial_guess;
    }

    let residual = |y: &[f64]| -> Result<Vec<f64>, OracleError> {
        let mut r = Vec::with_capacity(dim);
        for (terms, target) in &left {
            r.push(terms.iter().map(|&(c, w)| w * y[c]).sum::<f64>() - target);
        }
        let mut mid = vec![0.0; q];
        for i in 0..n {
            let h = nodes[i + 1] - nodes[i];
            let tm = 0.5 * (nodes[i] + nodes[i + 1]);
            for c in 0..q {
                mid[c] = 0.5 * (y[i * q + c] + y[(i + 1) * q + c]);
            }
            for c in 0..q {
                let slope = if c + 1 < q {
                    mid[c + 1]
                } else {
                    let linear: f64 = (0..q).map(|p| spec.linear_coeff(p, tm) * mid[p]).sum();
                    spec.forcing(tm) - linear - spec.g(tm, mid[0])
                };
                let v = y[(i + 1) * q + c] - y[i * q + c] - h * slope;
                if !v.is_finite() {
                    return Err(OracleError::NonFinite { t: tm });
                }
                r.push(v);
            }
        }
        for (terms, target) in &right {
            r.push(terms.iter().map(|&(c, w)| w * y[n * q + c]).sum::<f64>() - target);
        }
        Ok(r)
    };

    let jacobian = |y: &[f64]| -> Band {
        let mut jac = Band::new(dim, 2 * q, 2 * q);
        for (row, (terms, _)) in left.iter().enumerate() {
            for &(c, w) in terms {
                jac.set(row, c, w);
            }
        }
        for i in 0..n {
            let h = nodes[i + 1] - nodes[i];
            let tm = 0.5 * (nodes[i] + nodes[i + 1]);
            let s_mid = 0.5 * (y[i * q] + y[(i + 1) * q]);
            for c in 0..q {
                let row = n_left + i * q + c;
                jac.add(row, i * q + c, -1.0);
                jac.add(row, (i + 1) * q + c, 1.0);
                // ∂slope/∂mid_p, each mid_p weighted ½ on both nodes
                let mut dslope = vec![0.0; q];
                if c + 1 < q {
                    dslope[c + 1] = 1.0;
                } else {
                    for (p, d) in dslope.iter_mut().enumerate() {
                        *d = -spec.linear_coeff(p, tm);
                    }
                    dslope[0] -= spec.g_s(tm, s_mid);
                }
                for (p, d) in dslope.iter().enumerate() {
                    if *d != 0.0 {
                        jac.add(row, i * q + p, -0.5 * h * d);
                        jac.add(row, (i + 1) * q + p, -0.5 * h * d);
                    }
                }
            }
        }
        for (k, (terms, _)) in right.iter().enumerate() {
            for &(c, w) in terms {
                jac.set(n_left + n * q + k, n * q + c, w);
            }
        }
        jac
    };

    let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut r = residual(&y)?;
    let mut steps = 0;
    loop {
        if steps >= MAX_NEWTON {
            return Err(OracleError::NoConvergence {
                iterations: steps,
                residual: norm(&r),
            });
        }
        steps += 1;
        let mut delta = r.clone();
        jacobian(&y).factor_solve(&mut delta)?;
        let r0 = norm(&r);
        let mut lambda = 1.0;
        let (trial_y, trial_r) = loop {
            let trial: Vec<f64> = y.iter().zip(&delta).map(|(a, d)| a - lambda * d).collect();
            match residual(&trial) {
                Ok(tr) if norm(&tr) < r0 || lambda < 1e-4 => break (trial, tr),
                Err(e) if lambda < 1e-4 => return Err(e),
                _ => lambda *= 0.5,
            }
        };
        let step = lambda * norm(&delta);
        y = trial_y;
        r = trial_r;
        if step <= NEWTON_TOL * (1.0 + norm(&y)) {
            break;
        }
    }
    let states = y.chunks(q).map(<[f64]>::to_vec).collect();
    Ok((nodes.to_vec(), states, steps))
}

/// Banded matrix with room for the fill-in of partial pivoting.
struct Band {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Band {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(
            j + self.kl >= i && j <= i + self.kl + self.ku,
            "({i}, {j}) outside band"
        );
        i * self.width + (j + self.kl - i)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Gaussian elimination with row pivoting, solving in place.
    fn factor_solve(mut self, b: &mut [f64]) -> Result<(), LinalgError> {
        let n = self.n;
        let reach = self.kl + self.ku;
        let scale = self
            .data
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(f64::MIN_POSITIVE);
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + reach).min(n - 1);
            let p = (k..=last_row)
                .max_by(|&a, &c| self.get(a, k).abs().total_cmp(&self.get(c, k).abs()))
                .expect("non-empty");
            let pivot = self.get(p, k);
            if pivot.abs() <= 1e-14 * scale {
                return Err(LinalgError::SingularPivot { row: k, pivot });
            }
            if p != k {
                for j in k..=last_col {
                    let (a, c) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, c);
                }
                b.swap(k, p);
            }
            for i in k + 1..=last_row {
                let l = self.get(i, k) / pivot;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=last_col {
                    let v = self.get(k, j);
                    self.add(i, j, -l * v);
                }
                b[i] -= l * b[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + reach).min(n - 1);
            let tail: f64 = (k + 1..=last_col).map(|j| self.get(k, j) * b[j]).sum();
            b[k] = (b[k] - tail) / self.get(k, k);
        }
        Ok(())
    }
}
