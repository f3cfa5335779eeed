//! Quasilinearization collocation solver.
//!
//! The highest derivative of the unknown is expanded in the wavelet basis,
//! `s^(q)(t) = Σ ρ_j W_j(t)`, and integrated analytically down to `s`, which
//! introduces constants `C_i = s^(i)(0)`. The boundary conditions fix every
//! constant as an affine function of `ρ`, so the collocation system stays
//! square with one row per collocation point.
//!
//! Nonlinear problems are linearized around the previous iterate
//! (`g(t, s) ≈ g(t, s_r) + g_s(t, s_r)(s − s_r)`) and the linear solve is
//! repeated until the iterate stops moving at the collocation points.

use std::fmt;
use std::sync::Arc;

use crate::basis::{Basis, BasisConfig};
use crate::error::SolveError;
use crate::linalg::{DenseMatrix, LuFactors};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type NonlinearFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 20;

/// Coefficient `c_p(t)` of `s^(p)` in the linear part.
#[derive(Clone)]
pub struct LinearCoeff {
    pub func: ScalarFn,
    /// The coefficient blows up at `t = 0`.
    pub singular_at_zero: bool,
}

/// `s^(q)(t) + Σ_p c_p(t) s^(p)(t) + g(t, s(t)) = f(t)` on `(0, 1]`.
#[derive(Clone)]
pub struct ProblemSpec {
    order: usize,
    linear: Vec<Option<LinearCoeff>>,
    g: NonlinearFn,
    g_s: Option<NonlinearFn>,
    forcing: ScalarFn,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("order", &self.order)
            .field(
                "linear_terms",
                &self.linear.iter().map(Option::is_some).collect::<Vec<_>>(),
            )
            .field("analytic_g_s", &self.g_s.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// A problem of the given order with no linear terms, `g ≡ 0` and `f ≡ 0`.
    pub fn new(order: usize) -> Result<Self, SolveError> {
        if !(2..=3).contains(&order) {
            return Err(SolveError::InvalidConfig(format!("order must be 2 or 3, got {order}")));
        }
        Ok(ProblemSpec {
            order,
            linear: vec![None; order],
            g: Arc::new(|_, _| 0.0),
            g_s: Some(Arc::new(|_, _| 0.0)),
            forcing: Arc::new(|_| 0.0),
        })
    }

    pub fn with_linear<F>(mut self, p: usize, func: F, singular_at_zero: bool) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        assert!(
            p < self.order,
            "linear term index {p} must be below the order {}",
            self.order
        );
        self.linear[p] = Some(LinearCoeff {
            func: Arc::new(func),
            singular_at_zero,
        });
        self
    }

    /// Nonlinear term with its analytic `s`-derivative.
    pub fn with_nonlinear<G, Gs>(mut self, g: G, g_s: Gs) -> Self
    where
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        Gs: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.g = Arc::new(g);
        self.g_s = Some(Arc::new(g_s));
        self
    }

    /// Nonlinear term whose `s`-derivative is taken by central differences.
    pub fn with_nonlinear_fd<G>(mut self, g: G) -> Self
    where
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.g = Arc::new(g);
        self.g_s = None;
        self
    }

    pub fn with_forcing<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.forcing = Arc::new(f);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_singular_at_zero(&self) -> bool {
        self.linear.iter().flatten().any(|c| c.singular_at_zero)
    }

    pub fn linear_coeff(&self, p: usize, t: f64) -> f64 {
        self.linear[p].as_ref().map_or(0.0, |c| (c.func)(t))
    }

    pub fn g(&self, t: f64, s: f64) -> f64 {
        (self.g)(t, s)
    }

    pub fn g_s(&self, t: f64, s: f64) -> f64 {
        match &self.g_s {
            Some(d) => d(t, s),
            None => {
                let h = 1e-6 * (1.0 + s.abs());
                ((self.g)(t, s + h) - (self.g)(t, s - h)) / (2.0 * h)
            }
        }
    }

    pub fn forcing(&self, t: f64) -> f64 {
        (self.forcing)(t)
    }

    /// `s^(q) + Σ c_p s^(p) + g(t, s) − f(t)` given `derivs = [s, s′, …, s^(q)]`.
    pub fn residual(&self, t: f64, derivs: &[f64]) -> f64 {
        debug_assert_eq!(derivs.len(), self.order + 1);
        let linear: f64 = (0..self.order).map(|p| self.linear_coeff(p, t) * derivs[p]).sum();
        derivs[self.order] + linear + self.g(t, derivs[0]) - self.forcing(t)
    }
}

/// Boundary conditions supported by the constant elimination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryConditions {
    /// `s(0) = left`, `s(1) = right`.
    DirichletBoth { left: f64, right: f64 },
    /// `s′(0) = slope0`, `robin_a·s(1) + robin_b·s′(1) = value`.
    NeumannRobin {
        slope0: f64,
        robin_a: f64,
        robin_b: f64,
        value: f64,
    },
    /// `s(0)`, `s′(0)`, `s″(0)`.
    ThirdOrderIvp { s0: f64, ds0: f64, d2s0: f64 },
    /// `s(0)`, `s′(0)`, `s(1)`.
    ThirdOrderMixed { s0: f64, ds0: f64, s1: f64 },
}

impl BoundaryConditions {
    pub fn arity(&self) -> usize {
        match self {
            BoundaryConditions::DirichletBoth { .. } | BoundaryConditions::NeumannRobin { .. } => 2,
            BoundaryConditions::ThirdOrderIvp { .. } | BoundaryConditions::ThirdOrderMixed { .. } => 3,
        }
    }

    /// Largest violation of the conditions by `eval(t, derivative)`.
    pub fn violation(&self, eval: impl Fn(f64, usize) -> f64) -> f64 {
        let gaps = match *self {
            BoundaryConditions::DirichletBoth { left, right } => vec![eval(0.0, 0) - left, eval(1.0, 0) - right],
            BoundaryConditions::NeumannRobin {
                slope0,
                robin_a,
                robin_b,
                value,
            } => vec![
                eval(0.0, 1) - slope0,
                robin_a * eval(1.0, 0) + robin_b * eval(1.0, 1) - value,
            ],
            BoundaryConditions::ThirdOrderIvp { s0, ds0, d2s0 } => {
                vec![eval(0.0, 0) - s0, eval(0.0, 1) - ds0, eval(0.0, 2) - d2s0]
            }
            BoundaryConditions::ThirdOrderMixed { s0, ds0, s1 } => {
                vec![eval(0.0, 0) - s0, eval(0.0, 1) - ds0, eval(1.0, 0) - s1]
            }
        };
        gaps.into_iter().map(f64::abs).fold(0.0, f64::max)
    }
}

#[derive(Clone)]
pub enum InitialGuess {
    Constant(f64),
    Function(ScalarFn),
}

impl InitialGuess {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            InitialGuess::Constant(c) => *c,
            InitialGuess::Function(f) => f(t),
        }
    }
}

impl fmt::Debug for InitialGuess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialGuess::Constant(c) => write!(f, "Constant({c})"),
            InitialGuess::Function(_) => write!(f, "Function(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub basis: BasisConfig,
    pub tol: f64,
    pub max_iter: usize,
    pub initial_guess: InitialGuess,
}

impl SolverConfig {
    pub fn new(basis: BasisConfig) -> Self {
        SolverConfig {
            basis,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            initial_guess: InitialGuess::Constant(0.0),
        }
    }

    pub fn with_guess(mut self, guess: InitialGuess) -> Self {
        self.initial_guess = guess;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(SolveError::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(SolveError::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// `t_l = (2l − 1) / (2^k M)`, `l = 1..=2^(k−1) M`.
pub fn collocation_points(config: BasisConfig) -> Vec<f64> {
    let denom = (2 * config.size()) as f64;
    (1..=config.size()).map(|l| (2 * l - 1) as f64 / denom).collect()
}

/// A scalar that is affine in the coefficient vector: `value + weights · ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineConst {
    pub value: f64,
    pub weights: Vec<f64>,
}

impl AffineConst {
    fn fixed(value: f64, len: usize) -> Self {
        AffineConst {
            value,
            weights: vec![0.0; len],
        }
    }

    pub fn resolve(&self, rho: &[f64]) -> f64 {
        self.value + self.weights.iter().zip(rho).map(|(w, r)| w * r).sum::<f64>()
    }
}

/// `s^(d)(t) = Σ_i C_{d+i} t^i / i! + Σ_j ρ_j P^(q−d)W_j(t)` with every
/// `C_i = s^(i)(0)` already expressed through the boundary conditions.
#[derive(Debug, Clone)]
pub struct ShapeFamily {
    order: usize,
    basis: Arc<Basis>,
    constants: Vec<AffineConst>,
}

/// One derivative level of a [`ShapeFamily`], affine in `ρ`.
#[derive(Debug, Clone, Copy)]
pub struct AffineForm<'a> {
    family: &'a ShapeFamily,
    derivative: usize,
}

impl AffineForm<'_> {
    pub fn derivative(&self) -> usize {
        self.derivative
    }

    fn taylor_terms(&self, t: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
        let order = self.family.order;
        let d = self.derivative;
        (0..order.saturating_sub(d)).scan(1.0, move |term, i| {
            if i > 0 {
                *term *= t / i as f64;
            }
            Some((d + i, *term))
        })
    }

    pub fn base(&self, t: f64) -> f64 {
        self.taylor_terms(t)
            .map(|(c, term)| self.family.constants[c].value * term)
            .sum()
    }

    /// `∂ s^(d)(t) / ∂ρ_j` for every `j`.
    pub fn weights(&self, t: f64) -> Vec<f64> {
        let level = self.family.order - self.derivative;
        let mut w: Vec<f64> = self
            .family
            .basis
            .wavelets()
            .iter()
            .map(|wv| wv.integrated(level, t))
            .collect();
        for (c, term) in self.taylor_terms(t) {
            for (wj, cj) in w.iter_mut().zip(&self.family.constants[c].weights) {
                *wj += cj * term;
            }
        }
        w
    }

    pub fn value(&self, t: f64, rho: &[f64]) -> f64 {
        let level = self.family.order - self.derivative;
        let constants: f64 = self
            .taylor_terms(t)
            .map(|(c, term)| self.family.constants[c].resolve(rho) * term)
            .sum();
        let expansion: f64 = match (level, self.family.basis.active_range(t)) {
            // Only the block containing t is non-zero for the wavelet itself.
            (0, Some(range)) => range.map(|j| rho[j] * self.family.basis.wavelets()[j].eval(t)).sum(),
            (0, None) => 0.0,
            _ => self
                .family
                .basis
                .wavelets()
                .iter()
                .zip(rho)
                .map(|(w, r)| r * w.integrated(level, t))
                .sum(),
        };
        constants + expansion
    }
}

impl ShapeFamily {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn constants(&self) -> &[AffineConst] {
        &self.constants
    }

    /// Form for `s^(derivative)`, `derivative ≤ order`.
    pub fn form(&self, derivative: usize) -> AffineForm<'_> {
        assert!(derivative <= self.order);
        AffineForm {
            family: self,
            derivative,
        }
    }

    pub fn resolve_constants(&self, rho: &[f64]) -> Vec<f64> {
        self.constants.iter().map(|c| c.resolve(rho)).collect()
    }
}

/// Expresses the integration constants through the boundary conditions.
pub fn shape_solution(basis: Arc<Basis>, order: usize, bcs: &BoundaryConditions) -> Result<ShapeFamily, SolveError> {
    if bcs.arity() != order {
        return Err(SolveError::UnsupportedBc(format!(
            "{bcs:?} fixes {} conditions, problem order is {order}",
            bcs.arity()
        )));
    }
    let n = basis.len();
    let at_one = |p: usize| -> Vec<f64> { basis.wavelets().iter().map(|w| w.integrated(p, 1.0)).collect() };
    let constants = match *bcs {
        BoundaryConditions::DirichletBoth { left, right } => {
            // s(1) = C0 + C1 + Σ ρ P²W(1)
            let p2 = at_one(2);
            vec![
                AffineConst::fixed(left, n),
                AffineConst {
                    value: right - left,
                    weights: p2.iter().map(|v| -v).collect(),
                },
            ]
        }
        BoundaryConditions::NeumannRobin {
            slope0,
            robin_a,
            robin_b,
            value,
        } => {
            if robin_a.is_nan() || robin_a <= 0.0 {
                return Err(SolveError::UnsupportedBc(format!(
                    "Robin condition needs robin_a > 0, got {robin_a}"
                )));
            }
            if robin_b < 0.0 {
                return Err(SolveError::UnsupportedBc(format!(
                    "Robin condition needs robin_b >= 0, got {robin_b}"
                )));
            }
            // a(C0 + C1 + Σρ P²W(1)) + b(C1 + Σρ P¹W(1)) = value
            let (p1, p2) = (at_one(1), at_one(2));
            vec![
                AffineConst {
                    value: (value - robin_b * slope0 - robin_a * slope0) / robin_a,
                    weights: p1
                        .iter()
                        .zip(&p2)
                        .map(|(a1, a2)| -(robin_b * a1 + robin_a * a2) / robin_a)
                        .collect(),
                },
                AffineConst::fixed(slope0, n),
            ]
        }
        BoundaryConditions::ThirdOrderIvp { s0, ds0, d2s0 } => vec![
            AffineConst::fixed(s0, n),
            AffineConst::fixed(ds0, n),
            AffineConst::fixed(d2s0, n),
        ],
        BoundaryConditions::ThirdOrderMixed { s0, ds0, s1 } => {
            // s(1) = C0 + C1 + C2/2 + Σ ρ P³W(1)
            let p3 = at_one(3);
            vec![
                AffineConst::fixed(s0, n),
                AffineConst::fixed(ds0, n),
                AffineConst {
                    value: 2.0 * (s1 - s0 - ds0),
                    weights: p3.iter().map(|v| -2.0 * v).collect(),
                },
            ]
        }
    };
    Ok(ShapeFamily {
        order,
        basis,
        constants,
    })
}

/// The linear equation `s^(q) + Σ_p a_p(t) s^(p) = rhs(t)` obtained by
/// linearizing around the previous iterate, sampled at the collocation
/// points.
#[derive(Debug, Clone)]
pub struct LinearizedOde {
    pub points: Vec<f64>,
    /// `coeffs[l][p]` multiplies `s^(p)(t_l)`; the leading coefficient is 1.
    pub coeffs: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

/// Linearizes `spec` around `previous` (the iterate `s_r`) at `points`:
/// `a_0 = c_0 + g_s(t, s_r)`, `rhs = f − g(t, s_r) + g_s(t, s_r)·s_r`.
pub fn quasilinearize(
    spec: &ProblemSpec,
    points: &[f64],
    previous: &[f64],
    iteration: usize,
) -> Result<LinearizedOde, SolveError> {
    let mut coeffs = Vec::with_capacity(points.len());
    let mut rhs = Vec::with_capacity(points.len());
    for (&t, &sr) in points.iter().zip(previous) {
        if !sr.is_finite() {
            return Err(SolveError::NonFinite {
                what: "iterate",
                t,
                iteration,
            });
        }
        let g = spec.g(t, sr);
        if !g.is_finite() {
            return Err(SolveError::NonFinite {
                what: "g",
                t,
                iteration,
            });
        }
        let gs = spec.g_s(t, sr);
        if !gs.is_finite() {
            return Err(SolveError::NonFinite {
                what: "g_s",
                t,
                iteration,
            });
        }
        let mut row: Vec<f64> = (0..spec.order()).map(|p| spec.linear_coeff(p, t)).collect();
        if let Some((p, _)) = row.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(SolveError::NonFinite {
                what: if p == 0 { "c_0" } else { "linear coefficient" },
                t,
                iteration,
            });
        }
        row[0] += gs;
        coeffs.push(row);
        rhs.push(spec.forcing(t) - g + gs * sr);
    }
    Ok(LinearizedOde {
        points: points.to_vec(),
        coeffs,
        rhs,
    })
}

/// Shape values at a fixed set of points: `weights[d][l][j]`, `base[d][l]`.
#[derive(Debug, Clone)]
struct ShapeTable {
    base: Vec<Vec<f64>>,
    weights: Vec<Vec<Vec<f64>>>,
}

impl ShapeTable {
    fn new(shapes: &ShapeFamily, points: &[f64]) -> Self {
        let levels = 0..=shapes.order();
        ShapeTable {
            base: levels
                .clone()
                .map(|d| points.iter().map(|&t| shapes.form(d).base(t)).collect())
                .collect(),
            weights: levels
                .map(|d| points.iter().map(|&t| shapes.form(d).weights(t)).collect())
                .collect(),
        }
    }

    fn values(&self, d: usize, rho: &[f64]) -> Vec<f64> {
        self.base[d]
            .iter()
            .zip(&self.weights[d])
            .map(|(b, w)| b + w.iter().zip(rho).map(|(x, y)| x * y).sum::<f64>())
            .collect()
    }
}

/// Row `l` enforces the linearized equation at `t_l` with every derivative
/// replaced by its affine form.
pub fn assemble_system(linearized: &LinearizedOde, shapes: &ShapeFamily) -> (DenseMatrix, Vec<f64>) {
    let table = ShapeTable::new(shapes, &linearized.points);
    assemble_from_table(linearized, &table, shapes.order())
}

fn assemble_from_table(linearized: &LinearizedOde, table: &ShapeTable, order: usize) -> (DenseMatrix, Vec<f64>) {
    let n = linearized.points.len();
    let cols = table.weights[0].first().map_or(0, Vec::len);
    let mut a = DenseMatrix::zeros(n, cols);
    let mut b = Vec::with_capacity(n);
    for l in 0..n {
        let mut rhs = linearized.rhs[l];
        let row = a.row_mut(l);
        for d in 0..=order {
            let coeff = if d == order { 1.0 } else { linearized.coeffs[l][d] };
            if coeff == 0.0 {
                continue;
            }
            rhs -= coeff * table.base[d][l];
            for (dst, w) in row.iter_mut().zip(&table.weights[d][l]) {
                *dst += coeff * w;
            }
        }
        b.push(rhs);
    }
    (a, b)
}

/// Converged (or best available) collocation solution.
#[derive(Debug, Clone)]
pub struct WaveletSolution {
    config: BasisConfig,
    shapes: ShapeFamily,
    rho: Vec<f64>,
    constants: Vec<Vec<f64>>,
    history: Vec<f64>,
    converged: bool,
    condition_estimate: f64,
    final_residual: f64,
}

impl WaveletSolution {
    pub fn config(&self) -> BasisConfig {
        self.config
    }

    pub fn order(&self) -> usize {
        self.shapes.order()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// Resolved integration constants `s^(i)(0)` after each iteration.
    pub fn constants(&self) -> &[Vec<f64>] {
        &self.constants
    }

    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    /// Sup-norm change at the collocation points, one entry per iteration.
    pub fn history(&self) -> &[f64] {
        &self.history
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Condition estimate of the last collocation matrix.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    /// `‖A ρ − b‖_∞` of the last linear solve.
    pub fn final_system_residual(&self) -> f64 {
        self.final_residual
    }

    pub fn shapes(&self) -> &ShapeFamily {
        &self.shapes
    }

    pub fn eval(&self, t: f64, deriv: usize) -> Result<f64, SolveError> {
        if deriv > self.order() {
            return Err(SolveError::DerivativeOrder {
                requested: deriv,
                order: self.order(),
            });
        }
        Ok(self.shapes.form(deriv).value(t, &self.rho))
    }

    /// `s(t)`.
    pub fn value(&self, t: f64) -> f64 {
        self.shapes.form(0).value(t, &self.rho)
    }

    /// `[s(t), s′(t), …, s^(q)(t)]`.
    pub fn derivatives(&self, t: f64) -> Vec<f64> {
        (0..=self.order())
            .map(|d| self.shapes.form(d).value(t, &self.rho))
            .collect()
    }
}

/// Runs the quasilinearization iteration to convergence.
pub fn solve(
    spec: &ProblemSpec,
    bcs: &BoundaryConditions,
    config: &SolverConfig,
) -> Result<WaveletSolution, SolveError> {
    config.validate()?;
    let basis = Arc::new(Basis::build(config.basis)?);
    solve_with_basis(spec, bcs, config, basis)
}

/// [`solve`] with a prebuilt basis.
pub fn solve_with_basis(
    spec: &ProblemSpec,
    bcs: &BoundaryConditions,
    config: &SolverConfig,
    basis: Arc<Basis>,
) -> Result<WaveletSolution, SolveError> {
    config.validate()?;
    if basis.config() != config.basis {
        return Err(SolveError::InvalidConfig(
            "basis does not match the configuration".into(),
        ));
    }
    let shapes = shape_solution(basis, spec.order(), bcs)?;
    let points = collocation_points(config.basis);
    let table = ShapeTable::new(&shapes, &points);

    let mut current: Vec<f64> = points.iter().map(|&t| config.initial_guess.eval(t)).collect();
    let mut history = Vec::new();
    let mut constants = Vec::new();
    let mut rho = vec![0.0; points.len()];
    let mut converged = false;
    let mut condition = f64::NAN;
    let mut final_residual = f64::NAN;

    for iteration in 1..=config.max_iter {
        let linearized = quasilinearize(spec, &points, &current, iteration)?;
        let (a, b) = assemble_from_table(&linearized, &table, spec.order());
        let lu = LuFactors::factor(&a).map_err(|source| SolveError::Singular { iteration, source })?;
        rho = lu
            .solve(&b)
            .map_err(|source| SolveError::Singular { iteration, source })?;
        condition = lu.condition_estimate();
        final_residual = a
            .mul_vec(&rho)
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);

        let next = table.values(0, &rho);
        if let Some(pos) = next.iter().position(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite {
                what: "iterate",
                t: points[pos],
                iteration,
            });
        }
        let change = next
            .iter()
            .zip(&current)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        history.push(change);
        constants.push(shapes.resolve_constants(&rho));
        current = next;
        if change <= config.tol {
            converged = true;
            break;
        }
    }

    Ok(WaveletSolution {
        config: config.basis,
        shapes,
        rho,
        constants,
        history,
        converged,
        condition_estimate: condition,
        final_residual,
    })
}
