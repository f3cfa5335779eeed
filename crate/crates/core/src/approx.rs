//! L² projection of functions onto a wavelet basis.
//!
//! Coefficients solve `D b = G` where `D` is the Gram matrix of the basis and
//! `G_j = ∫₀¹ g W_j dt`. The basis is far from orthogonal within a
//! subinterval, so `D` gets ill-conditioned as `M` grows; the condition
//! estimate is reported alongside the coefficients.

use std::sync::Arc;

use crate::basis::{Basis, BasisConfig};
use crate::error::ApproxError;
use crate::linalg::{DenseMatrix, LuFactors};
use crate::par::Execution;
use crate::polyalg::{rat_to_f64, Rational};
use crate::quadrature::GaussLegendre;

pub const DEFAULT_QUAD_ORDER: usize = 32;
pub const PANELS_PER_SUPPORT: usize = 8;

/// Gram matrix `D_ij = ∫₀¹ W_i W_j dt`.
///
/// Within a block `D_ab = q_ab / sqrt(z_a z_b)` with `q_ab = ∫₀¹ T_a T_b` and
/// `z_a = q_aa`, both exact rationals. Blocks for different subintervals are
/// identical and off-block entries are exactly zero.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    config: BasisConfig,
    products: Vec<Vec<Rational>>,
    z: Vec<Rational>,
    dense: DenseMatrix,
}

impl GramMatrix {
    pub fn new(basis: &Basis) -> Self {
        let config = basis.config();
        let m = config.orders();
        let products: Vec<Vec<Rational>> = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        let (q, _, _) = basis
                            .exact_inner_product(a, b)
                            .expect("members of the first block share a support");
                        q
                    })
                    .collect()
            })
            .collect();
        let z: Vec<Rational> = (0..m).map(|a| products[a][a].clone()).collect();
        let block: Vec<Vec<f64>> = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        if a == b {
                            1.0
                        } else {
                            rat_to_f64(&products[a][b]) / (rat_to_f64(&z[a]) * rat_to_f64(&z[b])).sqrt()
                        }
                    })
                    .collect()
            })
            .collect();
        let size = config.size();
        let dense = DenseMatrix::from_fn(
            size,
            size,
            |i, j| {
                if i / m == j / m {
                    block[i % m][j % m]
                } else {
                    0.0
                }
            },
        );
        GramMatrix {
            config,
            products,
            z,
            dense,
        }
    }

    pub fn config(&self) -> BasisConfig {
        self.config
    }

    /// Exact `∫₀¹ T_a T_b` for `a, b < M`.
    pub fn exact_product(&self, a: usize, b: usize) -> &Rational {
        &self.products[a][b]
    }

    pub fn z(&self, a: usize) -> &Rational {
        &self.z[a]
    }

    pub fn dense(&self) -> &DenseMatrix {
        &self.dense
    }

    pub fn condition_estimate(&self) -> f64 {
        crate::linalg::condition_estimate(&self.dense)
    }
}

/// Expansion coefficients over a basis, in flat-index order.
#[derive(Debug, Clone)]
pub struct Expansion {
    basis: Arc<Basis>,
    coeffs: Vec<f64>,
}

impl Expansion {
    pub fn new(basis: Arc<Basis>, coeffs: Vec<f64>) -> Result<Self, ApproxError> {
        if coeffs.len() != basis.len() {
            return Err(ApproxError::LengthMismatch {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        Ok(Expansion { basis, coeffs })
    }

    pub fn config(&self) -> BasisConfig {
        self.basis.config()
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `Σ_j b_j W_j(t)`; only the block containing `t` contributes.
    pub fn eval(&self, t: f64) -> f64 {
        match self.basis.active_range(t) {
            Some(range) => range.map(|j| self.coeffs[j] * self.basis.wavelets()[j].eval(t)).sum(),
            None => 0.0,
        }
    }
}

/// `G_j = ∫₀¹ g(t) W_j(t) dt` by composite Gauss–Legendre quadrature over the
/// support of each member.
pub fn inner_products<G>(g: &G, basis: &Basis, quad_order: usize, exec: Execution) -> Result<Vec<f64>, ApproxError>
where
    G: Fn(f64) -> f64 + Sync,
{
    let rule = GaussLegendre::new(quad_order);
    let results = exec.map(basis.wavelets(), |w| {
        let (lo, hi) = w.support();
        let h = (hi - lo) / PANELS_PER_SUPPORT as f64;
        let mut total = 0.0;
        for p in 0..PANELS_PER_SUPPORT {
            let a = lo + h * p as f64;
            let mut panel = 0.0;
            for (t, wt) in rule.mapped(a, a + h) {
                let v = g(t);
                if !v.is_finite() {
                    return Err(ApproxError::NonFiniteSample { t });
                }
                panel += wt * v * w.eval(t);
            }
            total += panel;
        }
        Ok(total)
    });
    results.into_iter().collect()
}

/// Projection together with the Gram condition estimate.
#[derive(Debug, Clone)]
pub struct Projection {
    pub expansion: Expansion,
    pub gram_condition: f64,
}

pub fn project<G>(g: &G, basis: Arc<Basis>, quad_order: usize, exec: Execution) -> Result<Projection, ApproxError>
where
    G: Fn(f64) -> f64 + Sync,
{
    let gram = GramMatrix::new(&basis);
    let rhs = inner_products(g, &basis, quad_order, exec)?;
    let lu = LuFactors::factor(gram.dense()).map_err(|source| ApproxError::GramSolve {
        condition: gram.condition_estimate(),
        source,
    })?;
    let coeffs = lu.solve(&rhs).map_err(|source| ApproxError::GramSolve {
        condition: f64::INFINITY,
        source,
    })?;
    Ok(Projection {
        expansion: Expansion::new(basis, coeffs)?,
        gram_condition: lu.condition_estimate(),
    })
}

/// `max |g(t_i) − e(t_i)|` on `t_i = i/(grid_size−1)`; points where `g` is
/// non-finite are skipped.
pub fn approx_max_error<G>(e: &Expansion, g: &G, grid_size: usize) -> f64
where
    G: Fn(f64) -> f64,
{
    assert!(grid_size >= 2, "grid needs at least two points");
    (0..grid_size)
        .map(|i| i as f64 / (grid_size - 1) as f64)
        .filter_map(|t| {
            let v = g(t);
            v.is_finite().then(|| (v - e.eval(t)).abs())
        })
        .fold(0.0, f64::max)
}

/// Functions with built-in names for the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `sin t / t`
    Sinc,
    /// `t ln t`
    TLogT,
}

impl TestFunction {
    pub const ALL: [TestFunction; 2] = [TestFunction::Sinc, TestFunction::TLogT];

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "sinc" => Some(TestFunction::Sinc),
            "tlogt" => Some(TestFunction::TLogT),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Sinc => "sinc",
            TestFunction::TLogT => "tlogt",
        }
    }

    /// Value with the removable singularity at 0 filled in.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TestFunction::Sinc if t == 0.0 => 1.0,
            TestFunction::Sinc => t.sin() / t,
            TestFunction::TLogT if t == 0.0 => 0.0,
            TestFunction::TLogT => t * t.ln(),
        }
    }

    /// Reference coefficients and the per-entry tolerance they are checked
    /// at: `(k, M, coefficients, tolerance, relative)`.
    pub fn reference(&self) -> (u32, usize, &'static [f64], f64, bool) {
        match self {
            TestFunction::Sinc => (1, 5, &REFERENCE_SINC_K1_M5, 1e-4, false),
            TestFunction::TLogT => (1, 7, &REFERENCE_TLOGT_K1_M7, 1e-2, true),
        }
    }
}

/// Published coefficients of `sin t / t` for `k = 1, M = 5`.
pub const REFERENCE_SINC_K1_M5: [f64; 5] = [0.99101, 0.000262147, -0.0824239, 0.0184607, -0.000668257];

/// Published coefficients of `t ln t` for `k = 1, M = 7`.
pub const REFERENCE_TLOGT_K1_M7: [f64; 7] = [14.999, -17.4469, 11.9286, -34.2645, 51.9891, -38.6191, 12.6573];
