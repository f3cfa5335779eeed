//! Tribonacci polynomials and the semi-orthogonal tribonacci wavelet family.
//!
//! For a resolution `(k, M)` the unit interval is split into `2^(k-1)`
//! dyadic subintervals. On subinterval `n` (1-based) the wavelets are
//!
//! ```text
//! W_{n,m}(t) = 2^((k-1)/2) / sqrt(z_m) * T_m(2^(k-1) t - n + 1),   m = 0..M-1
//! ```
//!
//! and zero elsewhere, with `z_m = ∫₀¹ T_m(y)² dy`. Members on different
//! subintervals are orthogonal; members sharing a subinterval are not.
//!
//! The published `k = 3, M = 3` listing prints `W_{1,1}(t) = 8√3` and
//! `W_{3,2}(t) = 2√5(4t−1)²`. The definition above gives `8√3·t` and
//! `2√5(4t−2)²`; this module follows the definition.

use num_traits::{One, Zero};

use crate::error::PolyError;
use crate::polyalg::{rat, rat_int, rat_to_f64, Polynomial, Rational};

/// Highest antiderivative order precomputed for every wavelet.
pub const MAX_INTEGRATION_ORDER: usize = 3;

/// Tribonacci polynomial `T_l`: `T_0 = 1`, `T_1 = t`, `T_2 = t²`,
/// `T_l = t²T_{l-1} + tT_{l-2} + T_{l-3}`.
pub fn tribonacci(l: usize) -> Result<Polynomial, PolyError> {
    let mut window = [Polynomial::one(), Polynomial::monomial(1)?, Polynomial::monomial(2)?];
    if l < 3 {
        return Ok(window[l].clone());
    }
    for _ in 3..=l {
        let [a, b, c] = window;
        let next = &(&c.shift_up(2)? + &b.shift_up(1)?) + &a;
        window = [b, c, next];
    }
    let [_, _, last] = window;
    Ok(last)
}

/// Exact normalization constant `z_m = ∫₀¹ T_m(t)² dt`.
pub fn normalization(m: usize) -> Result<Rational, PolyError> {
    let t = tribonacci(m)?;
    Ok(t.unit_inner_product(&t))
}

/// Resolution of a wavelet family: `2^(k-1)` subintervals with `M`
/// polynomial orders on each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisConfig {
    k: u32,
    m: usize,
}

impl BasisConfig {
    pub const MAX_K: u32 = 16;

    pub fn new(k: u32, m: usize) -> Result<Self, String> {
        if k == 0 || k > Self::MAX_K {
            return Err(format!("k must be in 1..={}, got {k}", Self::MAX_K));
        }
        if m == 0 {
            return Err("M must be at least 1".to_string());
        }
        Ok(BasisConfig { k, m })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of polynomial orders per subinterval (`M`).
    pub fn orders(&self) -> usize {
        self.m
    }

    pub fn subintervals(&self) -> usize {
        1usize << (self.k - 1)
    }

    pub fn size(&self) -> usize {
        self.subintervals() * self.m
    }

    /// Flat index of `W_{n,m}` with `n` 1-based.
    pub fn flat_index(&self, n: usize, m: usize) -> usize {
        debug_assert!((1..=self.subintervals()).contains(&n) && m < self.m);
        (n - 1) * self.m + m
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn split_index(&self, j: usize) -> (usize, usize) {
        (j / self.m + 1, j % self.m)
    }

    /// Index of the subinterval containing `t`, 1-based; `t = 1` belongs to
    /// the last one.
    pub fn subinterval_of(&self, t: f64) -> Option<usize> {
        if !(0.0..=1.0).contains(&t) {
            return None;
        }
        let count = self.subintervals();
        let n = ((t * count as f64).floor() as usize).min(count - 1);
        Some(n + 1)
    }
}

/// `P^pW` (or `W` itself for `p = 0`) of a single wavelet as an explicit
/// piecewise polynomial: zero before `start`, `factor · body(y)` on the
/// support with local variable `y = 2^(k-1) t − (n−1)`, and
/// `factor · tail(t − end)` afterwards.
#[derive(Debug, Clone)]
pub struct PiecewiseFn {
    start: f64,
    end: f64,
    dilation: f64,
    shift: f64,
    closed_end: bool,
    factor: f64,
    body: Polynomial,
    tail: Polynomial,
    body_f64: Vec<f64>,
    tail_f64: Vec<f64>,
}

impl PiecewiseFn {
    pub fn breakpoints(&self) -> [f64; 2] {
        [self.start, self.end]
    }

    /// Exact body polynomial in the local variable; multiply by
    /// [`factor`](Self::factor) for the actual values.
    pub fn body(&self) -> &Polynomial {
        &self.body
    }

    /// Exact tail polynomial in `t − end`.
    pub fn tail(&self) -> &Polynomial {
        &self.tail
    }

    /// Irrational amplitude shared by body and tail.
    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.start {
            return 0.0;
        }
        let inside = t < self.end || (self.closed_end && t == self.end);
        if inside {
            let y = t.mul_add(self.dilation, -self.shift);
            self.factor * crate::polyalg::horner_compensated(&self.body_f64, y)
        } else {
            self.factor * crate::polyalg::horner_compensated(&self.tail_f64, t - self.end)
        }
    }
}

/// One basis member `W_{n,m}` together with its antiderivatives `P^pW`,
/// `p = 1..=3`.
#[derive(Debug, Clone)]
pub struct Wavelet {
    n: usize,
    m: usize,
    z: Rational,
    scale: f64,
    norm: f64,
    inner: Polynomial,
    levels: Vec<PiecewiseFn>,
}

impl Wavelet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `[lo, hi)`; the last subinterval also contains `hi = 1`.
    pub fn support(&self) -> (f64, f64) {
        (self.levels[0].start, self.levels[0].end)
    }

    /// `2^((k-1)/2)`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `1 / sqrt(z_m)`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn z(&self) -> &Rational {
        &self.z
    }

    /// Unnormalized `T_m` in the local variable.
    pub fn inner_poly(&self) -> &Polynomial {
        &self.inner
    }

    pub fn eval(&self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        self.levels[0].eval(t)
    }

    /// `P^pW(t)`, the `p`-fold iterated integral from 0. `p = 0` is the
    /// wavelet itself.
    pub fn integrated(&self, p: usize, t: f64) -> f64 {
        if p == 0 {
            return self.eval(t);
        }
        self.levels[p].eval(t)
    }

    pub fn piecewise(&self, p: usize) -> &PiecewiseFn {
        &self.levels[p]
    }
}

/// The ordered family `W_{1,0}, …, W_{1,M-1}, W_{2,0}, …, W_{2^(k-1),M-1}`.
#[derive(Debug, Clone)]
pub struct Basis {
    config: BasisConfig,
    wavelets: Vec<Wavelet>,
}

impl Basis {
    pub fn build(config: BasisConfig) -> Result<Self, PolyError> {
        let count = config.subintervals();
        let dilation = rat_int(count as i64);
        let width = rat(1, count as i64);
        let scale = (count as f64).sqrt();

        // Per-order templates shared by every subinterval.
        struct Template {
            inner: Polynomial,
            z: Rational,
            norm: f64,
            // h^p · Q_p(y) for p = 0..=3, where Q_p is the p-fold antiderivative.
            bodies: Vec<Polynomial>,
            // h^p · Q_p(1)
            end_values: Vec<Rational>,
        }

        let mut templates = Vec::with_capacity(config.orders());
        for m in 0..config.orders() {
            let inner = tribonacci(m)?;
            let z = inner.unit_inner_product(&inner);
            let norm = 1.0 / rat_to_f64(&z).sqrt();
            let mut bodies = Vec::with_capacity(MAX_INTEGRATION_ORDER + 1);
            let mut end_values = Vec::with_capacity(MAX_INTEGRATION_ORDER + 1);
            let mut h_pow = Rational::one();
            for p in 0..=MAX_INTEGRATION_ORDER {
                let body = inner.antiderivative(p)?.scale(&h_pow);
                end_values.push(body.eval_exact(&Rational::one()));
                bodies.push(body);
                h_pow *= &width;
            }
            templates.push(Template {
                inner,
                z,
                norm,
                bodies,
                end_values,
            });
        }

        let mut wavelets = Vec::with_capacity(config.size());
        for n in 1..=count {
            let start = rat_to_f64(&rat(n as i64 - 1, count as i64));
            let end = rat_to_f64(&rat(n as i64, count as i64));
            for (m, tpl) in templates.iter().enumerate() {
                let factor = scale * tpl.norm;
                let levels = (0..=MAX_INTEGRATION_ORDER)
                    .map(|p| {
                        // After the support the p-th antiderivative is the
                        // Taylor polynomial built from P^{p-i}W(end).
                        let mut tail = vec![Rational::zero(); p.max(1)];
                        let mut fact = Rational::one();
                        for (i, slot) in tail.iter_mut().enumerate().take(p) {
                            if i > 0 {
                                fact *= rat_int(i as i64);
                            }
                            *slot = &tpl.end_values[p - i] / &fact;
                        }
                        let tail = Polynomial::new(tail)?;
                        let body = tpl.bodies[p].clone();
                        Ok(PiecewiseFn {
                            start,
                            end,
                            dilation: rat_to_f64(&dilation),
                            shift: (n - 1) as f64,
                            closed_end: n == count,
                            factor,
                            body_f64: body.to_f64_coeffs(),
                            tail_f64: tail.to_f64_coeffs(),
                            body,
                            tail,
                        })
                    })
                    .collect::<Result<Vec<_>, PolyError>>()?;
                wavelets.push(Wavelet {
                    n,
                    m,
                    z: tpl.z.clone(),
                    scale,
                    norm: tpl.norm,
                    inner: tpl.inner.clone(),
                    levels,
                });
            }
        }
        Ok(Basis { config, wavelets })
    }

    pub fn config(&self) -> BasisConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.wavelets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelets.is_empty()
    }

    pub fn wavelets(&self) -> &[Wavelet] {
        &self.wavelets
    }

    pub fn get(&self, n: usize, m: usize) -> &Wavelet {
        &self.wavelets[self.config.flat_index(n, m)]
    }

    /// Flat indices of the wavelets whose support contains `t`.
    pub fn active_range(&self, t: f64) -> Option<std::ops::Range<usize>> {
        let n = self.config.subinterval_of(t)?;
        let first = self.config.flat_index(n, 0);
        Some(first..first + self.config.orders())
    }

    /// Values `P^pW_j(t)` for every basis member.
    pub fn integrated_row(&self, p: usize, t: f64) -> Vec<f64> {
        self.wavelets.iter().map(|w| w.integrated(p, t)).collect()
    }

    /// Exact `∫₀¹ W_i W_j dt` expressed as `(q, z_a, z_b)` such that the value
    /// is `q / sqrt(z_a z_b)`; `None` when the supports are disjoint.
    pub fn exact_inner_product(&self, i: usize, j: usize) -> Option<(Rational, Rational, Rational)> {
        let (a, b) = (&self.wavelets[i], &self.wavelets[j]);
        if a.n != b.n {
            return None;
        }
        // amplitude_a · amplitude_b · width = 1 / sqrt(z_a z_b)
        Some((a.inner.unit_inner_product(&b.inner), a.z.clone(), b.z.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn basis(k: u32, m: usize) -> Basis {
        Basis::build(BasisConfig::new(k, m).unwrap()).unwrap()
    }

    /// Integer-coefficient recurrence, independent of `Polynomial`.
    fn tribonacci_ints(l: usize) -> Vec<i64> {
        let mut seq: Vec<Vec<i64>> = vec![vec![1], vec![0, 1], vec![0, 0, 1]];
        while seq.len() <= l {
            let i = seq.len();
            let mut next = vec![0i64; 2 * i - 1];
            for (d, c) in seq[i - 1].iter().enumerate() {
                next[d + 2] += c;
            }
            for (d, c) in seq[i - 2].iter().enumerate() {
                next[d + 1] += c;
            }
            for (d, c) in seq[i - 3].iter().enumerate() {
                next[d] += c;
            }
            seq.push(next);
        }
        seq.swap_remove(l)
    }

    #[test]
    fn tribonacci_examples() {
        assert_eq!(tribonacci(2).unwrap(), Polynomial::from_ints(&[0, 0, 1]).unwrap());
        assert_eq!(tribonacci(3).unwrap(), Polynomial::from_ints(&[1, 0, 1, 0, 1]).unwrap());
        assert_eq!(
            tribonacci(4).unwrap(),
            Polynomial::from_ints(&[0, 1, 1, 1, 1, 0, 1]).unwrap()
        );
        for l in 0..20 {
            assert_eq!(
                tribonacci(l).unwrap(),
                Polynomial::from_ints(&tribonacci_ints(l)).unwrap(),
                "l = {l}"
            );
        }
    }

    #[test]
    fn tribonacci_degree_grows_by_two() {
        for l in 2..25 {
            assert_eq!(tribonacci(l).unwrap().degree(), 2 * l - 2);
        }
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalization(0).unwrap(), rat(1, 1));
        assert_eq!(normalization(1).unwrap(), rat(1, 3));
        assert_eq!(normalization(2).unwrap(), rat(1, 5));
        assert_eq!(
            normalization(3).unwrap(),
            rat(1, 9) + rat(1, 5) + rat(1, 1) + rat(2, 7) + rat(2, 5) + rat(2, 3)
        );
    }

    #[test]
    fn config_indexing_is_bijective() {
        let cfg = BasisConfig::new(4, 5).unwrap();
        assert_eq!(cfg.size(), 40);
        for j in 0..cfg.size() {
            let (n, m) = cfg.split_index(j);
            assert_eq!(cfg.flat_index(n, m), j);
        }
        assert!(BasisConfig::new(0, 3).is_err());
        assert!(BasisConfig::new(1, 0).is_err());
    }

    #[test]
    fn k3_m3_matches_closed_forms() {
        let b = basis(3, 3);
        let s3 = 3f64.sqrt();
        let s5 = 5f64.sqrt();
        type Closed = fn(f64) -> f64;
        let expected: [(usize, usize, Closed); 12] = [
            (1, 0, |_| 2.0),
            (1, 1, |t| 8.0 * 3f64.sqrt() * t),
            (1, 2, |t| 32.0 * 5f64.sqrt() * t * t),
            (2, 0, |_| 2.0),
            (2, 1, |t| 2.0 * 3f64.sqrt() * (4.0 * t - 1.0)),
            (2, 2, |t| 2.0 * 5f64.sqrt() * (4.0 * t - 1.0).powi(2)),
            (3, 0, |_| 2.0),
            (3, 1, |t| 2.0 * 3f64.sqrt() * (4.0 * t - 2.0)),
            (3, 2, |t| 2.0 * 5f64.sqrt() * (4.0 * t - 2.0).powi(2)),
            (4, 0, |_| 2.0),
            (4, 1, |t| 2.0 * 3f64.sqrt() * (4.0 * t - 3.0)),
            (4, 2, |t| 2.0 * 5f64.sqrt() * (4.0 * t - 3.0).powi(2)),
        ];
        for (n, m, f) in expected {
            let w = b.get(n, m);
            let lo = (n - 1) as f64 / 4.0;
            for i in 0..10 {
                let t = lo + 0.25 * i as f64 / 10.0;
                assert_abs_diff_eq!(w.eval(t), f(t), epsilon = 1e-12);
            }
            assert_abs_diff_eq!(w.scale(), 2.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(b.get(1, 0).eval(0.1), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.get(1, 2).eval(0.125), 0.5 * s5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.get(1, 1).eval(0.125), s3, epsilon = 1e-12);
    }

    #[test]
    fn single_interval_linear_member() {
        let b = basis(1, 2);
        assert_abs_diff_eq!(b.get(1, 1).eval(0.5), 3f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn support_is_half_open_except_at_one() {
        let b = basis(3, 3);
        assert_eq!(b.get(2, 0).eval(0.1), 0.0);
        assert_eq!(b.get(2, 0).eval(0.3), 2.0);
        assert_eq!(b.get(2, 0).eval(0.25), 2.0);
        assert_eq!(b.get(1, 0).eval(0.25), 0.0);
        assert_eq!(b.get(4, 0).eval(1.0), 2.0);
        for w in b.wavelets() {
            assert_eq!(w.eval(-0.1), 0.0);
            assert_eq!(w.eval(1.1), 0.0);
        }
    }

    #[test]
    fn integrated_examples() {
        let b1 = basis(1, 3);
        assert_abs_diff_eq!(b1.get(1, 0).integrated(2, 1.0), 0.5, epsilon = 1e-15);
        let b2 = basis(2, 2);
        assert_abs_diff_eq!(b2.get(1, 0).integrated(1, 0.75), 2f64.sqrt() * 0.5, epsilon = 1e-15);
        for w in basis(3, 4).wavelets() {
            assert_eq!(w.integrated(3, 0.0), 0.0);
        }
        // W_{2,0} = √2 on [1/2, 1): P²W(1) = √2/8
        assert_abs_diff_eq!(b2.get(2, 0).integrated(2, 1.0), 2f64.sqrt() / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn unit_norm_is_exact() {
        for (k, m) in [(1, 8), (2, 5), (3, 3), (4, 2)] {
            let b = basis(k, m);
            for i in 0..b.len() {
                let (q, za, zb) = b.exact_inner_product(i, i).unwrap();
                assert_eq!(za, zb);
                assert_eq!(q / za, Rational::one());
            }
        }
    }

    #[test]
    fn different_subintervals_are_orthogonal() {
        let b = basis(3, 4);
        for i in 0..b.len() {
            for j in 0..b.len() {
                let same = b.wavelets()[i].n() == b.wavelets()[j].n();
                assert_eq!(b.exact_inner_product(i, j).is_some(), same);
            }
        }
        // And directly: the exact product of the piecewise bodies never overlaps.
        let cfg = b.config();
        let w1 = b.get(1, 2);
        let w2 = b.get(2, 2);
        assert!(w1.support().1 <= w2.support().0);
        assert_eq!(cfg.subintervals(), 4);
    }

    #[test]
    fn antiderivatives_are_smooth_at_breakpoints() {
        let b = basis(3, 5);
        let eps = 1e-9;
        for w in b.wavelets() {
            let (lo, hi) = w.support();
            for p in 1..=MAX_INTEGRATION_ORDER {
                // value and derivatives up to order p-1 are continuous
                for q in 0..p {
                    let level = p - q;
                    for edge in [lo, hi] {
                        if edge >= 1.0 {
                            continue;
                        }
                        let left = w.integrated(level, edge - eps);
                        let right = w.integrated(level, edge);
                        let slope = w.integrated(level.saturating_sub(1), edge).abs() + 1.0;
                        assert!(
                            (left - right).abs() <= 1e-13 + 2.0 * eps * slope * 10.0,
                            "n={} m={} p={level} edge={edge}: {left} vs {right}",
                            w.n(),
                            w.m()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn antiderivative_levels_match_at_breakpoints_exactly() {
        // Body at y = 1 equals tail at 0 for every level, as exact rationals.
        let b = basis(2, 6);
        for w in b.wavelets() {
            for p in 1..=MAX_INTEGRATION_ORDER {
                let pw = w.piecewise(p);
                assert_eq!(pw.body().eval_exact(&Rational::one()), pw.tail().coeffs()[0].clone());
                assert_eq!(pw.body().eval_exact(&Rational::zero()), Rational::zero());
            }
        }
    }

    #[test]
    fn derivative_of_each_level_is_the_previous_one() {
        let b = basis(2, 4);
        let h = 1e-6;
        for w in b.wavelets() {
            let amp = w.scale() * w.norm();
            for p in 1..=MAX_INTEGRATION_ORDER {
                for i in 0..=1000 {
                    let t = i as f64 / 1000.0;
                    let (lo, hi) = w.support();
                    // skip points whose stencil straddles a breakpoint of the lower level
                    if (t - lo).abs() < 2.0 * h || (t - hi).abs() < 2.0 * h || t < h || t > 1.0 - h {
                        continue;
                    }
                    let fd = (w.integrated(p, t + h) - w.integrated(p, t - h)) / (2.0 * h);
                    let exact = w.integrated(p - 1, t);
                    assert!(
                        (fd - exact).abs() <= 1e-6 * amp.max(1.0),
                        "p={p} t={t}: {fd} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn active_range_selects_one_block() {
        let b = basis(3, 3);
        assert_eq!(b.active_range(0.3), Some(3..6));
        assert_eq!(b.active_range(1.0), Some(9..12));
        assert_eq!(b.active_range(1.5), None);
    }
}
