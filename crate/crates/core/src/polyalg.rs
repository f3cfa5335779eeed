//! Dense univariate polynomials with exact rational coefficients.
//!
//! Every quantity that can be computed exactly (tribonacci polynomials, their
//! antiderivatives, normalization constants, Gram entries) lives here as a
//! [`Rational`]. Floating point only appears in [`Polynomial::eval`].

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PolyError;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Highest degree any [`Polynomial`] may reach.
pub const MAX_DEGREE: usize = 64;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `coeffs[i]` is the coefficient of `t^i`. Trailing zeros are trimmed, and the
/// zero polynomial is stored as `[0]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self, PolyError> {
        let p = Self::trimmed(coeffs);
        if p.degree() > MAX_DEGREE {
            return Err(PolyError::DegreeCap {
                degree: p.degree(),
                cap: MAX_DEGREE,
            });
        }
        Ok(p)
    }

    pub fn from_ints(coeffs: &[i64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    fn trimmed(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial {
            coeffs: vec![Rational::zero()],
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::trimmed(vec![c])
    }

    /// The monomial `t^power`.
    pub fn monomial(power: usize) -> Result<Self, PolyError> {
        let mut coeffs = vec![Rational::zero(); power + 1];
        coeffs[power] = Rational::one();
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::trimmed(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Convolution of the coefficient vectors.
    pub fn mul(&self, other: &Polynomial) -> Result<Self, PolyError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let degree = self.degree() + other.degree();
        if degree > MAX_DEGREE {
            return Err(PolyError::DegreeCap {
                degree,
                cap: MAX_DEGREE,
            });
        }
        let mut out = vec![Rational::zero(); degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::trimmed(out))
    }

    /// Multiply by `t^power`.
    pub fn shift_up(&self, power: usize) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let mut coeffs = vec![Rational::zero(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// `order`-fold antiderivative with every integration constant zero, i.e.
    /// the iterated integral from 0.
    pub fn antiderivative(&self, order: usize) -> Result<Self, PolyError> {
        let mut current = self.clone();
        for _ in 0..order {
            if current.is_zero() {
                return Ok(current);
            }
            let mut coeffs = Vec::with_capacity(current.coeffs.len() + 1);
            coeffs.push(Rational::zero());
            for (i, c) in current.coeffs.iter().enumerate() {
                coeffs.push(c / rat_int(i as i64 + 1));
            }
            current = Self::new(coeffs)?;
        }
        Ok(current)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::trimmed(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat_int(i as i64))
                .collect(),
        )
    }

    pub fn eval_exact(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Exact value of the integral of `self` over `[a, b]`.
    pub fn definite_integral(&self, a: &Rational, b: &Rational) -> Rational {
        // The antiderivative of a polynomial at the cap is one degree over;
        // integrate term by term instead of going through `antiderivative`.
        let mut total = Rational::zero();
        let mut a_pow = a.clone();
        let mut b_pow = b.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                total += c * (&b_pow - &a_pow) / rat_int(i as i64 + 1);
            }
            a_pow *= a;
            b_pow *= b;
        }
        total
    }

    /// Exact `∫₀¹ self·other dt`, computed without forming the product so it
    /// is not subject to the degree cap.
    pub fn unit_inner_product(&self, other: &Polynomial) -> Rational {
        let mut total = Rational::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    total += a * b / rat_int((i + j + 1) as i64);
                }
            }
        }
        total
    }

    /// Floating-point coefficients, rounded once each.
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    /// Horner evaluation in double precision.
    pub fn eval(&self, t: f64) -> f64 {
        horner_compensated(&self.to_f64_coeffs(), t)
    }
}

/// Compensated Horner scheme: the result is as accurate as if computed in
/// twice the working precision and then rounded.
pub fn horner_compensated(coeffs: &[f64], t: f64) -> f64 {
    let mut s = match coeffs.last() {
        Some(&c) => c,
        None => return 0.0,
    };
    let mut err: f64 = 0.0;
    for &c in coeffs.iter().rev().skip(1) {
        let p = s * t;
        let pe = s.mul_add(t, -p);
        let (sum, se) = two_sum(p, c);
        s = sum;
        err = err.mul_add(t, pe + se);
    }
    s + err
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let out = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                match rhs.coeffs.get(i) {
                    Some(b) => a + b,
                    None => a,
                }
            })
            .collect();
        Polynomial::trimmed(out)
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::trimmed(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}
