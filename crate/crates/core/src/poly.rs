//! Real polynomials in one integer variable `n`.
//!
//! A [`PolyReal`] keeps its coefficients as exact rationals and caches the
//! nearest doubles. Every finite `f64` is an exact dyadic rational, so
//! polynomials built from doubles lose nothing, and polynomials built from
//! Faulhaber sums or compositions such as `φ(a·n)` keep their exact
//! denominators. Lower-order terms therefore cancel exactly when two
//! polynomials are subtracted.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::exact::{binomial, rational_from_f64, rational_from_int, rational_to_f64};

/// Largest power-sum exponent with a Faulhaber polynomial available.
pub const FAULHABER_MAX: u32 = 12;

#[derive(Clone, PartialEq)]
pub struct PolyReal {
    exact: Vec<BigRational>,
    coeffs: Vec<f64>,
}

impl PolyReal {
    pub fn zero() -> Self {
        PolyReal {
            exact: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    /// Coefficients in increasing degree, constant term first.
    pub fn new(coeffs: &[f64]) -> Self {
        Self::from_rationals(coeffs.iter().map(|&c| rational_from_f64(c)).collect())
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_rationals(coeffs.iter().map(|&c| rational_from_int(c)).collect())
    }

    pub fn from_rationals(mut exact: Vec<BigRational>) -> Self {
        while exact.last().is_some_and(|c| c.is_zero()) {
            exact.pop();
        }
        let coeffs = exact.iter().map(rational_to_f64).collect();
        PolyReal { exact, coeffs }
    }

    /// `coeff · n^degree`.
    pub fn monomial(degree: usize, coeff: BigRational) -> Self {
        let mut exact = vec![BigRational::zero(); degree + 1];
        exact[degree] = coeff;
        Self::from_rationals(exact)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.exact.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exact_coeffs(&self) -> &[BigRational] {
        &self.exact
    }

    /// True if every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.exact.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients, if all are integers that fit in `i64`.
    pub fn integer_coeffs(&self) -> Option<Vec<i64>> {
        self.exact
            .iter()
            .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
            .collect()
    }

    /// Horner evaluation in double precision.
    pub fn eval(&self, n: i64) -> f64 {
        let x = n as f64;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_exact(&self, n: &BigInt) -> BigRational {
        let x = BigRational::from_integer(n.clone());
        self.exact
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &x + c)
    }

    /// Exact value at `n` for integer-coefficient polynomials, if it fits in `i128`.
    pub fn eval_i128(&self, n: i64) -> Option<i128> {
        let x = n as i128;
        let mut acc: i128 = 0;
        for c in self.exact.iter().rev() {
            if !c.is_integer() {
                return None;
            }
            let c = c.to_integer().to_i128()?;
            acc = acc.checked_mul(x)?.checked_add(c)?;
        }
        Some(acc)
    }

    /// `q_h(n) = p(n + h) − p(n)`; the degree drops by one when `h ≠ 0`.
    pub fn difference(&self, h: i64) -> PolyReal {
        let shifted = self.shift(h);
        shifted.sub(self)
    }

    /// `p(n + h)` by binomial expansion.
    pub fn shift(&self, h: i64) -> PolyReal {
        let h = rational_from_int(h);
        let mut out = vec![BigRational::zero(); self.exact.len()];
        for (i, c) in self.exact.iter().enumerate() {
            let mut h_pow = BigRational::one();
            for j in (0..=i).rev() {
                let term = c * &h_pow * BigRational::from_integer(binomial(i as u32, j as u32));
                out[j] += term;
                h_pow *= &h;
            }
        }
        PolyReal::from_rationals(out)
    }

    /// `p(a · n)`.
    pub fn compose_scale(&self, a: i64) -> PolyReal {
        let a = rational_from_int(a);
        let mut pow = BigRational::one();
        let mut out = Vec::with_capacity(self.exact.len());
        for c in &self.exact {
            out.push(c * &pow);
            pow *= &a;
        }
        PolyReal::from_rationals(out)
    }

    pub fn add(&self, other: &PolyReal) -> PolyReal {
        let len = self.exact.len().max(other.exact.len());
        let zero = BigRational::zero();
        let out = (0..len)
            .map(|i| self.exact.get(i).unwrap_or(&zero) + other.exact.get(i).unwrap_or(&zero))
            .collect();
        PolyReal::from_rationals(out)
    }

    pub fn sub(&self, other: &PolyReal) -> PolyReal {
        self.add(&other.scale(&rational_from_int(-1)))
    }

    pub fn scale(&self, k: &BigRational) -> PolyReal {
        PolyReal::from_rationals(self.exact.iter().map(|c| c * k).collect())
    }

    /// Top degree and its coefficient.
    pub fn leading_coeff(&self) -> Result<(usize, f64)> {
        let (d, c) = self.leading_coeff_exact()?;
        Ok((d, rational_to_f64(&c)))
    }

    pub fn leading_coeff_exact(&self) -> Result<(usize, BigRational)> {
        match self.exact.last() {
            Some(c) => Ok((self.exact.len() - 1, c.clone())),
            None => Err(LabError::ZeroPolynomial),
        }
    }

    /// Splits `p = leading monomial + ψ`.
    pub fn split(&self) -> Result<(PolyReal, PolyReal)> {
        let (d, c) = self.leading_coeff_exact()?;
        let lead = PolyReal::monomial(d, c);
        let rest = PolyReal::from_rationals(self.exact[..d].to_vec());
        Ok((lead, rest))
    }

    /// Largest `|coefficient|`, as a double.
    pub fn max_abs_coeff(&self) -> f64 {
        self.exact
            .iter()
            .map(|c| rational_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }
}

/// Bernoulli numbers `B_0 … B_q` with `B_1 = −1/2`.
fn bernoulli(q: u32) -> Vec<BigRational> {
    let mut b = vec![BigRational::one()];
    for m in 1..=q {
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(binomial(m + 1, j as u32)) * bj;
        }
        b.push(-acc / rational_from_int(m as i64 + 1));
    }
    b
}

/// `S_q(n) = Σ_{l=0}^{n−1} l^q` as a polynomial of degree `q + 1`.
pub fn faulhaber(q: u32) -> Result<PolyReal> {
    if q > FAULHABER_MAX {
        return Err(LabError::Range(format!(
            "Faulhaber exponent {q} exceeds the table bound {FAULHABER_MAX}"
        )));
    }
    let b = bernoulli(q);
    let mut exact = vec![BigRational::zero(); q as usize + 2];
    let inv = BigRational::new(BigInt::one(), BigInt::from(q + 1));
    for (j, bj) in b.iter().enumerate() {
        let power = q as usize + 1 - j;
        exact[power] += BigRational::from_integer(binomial(q + 1, j as u32)) * bj * &inv;
    }
    Ok(PolyReal::from_rationals(exact))
}

impl fmt::Debug for PolyReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyReal(")?;
        if self.exact.is_empty() {
            write!(f, "0")?;
        }
        let mut first = true;
        for (i, c) in self.exact.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·n")?,
                _ => write!(f, "{c}·n^{i}")?,
            }
        }
        write!(f, ")")
    }
}

impl Serialize for PolyReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coeffs = Vec::<f64>::deserialize(deserializer)?;
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(serde::de::Error::custom("polynomial coefficients must be finite"));
        }
        Ok(PolyReal::new(&coeffs))
    }
}
