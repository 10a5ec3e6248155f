//! Exact big-integer polynomial arithmetic and q-binomial coefficients.
//!
//! All polynomials here count objects, so coefficients are non-negative
//! [`BigUint`]s stored densely by exponent.

mod band;

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid_arg, Result};

pub(crate) use band::BandAccumulator;

/// Dense polynomial with non-negative arbitrary-precision coefficients.
///
/// `coeffs[e]` is the coefficient of `x^e`. The highest stored coefficient is
/// never zero; the zero polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigUint>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::monomial(0, BigUint::one())
    }

    pub fn monomial(exp: usize, coeff: BigUint) -> Self {
        let mut coeffs = vec![BigUint::zero(); exp + 1];
        coeffs[exp] = coeff;
        IntPoly::from_coeffs(coeffs)
    }

    /// `1 + x^exp`.
    pub fn binomial_factor(exp: usize) -> Self {
        let mut coeffs = vec![BigUint::zero(); exp + 1];
        coeffs[0] += 1u32;
        coeffs[exp] += 1u32;
        IntPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigUint>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigUint> {
        self.coeffs
    }

    pub fn coeff(&self, exp: usize) -> BigUint {
        self.coeffs.get(exp).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigUint)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Value at `x = 1`, i.e. the sum of all coefficients.
    pub fn eval_at_one(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    /// Horner evaluation at a rational point.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * x + BigRational::from_integer(BigInt::from(c.clone()))
            })
    }

    /// Multiplies by `x^by`.
    pub fn shift(&self, by: usize) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigUint::zero(); by];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    /// Substitutes `x -> x^factor`.
    pub fn dilate(&self, factor: usize) -> Self {
        assert!(factor > 0, "dilation factor must be positive");
        let Some(deg) = self.degree() else {
            return IntPoly::zero();
        };
        let mut coeffs = vec![BigUint::zero(); deg * factor + 1];
        for (e, c) in self.terms() {
            coeffs[e * factor] = c.clone();
        }
        IntPoly { coeffs }
    }

    /// Reverses the coefficients between the valuation and the degree.
    pub fn reverse_on_support(&self) -> Self {
        let (Some(lo), Some(hi)) = (self.valuation(), self.degree()) else {
            return IntPoly::zero();
        };
        let mut coeffs = vec![BigUint::zero(); hi + 1];
        for e in lo..=hi {
            coeffs[lo + hi - e] = self.coeffs[e].clone();
        }
        IntPoly { coeffs }
    }

    /// True when coefficients read the same from the valuation up and from
    /// the degree down.
    pub fn is_palindromic(&self) -> bool {
        *self == self.reverse_on_support()
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (e, c.is_one()) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{c}x")?,
                (_, true) => write!(f, "x^{e}")?,
                (_, false) => write!(f, "{c}x^{e}")?,
            }
        }
        Ok(())
    }
}

impl Add<&IntPoly> for &IntPoly {
    type Output = IntPoly;

    fn add(self, rhs: &IntPoly) -> IntPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (d, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *d += s;
        }
        IntPoly::from_coeffs(coeffs)
    }
}

impl Mul<&IntPoly> for &IntPoly {
    type Output = IntPoly;

    fn mul(self, rhs: &IntPoly) -> IntPoly {
        poly_mul(self, rhs)
    }
}

/// Schoolbook product.
pub fn poly_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_zero() || b.is_zero() {
        return IntPoly::zero();
    }
    let mut out = vec![BigUint::zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, ca) in a.terms() {
        for (j, cb) in b.terms() {
            out[i + j] += ca * cb;
        }
    }
    IntPoly::from_coeffs(out)
}

/// Gaussian binomial coefficient `[n choose k]_q` in whole powers of `q`.
///
/// Built from `[n, k] = [n-1, k] + q^(n-k) [n-1, k-1]` so everything stays in
/// the integers. The result has degree `k (n - k)`.
pub fn qbinomial(n: usize, k: usize) -> Result<IntPoly> {
    if k > n {
        return Err(invalid_arg(format!(
            "q-binomial needs 0 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let mut acc = BandAccumulator::new(n, k, k);
    for step in 1..=n {
        acc.step(|row| step - row);
    }
    Ok(acc.finish(1).pop().map(|(_, p)| p).unwrap_or_default())
}

/// The `z^k` coefficient of `prod_{i=1}^{n} (1 + z q^i)`, in whole powers of `q`.
pub fn rothe_row(n: usize, k: usize) -> Result<IntPoly> {
    if k > n {
        return Err(invalid_arg(format!(
            "Rothe row needs 0 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    Ok(qbinomial(n, k)?.shift(k * (k + 1) / 2))
}

/// Number of partitions of `w` into at most `parts` parts, each in `1..=max_part`.
pub fn partition_count_bounded(w: usize, parts: usize, max_part: usize) -> BigUint {
    // The generating function is [max_part + parts choose parts]_q.
    qbinomial(max_part + parts, parts)
        .expect("k <= n by construction")
        .coeff(w)
}

/// Number of sets of exactly `len` distinct integers from `1..=max_part`
/// summing to `w`.
pub fn strict_partition_count(w: usize, len: usize, max_part: usize) -> BigUint {
    if len > max_part {
        return BigUint::zero();
    }
    let floor = len * (len + 1) / 2;
    if w < floor {
        return BigUint::zero();
    }
    partition_count_bounded(w - floor, len, max_part - len)
}

/// Rows `0..=k_max` of a bivariate polynomial in `z` and `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    rows: Vec<IntPoly>,
    n: usize,
}

impl CoeffTable {
    pub fn new(rows: Vec<IntPoly>, n: usize) -> Result<Self> {
        if rows.is_empty() || rows.len() > n + 1 {
            return Err(invalid_arg(format!(
                "a table over {n} factors needs between 1 and {} rows, got {}",
                n + 1,
                rows.len()
            )));
        }
        Ok(CoeffTable { rows, n })
    }

    /// Number of factors in the product.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, k: usize) -> Option<&IntPoly> {
        self.rows.get(k)
    }

    pub fn rows(&self) -> &[IntPoly] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<IntPoly> {
        self.rows
    }

    /// Sum of every coefficient in every row.
    pub fn total(&self) -> BigUint {
        self.rows.iter().map(IntPoly::eval_at_one).sum()
    }
}
