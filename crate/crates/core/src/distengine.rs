//! Exact null distribution of the rank-sum statistic `W`.
//!
//! The number of ways to pick `n1` of the `N` ranks with doubled sum `e` is
//! the coefficient of `z^{n1} x^e` in `prod_i (1 + z x^{d_i})`, where `d_i`
//! runs over the doubled ranks with multiplicity. Without ties the `z^{n1}`
//! row is a shifted Gaussian binomial and no product needs expanding.
//!
//! All rank sums in this module are doubled integers.

use num_bigint::{BigInt, BigUint};
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid_arg, Result};
use crate::polycore::{qbinomial, BandAccumulator, CoeffTable, IntPoly};
use crate::ranks::RankMultiset;

/// Exact pmf of `W` for a sample of size `n1` out of `n1 + n2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDist {
    n1: usize,
    n2: usize,
    support: Vec<u64>,
    counts: Vec<BigUint>,
    denominator: BigUint,
}

impl ExactDist {
    /// Builds the distribution from the `z^{n1}` row of an expansion in
    /// doubled exponents. Zero coefficients are dropped from the support.
    pub fn from_row(n1: usize, n2: usize, row: &IntPoly) -> Self {
        let (support, counts) = row.terms().map(|(e, c)| (e as u64, c.clone())).unzip();
        ExactDist {
            n1,
            n2,
            support,
            counts,
            denominator: binomial(BigUint::from(n1 + n2), BigUint::from(n1)),
        }
    }

    /// A single support point with probability one.
    pub fn point_mass(n1: usize, n2: usize, at: u64) -> Self {
        ExactDist {
            n1,
            n2,
            support: vec![at],
            counts: vec![BigUint::one()],
            denominator: BigUint::one(),
        }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Doubled rank sums with nonzero probability, increasing.
    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn min(&self) -> u64 {
        self.support[0]
    }

    pub fn max(&self) -> u64 {
        *self.support.last().expect("support is never empty")
    }

    pub fn count_at(&self, w: u64) -> BigUint {
        match self.support.binary_search(&w) {
            Ok(i) => self.counts[i].clone(),
            Err(_) => BigUint::zero(),
        }
    }

    pub fn prob_at(&self, w: u64) -> BigRational {
        self.ratio(self.count_at(w))
    }

    /// `(doubled w, P(W = w))` over the support.
    pub fn pmf(&self) -> impl Iterator<Item = (u64, BigRational)> + '_ {
        self.support
            .iter()
            .zip(&self.counts)
            .map(|(&w, c)| (w, self.ratio(c.clone())))
    }

    /// `P(W <= w)`.
    pub fn cdf(&self, w: u64) -> BigRational {
        let end = self.support.partition_point(|&s| s <= w);
        self.ratio(self.counts[..end].iter().sum())
    }

    /// `P(W >= w)`.
    pub fn sf(&self, w: u64) -> BigRational {
        let start = self.support.partition_point(|&s| s < w);
        self.ratio(self.counts[start..].iter().sum())
    }

    /// Spacing of the support lattice in doubled units: 2 for integer rank
    /// sums, 1 when half-integers occur. A single point reports 2.
    pub fn lattice_step(&self) -> u64 {
        let step = self
            .support
            .windows(2)
            .fold(0u64, |g, w| g.gcd(&(w[1] - w[0])));
        if step == 0 {
            2
        } else {
            step
        }
    }

    fn ratio(&self, count: BigUint) -> BigRational {
        BigRational::new(BigInt::from(count), BigInt::from(self.denominator.clone()))
    }
}

/// Exact first two moments of `W`, in undoubled units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moments {
    pub mean: BigRational,
    pub second_moment: BigRational,
    pub variance: BigRational,
}

impl Moments {
    fn from_mean_variance(mean: BigRational, variance: BigRational) -> Self {
        let second_moment = &variance + &mean * &mean;
        Moments {
            mean,
            second_moment,
            variance,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Alternative {
    Less,
    Greater,
    TwoSided,
}

/// How the two-sided p-value is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TwoSidedMode {
    /// `min(1, 2 min(P(W <= w), P(W >= w)))`.
    #[default]
    TwiceMin,
    /// Total probability of every outcome no more likely than the observed one.
    MinLike,
}

fn check_n1(ranks: &RankMultiset, n1: usize) -> Result<()> {
    if n1 > ranks.len() {
        return Err(invalid_arg(format!(
            "sample size {n1} exceeds the {} available ranks",
            ranks.len()
        )));
    }
    Ok(())
}

/// Expands over the doubled ranks keeping z-rows `k_lo..=k_hi`.
fn expand_band(ranks: &RankMultiset, k_lo: usize, k_hi: usize) -> Vec<(usize, IntPoly)> {
    let doubled = ranks.doubled();
    // Untied ranks are all even; stepping by the common factor halves the
    // table width without changing any count.
    let step = doubled.iter().fold(0u64, |g, &d| g.gcd(&d)).max(1);
    let mut acc = BandAccumulator::new(doubled.len(), k_lo, k_hi);
    for &d in doubled {
        let shift = (d / step) as usize;
        acc.step(|_| shift);
    }
    acc.finish(step as usize)
}

/// Rows `0..=k_max` of `prod_i (1 + z x^{d_i})` over the doubled ranks.
///
/// Row `k` at exponent `e` counts the `k`-subsets of the ranks (tied copies
/// kept distinct) whose doubled sum is `e`.
pub fn euler_expand(ranks: &RankMultiset, k_max: usize) -> Result<CoeffTable> {
    if k_max > ranks.len() {
        return Err(invalid_arg(format!(
            "k_max = {k_max} exceeds the {} available ranks",
            ranks.len()
        )));
    }
    let rows = expand_band(ranks, 0, k_max)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    CoeffTable::new(rows, ranks.len())
}

/// Null distribution of the rank sum of a size-`n1` sample given the
/// observed ranks. `n1 = 0` and `n1 = N` give point masses.
pub fn dist_from_ranks(ranks: &RankMultiset, n1: usize) -> Result<ExactDist> {
    check_n1(ranks, n1)?;
    let n2 = ranks.len() - n1;
    let (_, row) = expand_band(ranks, n1, n1).pop().expect("band holds row n1");
    Ok(ExactDist::from_row(n1, n2, &row))
}

/// Distributions for both samples, `(n1, N - n1)`, from one expansion.
pub fn dist_both_samples(ranks: &RankMultiset, n1: usize) -> Result<(ExactDist, ExactDist)> {
    check_n1(ranks, n1)?;
    let n2 = ranks.len() - n1;
    let (lo, hi) = (n1.min(n2), n1.max(n2));
    let rows = expand_band(ranks, lo, hi);
    let row = |k: usize| &rows[k - lo].1;
    Ok((
        ExactDist::from_row(n1, n2, row(n1)),
        ExactDist::from_row(n2, n1, row(n2)),
    ))
}

/// Reads a distribution off a precomputed table.
pub fn dist_from_table(table: &CoeffTable, n1: usize) -> Result<ExactDist> {
    let row = table.row(n1).ok_or_else(|| {
        invalid_arg(format!(
            "table holds rows up to {}, requested {n1}",
            table.k_max()
        ))
    })?;
    Ok(ExactDist::from_row(n1, table.n() - n1, row))
}

/// No-ties distribution from `[n1 + n2 choose n1]_q` shifted by
/// `n1 (n1 + 1) / 2`, embedded on the doubled lattice.
pub fn dist_no_ties(n1: usize, n2: usize) -> Result<ExactDist> {
    if n1 == 0 || n2 == 0 {
        return Err(invalid_arg(format!(
            "both samples must be non-empty, got n1 = {n1}, n2 = {n2}"
        )));
    }
    let row = qbinomial(n1 + n2, n1)?.shift(n1 * (n1 + 1) / 2).dilate(2);
    Ok(ExactDist::from_row(n1, n2, &row))
}

fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Mean and second moment summed over the support.
pub fn moments_exact(dist: &ExactDist) -> Moments {
    let mut first = BigInt::zero();
    let mut second = BigInt::zero();
    for (&w, c) in dist.support.iter().zip(&dist.counts) {
        let c = BigInt::from(c.clone());
        let w = BigInt::from(w);
        second += &c * &w * &w;
        first += c * w;
    }
    let den = BigInt::from(dist.denominator.clone());
    let mean = rat(first, &den * 2);
    let second_moment = rat(second, &den * 4);
    let variance = &second_moment - &mean * &mean;
    Moments {
        mean,
        second_moment,
        variance,
    }
}

/// Closed-form moments with ties:
/// `E(W) = n1 (N + 1) / 2` and
/// `Var(W) = n1 n2 / (N - 1) * (sum R_i^2 / N - (N + 1)^2 / 4)`.
pub fn moments_closed_form(ranks: &RankMultiset, n1: usize) -> Result<Moments> {
    let n = ranks.len();
    if n1 == 0 || n1 >= n {
        return Err(invalid_arg(format!(
            "closed-form moments need 1 <= n1 <= N - 1, got n1 = {n1}, N = {n}"
        )));
    }
    let n2 = n - n1;
    let sum_sq_doubled: BigInt = ranks.doubled().iter().map(|&d| BigInt::from(d * d)).sum();
    // sum R_i^2 = sum d_i^2 / 4
    let mean_sq = rat(sum_sq_doubled, 4 * n);
    let centre_sq = rat((n + 1) * (n + 1), 4);
    let variance = rat(n1 * n2, n - 1) * (mean_sq - centre_sq);
    let mean = rat(n1 * (n + 1), 2);
    Ok(Moments::from_mean_variance(mean, variance))
}

/// Closed-form moments without ties:
/// `E(W) = n1 (N + 1) / 2`, `E(W^2) = n1 (N + 1) (n2 + 3 n1 (N + 1)) / 12`.
pub fn moments_no_ties(n1: usize, n2: usize) -> Moments {
    let big = n1 + n2 + 1;
    let mean = rat(n1 * big, 2);
    let second_moment = rat(n1 * big * (n2 + 3 * n1 * big), 12);
    let variance = &second_moment - &mean * &mean;
    debug_assert_eq!(variance, rat(n1 * n2 * big, 12));
    Moments {
        mean,
        second_moment,
        variance,
    }
}

/// Exact p-value for an observed doubled rank sum, which need not lie on
/// the support.
pub fn p_value(
    dist: &ExactDist,
    w_obs: u64,
    alternative: Alternative,
    mode: TwoSidedMode,
) -> BigRational {
    match alternative {
        Alternative::Less => dist.cdf(w_obs),
        Alternative::Greater => dist.sf(w_obs),
        Alternative::TwoSided => match mode {
            TwoSidedMode::TwiceMin => {
                let tail = dist.cdf(w_obs).min(dist.sf(w_obs));
                (tail * BigRational::from_integer(2.into())).min(BigRational::one())
            }
            TwoSidedMode::MinLike => {
                let observed = dist.count_at(w_obs);
                let total: BigUint = dist.counts.iter().filter(|c| **c <= observed).sum();
                dist.ratio(total)
            }
        },
    }
}

/// `U = n1 n2 + n2 (n2 + 1) / 2 - W`, doubled.
///
/// Here `W` is the rank sum of the sample of size `n2`; `U` then counts the
/// pairs in which the size-`n2` observation is the smaller (ties count one
/// half).
pub fn u_from_w(w_doubled: i64, n1: usize, n2: usize) -> i64 {
    let (n1, n2) = (n1 as i64, n2 as i64);
    2 * n1 * n2 + n2 * (n2 + 1) - w_doubled
}

/// Inverse of [`u_from_w`].
pub fn w_from_u(u_doubled: i64, n1: usize, n2: usize) -> i64 {
    u_from_w(u_doubled, n1, n2)
}
