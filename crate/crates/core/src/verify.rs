//! Independent checks on the exact engine.
//!
//! [`brute_force_dist`] lists every `n1`-subset of the ranks directly, and
//! [`normal_approx_p`] gives the large-sample approximation so its error
//! can be measured against the exact answer.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::distengine::{p_value, Alternative, ExactDist, Moments, TwoSidedMode};
use crate::error::{Error, Result};
use crate::numfmt::rational_to_f64;
use crate::polycore::IntPoly;
use crate::ranks::RankMultiset;

/// Largest number of subsets the brute-force oracle will visit.
pub const BRUTE_FORCE_GUARD: u64 = 10_000_000;

/// Revolving-door order over the `t`-subsets of `0..n`: consecutive subsets
/// differ by swapping one element out and one in.
///
/// Each call to [`RevolvingDoor::next_swap`] returns `(removed, added)`.
/// Based on Knuth's Algorithm R (TAOCP 7.2.1.3).
pub struct RevolvingDoor {
    /// `c[1..=t]` in increasing order, `c[t+1] = n` as a sentinel.
    c: Vec<usize>,
    t: usize,
    done: bool,
}

impl RevolvingDoor {
    /// Starts at `{0, 1, ..., t-1}`. Requires `1 < t < n`.
    pub fn new(n: usize, t: usize) -> Self {
        assert!(1 < t && t < n, "revolving door needs 1 < t < n");
        let mut c = Vec::with_capacity(t + 2);
        c.push(0);
        c.extend(0..t);
        c.push(n);
        RevolvingDoor { c, t, done: false }
    }

    pub fn current(&self) -> &[usize] {
        &self.c[1..=self.t]
    }

    pub fn next_swap(&mut self) -> Option<(usize, usize)> {
        if self.done {
            return None;
        }
        let c = &mut self.c;
        let t = self.t;
        let mut j;
        // R3: easy cases on c1
        if t % 2 == 1 {
            if c[1] + 1 < c[2] {
                let old = c[1];
                c[1] += 1;
                return Some((old, old + 1));
            }
            j = 2;
        } else {
            if c[1] > 0 {
                let old = c[1];
                c[1] -= 1;
                return Some((old, old - 1));
            }
            j = 2;
            // even t goes straight to R5
            if let Some(swap) = Self::try_increase(c, j) {
                return Some(swap);
            }
            j += 1;
        }
        while j <= t {
            // R4: try to decrease c_j (here c_j = c_{j-1} + 1)
            if c[j] >= j {
                let removed = c[j];
                c[j] = c[j - 1];
                c[j - 1] = j - 2;
                return Some((removed, j - 2));
            }
            j += 1;
            if j > t {
                break;
            }
            // R5: try to increase c_j (here c_{j-1} = j - 2)
            if let Some(swap) = Self::try_increase(c, j) {
                return Some(swap);
            }
            j += 1;
        }
        self.done = true;
        None
    }

    fn try_increase(c: &mut [usize], j: usize) -> Option<(usize, usize)> {
        if c[j] + 1 < c[j + 1] {
            let removed = c[j - 1];
            c[j - 1] = c[j];
            c[j] += 1;
            Some((removed, c[j]))
        } else {
            None
        }
    }
}

/// Tallies the sum of every `n1`-subset of `values`, in the order given.
/// Equal values at different positions count as different subsets.
pub fn brute_force_sums(values: &[u64], n1: usize) -> Result<BTreeMap<u64, u64>> {
    let n = values.len();
    if n1 > n {
        return Err(Error::InvalidArgument(format!(
            "sample size {n1} exceeds the {n} available ranks"
        )));
    }
    let subsets = binomial(BigUint::from(n), BigUint::from(n1));
    if subsets > BigUint::from(BRUTE_FORCE_GUARD) {
        return Err(Error::CapExceeded {
            what: "subset count",
            value: subsets.to_u128().unwrap_or(u128::MAX),
            cap: BRUTE_FORCE_GUARD as u128,
        });
    }
    let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
    match n1 {
        0 => {
            tally.insert(0, 1);
        }
        1 => {
            for &x in values {
                *tally.entry(x).or_default() += 1;
            }
        }
        _ if n1 == n => {
            tally.insert(values.iter().sum(), 1);
        }
        _ => {
            let mut door = RevolvingDoor::new(n, n1);
            let mut sum: u64 = door.current().iter().map(|&i| values[i]).sum();
            *tally.entry(sum).or_default() += 1;
            while let Some((out, into)) = door.next_swap() {
                sum = sum - values[out] + values[into];
                *tally.entry(sum).or_default() += 1;
            }
        }
    }
    Ok(tally)
}

/// Null distribution by listing every `n1`-subset of the doubled ranks.
pub fn brute_force_dist(ranks: &RankMultiset, n1: usize) -> Result<ExactDist> {
    let tally = brute_force_sums(ranks.doubled(), n1)?;
    let top = *tally.keys().next_back().expect("at least one subset") as usize;
    let mut coeffs = vec![BigUint::zero(); top + 1];
    for (s, c) in tally {
        coeffs[s as usize] = BigUint::from(c);
    }
    Ok(ExactDist::from_row(
        n1,
        ranks.len() - n1,
        &IntPoly::from_coeffs(coeffs),
    ))
}

/// Continuity correction for the normal approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Correction {
    None,
    /// Shift by half the lattice spacing, given in doubled units (2 for
    /// integer rank sums, 1 for half-integer ones).
    LatticeHalfStep {
        doubled_step: u64,
    },
}

impl Correction {
    /// The shift in undoubled units.
    pub fn amount(self) -> BigRational {
        match self {
            Correction::None => BigRational::zero(),
            Correction::LatticeHalfStep { doubled_step } => {
                BigRational::new(BigInt::from(doubled_step), BigInt::from(4))
            }
        }
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Normal-approximation p-value for a doubled observed rank sum.
pub fn normal_approx_p(
    moments: &Moments,
    w_obs: u64,
    alternative: Alternative,
    correction: Correction,
) -> Result<f64> {
    if !moments.variance.is_positive() {
        return Err(Error::ZeroVariance);
    }
    let sd = rational_to_f64(&moments.variance).sqrt();
    let w = BigRational::new(BigInt::from(w_obs), BigInt::from(2));
    let c = correction.amount();
    let lower = || {
        let z = rational_to_f64(&(&w + &c - &moments.mean)) / sd;
        normal_cdf(z)
    };
    let upper = || {
        let z = rational_to_f64(&(&w - &c - &moments.mean)) / sd;
        normal_cdf(-z)
    };
    Ok(match alternative {
        Alternative::Less => lower(),
        Alternative::Greater => upper(),
        Alternative::TwoSided => (2.0 * lower().min(upper())).min(1.0),
    })
}

/// Exact against approximate p-value at one observed rank sum.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxReport {
    pub w_obs: u64,
    pub exact_p: BigRational,
    pub normal_p: f64,
    pub abs_error: f64,
    pub continuity_correction: BigRational,
}

pub fn compare_with_normal(
    dist: &ExactDist,
    moments: &Moments,
    w_obs: u64,
    alternative: Alternative,
    correction: Correction,
) -> Result<ApproxReport> {
    let exact_p = p_value(dist, w_obs, alternative, TwoSidedMode::TwiceMin);
    let normal_p = normal_approx_p(moments, w_obs, alternative, correction)?;
    Ok(ApproxReport {
        w_obs,
        abs_error: (rational_to_f64(&exact_p) - normal_p).abs(),
        exact_p,
        normal_p,
        continuity_correction: correction.amount(),
    })
}
