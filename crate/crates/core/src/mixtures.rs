//! Unconditional null distribution of `W`: a mixture of the conditional
//! distributions over every tie pattern of `N` observations.
//!
//! There are `2^(N-1)` patterns, so enumeration is capped (24 by default).
//! Mixtures are accumulated pattern by pattern in parallel; rational
//! arithmetic makes the merged result independent of how the range is split.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::distengine::{dist_from_ranks, ExactDist};
use crate::error::{invalid_arg, Error, Result};
use crate::ranks::{pattern_to_ranks, TiePattern};

pub const DEFAULT_PATTERN_CAP: usize = 24;

/// Hard limit for numeric pattern labels.
const MAX_LABELLED_N: usize = 64;

/// Probability of each tie pattern, indexed by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternWeights {
    n: usize,
    weights: Vec<BigRational>,
}

impl PatternWeights {
    /// Checks there is one weight per pattern, each in `[0, 1]`, summing to 1.
    pub fn new(n: usize, weights: Vec<BigRational>) -> Result<Self> {
        let expected = pattern_count(n)?;
        if weights.len() as u64 != expected {
            return Err(Error::InvalidWeights(format!(
                "N = {n} has {expected} tie patterns but {} weights were given",
                weights.len()
            )));
        }
        if let Some((k, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| **w < BigRational::zero() || **w > BigRational::one())
        {
            return Err(Error::InvalidWeights(format!(
                "weight p{k} = {w} is outside [0, 1]"
            )));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(PatternWeights { n, weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        let count = pattern_count(n)?;
        let w = BigRational::new(BigInt::one(), BigInt::from(count));
        PatternWeights::new(n, vec![w; count as usize])
    }

    /// All weight on one pattern.
    pub fn one_hot(n: usize, label: u64) -> Result<Self> {
        let count = pattern_count(n)?;
        if label >= count {
            return Err(Error::InvalidWeights(format!(
                "pattern {label} does not exist for N = {n}"
            )));
        }
        let mut weights = vec![BigRational::zero(); count as usize];
        weights[label as usize] = BigRational::one();
        PatternWeights::new(n, weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn get(&self, label: u64) -> &BigRational {
        &self.weights[label as usize]
    }
}

fn pattern_count(n: usize) -> Result<u64> {
    if n == 0 || n > MAX_LABELLED_N {
        return Err(invalid_arg(format!(
            "tie patterns are enumerated for 1 <= N <= {MAX_LABELLED_N}, got {n}"
        )));
    }
    Ok(1u64 << (n - 1))
}

fn check_enumeration(n: usize, n1: usize, cap: usize) -> Result<u64> {
    if n < 2 || n1 == 0 || n1 >= n {
        return Err(invalid_arg(format!(
            "mixtures need N >= 2 and 1 <= n1 <= N - 1, got N = {n}, n1 = {n1}"
        )));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "N",
            value: n as u128,
            cap: cap as u128,
        });
    }
    pattern_count(n)
}

/// Unconditional pmf as exact probabilities on doubled rank sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedDist {
    support: Vec<u64>,
    probs: Vec<BigRational>,
}

impl MixedDist {
    fn from_map(map: BTreeMap<u64, BigRational>) -> Self {
        let (support, probs) = map.into_iter().filter(|(_, p)| !p.is_zero()).unzip();
        MixedDist { support, probs }
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn prob_at(&self, w: u64) -> BigRational {
        match self.support.binary_search(&w) {
            Ok(i) => self.probs[i].clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.support.iter().copied().zip(&self.probs)
    }

    pub fn total(&self) -> BigRational {
        self.probs.iter().sum()
    }
}

/// Conditional distribution for every tie pattern, in label order.
pub fn enumerate_patterns(n: usize, n1: usize, cap: usize) -> Result<Vec<(TiePattern, ExactDist)>> {
    let count = check_enumeration(n, n1, cap)?;
    (0..count)
        .into_par_iter()
        .map(|label| {
            let pattern = TiePattern::from_label(n, label)?;
            let dist = dist_from_ranks(&pattern_to_ranks(&pattern), n1)?;
            Ok((pattern, dist))
        })
        .collect()
}

fn accumulate(acc: &mut BTreeMap<u64, BigRational>, dist: &ExactDist, weight: &BigRational) {
    if weight.is_zero() {
        return;
    }
    for (w, p) in dist.pmf() {
        *acc.entry(w).or_insert_with(BigRational::zero) += p * weight;
    }
}

fn merge(
    mut a: BTreeMap<u64, BigRational>,
    b: BTreeMap<u64, BigRational>,
) -> BTreeMap<u64, BigRational> {
    for (w, p) in b {
        *a.entry(w).or_insert_with(BigRational::zero) += p;
    }
    a
}

/// Pointwise mixture of precomputed conditional distributions.
pub fn mix(dists: &[(TiePattern, ExactDist)], weights: &PatternWeights) -> Result<MixedDist> {
    if dists.len() != weights.weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} tie patterns",
            weights.weights.len(),
            dists.len()
        )));
    }
    if let Some((p, _)) = dists.iter().find(|(p, _)| p.n() != weights.n) {
        return Err(Error::InvalidWeights(format!(
            "weights are for N = {} but pattern {p} has N = {}",
            weights.n,
            p.n()
        )));
    }
    let map = dists
        .par_iter()
        .fold(BTreeMap::new, |mut acc, (pattern, dist)| {
            let label = pattern.label().expect("labelled pattern");
            accumulate(&mut acc, dist, weights.get(label));
            acc
        })
        .reduce(BTreeMap::new, merge);
    Ok(MixedDist::from_map(map))
}

/// Mixture computed without holding every conditional distribution at once.
pub fn mix_streaming(
    n: usize,
    n1: usize,
    weights: &PatternWeights,
    cap: usize,
) -> Result<MixedDist> {
    let count = check_enumeration(n, n1, cap)?;
    if weights.n != n {
        return Err(Error::InvalidWeights(format!(
            "weights are for N = {}, mixture requested for N = {n}",
            weights.n
        )));
    }
    let map = (0..count)
        .into_par_iter()
        .filter(|&label| !weights.get(label).is_zero())
        .try_fold(BTreeMap::new, |mut acc, label| {
            let pattern = TiePattern::from_label(n, label)?;
            let dist = dist_from_ranks(&pattern_to_ranks(&pattern), n1)?;
            accumulate(&mut acc, &dist, weights.get(label));
            Ok::<_, Error>(acc)
        })
        .try_reduce(BTreeMap::new, |a, b| Ok(merge(a, b)))?;
    Ok(MixedDist::from_map(map))
}

/// `sum_k c_k p_k` with exact coefficients, keyed by pattern label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearForm {
    terms: BTreeMap<u64, BigRational>,
}

impl LinearForm {
    pub fn coefficient(&self, label: u64) -> BigRational {
        self.terms
            .get(&label)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn evaluate(&self, weights: &PatternWeights) -> BigRational {
        self.terms.iter().map(|(k, c)| c * weights.get(*k)).sum()
    }

    /// Labels grouped by shared coefficient, in order of first appearance.
    pub fn grouped(&self) -> Vec<(BigRational, Vec<u64>)> {
        let mut groups: Vec<(BigRational, Vec<u64>)> = Vec::new();
        for (label, c) in &self.terms {
            match groups.iter_mut().find(|(gc, _)| gc == c) {
                Some((_, labels)) => labels.push(*label),
                None => groups.push((c.clone(), vec![*label])),
            }
        }
        groups
    }
}

impl std::fmt::Display for LinearForm {
    /// Renders like `1/10*(p4 + p5) + 3/5*p1`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let groups = self.grouped();
        if groups.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, labels)) in groups.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let names: Vec<String> = labels.iter().map(|k| format!("p{k}")).collect();
            let coeff = if c.is_one() {
                String::new()
            } else {
                format!("{}/{}*", c.numer(), c.denom())
            };
            if names.len() == 1 {
                write!(f, "{coeff}{}", names[0])?;
            } else if coeff.is_empty() {
                f.write_str(&names.join(" + "))?;
            } else {
                write!(f, "{coeff}({})", names.join(" + "))?;
            }
        }
        Ok(())
    }
}

/// The mixture pmf with the weights left symbolic.
pub fn symbolic_mix(n: usize, n1: usize, cap: usize) -> Result<BTreeMap<u64, LinearForm>> {
    let mut out: BTreeMap<u64, LinearForm> = BTreeMap::new();
    for (pattern, dist) in enumerate_patterns(n, n1, cap)? {
        let label = pattern.label().expect("labelled pattern");
        for (w, p) in dist.pmf() {
            out.entry(w).or_default().terms.insert(label, p);
        }
    }
    Ok(out)
}
