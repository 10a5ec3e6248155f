//! Midranks, tie patterns, and the doubled-integer rank encoding.
//!
//! A block of `m` tied observations gets the mean of the ranks it spans,
//! which is an integer for odd `m` and half an odd integer for even `m`.
//! Every rank is therefore stored doubled.
//!
//! Tie patterns are bit strings of length `N - 1`. Bit `j` (counting from the
//! left, starting at 1) describes the gap between the `j`-th and `(j+1)`-th
//! order statistics: `1` means distinct, `0` means tied. Read as a binary
//! number, the string is the pattern's label, so for `N = 5` the pattern
//! `0010` has label 2 and ranks `2, 2, 2, 4.5, 4.5`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numfmt::format_doubled;

/// Sorted multiset of doubled ranks for `N` observations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankMultiset {
    doubled: Vec<u64>,
}

impl RankMultiset {
    /// Sorts and validates: each value lies in `2..=2N`, the values sum to
    /// `N (N + 1)`, and every odd (half-integer) value occurs an even number
    /// of times.
    pub fn from_doubled(mut doubled: Vec<u64>) -> Result<Self> {
        if doubled.is_empty() {
            return Err(Error::InvalidRanks("no ranks".into()));
        }
        doubled.sort_unstable();
        let n = doubled.len() as u64;
        if let Some(bad) = doubled.iter().find(|&&d| d < 2 || d > 2 * n) {
            return Err(Error::InvalidRanks(format!(
                "rank {} is outside 1..={n}",
                format_doubled(*bad as i64)
            )));
        }
        let total: u64 = doubled.iter().sum();
        if total != n * (n + 1) {
            return Err(Error::InvalidRanks(format!(
                "ranks sum to {}, expected {} for {n} observations",
                format_doubled(total as i64),
                n * (n + 1) / 2
            )));
        }
        for block in doubled.chunk_by(|a, b| a == b) {
            if block[0] % 2 == 1 && block.len() % 2 == 1 {
                return Err(Error::InvalidRanks(format!(
                    "half-integer rank {} appears {} times; it can only come from an even-sized tie",
                    format_doubled(block[0] as i64),
                    block.len()
                )));
            }
        }
        Ok(RankMultiset { doubled })
    }

    /// Ranks `1..=n` with no ties.
    pub fn untied(n: usize) -> Self {
        RankMultiset {
            doubled: (1..=n as u64).map(|r| 2 * r).collect(),
        }
    }

    pub fn doubled(&self) -> &[u64] {
        &self.doubled
    }

    pub fn len(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doubled.is_empty()
    }

    pub fn has_ties(&self) -> bool {
        self.doubled.windows(2).any(|w| w[0] == w[1])
    }

    /// Sizes of the maximal runs of equal ranks, in order.
    pub fn tie_blocks(&self) -> Vec<usize> {
        self.doubled
            .chunk_by(|a, b| a == b)
            .map(<[u64]>::len)
            .collect()
    }

    /// Ranks as exact decimal strings.
    pub fn to_decimal_strings(&self) -> Vec<String> {
        self.doubled
            .iter()
            .map(|&d| format_doubled(d as i64))
            .collect()
    }
}

/// Which adjacent order statistics are distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TiePattern {
    bits: Vec<bool>,
}

impl TiePattern {
    /// Pattern for `bits.len() + 1` observations.
    pub fn new(bits: Vec<bool>) -> Self {
        TiePattern { bits }
    }

    pub fn all_distinct(n: usize) -> Self {
        TiePattern {
            bits: vec![true; n.saturating_sub(1)],
        }
    }

    /// Pattern for `n` observations whose bit string, read as binary, is `label`.
    pub fn from_label(n: usize, label: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPattern(
                "need at least one observation".into(),
            ));
        }
        let width = n - 1;
        if width < 64 && label >> width != 0 {
            return Err(Error::InvalidPattern(format!(
                "label {label} does not fit in {width} bits"
            )));
        }
        if width > 64 {
            return Err(Error::InvalidPattern(format!(
                "numeric labels cover at most 65 observations, got {n}"
            )));
        }
        let bits = (0..width)
            .map(|j| label >> (width - 1 - j) & 1 == 1)
            .collect();
        Ok(TiePattern { bits })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.bits.len() + 1
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Binary value of the bit string; `None` beyond 64 bits.
    pub fn label(&self) -> Option<u64> {
        if self.bits.len() > 64 {
            return None;
        }
        Some(self.bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64))
    }
}

impl fmt::Display for TiePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for TiePattern {
    type Err = Error;

    /// Parses a string of `0`s and `1`s. The empty string is the pattern for
    /// a single observation.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidPattern(format!(
                    "unexpected character {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TiePattern { bits })
    }
}

/// Midranks for a tie pattern.
pub fn pattern_to_ranks(pattern: &TiePattern) -> RankMultiset {
    let n = pattern.n();
    let mut doubled = Vec::with_capacity(n);
    let mut start = 0usize;
    for pos in 0..n {
        let block_ends = pos == n - 1 || pattern.bits[pos];
        if block_ends {
            // positions start..=pos hold ranks start+1..=pos+1
            let midrank2 = (start + 1 + pos + 1) as u64;
            doubled.extend(std::iter::repeat_n(midrank2, pos + 1 - start));
            start = pos + 1;
        }
    }
    RankMultiset { doubled }
}

/// Recovers the tie pattern that produced `ranks`.
pub fn ranks_to_pattern(ranks: &RankMultiset) -> Result<TiePattern> {
    let mut bits = Vec::with_capacity(ranks.len().saturating_sub(1));
    let mut start = 0usize;
    for block in ranks.doubled.chunk_by(|a, b| a == b) {
        let expected = (2 * start + block.len() + 1) as u64;
        if block[0] != expected {
            return Err(Error::InvalidRanks(format!(
                "a block of {} tied ranks starting at position {} must have midrank {}, found {}",
                block.len(),
                start + 1,
                format_doubled(expected as i64),
                format_doubled(block[0] as i64)
            )));
        }
        if start > 0 {
            bits.push(true);
        }
        bits.extend(std::iter::repeat_n(false, block.len() - 1));
        start += block.len();
    }
    Ok(TiePattern { bits })
}

/// Midranks of a sample together with each input value's own doubled rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    pub multiset: RankMultiset,
    /// Doubled rank of `values[i]`, in input order.
    pub per_value: Vec<u64>,
}

/// Assigns midranks. Values tie only when they compare equal exactly.
pub fn midranks(values: &[f64]) -> Result<Ranking> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot rank an empty sample".into()));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "cannot rank non-finite value {bad}"
        )));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut per_value = vec![0u64; values.len()];
    let mut doubled = Vec::with_capacity(values.len());
    let mut start = 0usize;
    for block in order.chunk_by(|&a, &b| values[a] == values[b]) {
        let midrank2 = (2 * start + block.len() + 1) as u64;
        for &idx in block {
            per_value[idx] = midrank2;
            doubled.push(midrank2);
        }
        start += block.len();
    }
    Ok(Ranking {
        multiset: RankMultiset { doubled },
        per_value,
    })
}

/// Snaps values that lie within `epsilon` of their sorted predecessor onto
/// the first value of that chain, so they tie exactly afterwards.
pub fn coalesce_within(values: &[f64], epsilon: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = values.to_vec();
    let mut anchor: Option<f64> = None;
    let mut prev = f64::NEG_INFINITY;
    for idx in order {
        let v = values[idx];
        match anchor {
            Some(a) if v - prev <= epsilon => out[idx] = a,
            _ => anchor = Some(v),
        }
        prev = v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> TiePattern {
        s.parse().unwrap()
    }

    #[test]
    fn midranks_with_a_pair() {
        let r = midranks(&[10.0, 12.0, 12.0, 15.0, 20.0]).unwrap();
        assert_eq!(r.multiset.doubled(), &[2, 5, 5, 8, 10]);
        assert_eq!(r.per_value, vec![2, 5, 5, 8, 10]);
    }

    #[test]
    fn midranks_untied_and_all_tied() {
        let r = midranks(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(r.multiset.doubled(), &[2, 4, 6]);
        assert_eq!(r.per_value, vec![6, 2, 4]);
        let r = midranks(&[7.0, 7.0, 7.0]).unwrap();
        assert_eq!(r.multiset.doubled(), &[4, 4, 4]);
    }

    #[test]
    fn midranks_errors() {
        assert!(midranks(&[]).is_err());
        assert!(midranks(&[1.0, f64::NAN]).is_err());
        assert!(midranks(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn signed_zeros_tie() {
        let r = midranks(&[0.0, -0.0, 1.0]).unwrap();
        assert_eq!(r.multiset.doubled(), &[3, 3, 6]);
    }

    #[test]
    fn table_rows() {
        assert_eq!(pattern_to_ranks(&pat("0010")).doubled(), &[4, 4, 4, 9, 9]);
        assert_eq!(pattern_to_ranks(&pat("1111")).doubled(), &[2, 4, 6, 8, 10]);
        assert_eq!(pattern_to_ranks(&pat("0000")).doubled(), &[6, 6, 6, 6, 6]);
        assert_eq!(pattern_to_ranks(&pat("0001")).doubled(), &[5, 5, 5, 5, 10]);
        assert_eq!(pattern_to_ranks(&pat("1000")).doubled(), &[2, 7, 7, 7, 7]);
        assert_eq!(pattern_to_ranks(&pat("")).doubled(), &[2]);
    }

    #[test]
    fn inverse_codec() {
        let r = RankMultiset::from_doubled(vec![4, 4, 4, 9, 9]).unwrap();
        assert_eq!(ranks_to_pattern(&r).unwrap().to_string(), "0010");
        let r = RankMultiset::untied(5);
        assert_eq!(ranks_to_pattern(&r).unwrap().to_string(), "1111");
        let r = RankMultiset::from_doubled(vec![2, 5, 5, 8, 10]).unwrap();
        let p = ranks_to_pattern(&r).unwrap();
        assert_eq!(p.to_string(), "1011");
        assert_eq!(p.label(), Some(11));
    }

    #[test]
    fn inverse_codec_rejects_non_midrank_structure() {
        // sums to 10 with valid parity, but a leading pair must share rank 1.5
        let r = RankMultiset::from_doubled(vec![2, 2, 8, 8]).unwrap();
        assert!(ranks_to_pattern(&r).is_err());
    }

    #[test]
    fn multiset_validation() {
        assert!(RankMultiset::from_doubled(vec![]).is_err());
        assert!(RankMultiset::from_doubled(vec![2, 4, 4]).is_err()); // wrong total
        assert!(RankMultiset::from_doubled(vec![0, 6, 6]).is_err()); // rank 0
        assert!(RankMultiset::from_doubled(vec![3, 4, 5]).is_err()); // lone half-integers
        let r = RankMultiset::from_doubled(vec![10, 8, 5, 5, 2]).unwrap();
        assert_eq!(r.doubled(), &[2, 5, 5, 8, 10]);
        assert_eq!(r.tie_blocks(), vec![1, 2, 1, 1]);
        assert!(r.has_ties());
        assert!(!RankMultiset::untied(4).has_ties());
    }

    #[test]
    fn labels() {
        assert_eq!(pat("0010").label(), Some(2));
        assert_eq!(TiePattern::from_label(5, 10).unwrap().to_string(), "1010");
        assert_eq!(TiePattern::from_label(1, 0).unwrap().to_string(), "");
        assert!(TiePattern::from_label(5, 16).is_err());
        assert!(TiePattern::from_label(0, 0).is_err());
        assert!("01x".parse::<TiePattern>().is_err());
    }

    #[test]
    fn every_small_pattern_round_trips() {
        for n in 1..=10usize {
            let expected_total = (n * (n + 1)) as u64;
            for label in 0..(1u64 << (n - 1)) {
                let p = TiePattern::from_label(n, label).unwrap();
                let r = pattern_to_ranks(&p);
                assert_eq!(r.doubled().iter().sum::<u64>(), expected_total);
                let validated = RankMultiset::from_doubled(r.doubled().to_vec()).unwrap();
                assert_eq!(validated, r);
                assert_eq!(ranks_to_pattern(&r).unwrap(), p);
            }
        }
    }

    #[test]
    fn coalescing() {
        let v = coalesce_within(&[1.0, 1.05, 1.09, 2.0, 3.0, 2.99], 0.06);
        assert_eq!(v, vec![1.0, 1.0, 1.0, 2.0, 2.99, 2.99]);
        let v = coalesce_within(&[1.0, 1.04, 1.08], 0.05);
        assert_eq!(v, vec![1.0, 1.0, 1.0]);
    }
}
