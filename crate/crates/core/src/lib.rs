//! Exact null distributions for the Wilcoxon rank-sum statistic.
//!
//! The count of size-`n1` rank selections with sum `w` is read off the
//! `z^{n1} q^w` coefficient of `prod_i (1 + z q^{r_i})`, where `r_i` runs over
//! all `N` ranks. With midranks the exponents may be half-integers, so every
//! rank is stored doubled and the product is expanded in `x = sqrt(q)`.
//!
//! ```
//! use ranksum::{dist_from_ranks, RankMultiset};
//!
//! // ranks 1, 2.5, 2.5, 4, 5
//! let ranks = RankMultiset::from_doubled(vec![2, 5, 5, 8, 10]).unwrap();
//! let dist = dist_from_ranks(&ranks, 2).unwrap();
//! // P(W = 3.5) = 2/10
//! assert_eq!(dist.prob_at(7).to_string(), "1/5");
//! ```

pub mod cache;
pub mod distengine;
pub mod error;
pub mod mixtures;
pub mod numfmt;
pub mod polycore;
pub mod ranks;
pub mod verify;

pub use distengine::{
    dist_both_samples, dist_from_ranks, dist_from_table, dist_no_ties, euler_expand,
    moments_closed_form, moments_exact, moments_no_ties, p_value, u_from_w, w_from_u, Alternative,
    ExactDist, Moments, TwoSidedMode,
};
pub use error::{Error, Result};
pub use mixtures::{
    enumerate_patterns, mix, mix_streaming, symbolic_mix, LinearForm, MixedDist, PatternWeights,
    DEFAULT_PATTERN_CAP,
};
pub use polycore::{
    partition_count_bounded, poly_mul, qbinomial, rothe_row, strict_partition_count, CoeffTable,
    IntPoly,
};
pub use ranks::{
    coalesce_within, midranks, pattern_to_ranks, ranks_to_pattern, RankMultiset, Ranking,
    TiePattern,
};
pub use verify::{
    brute_force_dist, brute_force_sums, compare_with_normal, normal_approx_p, ApproxReport,
    Correction,
};
