//! Fixed-width accumulator for products of the form `prod (1 + z x^{e_i})`.
//!
//! Every coefficient that can appear is bounded by `binomial(steps, k) < 2^steps`,
//! so a table of `steps / 64 + 1` machine words per coefficient never
//! overflows. Working in fixed-width limbs avoids one heap allocation per
//! coefficient, which dominates the cost of the same loop over `BigUint`.
//!
//! Only the z-rows that can still reach `k_lo..=k_hi` are kept alive. After
//! `i` factors with `steps - i` remaining, any row `k < k_lo - (steps - i)`
//! is dead and is dropped.

use num_bigint::BigUint;

use super::IntPoly;

#[derive(Clone, Debug)]
struct WideRow {
    /// Exponent of the first stored coefficient.
    offset: usize,
    /// `limbs` little-endian words per coefficient.
    words: Vec<u64>,
}

impl WideRow {
    fn len(&self, limbs: usize) -> usize {
        self.words.len() / limbs
    }
}

pub(crate) struct BandAccumulator {
    rows: Vec<Option<WideRow>>,
    limbs: usize,
    k_lo: usize,
    k_hi: usize,
    steps: usize,
    done: usize,
}

impl BandAccumulator {
    /// Prepares for `steps` factors, keeping z-rows `k_lo..=k_hi` at the end.
    pub(crate) fn new(steps: usize, k_lo: usize, k_hi: usize) -> Self {
        debug_assert!(k_lo <= k_hi);
        let limbs = steps / 64 + 1;
        let mut rows = vec![None; k_hi + 1];
        let mut one = vec![0u64; limbs];
        one[0] = 1;
        rows[0] = Some(WideRow {
            offset: 0,
            words: one,
        });
        BandAccumulator {
            rows,
            limbs,
            k_lo,
            k_hi,
            steps,
            done: 0,
        }
    }

    /// Multiplies in one factor. Row `k` gains row `k - 1` shifted up by
    /// `shift(k)`. Rows are visited top-down so the source is always the
    /// value from before this step.
    pub(crate) fn step(&mut self, shift: impl Fn(usize) -> usize) {
        assert!(self.done < self.steps, "more factors than announced");
        self.done += 1;
        let remaining = self.steps - self.done;
        let top = self.done.min(self.k_hi);
        let bottom = self.k_lo.saturating_sub(remaining);

        for k in (bottom.max(1)..=top).rev() {
            let (below, above) = self.rows.split_at_mut(k);
            if let Some(src) = below[k - 1].as_ref() {
                add_shifted(&mut above[0], src, shift(k), self.limbs);
            }
        }
        for row in self.rows.iter_mut().take(bottom) {
            *row = None;
        }
    }

    /// Finishes the product and returns the surviving rows `k_lo..=k_hi`,
    /// with every exponent multiplied by `scale`.
    pub(crate) fn finish(self, scale: usize) -> Vec<(usize, IntPoly)> {
        assert_eq!(self.done, self.steps, "not all factors were applied");
        let limbs = self.limbs;
        let k_lo = self.k_lo;
        self.rows
            .into_iter()
            .enumerate()
            .skip(k_lo)
            .map(|(k, row)| {
                let poly = match row {
                    None => IntPoly::zero(),
                    Some(row) => row_to_poly(&row, limbs, scale),
                };
                (k, poly)
            })
            .collect()
    }
}

fn add_shifted(dst: &mut Option<WideRow>, src: &WideRow, shift: usize, limbs: usize) {
    let src_start = src.offset + shift;
    let src_len = src.len(limbs);
    let Some(dst) = dst.as_mut() else {
        *dst = Some(WideRow {
            offset: src_start,
            words: src.words.clone(),
        });
        return;
    };

    if src_start < dst.offset {
        let grow = (dst.offset - src_start) * limbs;
        let mut words = vec![0u64; grow + dst.words.len()];
        words[grow..].copy_from_slice(&dst.words);
        dst.words = words;
        dst.offset = src_start;
    }
    let needed = (src_start + src_len - dst.offset) * limbs;
    if dst.words.len() < needed {
        dst.words.resize(needed, 0);
    }

    let start = (src_start - dst.offset) * limbs;
    let target = &mut dst.words[start..start + src.words.len()];
    if limbs == 1 {
        for (d, s) in target.iter_mut().zip(&src.words) {
            *d = d.wrapping_add(*s);
        }
    } else {
        for (d, s) in target
            .chunks_exact_mut(limbs)
            .zip(src.words.chunks_exact(limbs))
        {
            let mut carry = false;
            for (dw, sw) in d.iter_mut().zip(s) {
                let (v, c1) = dw.overflowing_add(*sw);
                let (v, c2) = v.overflowing_add(carry as u64);
                *dw = v;
                carry = c1 || c2;
            }
            debug_assert!(!carry, "limb budget exceeded");
        }
    }
}

fn row_to_poly(row: &WideRow, limbs: usize, scale: usize) -> IntPoly {
    let len = row.len(limbs);
    if len == 0 {
        return IntPoly::zero();
    }
    let top = (row.offset + len - 1) * scale;
    let mut coeffs = vec![BigUint::default(); top + 1];
    for (j, chunk) in row.words.chunks_exact(limbs).enumerate() {
        coeffs[(row.offset + j) * scale] = words_to_biguint(chunk);
    }
    IntPoly::from_coeffs(coeffs)
}

fn words_to_biguint(words: &[u64]) -> BigUint {
    if words.len() == 1 {
        return BigUint::from(words[0]);
    }
    let digits: Vec<u32> = words
        .iter()
        .flat_map(|w| [*w as u32, (*w >> 32) as u32])
        .collect();
    BigUint::from_slice(&digits)
}
