//! Exact classical analysis over deterministic local strategies.
//!
//! A deterministic strategy fixes every outcome `A(i,k)` to ±1. It is encoded
//! as an index in `[0, 4^n)`: two bits per site, site 1 in the most
//! significant bit pair, observable 1 in the higher bit of its pair, and a
//! set bit meaning -1. With that layout a correlation term is a bit mask and
//! its value on a strategy is the parity of `index & mask`.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{site_pairs, BellExpression, Choice, Normalization};
use crate::error::{Error, Result};

/// Default largest `n` enumerated exhaustively.
pub const DEFAULT_CAP: usize = 12;

/// Strategies per parallel shard.
const SHARD: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    n: usize,
    index: u64,
}

fn bit_position(n: usize, site: usize, choice: Choice) -> u32 {
    (2 * (n - 1 - site) + 1 - choice.index()) as u32
}

impl DeterministicStrategy {
    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        if n == 0 || n > 31 {
            return Err(Error::InvalidInput(format!(
                "strategy site count must be in 1..=31, got {n}"
            )));
        }
        if index >> (2 * n) != 0 {
            return Err(Error::InvalidInput(format!(
                "strategy index {index} is outside [0, 4^{n})"
            )));
        }
        Ok(DeterministicStrategy { n, index })
    }

    /// Builds a strategy from per-site outcome pairs `(A(i,1), A(i,2))`.
    pub fn from_outcomes(outcomes: &[[i32; 2]]) -> Result<Self> {
        let n = outcomes.len();
        let mut index = 0u64;
        for (site, pair) in outcomes.iter().enumerate() {
            for (k, &v) in pair.iter().enumerate() {
                let choice = if k == 0 {
                    Choice::First
                } else {
                    Choice::Second
                };
                match v {
                    1 => {}
                    -1 => index |= 1 << bit_position(n, site, choice),
                    other => return Err(Error::NonDichotomic(other)),
                }
            }
        }
        Self::from_index(n, index)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Outcome of observable `choice` at zero-based `site`.
    pub fn outcome(&self, site: usize, choice: Choice) -> i32 {
        if self.index >> bit_position(self.n, site, choice) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn outcomes(&self) -> Vec<[i32; 2]> {
        (0..self.n)
            .map(|s| {
                [
                    self.outcome(s, Choice::First),
                    self.outcome(s, Choice::Second),
                ]
            })
            .collect()
    }
}

/// Exact classical value: `numerator * normalization`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LhvValue {
    pub numerator: i64,
    pub normalization: Normalization,
}

impl LhvValue {
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 * self.normalization.value()
    }
}

/// Bit masks of each term, paired with its integer sign.
fn term_masks(expr: &BellExpression) -> Vec<(u64, i64)> {
    let n = expr.n();
    expr.terms()
        .iter()
        .map(|t| {
            let mask = t
                .choice
                .iter()
                .enumerate()
                .fold(0u64, |m, (site, &c)| m | 1 << bit_position(n, site, c));
            (mask, t.coeff_sign as i64)
        })
        .collect()
}

#[inline]
fn numerator(masks: &[(u64, i64)], index: u64) -> i64 {
    masks
        .iter()
        .map(|&(mask, c)| {
            if (index & mask).count_ones() & 1 == 0 {
                c
            } else {
                -c
            }
        })
        .sum()
}

/// Value of `expr` on a deterministic strategy.
pub fn lhv_value(expr: &BellExpression, strategy: &DeterministicStrategy) -> Result<LhvValue> {
    if strategy.n() != expr.n() {
        return Err(Error::DimensionMismatch {
            expected: expr.n(),
            found: strategy.n(),
        });
    }
    Ok(LhvValue {
        numerator: numerator(&term_masks(expr), strategy.index()),
        normalization: expr.normalization(),
    })
}

/// The two CHSH halves `(a1 b1 - a2 b2, a1 b2 + a2 b1)` for one site pair.
pub fn partition_values(a1: i32, a2: i32, b1: i32, b2: i32) -> Result<(i32, i32)> {
    for v in [a1, a2, b1, b2] {
        if v != 1 && v != -1 {
            return Err(Error::NonDichotomic(v));
        }
    }
    Ok((a1 * b1 - a2 * b2, a1 * b2 + a2 * b1))
}

/// Result of maximizing `|value|` over strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LhvMax {
    /// Largest `|value|` found.
    pub max: f64,
    /// Largest `|numerator|` found, before scaling by the normalization.
    #[serde(skip)]
    pub max_numerator: i64,
    pub witness_index: u64,
    /// Whether all `4^n` strategies were visited.
    pub exhaustive: bool,
    /// Number of strategies evaluated.
    pub strategies: u64,
}

fn better(a: (i64, u64), b: (i64, u64)) -> (i64, u64) {
    // larger |numerator|, then lower index
    if a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1) {
        a
    } else {
        b
    }
}

fn scan_range(masks: &[(u64, i64)], range: Range<u64>) -> Option<(i64, u64)> {
    range
        .map(|idx| (numerator(masks, idx).abs(), idx))
        .reduce(better)
}

/// Maximum of `|numerator|` over one index range, with its lowest witness.
/// Returns `None` for an empty range.
pub fn lhv_max_range(expr: &BellExpression, range: Range<u64>) -> Option<(i64, u64)> {
    scan_range(&term_masks(expr), range)
}

/// Exhaustive maximum of `|value|` with the default cap.
pub fn lhv_max(expr: &BellExpression) -> Result<LhvMax> {
    lhv_max_with_cap(expr, DEFAULT_CAP)
}

/// Exhaustive maximum of `|value|` over all `4^n` strategies, evaluated in
/// parallel over disjoint index ranges. Ties go to the lowest index.
pub fn lhv_max_with_cap(expr: &BellExpression, cap: usize) -> Result<LhvMax> {
    let n = expr.n();
    if n > cap || n > 31 {
        return Err(Error::AboveCap { n, cap });
    }
    let masks = term_masks(expr);
    let total = 1u64 << (2 * n);
    let shards = total.div_ceil(SHARD);
    let (num, idx) = (0..shards)
        .into_par_iter()
        .filter_map(|s| scan_range(&masks, s * SHARD..((s + 1) * SHARD).min(total)))
        .reduce_with(better)
        .expect("at least one strategy");
    Ok(LhvMax {
        max: LhvValue {
            numerator: num,
            normalization: expr.normalization(),
        }
        .to_f64(),
        max_numerator: num,
        witness_index: idx,
        exhaustive: true,
        strategies: total,
    })
}

/// Lower bound on the classical maximum from uniformly drawn strategies.
/// Usable above the enumeration cap; the result is flagged non-exhaustive.
pub fn lhv_sample(expr: &BellExpression, samples: u64, seed: u64) -> Result<LhvMax> {
    let n = expr.n();
    if n > 31 {
        return Err(Error::AboveCap { n, cap: 31 });
    }
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let masks = term_masks(expr);
    let total_mask = (1u64 << (2 * n)) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (num, idx) = (0..samples)
        .map(|_| {
            let idx = rng.gen::<u64>() & total_mask;
            (numerator(&masks, idx).abs(), idx)
        })
        .reduce(better)
        .expect("samples > 0");
    Ok(LhvMax {
        max: num as f64 * expr.normalization().value(),
        max_numerator: num,
        witness_index: idx,
        exhaustive: false,
        strategies: samples,
    })
}

/// Classical bound from the partition exclusivity argument.
///
/// Under any deterministic strategy each pair activates exactly one CHSH
/// half with magnitude 2 while the other vanishes, so at most one of the two
/// products is nonzero and its magnitude is `2^pairs`. Only expressions with
/// the paired-CHSH shape are accepted.
pub fn algebraic_bound(expr: &BellExpression) -> Result<f64> {
    if !expr.has_paired_shape() {
        return Err(Error::StructureUnknown);
    }
    let pairs = site_pairs(expr.n(), expr.leader() - 1).len() as i32;
    Ok(2f64.powi(pairs + expr.normalization().exponent()))
}
