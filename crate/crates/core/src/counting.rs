//! Block occurrence counting (sliding and strided), weightings, and the
//! normality ratio reports.
//!
//! Counting is overlapping, and an occurrence only counts when the whole
//! block is visible inside the stored prefix: counting the first n starting
//! positions of a length-k block needs n + k - 1 stored digits.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, BigUint, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expansion::DigitPrefix;
use crate::report::{Series, StatReport};
use crate::sequences::rho;

/// Cap on alphabet^k block enumerations; exceeding it is an error, never a
/// silent truncation.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// An ordered tuple of non-negative integers sought as a digit pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block(Vec<u64>);

impl Block {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidConfig("blocks must be non-empty".into()));
        }
        Ok(Self(entries))
    }

    pub fn single(digit: u64) -> Self {
        Self(vec![digit])
    }

    #[allow(clippy::len_without_is_empty)] // blocks are non-empty by construction
    pub fn len(&self) -> u64 {
        self.0.len() as u64
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn max_entry(&self) -> u64 {
        *self.0.iter().max().expect("non-empty")
    }

    /// Parse `2,5,0` into a block.
    pub fn parse(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidConfig(format!("bad block entry `{p}`")))
            })
            .collect::<Result<Vec<u64>>>()?;
        Block::new(entries)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A consistent family of block measures. The uniform weighting in base b
/// assigns b^-k to every length-k block over {0..b-1} and 0 elsewhere.
#[derive(Debug, Clone)]
pub enum Weighting {
    Uniform { base: u64 },
    Table(WeightTable),
}

/// Finite-support tabulated weighting, one map per block length.
#[derive(Debug, Clone, Default)]
pub struct WeightTable {
    pub by_len: Vec<BTreeMap<Vec<u64>, BigRational>>,
}

impl Weighting {
    pub fn uniform(base: u64) -> Self {
        Weighting::Uniform { base }
    }

    pub fn weight(&self, block: &Block) -> BigRational {
        match self {
            Weighting::Uniform { base } => uniform_weight(*base, block),
            Weighting::Table(table) => {
                let k = block.len() as usize;
                table
                    .by_len
                    .get(k - 1)
                    .and_then(|m| m.get(block.entries()))
                    .cloned()
                    .unwrap_or_else(BigRational::zero)
            }
        }
    }

    /// Exhaustive consistency check over the tabulated support:
    /// sum_j mu(1)(j) <= 1 and mu(k)(B) = sum_j mu(k+1)(B + j).
    pub fn validate(&self) -> Result<()> {
        let Weighting::Table(table) = self else {
            return Ok(());
        };
        if let Some(level1) = table.by_len.first() {
            let total: BigRational = level1.values().cloned().sum();
            if total > BigRational::one() {
                return Err(Error::InconsistentWeighting(format!(
                    "length-1 weights sum to {total} > 1"
                )));
            }
        }
        for k in 0..table.by_len.len().saturating_sub(1) {
            let longer = &table.by_len[k + 1];
            let mut marginal: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
            for (block, w) in longer {
                let prefix = block[..block.len() - 1].to_vec();
                *marginal.entry(prefix).or_insert_with(BigRational::zero) += w;
            }
            for (block, w) in &table.by_len[k] {
                let summed = marginal.get(block).cloned().unwrap_or_else(BigRational::zero);
                if &summed != w {
                    return Err(Error::InconsistentWeighting(format!(
                        "mu({})({:?}) = {w} but extensions sum to {summed}",
                        k + 1,
                        block
                    )));
                }
            }
        }
        Ok(())
    }
}

/// lambda_b(B) = b^-|B| for base-b blocks, 0 if any entry escapes the base.
pub fn uniform_weight(base: u64, block: &Block) -> BigRational {
    assert!(base >= 2);
    if block.entries().iter().any(|&d| d >= base) {
        return BigRational::zero();
    }
    Ratio::new(
        BigInt::one(),
        BigInt::from(BigUint::from(base).pow(block.len() as u32)),
    )
}

#[inline]
fn window_matches(prefix: &DigitPrefix, start: u64, block: &[u64]) -> bool {
    let dense = prefix.dense();
    let s = start as usize - 1;
    let window = &dense[s..s + block.len()];
    if window != block {
        return false;
    }
    // sentinel collisions: an entry equal to u64::MAX may shadow a promoted digit
    for (off, &d) in window.iter().enumerate() {
        if d == u64::MAX && prefix.is_oversized(start + off as u64) {
            return false;
        }
    }
    true
}

fn require_len(prefix: &DigitPrefix, required: u64) -> Result<()> {
    if prefix.len() < required {
        return Err(Error::InsufficientPrefix {
            required,
            available: prefix.len(),
        });
    }
    Ok(())
}

/// Occurrences of `block` starting at positions 1..=n, overlapping counted.
pub fn count_occurrences(prefix: &DigitPrefix, block: &Block, n: u64) -> Result<u64> {
    assert!(n >= 1);
    require_len(prefix, n + block.len() - 1)?;
    let mut count = 0;
    for start in 1..=n {
        if window_matches(prefix, start, block.entries()) {
            count += 1;
        }
    }
    Ok(count)
}

/// Occurrences of `block` at starts of the form j|B| + p, 0 <= j <= rho(n, |B|).
pub fn count_strided(prefix: &DigitPrefix, block: &Block, n: u64, p: u64) -> Result<u64> {
    let k = block.len();
    assert!(p >= 1 && p <= k, "phase must lie in [1, |B|]");
    assert!(n >= 1);
    let r = rho(n, k);
    require_len(prefix, k * (r + 1) + p - 1)?;
    let mut count = 0;
    for j in 0..=r {
        if window_matches(prefix, j * k + p, block.entries()) {
            count += 1;
        }
    }
    Ok(count)
}

/// Overlapping occurrences of `block` inside the finite word `word`;
/// 0 when the block is longer than the word.
pub fn count_in_word(block: &[u64], word: &[u64]) -> u64 {
    if block.is_empty() || block.len() > word.len() {
        return 0;
    }
    word.windows(block.len()).filter(|w| *w == block).count() as u64
}

/// Slack records for the eps-normality check.
#[derive(Debug, Clone)]
pub struct EpsNormalReport {
    pub pass: bool,
    pub blocks_checked: u64,
    /// tightest (block, count, lower, upper) over all checked blocks
    pub worst: Option<EpsMargin>,
    pub failures: Vec<EpsMargin>,
}

#[derive(Debug, Clone)]
pub struct EpsMargin {
    pub block: Block,
    pub count: u64,
    pub lower: BigRational,
    pub upper: BigRational,
}

impl EpsMargin {
    fn slack(&self) -> BigRational {
        let count = BigRational::from(BigInt::from(self.count));
        (&count - &self.lower).min(&self.upper - &count)
    }
}

/// Check that `word` is (eps, k, mu)-normal over the given alphabet: for
/// every block B of length m <= k,
/// mu(B)|word|(1 - eps) <= N(B, word) <= mu(B)|word|(1 + eps).
pub fn check_eps_k_normal(
    word: &[u64],
    eps: &BigRational,
    k: u32,
    mu: &Weighting,
    alphabet: u64,
    cap: u128,
) -> Result<EpsNormalReport> {
    assert!(eps > &BigRational::zero() && eps < &BigRational::one());
    assert!(alphabet >= 2);
    assert!(word.len() as u64 >= k as u64, "word shorter than k");
    let len = BigRational::from(BigInt::from(word.len() as u64));
    let lo_factor = &BigRational::one() - eps;
    let hi_factor = &BigRational::one() + eps;

    let mut report = EpsNormalReport {
        pass: true,
        blocks_checked: 0,
        worst: None,
        failures: Vec::new(),
    };
    for m in 1..=k {
        let size = (alphabet as u128)
            .checked_pow(m)
            .filter(|s| *s <= cap)
            .ok_or(Error::EnumerationTooLarge {
                size: (alphabet as u128).saturating_pow(m),
                cap,
            })?;
        let _ = size;
        // count all windows once, then look blocks up
        let mut counts: HashMap<&[u64], u64> = HashMap::new();
        for w in word.windows(m as usize) {
            *counts.entry(w).or_insert(0) += 1;
        }
        let mut block = vec![0u64; m as usize];
        loop {
            let b = Block::new(block.clone()).expect("non-empty");
            let weight = mu.weight(&b);
            let expected = &weight * &len;
            let margin = EpsMargin {
                count: counts.get(block.as_slice()).copied().unwrap_or(0),
                lower: &expected * &lo_factor,
                upper: &expected * &hi_factor,
                block: b,
            };
            let count_rat = BigRational::from(BigInt::from(margin.count));
            let ok = margin.lower <= count_rat && count_rat <= margin.upper;
            if !ok {
                report.pass = false;
                report.failures.push(margin.clone());
            }
            let tighter = report
                .worst
                .as_ref()
                .map(|w| margin.slack() < w.slack())
                .unwrap_or(true);
            if tighter {
                report.worst = Some(margin);
            }
            report.blocks_checked += 1;
            if !advance_block(&mut block, alphabet) {
                break;
            }
        }
    }
    Ok(report)
}

fn advance_block(block: &mut [u64], alphabet: u64) -> bool {
    for pos in (0..block.len()).rev() {
        if block[pos] + 1 < alphabet {
            block[pos] += 1;
            return true;
        }
        block[pos] = 0;
    }
    false
}

/// Ratios N(B) / S(n, k) for each block, plus min and max series.
pub fn normality_report(
    prefix: &DigitPrefix,
    n: u64,
    k: u32,
    blocks: &[Block],
) -> Result<StatReport> {
    let expected = prefix.seq().partial_sum(n, k)?;
    let expected_f = expected.to_f64().unwrap_or(f64::NAN);
    let mut series = Vec::new();
    let mut ratios = Vec::new();
    for block in blocks {
        if block.len() != k as u64 {
            return Err(Error::InvalidConfig(format!(
                "block {block} has length {} but k = {k}",
                block.len()
            )));
        }
        let count = count_occurrences(prefix, block, n)?;
        let ratio = if expected_f > 0.0 {
            Some(count as f64 / expected_f)
        } else {
            None
        };
        let mut s = Series::new("normality_ratio")
            .with_param("block", block)
            .with_param("k", k)
            .with_param("count", count)
            .with_param("expected", &expected);
        s.push(n, ratio);
        ratios.push(ratio);
        series.push(s);
    }
    for (name, pick) in [
        ("normality_ratio_min", f64::min as fn(f64, f64) -> f64),
        ("normality_ratio_max", f64::max),
    ] {
        let flat: Vec<f64> = ratios.iter().flatten().copied().collect();
        if flat.len() == ratios.len() {
            let agg = flat.into_iter().reduce(pick).expect("non-empty blocks");
            let mut s = Series::new(name).with_param("k", k);
            s.push(n, Some(agg));
            series.push(s);
        }
    }
    Ok(StatReport::new(series))
}

/// Ratios N_{n,p}(B) / S(n, m, p) for every m <= k, p in [1, m], and block B
/// over {0..alphabet-1}^m.
pub fn strong_normality_report(
    prefix: &DigitPrefix,
    n: u64,
    k: u32,
    alphabet: u64,
    cap: u128,
) -> Result<StatReport> {
    assert!(alphabet >= 2);
    let mut series = Vec::new();
    for m in 1..=k {
        if (alphabet as u128).checked_pow(m).map(|s| s > cap).unwrap_or(true) {
            return Err(Error::EnumerationTooLarge {
                size: (alphabet as u128).saturating_pow(m),
                cap,
            });
        }
        for p in 1..=m as u64 {
            let expected = prefix.seq().partial_sum_strided(n, m, p)?;
            let expected_f = expected.to_f64().unwrap_or(f64::NAN);
            let mut entries = vec![0u64; m as usize];
            loop {
                let block = Block::new(entries.clone()).expect("non-empty");
                let count = count_strided(prefix, &block, n, p)?;
                let ratio = if expected_f > 0.0 {
                    Some(count as f64 / expected_f)
                } else {
                    None
                };
                let mut s = Series::new("strong_ratio")
                    .with_param("block", &block)
                    .with_param("m", m)
                    .with_param("p", p)
                    .with_param("count", count);
                s.push(n, ratio);
                series.push(s);
                if !advance_block(&mut entries, alphabet) {
                    break;
                }
            }
        }
    }
    Ok(StatReport::new(series))
}

/// Per-phase ratios N_{n,p}(B) / S(n, |B|, p) for the given blocks.
pub fn strided_report(prefix: &DigitPrefix, n: u64, blocks: &[Block]) -> Result<StatReport> {
    let mut series = Vec::new();
    for block in blocks {
        let k = block.len() as u32;
        for p in 1..=block.len() {
            let expected = prefix.seq().partial_sum_strided(n, k, p)?;
            let expected_f = expected.to_f64().unwrap_or(f64::NAN);
            let count = count_strided(prefix, block, n, p)?;
            let ratio = if expected_f > 0.0 {
                Some(count as f64 / expected_f)
            } else {
                None
            };
            let mut s = Series::new("strided_ratio")
                .with_param("block", block)
                .with_param("p", p)
                .with_param("count", count);
            s.push(n, ratio);
            series.push(s);
        }
    }
    Ok(StatReport::new(series))
}

/// Pairwise N(B) / N(B') over ordered pairs from `blocks`; zero denominators
/// yield undefined points, not errors.
pub fn ratio_report(prefix: &DigitPrefix, n: u64, blocks: &[Block]) -> Result<StatReport> {
    if blocks.is_empty() {
        return Ok(StatReport::new(Vec::new()));
    }
    let k = blocks[0].len();
    if blocks.iter().any(|b| b.len() != k) {
        return Err(Error::InvalidConfig(
            "ratio report blocks must share one length".into(),
        ));
    }
    let counts: Vec<u64> = blocks
        .iter()
        .map(|b| count_occurrences(prefix, b, n))
        .collect::<Result<_>>()?;
    let mut series = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for (j, b2) in blocks.iter().enumerate() {
            if i == j {
                continue;
            }
            let value = if counts[j] > 0 {
                Some(counts[i] as f64 / counts[j] as f64)
            } else {
                None
            };
            let mut s = Series::new("pair_ratio")
                .with_param("numerator", b)
                .with_param("denominator", b2);
            s.push(n, value);
            series.push(s);
        }
    }
    Ok(StatReport::new(series))
}
