//! Explicit digit constructions: canonical C(b, w) words, staged
//! concatenation schedules (the built-in paper schedule and scaled-down
//! variants), growth-condition
//! diagnostics, the min-digit transform, and Champernowne prefixes.

pub mod cbw;
pub mod schedule;

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, BigUint, One, ToPrimitive, Zero};

use crate::counting::Block;
use crate::error::{Error, Result};
use crate::expansion::DigitPrefix;
use crate::report::{Series, StatReport};
use crate::sequences::{BasicSequence, SequenceFamily};

pub use cbw::{BiasCounts, CbwIndex, SlotClass};
pub use schedule::{Schedule, ScheduleStream, Stage, WordShape};

/// Default cap, in digits, on materialized C(b, w) words.
pub const DEFAULT_MATERIALIZE_CAP: u128 = 1 << 23;

fn validate_cbw_params(b: u64, w: u64) -> Result<()> {
    if b < 2 {
        return Err(Error::InvalidConfig(format!("base {b} must be >= 2")));
    }
    if w == 0 || w.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("width {w} must be odd")));
    }
    Ok(())
}

/// Materialize the canonical C(b, w) word. Errors when the word exceeds the
/// default cap or when even the canonical (partition-optimal) order cannot
/// reach zeros-at-odd >= 2 * ones-at-odd.
pub fn build_cbw(b: u64, w: u64) -> Result<Block> {
    build_cbw_with_cap(b, w, DEFAULT_MATERIALIZE_CAP)
}

pub fn build_cbw_with_cap(b: u64, w: u64, cap: u128) -> Result<Block> {
    validate_cbw_params(b, w)?;
    let index = CbwIndex::new(b, w);
    let word = index.materialize(cap)?;
    let (zeros_odd, ones_odd) = odd_position_counts(&word);
    if zeros_odd < 2 * ones_odd {
        return Err(Error::BiasUnachievable {
            b,
            w,
            zeros_odd: zeros_odd.to_string(),
            ones_odd: ones_odd.to_string(),
        });
    }
    Block::new(word)
}

/// Digit at 1-based position idx of the canonical C(b, w), in time polynomial
/// in w and log b.
pub fn cbw_digit_at(b: u64, w: u64, idx: &BigUint) -> Result<u64> {
    validate_cbw_params(b, w)?;
    CbwIndex::new(b, w).digit_at(idx)
}

/// Zeros and ones of a word at odd (1-based) positions.
pub fn odd_position_counts(word: &[u64]) -> (u64, u64) {
    let mut zeros = 0;
    let mut ones = 0;
    for (i, &d) in word.iter().enumerate() {
        if i % 2 == 0 {
            if d == 0 {
                zeros += 1;
            } else if d == 1 {
                ones += 1;
            }
        }
    }
    (zeros, ones)
}

/// Direct verification of a materialized candidate C(b, w) word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbwVerification {
    /// whether the w-chunk multiset is exactly all base-b length-w blocks
    pub complete: bool,
    pub zeros_odd: u64,
    pub ones_odd: u64,
    pub bias_ok: bool,
}

pub fn verify_cbw(word: &[u64], b: u64, w: u64) -> Result<CbwVerification> {
    validate_cbw_params(b, w)?;
    let expected_len = (w as u128)
        .checked_mul((b as u128).checked_pow(w as u32).ok_or(
            Error::MaterializationCapExceeded {
                size: u128::MAX,
                cap: u128::MAX,
            },
        )?)
        .ok_or(Error::MaterializationCapExceeded {
            size: u128::MAX,
            cap: u128::MAX,
        })?;
    if word.len() as u128 != expected_len {
        return Err(Error::WordLengthMismatch {
            got: word.len() as u64,
            expected: expected_len as u64,
        });
    }
    let mut chunk_counts: HashMap<&[u64], u64> = HashMap::new();
    for chunk in word.chunks_exact(w as usize) {
        *chunk_counts.entry(chunk).or_insert(0) += 1;
    }
    let block_total = (b as u128).pow(w as u32) as u64;
    let complete = chunk_counts.len() as u64 == block_total
        && chunk_counts.values().all(|&c| c == 1)
        && word.iter().all(|&d| d < b);
    let (zeros_odd, ones_odd) = odd_position_counts(word);
    Ok(CbwVerification {
        complete,
        zeros_odd,
        ones_odd,
        bias_ok: zeros_odd >= 2 * ones_odd,
    })
}

/// Analytic bias report: exact odd-position digit counts of the canonical
/// C(b, w) computed by closed-form counting over slot indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasReport {
    pub zeros_odd: BigUint,
    pub ones_odd: BigUint,
    pub bias_ok: bool,
}

pub fn verify_bias_analytic(b: u64, w: u64) -> Result<BiasReport> {
    validate_cbw_params(b, w)?;
    let counts = CbwIndex::new(b, w).analytic_bias();
    let bias_ok = counts.bias_ok();
    Ok(BiasReport {
        zeros_odd: counts.zeros_odd,
        ones_odd: counts.ones_odd,
        bias_ok,
    })
}

#[derive(Clone)]
enum SpecKind {
    Paper,
    Scaled(Vec<(BigUint, u64, u64)>),
}

/// A staged construction: schedule of (l_i, b_i, x_i) with exact cumulative
/// lengths, driving both the digit stream and the induced basic sequence.
#[derive(Clone)]
pub struct ConstructionSpec {
    schedule: Arc<Schedule>,
    kind: SpecKind,
}

/// The built-in paper schedule: x_1 = (0,1), b_1 = 2, l_1 = 0, and for i >= 2
/// x_i = C(2i, (2i+1)^2), b_i = 2i, l_i = (2i)^(9i+8).
pub fn paper_spec() -> ConstructionSpec {
    ConstructionSpec {
        schedule: Schedule::paper(),
        kind: SpecKind::Paper,
    }
}

/// A scaled stage schedule from (l_i, b_i, w_i) triples; x_i = C(b_i, w_i).
/// Returns the spec together with any shape violations.
pub fn scaled_spec(triples: &[(BigUint, u64, u64)]) -> Result<(ConstructionSpec, Vec<String>)> {
    let (schedule, violations) = Schedule::scaled(triples)?;
    Ok((
        ConstructionSpec {
            schedule,
            kind: SpecKind::Scaled(triples.to_vec()),
        },
        violations,
    ))
}

impl ConstructionSpec {
    pub fn descriptor(&self) -> String {
        match &self.kind {
            SpecKind::Paper => "paperconstruction".into(),
            SpecKind::Scaled(triples) => {
                let parts: Vec<String> = triples
                    .iter()
                    .map(|(l, b, w)| format!("{l},{b},{w}"))
                    .collect();
                format!("scaled:{}", parts.join(";"))
            }
        }
    }

    /// The induced basic sequence q_n = b_i for L_{i-1} < n <= L_i.
    pub fn sequence(&self) -> BasicSequence {
        let family = match &self.kind {
            SpecKind::Paper => SequenceFamily::Paper {
                schedule: self.schedule.clone(),
            },
            SpecKind::Scaled(triples) => SequenceFamily::Scaled {
                schedule: self.schedule.clone(),
                triples: triples.clone(),
                monotone: triples.windows(2).all(|p| p[0].1 <= p[1].1),
            },
        };
        BasicSequence::new(family).expect("schedule-backed sequences are valid")
    }

    pub fn stage(&self, i: usize) -> Option<Stage> {
        self.schedule.stage(i)
    }

    /// Total digits, None for the unbounded paper schedule.
    pub fn end(&self) -> Option<BigUint> {
        self.schedule.end()
    }

    pub fn stream(&self, start: BigUint) -> ScheduleStream {
        self.schedule.stream(start)
    }

    pub fn digit_at(&self, n: &BigUint) -> Result<(u64, u64)> {
        self.schedule.digit_at(n)
    }

    /// Materialize positions 1..=n as a digit prefix over the induced
    /// sequence (test and desk scale only).
    pub fn materialize_prefix(&self, n: u64) -> Result<DigitPrefix> {
        let seq = self.sequence();
        let mut prefix = DigitPrefix::empty(seq);
        let mut stream = self.stream(BigUint::one());
        for _ in 0..n {
            let (digit, _) = stream.next_digit()?;
            prefix.push_small_unchecked(digit);
        }
        Ok(prefix)
    }
}

/// digit_at as a free operation: (digit, q_n) at unbounded position n.
pub fn spec_digit_at(spec: &ConstructionSpec, n: &BigUint) -> Result<(u64, u64)> {
    spec.digit_at(n)
}

/// One row of growth-condition diagnostics at stage i.
#[derive(Debug, Clone)]
pub struct WgoodRow {
    pub i: u64,
    /// b_i^k / ((eps_{i-1} - eps_i) |x_i|)
    pub r1: BigRational,
    /// (l_{i-1} |x_{i-1}|) / (l_i |x_i|) * i * b_i^k
    pub r2: BigRational,
    /// |x_{i+1}| / (l_i |x_i|) * b_i^k
    pub r3: BigRational,
}

#[derive(Debug, Clone)]
pub struct WgoodReport {
    pub k: u32,
    pub rows: Vec<WgoodRow>,
    pub r1_strictly_decreasing: bool,
    /// monotone trend over the rows where l_{i-1} > 0; a zero numerator says
    /// nothing about the growth condition, so those rows are skipped
    pub r2_strictly_decreasing: bool,
    pub r3_strictly_decreasing: bool,
}

impl WgoodReport {
    pub fn to_stat_report(&self) -> StatReport {
        let mut series = Vec::new();
        for (name, pick) in [
            ("wgood_r1", 0usize),
            ("wgood_r2", 1),
            ("wgood_r3", 2),
        ] {
            let mut s = Series::new(name).with_param("k", self.k);
            for row in &self.rows {
                let value = match pick {
                    0 => &row.r1,
                    1 => &row.r2,
                    _ => &row.r3,
                };
                s.push(row.i, Some(value.to_f64().unwrap_or(f64::NAN)));
            }
            series.push(s);
        }
        let mut log_series = Series::new("wgood_log10");
        for row in &self.rows {
            log_series
                .params
                .insert(format!("r1_log10_i{}", row.i), format!("{:.6}", rational_log10(&row.r1)));
            log_series
                .params
                .insert(format!("r3_log10_i{}", row.i), format!("{:.6}", rational_log10(&row.r3)));
        }
        series.push(log_series);
        StatReport::new(series)
    }
}

/// log10 of a non-negative rational; -inf at zero. Exact enough for trend
/// reporting far outside f64 range.
pub fn rational_log10(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let shift = |v: &BigUint| -> (f64, i64) {
        let drop = v.bits().saturating_sub(53);
        let lead: u64 = (v >> drop).try_into().expect("53 bits fit");
        (lead as f64, drop as i64)
    };
    let (nf, ns) = shift(x.numer().magnitude());
    let (df, ds) = shift(x.denom().magnitude());
    (ns - ds) as f64 * std::f64::consts::LOG10_2 + (nf / df).log10()
}

/// Evaluate the three growth-condition ratios over stages in `i_range`
/// (1-based, i >= 2) of a schedule, exactly.
pub fn wgood_ratios(
    spec: &ConstructionSpec,
    k: u32,
    i_range: RangeInclusive<u64>,
) -> Result<WgoodReport> {
    let (lo, hi) = (*i_range.start(), *i_range.end());
    if lo < 2 {
        return Err(Error::InvalidConfig("growth diagnostics need i >= 2".into()));
    }
    if hi < lo {
        return Err(Error::InvalidConfig("empty stage range".into()));
    }
    let mut rows = Vec::new();
    for i in lo..=hi {
        let prev = spec.stage(i as usize - 2).ok_or_else(|| {
            Error::InvalidConfig(format!("stage {} not in schedule", i - 1))
        })?;
        let here = spec
            .stage(i as usize - 1)
            .ok_or_else(|| Error::InvalidConfig(format!("stage {i} not in schedule")))?;
        let next = spec.stage(i as usize).ok_or_else(|| {
            Error::InvalidConfig(format!("stage {} not in schedule", i + 1))
        })?;
        let bik = BigInt::from(BigUint::from(here.base).pow(k));
        let eps_gap = &prev.eps - &here.eps;
        if eps_gap <= BigRational::zero() {
            return Err(Error::InvalidConfig(format!(
                "eps must strictly decrease between stages {} and {i}",
                i - 1
            )));
        }
        let xi = BigInt::from(here.word_len.clone());
        let r1 = Ratio::from(bik.clone()) / (eps_gap * Ratio::from(xi.clone()));
        let li_xi = BigInt::from(&here.repeats * &here.word_len);
        if li_xi.is_zero() {
            return Err(Error::InvalidConfig(format!(
                "stage {i} has an empty segment (l_i |x_i| = 0)"
            )));
        }
        let prev_mass = BigInt::from(&prev.repeats * &prev.word_len);
        let r2 = Ratio::new(prev_mass * i as i64, li_xi.clone()) * Ratio::from(bik.clone());
        let r3 = Ratio::new(BigInt::from(next.word_len.clone()), li_xi) * Ratio::from(bik);
        rows.push(WgoodRow { i, r1, r2, r3 });
    }
    let strictly_dec = |vals: Vec<&BigRational>| vals.windows(2).all(|w| w[0] > w[1]);
    let r1_dec = strictly_dec(rows.iter().map(|r| &r.r1).collect());
    let r3_dec = strictly_dec(rows.iter().map(|r| &r.r3).collect());
    let r2_nonvacuous: Vec<&BigRational> = rows
        .iter()
        .filter(|r| !r.r2.is_zero())
        .map(|r| &r.r2)
        .collect();
    let r2_dec = r2_nonvacuous.windows(2).all(|w| w[0] > w[1]);
    Ok(WgoodReport {
        k,
        rows,
        r1_strictly_decreasing: r1_dec,
        r2_strictly_decreasing: r2_dec,
        r3_strictly_decreasing: r3_dec,
    })
}

/// Digitwise E_n = min(E'_n, q_n - 1) onto the target sequence. Once the
/// target radices exceed a block's digits the transform is the identity
/// there, so occurrence positions agree past the tail index.
pub fn ratio_normal_transform(
    source: &DigitPrefix,
    target: &BasicSequence,
) -> Result<DigitPrefix> {
    if let Some(end) = target.domain_end() {
        if end < BigUint::from(source.len()) {
            return Err(Error::PrefixLengthMismatch {
                got: source.len(),
                expected: end.to_u64().unwrap_or(u64::MAX),
            });
        }
    }
    let mut out = DigitPrefix::empty(target.clone());
    let one = BigUint::one();
    for n in 1..=source.len() {
        let cap = target.q_at(n)? - &one;
        let digit = source.digit(n).min(cap);
        out.push_unchecked(digit);
    }
    Ok(out)
}

/// First n digits of the base-b Champernowne number: the natural numbers
/// written in base b and concatenated.
pub fn champernowne_prefix(b: u64, n: u64) -> Result<DigitPrefix> {
    assert!(b >= 2);
    let seq = BasicSequence::constant(b)?;
    let mut prefix = DigitPrefix::empty(seq);
    let mut value: u64 = 0;
    let mut scratch = Vec::new();
    while prefix.len() < n {
        value = value
            .checked_add(1)
            .ok_or_else(|| Error::ValueTooLarge("Champernowne counter".into()))?;
        scratch.clear();
        let mut v = value;
        while v > 0 {
            scratch.push(v % b);
            v /= b;
        }
        for &d in scratch.iter().rev() {
            if prefix.len() >= n {
                break;
            }
            prefix.push_small_unchecked(d);
        }
    }
    Ok(prefix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_matches_digit_at_for_small_words() {
        for (b, w) in [(2u64, 3u64), (3, 3), (2, 5), (4, 3)] {
            let word = build_cbw(b, w).unwrap();
            let index = CbwIndex::new(b, w);
            for (i, &d) in word.entries().iter().enumerate() {
                assert_eq!(index.digit_at(&BigUint::from(i as u64 + 1)).unwrap(), d);
            }
        }
    }

    #[test]
    fn build_cbw_verifies() {
        for (b, w) in [(2u64, 3u64), (2, 5), (3, 3), (4, 3)] {
            let word = build_cbw(b, w).unwrap();
            let v = verify_cbw(word.entries(), b, w).unwrap();
            assert!(v.complete && v.bias_ok, "({b},{w}): {v:?}");
            let analytic = verify_bias_analytic(b, w).unwrap();
            assert_eq!(analytic.zeros_odd, BigUint::from(v.zeros_odd));
            assert_eq!(analytic.ones_odd, BigUint::from(v.ones_odd));
        }
    }

    #[test]
    fn hand_arranged_word_verifies() {
        let word = [
            0u64, 0, 0, 1, 0, 1, 0, 1, 0, 0, 0, 1, 0, 1, 1, 1, 0, 0, 1, 1, 0, 1, 1, 1,
        ];
        let v = verify_cbw(&word, 2, 3).unwrap();
        assert!(v.complete);
        assert_eq!((v.zeros_odd, v.ones_odd), (9, 3));
        assert!(v.bias_ok);
    }

    #[test]
    fn duplicated_chunk_fails_completeness() {
        let mut word = build_cbw(2, 3).unwrap().entries().to_vec();
        let first_chunk: Vec<u64> = word[..3].to_vec();
        word[3..6].copy_from_slice(&first_chunk);
        let v = verify_cbw(&word, 2, 3).unwrap();
        assert!(!v.complete);
    }

    #[test]
    fn lexicographic_word_bias_reported_as_computed() {
        // plain lexicographic concatenation: complete at any width, bias
        // holds exactly at w = 3 and fails from w = 5 on
        let lex_word = |w: u32| {
            let mut word = Vec::new();
            for v in 0..1u64 << w {
                for shift in (0..w).rev() {
                    word.push((v >> shift) & 1);
                }
            }
            word
        };
        let v3 = verify_cbw(&lex_word(3), 2, 3).unwrap();
        assert!(v3.complete);
        assert_eq!((v3.zeros_odd, v3.ones_odd), (8, 4));
        assert!(v3.bias_ok);

        let v5 = verify_cbw(&lex_word(5), 2, 5).unwrap();
        assert!(v5.complete);
        assert_eq!((v5.zeros_odd, v5.ones_odd), (48, 32));
        assert!(!v5.bias_ok);
    }

    #[test]
    fn small_words_are_eps_normal() {
        use crate::counting::{check_eps_k_normal, Weighting};
        use num::BigRational;
        // (K/w, K, lambda_b)-normality instances
        let c23 = build_cbw(2, 3).unwrap();
        let two_thirds = BigRational::new(2.into(), 3.into());
        assert!(
            check_eps_k_normal(c23.entries(), &two_thirds, 2, &Weighting::uniform(2), 2, 1 << 20)
                .unwrap()
                .pass
        );
        let c25 = build_cbw(2, 5).unwrap();
        let fifth = BigRational::new(1.into(), 5.into());
        assert!(
            check_eps_k_normal(c25.entries(), &fifth, 1, &Weighting::uniform(2), 2, 1 << 20)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn random_access_at_paper_scale_boundaries() {
        // C(4,25): first digit of slot 0 and the very last digit, without
        // materializing the ~7e17-digit word
        assert_eq!(cbw_digit_at(4, 25, &BigUint::one()).unwrap(), 0);
        let last = BigUint::from(4u8).pow(25) * 25u8;
        assert_eq!(cbw_digit_at(4, 25, &last).unwrap(), 3);
        assert!(cbw_digit_at(4, 25, &(last + BigUint::one())).is_err());
    }

    #[test]
    fn cap_and_bias_errors() {
        assert!(matches!(
            build_cbw(4, 25),
            Err(Error::MaterializationCapExceeded { .. })
        ));
        assert!(matches!(build_cbw(2, 7), Err(Error::BiasUnachievable { .. })));
    }

    #[test]
    fn paper_scale_bias_counts() {
        // stage-two parameters of the paper schedule: exact counts, never materialized
        let report = verify_bias_analytic(4, 25).unwrap();
        assert_eq!(
            report.zeros_odd,
            BigUint::parse_bytes(b"4169859299168926", 10).unwrap()
        );
        assert_eq!(
            report.ones_odd,
            BigUint::parse_bytes(b"2620849061442498", 10).unwrap()
        );
        // the 2:1 odd-position bias is unattainable at these parameters
        assert!(!report.bias_ok);
    }

    #[test]
    fn paper_spec_shape() {
        let spec = paper_spec();
        let s1 = spec.stage(0).unwrap();
        assert_eq!(s1.cumulative_end, BigUint::zero());
        let s2 = spec.stage(1).unwrap();
        assert_eq!(s2.word_len, BigUint::from(4u8).pow(25) * 25u8);
        let s3 = spec.stage(2).unwrap();
        assert_eq!(s3.base, 6);
        assert_eq!(s3.repeats, BigUint::from(6u8).pow(35));
        let (digit, q) = spec.digit_at(&BigUint::one()).unwrap();
        assert_eq!((digit, q), (0, 4));
    }

    #[test]
    fn paper_spec_stage_two_boundary() {
        let spec = paper_spec();
        let end_two = spec.stage(1).unwrap().cumulative_end;
        let (digit, q) = spec.digit_at(&end_two).unwrap();
        assert_eq!(q, 4);
        // the last slot holds the lexicographically largest block (all 3s)
        assert_eq!(digit, 3);
        let (_, q3) = spec.digit_at(&(end_two + BigUint::one())).unwrap();
        assert_eq!(q3, 6);
    }

    #[test]
    fn scaled_spec_lengths() {
        let (spec, violations) = scaled_spec(&[
            (BigUint::zero(), 2, 1),
            (BigUint::from(3u8), 4, 3),
            (BigUint::from(3u8), 6, 3),
        ])
        .unwrap();
        assert!(violations.is_empty());
        let s2 = spec.stage(1).unwrap();
        assert_eq!(s2.word_len, BigUint::from(192u32));
        assert_eq!(s2.cumulative_end, BigUint::from(576u32));
        assert_eq!(
            spec.end().unwrap(),
            BigUint::from(576u32 + 3 * 3 * 6u32.pow(3))
        );
    }

    #[test]
    fn stream_equals_materialized_concatenation() {
        let (spec, _) = scaled_spec(&[
            (BigUint::from(2u8), 2, 3),
            (BigUint::from(2u8), 3, 3),
        ])
        .unwrap();
        let mut expected = Vec::new();
        for (b, w, copies) in [(2u64, 3u64, 2usize), (3, 3, 2)] {
            let word = build_cbw(b, w).unwrap();
            for _ in 0..copies {
                expected.extend_from_slice(word.entries());
            }
        }
        let end: u64 = spec.end().unwrap().try_into().unwrap();
        assert_eq!(expected.len() as u64, end);
        let mut stream = spec.stream(BigUint::one());
        for (i, &d) in expected.iter().enumerate() {
            let (digit, _) = stream.next_digit().unwrap();
            assert_eq!(digit, d, "position {}", i + 1);
            let direct = spec.digit_at(&BigUint::from(i as u64 + 1)).unwrap().0;
            assert_eq!(direct, d);
        }
    }

    #[test]
    fn scaled_prefix_matches_paper_prefix() {
        // a truncated schedule reusing the stage-two word shares its
        // opening digits with the full paper schedule
        let (truncated, _) = scaled_spec(&[
            (BigUint::zero(), 2, 1),
            (BigUint::from(2u8), 4, 25),
        ])
        .unwrap();
        let paper = paper_spec();
        let mut a = truncated.stream(BigUint::one());
        let mut b = paper.stream(BigUint::one());
        for _ in 0..500 {
            assert_eq!(a.next_digit().unwrap(), b.next_digit().unwrap());
        }
    }

    #[test]
    fn wgood_paper_rows() {
        let spec = paper_spec();
        let report = wgood_ratios(&spec, 1, 2..=4).unwrap();
        // r1 at i=2 with eps_1 = 1/2: 4 / ((1/2 - 1/5) * 25 * 4^25)
        let x2 = BigInt::from(BigUint::from(4u8).pow(25) * 25u8);
        let expected_r1 = Ratio::new(BigInt::from(4), BigInt::one())
            / (Ratio::new(BigInt::from(3), BigInt::from(10)) * Ratio::from(x2));
        assert_eq!(report.rows[0].r1, expected_r1);
        // l_1 = 0 makes the first r2 row vacuous
        assert!(report.rows[0].r2.is_zero());
        assert!(report.r1_strictly_decreasing);
        assert!(report.r2_strictly_decreasing);
        // the r3 ratios genuinely grow in this stage range; the growth
        // condition is asymptotic and its preasymptotic values rise
        assert!(!report.r3_strictly_decreasing);
        assert!(report.rows[0].r3 < report.rows[1].r3);
        assert!(report.rows[1].r3 < report.rows[2].r3);
    }

    #[test]
    fn wgood_flags_bad_schedule() {
        // tiny l_i: r3 grows
        let (spec, violations) = scaled_spec(&[
            (BigUint::one(), 2, 3),
            (BigUint::one(), 4, 3),
            (BigUint::one(), 6, 5),
            (BigUint::one(), 8, 7),
        ])
        .unwrap();
        assert!(violations.is_empty());
        let report = wgood_ratios(&spec, 1, 2..=3).unwrap();
        assert!(!report.r3_strictly_decreasing);
    }

    #[test]
    fn min_transform_examples() {
        let source_seq = BasicSequence::parse("list:6,8,11;tail=const:12").unwrap();
        let source = DigitPrefix::from_digits(source_seq, vec![5, 7, 2]).unwrap();
        let target = BasicSequence::parse("list:3,4,10;tail=const:12").unwrap();
        let image = ratio_normal_transform(&source, &target).unwrap();
        assert_eq!(image.dense(), &[2, 3, 2]);

        // all digits already below the radices: identity
        let id_target = BasicSequence::constant(12).unwrap();
        let image2 = ratio_normal_transform(&source, &id_target).unwrap();
        assert_eq!(image2.dense(), &[5, 7, 2]);
    }

    #[test]
    fn champernowne_examples() {
        let p10 = champernowne_prefix(10, 12).unwrap();
        assert_eq!(p10.dense(), &[1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 0, 1]);
        let p2 = champernowne_prefix(2, 6).unwrap();
        assert_eq!(p2.dense(), &[1, 1, 0, 1, 1, 1]);
        let p5 = champernowne_prefix(5, 1).unwrap();
        assert_eq!(p5.dense(), &[1]);
    }

    #[test]
    fn rational_log10_matches_f64() {
        for (n, d) in [(1i64, 2i64), (355, 113), (1, 1000000)] {
            let r = BigRational::new(n.into(), d.into());
            let expect = (n as f64 / d as f64).log10();
            assert!((rational_log10(&r) - expect).abs() < 1e-9);
        }
    }
}
