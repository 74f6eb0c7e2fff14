//! Exact Cantor series digits of rationals, prefix reconstruction, and the
//! digit file format.
//!
//! A digit prefix stores E_1..E_N of the expansion
//! x = sum E_n / (q_1 q_2 ... q_n) with 0 <= E_n <= q_n - 1. Digits live in a
//! dense u64 vector; the rare digit past machine range (radices above 2^64)
//! is promoted to a side table keyed by position.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, BigUint, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::sequences::BasicSequence;

/// Sentinel in the dense array for digits stored in the oversized table.
const OVERSIZED: u64 = u64::MAX;

/// A finite prefix E_1..E_N of a Cantor series expansion, bound to its
/// basic sequence. Digits beyond N are unknown, not zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitPrefix {
    seq: BasicSequence,
    dense: Vec<u64>,
    oversized: BTreeMap<u64, BigUint>,
}

impl DigitPrefix {
    pub fn empty(seq: BasicSequence) -> Self {
        Self {
            seq,
            dense: Vec::new(),
            oversized: BTreeMap::new(),
        }
    }

    /// Build from machine digits, validating 0 <= E_n <= q_n - 1.
    pub fn from_digits(seq: BasicSequence, digits: Vec<u64>) -> Result<Self> {
        for (i, &d) in digits.iter().enumerate() {
            let n = i as u64 + 1;
            let q = seq.q_at(n)?;
            if BigUint::from(d) >= q {
                return Err(Error::DigitOutOfRange {
                    position: n,
                    digit: d.to_string(),
                    q: q.to_string(),
                });
            }
        }
        Ok(Self {
            seq,
            dense: digits,
            oversized: BTreeMap::new(),
        })
    }

    pub fn from_big_digits(seq: BasicSequence, digits: Vec<BigUint>) -> Result<Self> {
        let mut prefix = Self::empty(seq);
        for d in digits {
            prefix.push(d)?;
        }
        Ok(prefix)
    }

    pub fn seq(&self) -> &BasicSequence {
        &self.seq
    }

    pub fn len(&self) -> u64 {
        self.dense.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.dense.is_empty()
    }

    /// Digit at 1-based position n.
    pub fn digit(&self, n: u64) -> BigUint {
        assert!(n >= 1 && n <= self.len(), "digit index out of range");
        let d = self.dense[n as usize - 1];
        if d == OVERSIZED {
            if let Some(big) = self.oversized.get(&n) {
                return big.clone();
            }
        }
        BigUint::from(d)
    }

    /// Dense digit view for scanning; positions from the oversized table hold
    /// the sentinel u64::MAX and must be disambiguated via
    /// [`is_oversized`](Self::is_oversized).
    pub fn dense(&self) -> &[u64] {
        &self.dense
    }

    pub fn is_oversized(&self, n: u64) -> bool {
        self.dense.get(n as usize - 1) == Some(&OVERSIZED) && self.oversized.contains_key(&n)
    }

    pub fn push(&mut self, digit: BigUint) -> Result<()> {
        let n = self.len() + 1;
        let q = self.seq.q_at(n)?;
        if digit >= q {
            return Err(Error::DigitOutOfRange {
                position: n,
                digit: digit.to_string(),
                q: q.to_string(),
            });
        }
        self.push_unchecked(digit);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, digit: BigUint) {
        match digit.to_u64() {
            Some(d) => self.dense.push(d),
            None => {
                let n = self.len() + 1;
                self.dense.push(OVERSIZED);
                self.oversized.insert(n, digit);
            }
        }
    }

    pub(crate) fn push_small_unchecked(&mut self, digit: u64) {
        self.dense.push(digit);
    }

    /// Write the digit file format: `#CANTOR v1 seq=<descriptor> n=<N>` then
    /// N space-separated decimal digits.
    pub fn write_digit_file<W: Write>(&self, out: &mut W) -> Result<()> {
        write_digit_file_header(out, &self.seq.descriptor(), self.len(), None)?;
        for n in 1..=self.len() {
            if n > 1 {
                write!(out, " ")?;
            }
            write!(out, "{}", self.digit(n))?;
        }
        if !self.is_empty() {
            writeln!(out)?;
        }
        Ok(())
    }

    /// Parse a digit file, validating every digit against the descriptor.
    pub fn read_digit_file<R: BufRead>(input: &mut R) -> Result<Self> {
        let mut header = String::new();
        input.read_line(&mut header)?;
        let (descriptor, n, start) = parse_digit_file_header(header.trim_end())?;
        if !start.is_one() {
            return Err(Error::MalformedDigitFile(format!(
                "file starts at position {start}; position-1 prefixes are required here"
            )));
        }
        let seq = BasicSequence::parse(&descriptor)?;
        let mut prefix = DigitPrefix::empty(seq);
        let mut body = String::new();
        input.read_to_string(&mut body)?;
        for token in body.split_whitespace() {
            let digit = token
                .parse::<BigUint>()
                .map_err(|_| Error::MalformedDigitFile(format!("bad digit token `{token}`")))?;
            prefix.push(digit)?;
        }
        if prefix.len() != n {
            return Err(Error::MalformedDigitFile(format!(
                "header says n={n} but body has {} digits",
                prefix.len()
            )));
        }
        Ok(prefix)
    }
}

/// Header writer shared with streamed output; `start` is only emitted when a
/// stream is resumed mid-sequence.
pub fn write_digit_file_header<W: Write>(
    out: &mut W,
    descriptor: &str,
    n: u64,
    start: Option<&BigUint>,
) -> Result<()> {
    match start {
        None => writeln!(out, "#CANTOR v1 seq={descriptor} n={n}")?,
        Some(s) if s.is_one() => writeln!(out, "#CANTOR v1 seq={descriptor} n={n}")?,
        Some(s) => writeln!(out, "#CANTOR v1 seq={descriptor} n={n} start={s}")?,
    }
    Ok(())
}

/// Returns (descriptor, digit count, 1-based start position).
pub fn parse_digit_file_header(line: &str) -> Result<(String, u64, BigUint)> {
    let bad = |msg: String| Error::MalformedDigitFile(msg);
    let rest = line
        .strip_prefix("#CANTOR v1 ")
        .ok_or_else(|| bad("missing `#CANTOR v1` header".into()))?;
    let mut descriptor = None;
    let mut n = None;
    let mut start = BigUint::one();
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("seq=") {
            descriptor = Some(v.to_string());
        } else if let Some(v) = field.strip_prefix("n=") {
            n = Some(v.parse::<u64>().map_err(|_| bad(format!("bad n `{v}`")))?);
        } else if let Some(v) = field.strip_prefix("start=") {
            start = v
                .parse::<BigUint>()
                .map_err(|_| bad(format!("bad start `{v}`")))?;
        } else {
            return Err(bad(format!("unknown header field `{field}`")));
        }
    }
    Ok((
        descriptor.ok_or_else(|| bad("header missing seq=".into()))?,
        n.ok_or_else(|| bad("header missing n=".into()))?,
        start,
    ))
}

/// Greedy expansion of a rational x = numer/denom in [0, 1):
/// E_m = floor(q_m r_{m-1}), r_m = q_m r_{m-1} - E_m. The remainders satisfy
/// 0 <= r_m < 1 at every step, so no emitted prefix can be the top edge of
/// its digit interval.
pub fn expand_rational(
    numer: &BigUint,
    denom: &BigUint,
    seq: &BasicSequence,
    n: u64,
) -> Result<DigitPrefix> {
    if denom.is_zero() || numer >= denom {
        return Err(Error::OutsideUnitInterval(format!("{numer}/{denom}")));
    }
    let mut remainder = BigRational::new(
        BigInt::from(numer.clone()),
        BigInt::from(denom.clone()),
    );
    let mut prefix = DigitPrefix::empty(seq.clone());
    let one = BigRational::one();
    for m in 1..=n {
        let q = seq.q_at(m)?;
        let scaled = remainder * BigRational::from(BigInt::from(q));
        let digit_int = scaled.floor();
        remainder = &scaled - &digit_int;
        assert!(
            remainder >= BigRational::zero() && remainder < one,
            "greedy remainder escaped [0, 1)"
        );
        let digit = digit_int
            .to_integer()
            .to_biguint()
            .expect("greedy digit is non-negative");
        prefix.push_unchecked(digit);
    }
    Ok(prefix)
}

/// Exact value sum_{n=1..N} E_n / (q_1 ... q_n) of a digit prefix.
pub fn prefix_value(prefix: &DigitPrefix) -> Result<BigRational> {
    // Horner over the mixed radix: acc_n = acc_{n-1} q_n + E_n, value = acc_N / (q_1...q_N)
    let mut acc = BigUint::zero();
    let mut denom = BigUint::one();
    for n in 1..=prefix.len() {
        let q = prefix.seq().q_at(n)?;
        acc = acc * &q + prefix.digit(n);
        denom *= &q;
    }
    Ok(Ratio::new(BigInt::from(acc), BigInt::from(denom)))
}

/// Interval [low, high) of all reals sharing the digit prefix:
/// low = prefix_value, high = low + 1/(q_1...q_N).
pub fn prefix_interval(prefix: &DigitPrefix) -> Result<(BigRational, BigRational)> {
    let low = prefix_value(prefix)?;
    let mut denom = BigUint::one();
    for n in 1..=prefix.len() {
        denom *= prefix.seq().q_at(n)?;
    }
    let width = Ratio::new(BigInt::one(), BigInt::from(denom));
    let high = &low + width;
    Ok((low, high))
}
