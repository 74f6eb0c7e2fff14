//! Basic sequences q_1, q_2, ... with every q_n >= 2: the per-position
//! radices of a Cantor series. Families are described by a small round-trip
//! descriptor language and evaluated exactly.
//!
//! The partial sums
//!
//!   S(n, k)    = sum_{j=1..n} 1 / (q_j q_{j+1} ... q_{j+k-1})
//!   S(n, k, p) = sum_{j=0..rho(n,k)} 1 / (q_{jk+p} ... q_{jk+p+k-1})
//!
//! are the expected block-occurrence counts everything else in this crate is
//! normalized by. They are computed in exact rational arithmetic by default;
//! f64 variants exist for horizons where exact denominators get unwieldy.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, BigUint, Integer, One, ToPrimitive, Zero};
use serde::Serialize;

use crate::construct::schedule::Schedule;
use crate::error::{Error, Result};

/// Exponent of the power-floor family, a positive rational parsed from a
/// decimal literal (so the denominator is always a divisor of a power of 10).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alpha {
    num: u32,
    den: u32,
}

impl Alpha {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidDescriptor(
                format!("{num}/{den}"),
                "exponent must be positive".into(),
            ));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn parse_decimal(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidDescriptor(s.to_string(), msg.to_string());
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad("empty exponent"));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad("exponent must be a plain decimal"));
        }
        if frac_part.len() > 6 {
            return Err(bad("at most 6 fractional digits supported"));
        }
        let scale = 10u64.pow(frac_part.len() as u32);
        let int_val: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad("integer part overflows"))?
        };
        let frac_val: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad("fraction overflows"))?
        };
        let num = int_val
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(|| bad("exponent too large"))?;
        let num = u32::try_from(num).map_err(|_| bad("exponent too large"))?;
        let den = u32::try_from(scale).expect("scale fits");
        Alpha::new(num, den)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// floor(n^alpha) as an exact integer: the largest m with m^den <= n^num.
    pub fn floor_pow(&self, n: u64) -> BigUint {
        if self.den == 1 {
            return BigUint::from(n).pow(self.num);
        }
        if self.num == 1 && self.den == 2 {
            return BigUint::from(isqrt_u64(n));
        }
        BigUint::from(n).pow(self.num).nth_root(self.den)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // den divides a power of 10, so the expansion terminates
        let mut k = 0u32;
        let mut scale = 1u64;
        while !scale.is_multiple_of(self.den as u64) {
            scale *= 10;
            k += 1;
        }
        let digits = self.num as u64 * (scale / self.den as u64);
        if k == 0 {
            return write!(f, "{digits}");
        }
        let int = digits / scale;
        let mut frac = format!("{:0width$}", digits % scale, width = k as usize);
        while frac.ends_with('0') {
            frac.pop();
        }
        if frac.is_empty() {
            write!(f, "{int}")
        } else {
            write!(f, "{int}.{frac}")
        }
    }
}

/// Integer square root.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map(|s| s > n).unwrap_or(true) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map(|s| s <= n).unwrap_or(false) {
        x += 1;
    }
    x
}

/// Descriptor of a basic sequence family.
#[derive(Clone)]
pub enum SequenceFamily {
    /// q_n = base
    Constant { base: u64 },
    /// q_n = slope * n + offset
    Affine { slope: u64, offset: u64 },
    /// q_n = floor(n^alpha) + offset
    PowFloor { alpha: Alpha, offset: u64 },
    /// q_n = ratio^n
    Geometric { ratio: u64 },
    /// q_n = 2^(2^n)
    DoublyExponential,
    /// the four-track mixed-growth sequence: q_n cycles through
    /// floor(n^(1/4)), floor(n^(1/4) log^2 n), floor(n^(3/4)),
    /// floor(n^(3/4) log^2 n) by n mod 4, clamped below at 2
    Altomare,
    /// explicit head values, then defer to the tail family (absolute index)
    Explicit {
        head: Vec<u64>,
        tail: Box<SequenceFamily>,
    },
    /// radices induced by the staged construction with paper-scale parameters
    Paper { schedule: Arc<Schedule> },
    /// radices induced by a finite staged construction
    Scaled {
        schedule: Arc<Schedule>,
        triples: Vec<(BigUint, u64, u64)>,
        monotone: bool,
    },
}

/// A q value that may exceed machine range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QVal {
    Small(u64),
    Big(BigUint),
}

impl QVal {
    pub fn to_biguint(&self) -> BigUint {
        match self {
            QVal::Small(v) => BigUint::from(*v),
            QVal::Big(v) => v.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            QVal::Small(v) => *v as f64,
            QVal::Big(v) => v.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn le_u64(&self, bound: u64) -> bool {
        match self {
            QVal::Small(v) => *v <= bound,
            QVal::Big(_) => false,
        }
    }
}

/// A basic sequence: a validated family descriptor plus its evaluator.
#[derive(Clone)]
pub struct BasicSequence {
    family: SequenceFamily,
}

impl fmt::Debug for BasicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasicSequence({})", self.descriptor())
    }
}

impl PartialEq for BasicSequence {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor() == other.descriptor()
    }
}

impl fmt::Display for BasicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for BasicSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BasicSequence::parse(s)
    }
}

fn parse_u64_list(s: &str, what: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidDescriptor(s.to_string(), format!("bad {what} `{part}`")))
        })
        .collect()
}

impl BasicSequence {
    pub fn new(family: SequenceFamily) -> Result<Self> {
        let seq = Self { family };
        seq.validate()?;
        Ok(seq)
    }

    pub fn constant(base: u64) -> Result<Self> {
        Self::new(SequenceFamily::Constant { base })
    }

    pub fn affine(slope: u64, offset: u64) -> Result<Self> {
        Self::new(SequenceFamily::Affine { slope, offset })
    }

    pub fn pow_floor(alpha: Alpha, offset: u64) -> Result<Self> {
        Self::new(SequenceFamily::PowFloor { alpha, offset })
    }

    pub fn geometric(ratio: u64) -> Result<Self> {
        Self::new(SequenceFamily::Geometric { ratio })
    }

    pub fn doubly_exponential() -> Self {
        Self {
            family: SequenceFamily::DoublyExponential,
        }
    }

    pub fn altomare() -> Self {
        Self {
            family: SequenceFamily::Altomare,
        }
    }

    pub fn family(&self) -> &SequenceFamily {
        &self.family
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Error::InvalidDescriptor(self.descriptor(), msg);
        match &self.family {
            SequenceFamily::Constant { base } => {
                if *base < 2 {
                    return Err(bad(format!("constant base {base} must be >= 2")));
                }
            }
            SequenceFamily::Affine { slope, offset } => {
                if *slope == 0 {
                    return Err(bad("affine slope must be >= 1 (use const for slope 0)".into()));
                }
                if slope + offset < 2 {
                    return Err(bad("q_1 = slope + offset must be >= 2".into()));
                }
            }
            SequenceFamily::PowFloor { offset, .. } => {
                // floor(n^alpha) >= 1 for n >= 1, so offset >= 1 keeps q_n >= 2
                if *offset < 1 {
                    return Err(bad("power-floor offset must be >= 1".into()));
                }
            }
            SequenceFamily::Geometric { ratio } => {
                if *ratio < 2 {
                    return Err(bad(format!("geometric ratio {ratio} must be >= 2")));
                }
            }
            SequenceFamily::Explicit { head, tail } => {
                if let Some(&v) = head.iter().find(|&&v| v < 2) {
                    return Err(bad(format!("listed value {v} is below 2")));
                }
                BasicSequence {
                    family: (**tail).clone(),
                }
                .validate()?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Parse the descriptor mini-language. The inverse of [`descriptor`](Self::descriptor).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::InvalidDescriptor(s.to_string(), msg.to_string());
        if s == "dexp" {
            return Ok(Self::doubly_exponential());
        }
        if s == "altomare" {
            return Ok(Self::altomare());
        }
        if s == "paperconstruction" {
            return Ok(Self {
                family: SequenceFamily::Paper {
                    schedule: Schedule::paper(),
                },
            });
        }
        if let Some(rest) = s.strip_prefix("const:") {
            let base = rest.parse().map_err(|_| bad("bad constant base"))?;
            return Self::constant(base);
        }
        if let Some(rest) = s.strip_prefix("affine:") {
            let parts = parse_u64_list(rest, "affine parameter")?;
            if parts.len() != 2 {
                return Err(bad("affine takes exactly `a,c`"));
            }
            return Self::affine(parts[0], parts[1]);
        }
        if let Some(rest) = s.strip_prefix("powfloor:") {
            let (alpha_s, c_s) = rest.split_once(',').ok_or_else(|| bad("powfloor takes `alpha,c`"))?;
            let alpha = Alpha::parse_decimal(alpha_s.trim())?;
            let offset = c_s.trim().parse().map_err(|_| bad("bad powfloor offset"))?;
            return Self::pow_floor(alpha, offset);
        }
        if let Some(rest) = s.strip_prefix("geom:") {
            let ratio = rest.parse().map_err(|_| bad("bad geometric ratio"))?;
            return Self::geometric(ratio);
        }
        if let Some(rest) = s.strip_prefix("scaled:") {
            let mut triples = Vec::new();
            for stage in rest.split(';') {
                let parts: Vec<&str> = stage.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad("each scaled stage is `l,b,w`"));
                }
                let l = BigUint::from_str(parts[0].trim()).map_err(|_| bad("bad repeat count"))?;
                let b = parts[1].trim().parse().map_err(|_| bad("bad base"))?;
                let w = parts[2].trim().parse().map_err(|_| bad("bad width"))?;
                triples.push((l, b, w));
            }
            let monotone = triples.windows(2).all(|p| p[0].1 <= p[1].1);
            let (schedule, _violations) = Schedule::scaled(&triples)?;
            return Ok(Self {
                family: SequenceFamily::Scaled {
                    schedule,
                    triples,
                    monotone,
                },
            });
        }
        if let Some(rest) = s.strip_prefix("list:") {
            let (head_s, tail_s) = rest
                .split_once(";tail=")
                .ok_or_else(|| bad("list needs `;tail=<descriptor>`"))?;
            let head = parse_u64_list(head_s, "list value")?;
            let tail = Self::parse(tail_s)?;
            return Self::new(SequenceFamily::Explicit {
                head,
                tail: Box::new(tail.family),
            });
        }
        Err(bad("unknown family"))
    }

    /// Canonical descriptor string; `parse(descriptor()) == self`.
    pub fn descriptor(&self) -> String {
        match &self.family {
            SequenceFamily::Constant { base } => format!("const:{base}"),
            SequenceFamily::Affine { slope, offset } => format!("affine:{slope},{offset}"),
            SequenceFamily::PowFloor { alpha, offset } => format!("powfloor:{alpha},{offset}"),
            SequenceFamily::Geometric { ratio } => format!("geom:{ratio}"),
            SequenceFamily::DoublyExponential => "dexp".into(),
            SequenceFamily::Altomare => "altomare".into(),
            SequenceFamily::Explicit { head, tail } => {
                let head_s: Vec<String> = head.iter().map(|v| v.to_string()).collect();
                let tail_s = BasicSequence {
                    family: (**tail).clone(),
                }
                .descriptor();
                format!("list:{};tail={}", head_s.join(","), tail_s)
            }
            SequenceFamily::Paper { .. } => "paperconstruction".into(),
            SequenceFamily::Scaled { triples, .. } => {
                let parts: Vec<String> = triples
                    .iter()
                    .map(|(l, b, w)| format!("{l},{b},{w}"))
                    .collect();
                format!("scaled:{}", parts.join(";"))
            }
        }
    }

    /// q_n, which may exceed machine range.
    pub fn q_val(&self, n: u64) -> Result<QVal> {
        debug_assert!(n >= 1, "positions are 1-based");
        match &self.family {
            SequenceFamily::Constant { base } => Ok(QVal::Small(*base)),
            SequenceFamily::Affine { slope, offset } => match slope.checked_mul(n).and_then(|v| v.checked_add(*offset)) {
                Some(v) => Ok(QVal::Small(v)),
                None => Ok(QVal::Big(BigUint::from(*slope) * n + *offset)),
            },
            SequenceFamily::PowFloor { alpha, offset } => {
                if alpha.num == 1 && alpha.den == 2 {
                    if let Some(v) = isqrt_u64(n).checked_add(*offset) {
                        return Ok(QVal::Small(v));
                    }
                    return Ok(QVal::Big(BigUint::from(isqrt_u64(n)) + *offset));
                }
                let m = alpha.floor_pow(n);
                match m.to_u64().and_then(|v| v.checked_add(*offset)) {
                    Some(v) => Ok(QVal::Small(v)),
                    None => Ok(QVal::Big(m + *offset)),
                }
            }
            SequenceFamily::Geometric { ratio } => {
                let bits = 64 - ratio.leading_zeros() as u64;
                if bits * n <= 63 {
                    Ok(QVal::Small(ratio.pow(n as u32)))
                } else {
                    let exp = u32::try_from(n)
                        .ok()
                        .filter(|_| n * bits <= 1 << 26)
                        .ok_or_else(|| Error::ValueTooLarge(format!("q_{n} of geom:{ratio}")))?;
                    Ok(QVal::Big(BigUint::from(*ratio).pow(exp)))
                }
            }
            SequenceFamily::DoublyExponential => {
                if n <= 5 {
                    Ok(QVal::Small(1u64 << (1u64 << n)))
                } else if n <= 26 {
                    Ok(QVal::Big(BigUint::one() << (1u64 << n)))
                } else {
                    Err(Error::ValueTooLarge(format!("q_{n} of dexp")))
                }
            }
            SequenceFamily::Altomare => Ok(QVal::Small(altomare_q(n))),
            SequenceFamily::Explicit { head, tail } => {
                if n as usize <= head.len() {
                    Ok(QVal::Small(head[n as usize - 1]))
                } else {
                    BasicSequence {
                        family: (**tail).clone(),
                    }
                    .q_val(n)
                }
            }
            SequenceFamily::Paper { schedule } | SequenceFamily::Scaled { schedule, .. } => {
                Ok(QVal::Small(schedule.q_at(&BigUint::from(n))?))
            }
        }
    }

    /// q_n as an exact big integer.
    pub fn q_at(&self, n: u64) -> Result<BigUint> {
        Ok(self.q_val(n)?.to_biguint())
    }

    /// q at an unbounded position; only construction-backed sequences have
    /// interesting radices out there.
    pub fn q_at_big(&self, n: &BigUint) -> Result<BigUint> {
        match &self.family {
            SequenceFamily::Paper { schedule } | SequenceFamily::Scaled { schedule, .. } => {
                Ok(BigUint::from(schedule.q_at(n)?))
            }
            SequenceFamily::Constant { base } => Ok(BigUint::from(*base)),
            SequenceFamily::Affine { slope, offset } => Ok(BigUint::from(*slope) * n + *offset),
            _ => {
                let small: u64 = n
                    .try_into()
                    .map_err(|_| Error::ValueTooLarge(format!("position {n}")))?;
                self.q_at(small)
            }
        }
    }

    fn q_f64(&self, n: u64) -> Result<f64> {
        match self.q_val(n) {
            Ok(q) => Ok(q.to_f64()),
            // a radix too large to materialize is +inf for float work
            Err(Error::ValueTooLarge(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }

    /// Positions where the sequence stops being defined (finite schedules).
    pub fn domain_end(&self) -> Option<BigUint> {
        match &self.family {
            SequenceFamily::Scaled { schedule, .. } => schedule.end(),
            _ => None,
        }
    }

    /// Whether q is provably non-decreasing (used to flag analytic
    /// tail-index results and to justify convergence tail bounds).
    pub fn provably_nondecreasing(&self) -> bool {
        match &self.family {
            SequenceFamily::Constant { .. }
            | SequenceFamily::Affine { .. }
            | SequenceFamily::PowFloor { .. }
            | SequenceFamily::Geometric { .. }
            | SequenceFamily::DoublyExponential
            | SequenceFamily::Paper { .. } => true,
            SequenceFamily::Altomare => false,
            SequenceFamily::Scaled { monotone, .. } => *monotone,
            SequenceFamily::Explicit { head, tail } => {
                let tail_seq = BasicSequence {
                    family: (**tail).clone(),
                };
                if !head.windows(2).all(|w| w[0] <= w[1]) || !tail_seq.provably_nondecreasing() {
                    return false;
                }
                match head.last() {
                    None => true,
                    Some(&last) => match tail_seq.q_val(head.len() as u64 + 1) {
                        // q >= last, i.e. not q <= last - 1
                        Ok(q) => !q.le_u64(last - 1),
                        Err(_) => false,
                    },
                }
            }
        }
    }

    /// Whether q_n tends to infinity.
    pub fn infinite_in_limit(&self) -> bool {
        match &self.family {
            SequenceFamily::Constant { .. } | SequenceFamily::Scaled { .. } => false,
            SequenceFamily::Explicit { tail, .. } => BasicSequence {
                family: (**tail).clone(),
            }
            .infinite_in_limit(),
            _ => true,
        }
    }

    /// Exact S(n, k) = sum_{j=1..n} 1/(q_j ... q_{j+k-1}).
    pub fn partial_sum(&self, n: u64, k: u32) -> Result<BigRational> {
        if n == 0 {
            return Ok(BigRational::zero());
        }
        let k = k.max(1) as u64;
        let mut window: VecDeque<BigUint> = VecDeque::with_capacity(k as usize);
        let mut prod = BigUint::one();
        for j in 1..=k {
            let q = self.q_at(j)?;
            prod *= &q;
            window.push_back(q);
        }
        let mut groups: BTreeMap<BigUint, u64> = BTreeMap::new();
        for j in 1..=n {
            *groups.entry(prod.clone()).or_insert(0) += 1;
            if j < n {
                let old = window.pop_front().expect("window nonempty");
                prod /= &old;
                let q = self.q_at(j + k)?;
                prod *= &q;
                window.push_back(q);
            }
        }
        Ok(sum_reciprocal_groups(groups))
    }

    /// Exact S(n, k, p) over strided windows with stride k and phase p in [1, k].
    pub fn partial_sum_strided(&self, n: u64, k: u32, p: u64) -> Result<BigRational> {
        let k64 = k.max(1) as u64;
        assert!(p >= 1 && p <= k64, "phase must lie in [1, k]");
        let mut groups: BTreeMap<BigUint, u64> = BTreeMap::new();
        for j in 0..=rho(n, k64) {
            let start = j * k64 + p;
            let mut prod = BigUint::one();
            for off in 0..k64 {
                prod *= self.q_at(start + off)?;
            }
            *groups.entry(prod).or_insert(0) += 1;
        }
        Ok(sum_reciprocal_groups(groups))
    }

    /// f64 S(n, k), with the value at n/2 as a second return for growth
    /// diagnostics.
    pub fn partial_sum_f64(&self, n: u64, k: u32) -> Result<(f64, f64)> {
        let k = k.max(1) as u64;
        let mut window: VecDeque<f64> = VecDeque::with_capacity(k as usize);
        let mut prod = 1.0f64;
        for j in 1..=k {
            let q = self.q_f64(j)?;
            prod *= q;
            window.push_back(q);
        }
        let mut sum = 0.0;
        let mut at_half = 0.0;
        let half = n / 2;
        for j in 1..=n {
            if prod.is_finite() && prod > 0.0 {
                sum += 1.0 / prod;
            }
            if j == half {
                at_half = sum;
            }
            if j < n {
                let old = window.pop_front().expect("window nonempty");
                prod /= old;
                let q = self.q_f64(j + k)?;
                prod *= q;
                window.push_back(q);
            }
        }
        Ok((sum, at_half))
    }

    /// f64 strided sum with its half-horizon checkpoint.
    pub fn partial_sum_strided_f64(&self, n: u64, k: u32, p: u64) -> Result<(f64, f64)> {
        let k64 = k.max(1) as u64;
        assert!(p >= 1 && p <= k64);
        let mut sum = 0.0;
        let mut at_half = 0.0;
        let half_rho = if n >= 2 { rho(n / 2, k64) } else { u64::MAX };
        for j in 0..=rho(n, k64) {
            let start = j * k64 + p;
            let mut prod = 1.0f64;
            for off in 0..k64 {
                prod *= self.q_f64(start + off)?;
            }
            if prod.is_finite() && prod > 0.0 {
                sum += 1.0 / prod;
            }
            if n >= 2 && j == half_rho {
                at_half = sum;
            }
        }
        Ok((sum, at_half))
    }

    /// Least m <= horizon with q_n > threshold for all n in [m, horizon].
    pub fn tail_index(&self, threshold: u64, horizon: u64) -> Result<Option<TailIndex>> {
        assert!(horizon >= 1);
        let mut m = 1u64;
        for n in 1..=horizon {
            let below = match self.q_val(n) {
                Ok(q) => q.le_u64(threshold),
                Err(Error::ValueTooLarge(_)) => false,
                Err(e) => return Err(e),
            };
            if below {
                m = n + 1;
            }
        }
        if m > horizon {
            return Ok(None);
        }
        let confidence = if self.provably_nondecreasing() {
            Confidence::Analytic
        } else {
            Confidence::Estimate
        };
        Ok(Some(TailIndex {
            index: m,
            confidence,
        }))
    }

    /// Classify k-divergence. Closed-form families get analytic verdicts;
    /// everything else gets a numeric estimate with an explicit
    /// `Inconclusive` escape.
    pub fn classify_divergence(
        &self,
        k: u32,
        horizon: u64,
        strong: bool,
    ) -> Result<DivergenceReport> {
        self.classify_divergence_with(k, horizon, strong, &ClassifyConfig::default())
    }

    pub fn classify_divergence_with(
        &self,
        k: u32,
        horizon: u64,
        strong: bool,
        config: &ClassifyConfig,
    ) -> Result<DivergenceReport> {
        if (horizon as u128) < k as u128 || k == 0 {
            return Err(Error::InvalidHorizon { horizon, k });
        }
        let (value, at_half) = self.partial_sum_f64(horizon, k)?;
        let growth = value - at_half;
        let analytic = self.analytic_verdict(k, horizon);
        let (kind, verdict, q_inf, tail_bound) = match analytic {
            Some(AnalyticOutcome::Divergent) => {
                (ReportKind::Analytic, Verdict::Divergent, None, None)
            }
            Some(AnalyticOutcome::Convergent { tail_bound }) => (
                ReportKind::Analytic,
                Verdict::Convergent,
                Some(value),
                Some(tail_bound),
            ),
            None => {
                let verdict = if growth >= config.growth_threshold {
                    Verdict::Divergent
                } else {
                    // bounded-looking, but nothing rigorous backs a limit claim
                    Verdict::Inconclusive
                };
                (ReportKind::NumericEstimate, verdict, None, None)
            }
        };
        let per_phase = if strong {
            let mut phases = Vec::with_capacity(k as usize);
            for p in 1..=k as u64 {
                let (pv, ph) = self.partial_sum_strided_f64(horizon, k, p)?;
                let pg = pv - ph;
                let pverdict = match kind {
                    ReportKind::Analytic => verdict,
                    ReportKind::NumericEstimate => {
                        if pg >= config.growth_threshold {
                            Verdict::Divergent
                        } else {
                            Verdict::Inconclusive
                        }
                    }
                };
                phases.push(PhaseReport {
                    p,
                    value_at_horizon: pv,
                    growth_late: pg,
                    verdict: pverdict,
                });
            }
            Some(phases)
        } else {
            None
        };
        Ok(DivergenceReport {
            descriptor: self.descriptor(),
            kind,
            k,
            horizon,
            value_at_horizon: value,
            growth_late: growth,
            verdict,
            q_infinity_estimate: q_inf,
            tail_bound,
            per_phase,
        })
    }

    fn analytic_verdict(&self, k: u32, horizon: u64) -> Option<AnalyticOutcome> {
        let h = horizon as f64;
        match &self.family {
            SequenceFamily::Constant { .. } => Some(AnalyticOutcome::Divergent),
            SequenceFamily::Affine { slope, offset } => {
                if k == 1 {
                    Some(AnalyticOutcome::Divergent)
                } else {
                    // terms <= (a j + c)^-k, integral comparison
                    let a = *slope as f64;
                    let c = *offset as f64;
                    let tail = (a * h + c).powi(1 - k as i32) / (a * (k as f64 - 1.0));
                    Some(AnalyticOutcome::Convergent { tail_bound: tail })
                }
            }
            SequenceFamily::PowFloor { alpha, .. } => {
                // q_j >= j^alpha for offset >= 1, so terms <= j^(-alpha k)
                if (alpha.num as u64) * k as u64 <= alpha.den as u64 {
                    Some(AnalyticOutcome::Divergent)
                } else {
                    let ak = alpha.as_f64() * k as f64;
                    Some(AnalyticOutcome::Convergent {
                        tail_bound: h.powf(1.0 - ak) / (ak - 1.0),
                    })
                }
            }
            SequenceFamily::Geometric { ratio } => {
                // the window products form a geometric series in j
                let r = *ratio as f64;
                let rk = r.powi(-(k as i32));
                let first_omitted =
                    r.powf(-((horizon as f64 + 1.0) * k as f64 + (k as f64) * (k as f64 - 1.0) / 2.0));
                Some(AnalyticOutcome::Convergent {
                    tail_bound: first_omitted / (1.0 - rk),
                })
            }
            SequenceFamily::DoublyExponential => {
                // term_j = 2^(-2^j (2^k - 1)) decays faster than geometrically
                let exponent = -((2f64).powi(horizon as i32 + 1)) * ((2f64).powi(k as i32) - 1.0);
                Some(AnalyticOutcome::Convergent {
                    tail_bound: 2.0 * exponent.exp2(),
                })
            }
            // stage i contributes ~ l_i |x_i| (2i)^-k, unbounded in i for every k
            SequenceFamily::Paper { .. } => Some(AnalyticOutcome::Divergent),
            SequenceFamily::Altomare
            | SequenceFamily::Explicit { .. }
            | SequenceFamily::Scaled { .. } => None,
        }
    }
}

enum AnalyticOutcome {
    Divergent,
    Convergent { tail_bound: f64 },
}

/// rho(n, k) = ceil(n/k) - 1: the largest i with i < n/k.
pub fn rho(n: u64, k: u64) -> u64 {
    assert!(n >= 1 && k >= 1);
    (n - 1) / k
}

fn sum_reciprocal_groups(groups: BTreeMap<BigUint, u64>) -> BigRational {
    let mut sum = BigRational::zero();
    for (prod, count) in groups {
        sum += Ratio::new(BigInt::from(count), BigInt::from(prod));
    }
    sum
}

fn altomare_q(n: u64) -> u64 {
    let ln2 = {
        let l = (n as f64).ln();
        l * l
    };
    let v = match n % 4 {
        0 => quartic_root_floor(n),
        1 => ((n as f64).powf(0.25) * ln2).floor() as u64,
        2 => pow34_floor(n),
        _ => ((n as f64).powf(0.75) * ln2).floor() as u64,
    };
    v.max(2)
}

/// floor(n^(1/4)) exactly.
fn quartic_root_floor(n: u64) -> u64 {
    let mut x = (n as f64).powf(0.25) as u64;
    let p4 = |x: u64| x.checked_mul(x).and_then(|s| s.checked_mul(s));
    while p4(x).map(|s| s > n).unwrap_or(true) {
        x -= 1;
    }
    while p4(x + 1).map(|s| s <= n).unwrap_or(false) {
        x += 1;
    }
    x
}

/// floor(n^(3/4)) exactly: largest m with m^4 <= n^3.
fn pow34_floor(n: u64) -> u64 {
    let n3 = (n as u128).pow(3);
    let mut x = (n as f64).powf(0.75) as u128;
    let p4 = |x: u128| x.checked_pow(4);
    while p4(x).map(|s| s > n3).unwrap_or(true) {
        x -= 1;
    }
    while p4(x + 1).map(|s| s <= n3).unwrap_or(false) {
        x += 1;
    }
    x as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Analytic,
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TailIndex {
    pub index: u64,
    pub confidence: Confidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Analytic,
    NumericEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Divergent,
    Convergent,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport {
    pub p: u64,
    pub value_at_horizon: f64,
    pub growth_late: f64,
    pub verdict: Verdict,
}

/// Outcome of a divergence classification at a finite horizon.
#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub descriptor: String,
    pub kind: ReportKind,
    pub k: u32,
    pub horizon: u64,
    pub value_at_horizon: f64,
    pub growth_late: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_infinity_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_phase: Option<Vec<PhaseReport>>,
}

#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    /// growth of the partial sum over the second half of the horizon below
    /// which a sequence merely *looks* bounded
    pub growth_threshold: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            growth_threshold: 0.01,
        }
    }
}
