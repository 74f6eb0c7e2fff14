//! Canonical concatenation order for the words C(b, w) and random access
//! into them without materialization.
//!
//! C(b, w) concatenates every base-b block of length w exactly once. Because
//! w is odd, a block placed at an even slot exposes its odd offsets at odd
//! global positions, while a block at an odd slot exposes its even offsets
//! there. The canonical order scores every block by
//!
//!   phi(Z) = (zeros(Z, odd) - 2 ones(Z, odd)) - (zeros(Z, even) - 2 ones(Z, even))
//!
//! and assigns the ceil(b^w / 2) highest-scoring blocks (ties resolved toward
//! lexicographically smaller blocks) to the even slots, each class then laid
//! out in lexicographic order. This partition maximizes
//! zeros-at-odd-positions - 2 * ones-at-odd-positions over all concatenation
//! orders, and it is computable per slot in time polynomial in w and log b,
//! which is what makes random access into words of length ~1e32 possible.

use std::cmp::Ordering;

use num::{BigUint, One, Zero};

use crate::error::{Error, Result};

/// Slot-parity class: a block at an even slot exposes its odd offsets at odd
/// global positions, a block at an odd slot its even offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotClass {
    Even,
    Odd,
}

/// Exact zero/one counts at odd global positions of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasCounts {
    pub zeros_odd: BigUint,
    pub ones_odd: BigUint,
}

impl BiasCounts {
    pub fn bias_ok(&self) -> bool {
        self.zeros_odd >= BigUint::from(2u8) * &self.ones_odd
    }
}

/// Per-digit contribution to (phi, u, s, v, t) at a given 0-based offset.
///
/// u/s: zeros/ones at odd offsets, v/t: zeros/ones at even offsets.
#[inline]
fn deltas(d: u64, level: usize) -> (i64, u8, u8, u8, u8) {
    let odd = level.is_multiple_of(2); // offset level+1 is odd
    match (d, odd) {
        (0, true) => (1, 1, 0, 0, 0),
        (0, false) => (-1, 0, 0, 1, 0),
        (1, true) => (-2, 0, 1, 0, 0),
        (1, false) => (2, 0, 0, 0, 1),
        _ => (0, 0, 0, 0, 0),
    }
}

/// Distribution of suffix statistics keyed by phi, for suffixes starting at
/// one fixed offset.
struct LevelTable {
    min_phi: i64,
    /// count[i]: number of suffixes with phi = min_phi + i
    count: Vec<BigUint>,
    /// ge[i]: number of suffixes with phi >= min_phi + i; ge[len] = 0
    ge: Vec<BigUint>,
    sum_u: Vec<BigUint>,
    sum_s: Vec<BigUint>,
    sum_v: Vec<BigUint>,
    sum_t: Vec<BigUint>,
}

impl LevelTable {
    fn idx(&self, phi: i64) -> Option<usize> {
        if phi < self.min_phi || phi >= self.min_phi + self.count.len() as i64 {
            None
        } else {
            Some((phi - self.min_phi) as usize)
        }
    }

    /// Number of suffixes with phi strictly greater than `phi`.
    fn count_gt(&self, phi: i64) -> BigUint {
        if phi < self.min_phi {
            return self.ge[0].clone();
        }
        let i = (phi - self.min_phi) as usize;
        if i + 1 >= self.ge.len() {
            BigUint::zero()
        } else {
            self.ge[i + 1].clone()
        }
    }

    fn count_eq(&self, phi: i64) -> BigUint {
        self.idx(phi)
            .map(|i| self.count[i].clone())
            .unwrap_or_else(BigUint::zero)
    }
}

/// Precomputed index for one (b, w): slot -> block selection and exact
/// position-parity statistics, all without materializing the word.
pub struct CbwIndex {
    b: u64,
    w: u64,
    n_blocks: BigUint,
    word_len: BigUint,
    /// phi threshold: every block with phi > theta lives in the even class
    theta: i64,
    /// number of phi == theta blocks (in lex order) that complete the even class
    tie_take: BigUint,
    tables: Vec<LevelTable>,
    subtree_size: Vec<BigUint>,
}

impl CbwIndex {
    pub fn new(b: u64, w: u64) -> Self {
        assert!(b >= 2, "base must be at least 2");
        assert!(w >= 1 && w % 2 == 1, "block length must be odd");
        let wl = w as usize;

        let mut tables: Vec<LevelTable> = Vec::with_capacity(wl + 1);
        tables.push(LevelTable {
            min_phi: 0,
            count: vec![BigUint::one()],
            ge: vec![BigUint::one(), BigUint::zero()],
            sum_u: vec![BigUint::zero()],
            sum_s: vec![BigUint::zero()],
            sum_v: vec![BigUint::zero()],
            sum_t: vec![BigUint::zero()],
        });
        // build from the last offset toward the front
        for level in (0..wl).rev() {
            let prev = &tables[wl - 1 - level];
            let (mut lo, mut hi) = (i64::MAX, i64::MIN);
            for d in 0..b.min(3) {
                let (df, ..) = deltas(d, level);
                lo = lo.min(prev.min_phi + df);
                hi = hi.max(prev.min_phi + prev.count.len() as i64 - 1 + df);
            }
            let span = (hi - lo + 1) as usize;
            let mut count = vec![BigUint::zero(); span];
            let mut sum_u = vec![BigUint::zero(); span];
            let mut sum_s = vec![BigUint::zero(); span];
            let mut sum_v = vec![BigUint::zero(); span];
            let mut sum_t = vec![BigUint::zero(); span];
            for d in 0..b {
                let (df, du, ds, dv, dt) = deltas(d, level);
                for i in 0..prev.count.len() {
                    if prev.count[i].is_zero() {
                        continue;
                    }
                    let j = (prev.min_phi + i as i64 + df - lo) as usize;
                    count[j] += &prev.count[i];
                    sum_u[j] += &prev.sum_u[i];
                    sum_s[j] += &prev.sum_s[i];
                    sum_v[j] += &prev.sum_v[i];
                    sum_t[j] += &prev.sum_t[i];
                    if du == 1 {
                        sum_u[j] += &prev.count[i];
                    }
                    if ds == 1 {
                        sum_s[j] += &prev.count[i];
                    }
                    if dv == 1 {
                        sum_v[j] += &prev.count[i];
                    }
                    if dt == 1 {
                        sum_t[j] += &prev.count[i];
                    }
                }
            }
            let mut ge = vec![BigUint::zero(); span + 1];
            for i in (0..span).rev() {
                ge[i] = &ge[i + 1] + &count[i];
            }
            tables.push(LevelTable {
                min_phi: lo,
                count,
                ge,
                sum_u,
                sum_s,
                sum_v,
                sum_t,
            });
        }
        tables.reverse(); // tables[l] now describes suffixes at offsets l+1..w

        let big_b = BigUint::from(b);
        let mut subtree_size = vec![BigUint::one(); wl + 1];
        for l in (0..wl).rev() {
            subtree_size[l] = &subtree_size[l + 1] * &big_b;
        }
        let n_blocks = subtree_size[0].clone();
        let word_len = &n_blocks * w;
        let even_slots = (&n_blocks + BigUint::one()) / BigUint::from(2u8);

        // threshold: walk phi downward until the even class is full
        let root = &tables[0];
        let mut got = BigUint::zero();
        let mut theta = root.min_phi;
        let mut tie_take = BigUint::zero();
        for i in (0..root.count.len()).rev() {
            let c = &root.count[i];
            if &got + c >= even_slots {
                theta = root.min_phi + i as i64;
                tie_take = &even_slots - &got;
                break;
            }
            got += c;
        }

        Self {
            b,
            w,
            n_blocks,
            word_len,
            theta,
            tie_take,
            tables,
            subtree_size,
        }
    }

    pub fn base(&self) -> u64 {
        self.b
    }

    pub fn width(&self) -> u64 {
        self.w
    }

    pub fn block_count(&self) -> &BigUint {
        &self.n_blocks
    }

    pub fn word_len(&self) -> &BigUint {
        &self.word_len
    }

    /// How many blocks of the phi subtree rooted after `level` chosen digits
    /// belong to the even class. `phi_prefix` is the phi of the chosen
    /// digits, `ties_before` the number of theta-tie blocks lexicographically
    /// before the subtree. Returns (even count, tie count in subtree).
    fn even_in_subtree(&self, level: usize, phi_prefix: i64, ties_before: &BigUint) -> (BigUint, BigUint) {
        let table = &self.tables[level];
        let gt = table.count_gt(self.theta - phi_prefix);
        let tie = table.count_eq(self.theta - phi_prefix);
        let included = if *ties_before >= self.tie_take {
            BigUint::zero()
        } else {
            (&self.tie_take - ties_before).min(tie.clone())
        };
        (gt + included, tie)
    }

    /// The `rank`-th block (0-based, lexicographic) of the given slot class.
    pub fn block_at(&self, class: SlotClass, rank: &BigUint) -> Vec<u64> {
        let wl = self.w as usize;
        let mut remaining = rank.clone();
        let mut phi_prefix = 0i64;
        let mut ties_before = BigUint::zero();
        let mut out = Vec::with_capacity(wl);
        for level in 0..wl {
            let mut placed = false;
            for d in 0..self.b {
                let (df, ..) = deltas(d, level);
                let (even_cnt, tie_cnt) =
                    self.even_in_subtree(level + 1, phi_prefix + df, &ties_before);
                let class_cnt = match class {
                    SlotClass::Even => even_cnt,
                    SlotClass::Odd => &self.subtree_size[level + 1] - &even_cnt,
                };
                if remaining < class_cnt {
                    out.push(d);
                    phi_prefix += df;
                    placed = true;
                    break;
                }
                remaining -= class_cnt;
                ties_before += tie_cnt;
            }
            assert!(placed, "rank out of range for slot class");
        }
        out
    }

    /// Digit at 1-based position `idx` of the canonical word.
    pub fn digit_at(&self, idx: &BigUint) -> Result<u64> {
        if idx.is_zero() || idx > &self.word_len {
            return Err(Error::BeyondSchedule {
                position: idx.to_string(),
                schedule_len: self.word_len.to_string(),
            });
        }
        let zero_based = idx - BigUint::one();
        let slot = &zero_based / self.w;
        let offset = (&zero_based % self.w)
            .try_into()
            .map(|o: u64| o as usize)
            .expect("offset fits");
        let (class, rank) = slot_class_rank(&slot);
        Ok(self.block_at(class, &rank)[offset])
    }

    /// Exact zeros/ones at odd positions of the full canonical word, by
    /// closed-form counting over the slot partition. Never materializes.
    pub fn analytic_bias(&self) -> BiasCounts {
        let root = &self.tables[0];
        let mut even_u = BigUint::zero();
        let mut even_s = BigUint::zero();
        let mut even_v = BigUint::zero();
        let mut even_t = BigUint::zero();
        for i in 0..root.count.len() {
            if root.min_phi + i as i64 > self.theta {
                even_u += &root.sum_u[i];
                even_s += &root.sum_s[i];
                even_v += &root.sum_v[i];
                even_t += &root.sum_t[i];
            }
        }

        // First tie_take blocks of the theta tie class in lex order.
        let mut remaining = self.tie_take.clone();
        let mut phi_prefix = 0i64;
        let (mut u_p, mut s_p, mut v_p, mut t_p) = (0u64, 0u64, 0u64, 0u64);
        let mut level = 0usize;
        'walk: while !remaining.is_zero() && level < self.w as usize {
            for d in 0..self.b {
                let (df, du, ds, dv, dt) = deltas(d, level);
                let need = self.theta - phi_prefix - df;
                let table = &self.tables[level + 1];
                let Some(i) = table.idx(need) else { continue };
                let c = table.count[i].clone();
                if c.is_zero() {
                    continue;
                }
                if c <= remaining {
                    even_u += &table.sum_u[i] + (u_p + du as u64) * &c;
                    even_s += &table.sum_s[i] + (s_p + ds as u64) * &c;
                    even_v += &table.sum_v[i] + (v_p + dv as u64) * &c;
                    even_t += &table.sum_t[i] + (t_p + dt as u64) * &c;
                    remaining -= c;
                    if remaining.is_zero() {
                        break 'walk;
                    }
                } else {
                    phi_prefix += df;
                    u_p += du as u64;
                    s_p += ds as u64;
                    v_p += dv as u64;
                    t_p += dt as u64;
                    level += 1;
                    continue 'walk;
                }
            }
            unreachable!("tie walk exhausted digits before placing all ties");
        }

        let per_offset = &self.n_blocks / self.b;
        let all_v = &per_offset * ((self.w - 1) / 2);
        let all_t = all_v.clone();
        BiasCounts {
            zeros_odd: even_u + (all_v - even_v),
            ones_odd: even_s + (all_t - even_t),
        }
    }

    /// Materialize the full word by enumerating and sorting all blocks.
    ///
    /// A second, independent construction of the same order; tests
    /// cross-check it against `digit_at`.
    pub fn materialize(&self, cap_digits: u128) -> Result<Vec<u64>> {
        let size: u128 = self
            .word_len
            .clone()
            .try_into()
            .map_err(|_| Error::MaterializationCapExceeded {
                size: u128::MAX,
                cap: cap_digits,
            })?;
        if size > cap_digits {
            return Err(Error::MaterializationCapExceeded {
                size,
                cap: cap_digits,
            });
        }
        let wl = self.w as usize;
        let n: u64 = self.n_blocks.clone().try_into().expect("fits after cap check");
        let mut blocks: Vec<Vec<u64>> = Vec::with_capacity(n as usize);
        let mut current = vec![0u64; wl];
        loop {
            blocks.push(current.clone());
            if !advance(&mut current, self.b) {
                break;
            }
        }
        debug_assert_eq!(blocks.len() as u64, n);
        blocks.sort_by(|a, z| match phi_of(z).cmp(&phi_of(a)) {
            Ordering::Equal => a.cmp(z),
            other => other,
        });
        let ecount: usize = n.div_ceil(2) as usize;
        let evens = {
            let mut e = blocks[..ecount].to_vec();
            e.sort();
            e
        };
        let odds = {
            let mut o = blocks[ecount..].to_vec();
            o.sort();
            o
        };
        let mut word = Vec::with_capacity(size as usize);
        for j in 0..evens.len() {
            word.extend_from_slice(&evens[j]);
            if j < odds.len() {
                word.extend_from_slice(&odds[j]);
            }
        }
        Ok(word)
    }
}

/// Lexicographic successor in place; false once the enumeration wraps.
fn advance(current: &mut [u64], b: u64) -> bool {
    for pos in (0..current.len()).rev() {
        if current[pos] + 1 < b {
            current[pos] += 1;
            return true;
        }
        current[pos] = 0;
    }
    false
}

/// phi score of a materialized block.
pub fn phi_of(block: &[u64]) -> i64 {
    let mut f = 0i64;
    for (i, &d) in block.iter().enumerate() {
        f += deltas(d, i).0;
    }
    f
}

/// Slot index -> (class, rank within class).
pub fn slot_class_rank(slot: &BigUint) -> (SlotClass, BigUint) {
    let two = BigUint::from(2u8);
    let rank = slot / &two;
    if (slot % &two).is_zero() {
        (SlotClass::Even, rank)
    } else {
        (SlotClass::Odd, rank)
    }
}
