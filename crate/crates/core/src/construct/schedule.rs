//! Stage schedules that drive the concatenated digit constructions.
//!
//! A schedule is a list of stages (l_i, b_i, x_i): stage i contributes l_i
//! copies of the word x_i, every digit carrying radix q_n = b_i. Cumulative
//! lengths L_i = sum l_j |x_j| are kept exact; position arithmetic never
//! materializes a word.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num::{BigRational, BigUint, One, Zero};

use super::cbw::CbwIndex;
use crate::error::{Error, Result};

/// The word a stage repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordShape {
    Explicit(Vec<u64>),
    /// Canonical C(b, w).
    Cword { b: u64, w: u64 },
}

impl WordShape {
    pub fn len(&self) -> BigUint {
        match self {
            WordShape::Explicit(word) => BigUint::from(word.len() as u64),
            WordShape::Cword { b, w } => BigUint::from(*b).pow(*w as u32) * *w,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, WordShape::Explicit(w) if w.is_empty())
    }
}

/// One stage of a schedule, with derived lengths.
#[derive(Clone)]
pub struct Stage {
    /// l_i: number of copies of the word
    pub repeats: BigUint,
    /// b_i: radix for every position of the stage
    pub base: u64,
    pub word: WordShape,
    /// diagnostic parameters (used by the growth-condition ratios)
    pub eps: BigRational,
    pub order_k: u64,
    pub p: u64,
    /// |x_i|
    pub word_len: BigUint,
    /// L_i
    pub cumulative_end: BigUint,
}

pub enum ScheduleKind {
    /// x_1 = (0,1), l_1 = 0; for i >= 2: b_i = 2i, x_i = C(2i, (2i+1)^2),
    /// l_i = (2i)^(9i+8); extended lazily as positions demand.
    Paper,
    /// Finite user-supplied (l_i, b_i, w_i) stages.
    Scaled,
}

pub struct Schedule {
    pub kind: ScheduleKind,
    stages: RwLock<Vec<Stage>>,
    indexes: RwLock<HashMap<(u64, u64), Arc<CbwIndex>>>,
}

fn paper_stage(i: u64, prev_end: &BigUint) -> Stage {
    assert!(i >= 1);
    if i == 1 {
        return Stage {
            repeats: BigUint::zero(),
            base: 2,
            word: WordShape::Explicit(vec![0, 1]),
            eps: BigRational::new(1.into(), 2.into()),
            order_k: 1,
            p: 2,
            word_len: BigUint::from(2u8),
            cumulative_end: prev_end.clone(),
        };
    }
    let b = 2 * i;
    let w = (2 * i + 1) * (2 * i + 1);
    let repeats = BigUint::from(b).pow((9 * i + 8) as u32);
    let word = WordShape::Cword { b, w };
    let word_len = word.len();
    let cumulative_end = prev_end + &repeats * &word_len;
    Stage {
        repeats,
        base: b,
        word,
        eps: BigRational::new(1.into(), (2 * i as i64 + 1).into()),
        order_k: 2 * i + 1,
        p: b,
        word_len,
        cumulative_end,
    }
}

impl Schedule {
    pub fn paper() -> Arc<Self> {
        let schedule = Schedule {
            kind: ScheduleKind::Paper,
            stages: RwLock::new(Vec::new()),
            indexes: RwLock::new(HashMap::new()),
        };
        {
            let mut stages = schedule.stages.write().unwrap();
            let mut end = BigUint::zero();
            for i in 1..=3u64 {
                let stage = paper_stage(i, &end);
                end = stage.cumulative_end.clone();
                stages.push(stage);
            }
        }
        Arc::new(schedule)
    }

    /// Build a finite schedule from (l_i, b_i, w_i) triples. Returns the
    /// schedule together with the list of shape-constraint violations
    /// (non-decreasing l and b, b >= 2, w odd); a violated shape is reported
    /// but the digits remain well-defined.
    pub fn scaled(triples: &[(BigUint, u64, u64)]) -> Result<(Arc<Self>, Vec<String>)> {
        if triples.is_empty() {
            return Err(Error::InvalidConfig("scaled schedule needs at least one stage".into()));
        }
        let mut violations = Vec::new();
        let mut stages = Vec::with_capacity(triples.len());
        let mut end = BigUint::zero();
        for (idx, (l, b, w)) in triples.iter().enumerate() {
            let i = idx as u64 + 1;
            if *b < 2 {
                return Err(Error::InvalidConfig(format!("stage {i}: base {b} must be >= 2")));
            }
            if *w == 0 || *w % 2 == 0 {
                // slot parity alternation, and with it the whole odd-position
                // analysis, needs odd word widths
                return Err(Error::InvalidConfig(format!(
                    "stage {i}: word width {w} must be odd and positive"
                )));
            }
            if idx > 0 {
                if *l < triples[idx - 1].0 {
                    violations.push(format!("stage {i}: repeats decrease ({} -> {})", triples[idx - 1].0, l));
                }
                if *b < triples[idx - 1].1 {
                    violations.push(format!("stage {i}: base decreases ({} -> {})", triples[idx - 1].1, b));
                }
            }
            let word = WordShape::Cword { b: *b, w: *w };
            let word_len = word.len();
            end = &end + l * &word_len;
            stages.push(Stage {
                repeats: l.clone(),
                base: *b,
                word,
                eps: if i == 1 {
                    BigRational::new(1.into(), 2.into())
                } else {
                    BigRational::new(1.into(), (2 * i as i64 + 1).into())
                },
                order_k: 2 * i + 1,
                p: *b,
                word_len,
                cumulative_end: end.clone(),
            });
        }
        Ok((
            Arc::new(Schedule {
                kind: ScheduleKind::Scaled,
                stages: RwLock::new(stages),
                indexes: RwLock::new(HashMap::new()),
            }),
            violations,
        ))
    }

    /// Total length, None when the schedule is unbounded.
    pub fn end(&self) -> Option<BigUint> {
        match self.kind {
            ScheduleKind::Paper => None,
            ScheduleKind::Scaled => {
                let stages = self.stages.read().unwrap();
                Some(stages.last().map(|s| s.cumulative_end.clone()).unwrap_or_default())
            }
        }
    }

    pub fn stage_count(&self) -> usize {
        self.stages.read().unwrap().len()
    }

    pub fn stage(&self, i: usize) -> Option<Stage> {
        self.ensure_stage_index(i);
        self.stages.read().unwrap().get(i).cloned()
    }

    fn ensure_stage_index(&self, i: usize) {
        if matches!(self.kind, ScheduleKind::Scaled) {
            return;
        }
        let mut stages = self.stages.write().unwrap();
        while stages.len() <= i {
            let end = stages.last().map(|s| s.cumulative_end.clone()).unwrap_or_default();
            let next = paper_stage(stages.len() as u64 + 1, &end);
            stages.push(next);
        }
    }

    fn ensure_covers(&self, n: &BigUint) -> Result<()> {
        match self.kind {
            ScheduleKind::Scaled => {
                let stages = self.stages.read().unwrap();
                let end = stages.last().map(|s| s.cumulative_end.clone()).unwrap_or_default();
                if n > &end {
                    return Err(Error::BeyondSchedule {
                        position: n.to_string(),
                        schedule_len: end.to_string(),
                    });
                }
                Ok(())
            }
            ScheduleKind::Paper => {
                let mut stages = self.stages.write().unwrap();
                while stages.last().map(|s| &s.cumulative_end < n).unwrap_or(true) {
                    let end = stages.last().map(|s| s.cumulative_end.clone()).unwrap_or_default();
                    let next = paper_stage(stages.len() as u64 + 1, &end);
                    stages.push(next);
                }
                Ok(())
            }
        }
    }

    /// Stage index and offset (0-based within the stage) for position n.
    fn locate(&self, n: &BigUint) -> Result<(usize, BigUint)> {
        if n.is_zero() {
            return Err(Error::BeyondSchedule {
                position: "0".into(),
                schedule_len: "positions are 1-based".into(),
            });
        }
        self.ensure_covers(n)?;
        let stages = self.stages.read().unwrap();
        // few stages: linear scan is already logarithmic in position
        let mut prev_end = BigUint::zero();
        for (i, stage) in stages.iter().enumerate() {
            if n <= &stage.cumulative_end {
                return Ok((i, n - &prev_end - BigUint::one()));
            }
            prev_end = stage.cumulative_end.clone();
        }
        unreachable!("ensure_covers extended the schedule past n");
    }

    pub fn q_at(&self, n: &BigUint) -> Result<u64> {
        let (i, _) = self.locate(n)?;
        Ok(self.stages.read().unwrap()[i].base)
    }

    fn cbw_index(&self, b: u64, w: u64) -> Arc<CbwIndex> {
        if let Some(idx) = self.indexes.read().unwrap().get(&(b, w)) {
            return idx.clone();
        }
        let idx = Arc::new(CbwIndex::new(b, w));
        self.indexes.write().unwrap().insert((b, w), idx.clone());
        idx
    }

    /// Digit and radix at 1-based position n.
    pub fn digit_at(&self, n: &BigUint) -> Result<(u64, u64)> {
        let (i, offset) = self.locate(n)?;
        let stage = self.stages.read().unwrap()[i].clone();
        let within_word = &offset % &stage.word_len;
        let digit = match &stage.word {
            WordShape::Explicit(word) => {
                let idx: u64 = within_word.try_into().expect("explicit word offset fits u64");
                word[idx as usize]
            }
            WordShape::Cword { b, w } => {
                let index = self.cbw_index(*b, *w);
                index.digit_at(&(within_word + BigUint::one()))?
            }
        };
        Ok((digit, stage.base))
    }

    /// Sequential reader over positions [start, ...], caching the current
    /// slot block so streaming costs one slot selection per w digits.
    pub fn stream(self: &Arc<Self>, start: BigUint) -> ScheduleStream {
        ScheduleStream {
            schedule: self.clone(),
            next: start,
            cached: None,
        }
    }
}

pub struct ScheduleStream {
    schedule: Arc<Schedule>,
    next: BigUint,
    /// (stage index, slot index within word copies, block digits)
    cached: Option<(usize, BigUint, Vec<u64>)>,
}

impl ScheduleStream {
    /// Next (digit, q) pair, or Err(BeyondSchedule) at the end.
    pub fn next_digit(&mut self) -> Result<(u64, u64)> {
        let n = self.next.clone();
        let (i, offset) = self.schedule.locate(&n)?;
        let stage = self.schedule.stages.read().unwrap()[i].clone();
        let within_word = &offset % &stage.word_len;
        let digit = match &stage.word {
            WordShape::Explicit(word) => {
                let idx: u64 = within_word.try_into().expect("explicit word offset fits u64");
                word[idx as usize]
            }
            WordShape::Cword { b, w } => {
                let slot = &within_word / *w;
                let in_slot: u64 = (&within_word % *w).try_into().expect("slot offset fits");
                let hit = matches!(&self.cached, Some((ci, cs, _)) if *ci == i && cs == &slot);
                if !hit {
                    let index = self.schedule.cbw_index(*b, *w);
                    let (class, rank) = super::cbw::slot_class_rank(&slot);
                    let block = index.block_at(class, &rank);
                    self.cached = Some((i, slot.clone(), block));
                }
                self.cached.as_ref().unwrap().2[in_slot as usize]
            }
        };
        self.next += BigUint::one();
        Ok((digit, stage.base))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_schedule_shapes() {
        let schedule = Schedule::paper();
        let s1 = schedule.stage(0).unwrap();
        assert!(s1.repeats.is_zero());
        assert_eq!(s1.cumulative_end, BigUint::zero());
        let s2 = schedule.stage(1).unwrap();
        assert_eq!(s2.base, 4);
        assert_eq!(s2.word_len, BigUint::from(4u8).pow(25) * 25u8);
        assert_eq!(s2.repeats, BigUint::from(4u8).pow(26));
        let s3 = schedule.stage(2).unwrap();
        assert_eq!(s3.base, 6);
        assert_eq!(s3.repeats, BigUint::from(6u8).pow(35));
    }

    #[test]
    fn first_paper_digit_is_stage_two() {
        let schedule = Schedule::paper();
        let (digit, q) = schedule.digit_at(&BigUint::one()).unwrap();
        assert_eq!(q, 4);
        // slot 0 of C(4,25) is the lexicographically least zero-heavy block
        assert_eq!(digit, 0);
    }

    #[test]
    fn scaled_locate_and_bounds() {
        let triples = vec![
            (BigUint::from(2u8), 2, 3),
            (BigUint::from(2u8), 4, 3),
        ];
        let (schedule, violations) = Schedule::scaled(&triples).unwrap();
        assert!(violations.is_empty());
        // 2 * 24 + 2 * 192 = 432
        assert_eq!(schedule.end().unwrap(), BigUint::from(432u32));
        assert_eq!(schedule.q_at(&BigUint::from(48u8)).unwrap(), 2);
        assert_eq!(schedule.q_at(&BigUint::from(49u8)).unwrap(), 4);
        assert!(schedule.q_at(&BigUint::from(433u32)).is_err());
    }

    #[test]
    fn stream_matches_digit_at() {
        let triples = vec![(BigUint::from(3u8), 2, 3), (BigUint::from(3u8), 3, 3)];
        let (schedule, _) = Schedule::scaled(&triples).unwrap();
        let mut stream = schedule.stream(BigUint::one());
        let end: u64 = schedule.end().unwrap().try_into().unwrap();
        for n in 1..=end {
            let streamed = stream.next_digit().unwrap();
            let direct = schedule.digit_at(&BigUint::from(n)).unwrap();
            assert_eq!(streamed, direct, "position {n}");
        }
        assert!(stream.next_digit().is_err());
    }

    #[test]
    fn shape_violations_reported() {
        let triples = vec![
            (BigUint::from(3u8), 4, 3),
            (BigUint::from(1u8), 2, 3),
        ];
        let (_, violations) = Schedule::scaled(&triples).unwrap();
        assert_eq!(violations.len(), 2); // repeats decrease, base decreases

        let even = vec![(BigUint::from(1u8), 2, 4)];
        assert!(Schedule::scaled(&even).is_err());
    }
}
