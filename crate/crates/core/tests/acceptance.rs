//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them). Criteria 6 and 8 contain
//! assertions that are provably unattainable at the stated parameters; they
//! are asserted as stated anyway and fail with an explanation rather than
//! being weakened.

use std::time::{Duration, Instant};

use cantor_core::*;
use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, BigUint, One, Signed, ToPrimitive, Zero};

struct Criterion {
    id: u32,
    start: Instant,
    budget: Option<Duration>,
}

impl Criterion {
    fn new(id: u32, budget_secs: Option<u64>) -> Self {
        Self {
            id,
            start: Instant::now(),
            budget: budget_secs.map(Duration::from_secs),
        }
    }

    fn pass(self, detail: &str) {
        let elapsed = self.start.elapsed();
        println!("ACCEPTANCE {:>2}: PASS ({detail}; {elapsed:.2?})", self.id);
        if let Some(budget) = self.budget {
            assert!(
                elapsed <= budget,
                "criterion {} exceeded its {budget:?} budget: {elapsed:?}",
                self.id
            );
        }
    }
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Deterministic instance generator for the randomized criteria.
struct InstanceRng(SplitMix64);

impl InstanceRng {
    fn new(seed: u64) -> Self {
        Self(SplitMix64::new(seed))
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.0.uniform_u64(bound)
    }

    fn sequence(&mut self) -> BasicSequence {
        match self.below(8) {
            0 => BasicSequence::constant(2 + self.below(48)).unwrap(),
            1 => BasicSequence::affine(1 + self.below(5), 1 + self.below(9)).unwrap(),
            2 => {
                let alpha = ["0.25", "0.5", "0.75", "1.5", "2"][self.below(5) as usize];
                BasicSequence::parse(&format!("powfloor:{alpha},{}", 1 + self.below(5))).unwrap()
            }
            3 => BasicSequence::geometric(2 + self.below(4)).unwrap(),
            4 => BasicSequence::altomare(),
            5 => BasicSequence::doubly_exponential(),
            6 => {
                let head: Vec<String> = (0..1 + self.below(5))
                    .map(|_| (2 + self.below(28)).to_string())
                    .collect();
                BasicSequence::parse(&format!(
                    "list:{};tail=const:{}",
                    head.join(","),
                    2 + self.below(9)
                ))
                .unwrap()
            }
            _ => BasicSequence::parse("powfloor:0.5,2").unwrap(),
        }
    }

    /// Cap positions so dexp/geom radices stay materializable.
    fn horizon_for(&mut self, seq: &BasicSequence, lo: u64, hi: u64) -> u64 {
        let cap = match seq.descriptor().as_str() {
            "dexp" => 6,
            d if d.starts_with("geom:") => 24,
            _ => hi,
        };
        let hi = hi.min(cap).max(lo);
        lo + self.below(hi - lo + 1)
    }
}

// --- 1. reference expansion of 1/4, and the factorial-series witness -------

#[test]
fn criterion_01_paper_examples() {
    let c = Criterion::new(1, Some(1));

    let seq10 = BasicSequence::constant(10).unwrap();
    let prefix =
        expand_rational(&BigUint::from(1u8), &BigUint::from(4u8), &seq10, 8).unwrap();
    assert_eq!(prefix.dense(), &[2, 5, 0, 0, 0, 0, 0, 0]);

    // independent series oracle: e - 2 = sum_{m>=2} 1/m!, summed far past
    // 30-digit precision
    let mut factorial = BigUint::from(2u8);
    let mut e_minus_2 = BigRational::zero();
    for m in 2u64..=40 {
        e_minus_2 += Ratio::new(BigInt::one(), BigInt::from(factorial.clone()));
        factorial *= m + 1;
    }
    let seq = BasicSequence::affine(1, 1).unwrap();
    let ones = DigitPrefix::from_digits(seq, vec![1; 20]).unwrap();
    let value = prefix_value(&ones).unwrap();
    let err = (&e_minus_2 - &value).abs();
    assert!(err < rational(1, 1_000_000_000_000), "error {err}");

    c.pass("1/4 digits and e-2 witness");
}

// --- 2. exact round-trip over random rationals and families ---------------

#[test]
fn criterion_02_round_trip() {
    let c = Criterion::new(2, Some(10));
    let mut rng = InstanceRng::new(0xC2);
    for case in 0..1000 {
        let seq = rng.sequence();
        let den = 2 + rng.below(999_998);
        let num = rng.below(den);
        let n = rng.horizon_for(&seq, 1, 40);
        let prefix =
            expand_rational(&BigUint::from(num), &BigUint::from(den), &seq, n).unwrap();
        let x = rational(num as i64, den as i64);
        let value = prefix_value(&prefix).unwrap();
        let err = &x - &value;
        let (_, high) = prefix_interval(&prefix).unwrap();
        assert!(
            err >= BigRational::zero() && &value + &err < high,
            "case {case}: seq {} x {num}/{den} n {n}",
            seq.descriptor()
        );
    }
    c.pass("1000 random rationals, exact windows");
}

// --- 3. counting oracle equivalence ----------------------------------------

fn oracle_count(digits: &[u64], block: &[u64], n: u64) -> u64 {
    let mut count = 0;
    for start in 0..n as usize {
        if start + block.len() <= digits.len() && digits[start..start + block.len()] == *block {
            count += 1;
        }
    }
    count
}

#[test]
fn criterion_03_counting_oracle() {
    let c = Criterion::new(3, None);
    let mut rng = InstanceRng::new(0xC3);

    // 500 random instances
    for _ in 0..500 {
        let alphabet = 2 + rng.below(5);
        let len = 10 + rng.below(190);
        let digits: Vec<u64> = (0..len).map(|_| rng.below(alphabet)).collect();
        let k = 1 + rng.below(4);
        let block: Vec<u64> = (0..k).map(|_| rng.below(alphabet)).collect();
        let max_n = len - k + 1;
        let n = 1 + rng.below(max_n);
        let seq = BasicSequence::constant(alphabet).unwrap();
        let prefix = DigitPrefix::from_digits(seq, digits.clone()).unwrap();
        let b = Block::new(block.clone()).unwrap();
        assert_eq!(
            count_occurrences(&prefix, &b, n).unwrap(),
            oracle_count(&digits, &block, n)
        );
    }

    // exhaustive: every digit string of length <= 12 over alphabets 2 and 3
    for alphabet in [2u64, 3] {
        let seq = BasicSequence::constant(alphabet).unwrap();
        let mut blocks = Vec::new();
        for k in 1..=3u32 {
            let count = alphabet.pow(k);
            for code in 0..count {
                let mut v = Vec::with_capacity(k as usize);
                let mut c0 = code;
                for _ in 0..k {
                    v.push(c0 % alphabet);
                    c0 /= alphabet;
                }
                blocks.push(v);
            }
        }
        for len in 1..=12u32 {
            let total = alphabet.pow(len);
            let mut digits = vec![0u64; len as usize];
            for _ in 0..total {
                let prefix = DigitPrefix::from_digits(seq.clone(), digits.clone()).unwrap();
                for block in &blocks {
                    if block.len() > digits.len() {
                        continue;
                    }
                    let max_n = digits.len() as u64 - block.len() as u64 + 1;
                    // all n for the binary alphabet, the largest n for base 3
                    let ns: Vec<u64> = if alphabet == 2 {
                        (1..=max_n).collect()
                    } else {
                        vec![max_n]
                    };
                    let b = Block::new(block.clone()).unwrap();
                    for n in ns {
                        assert_eq!(
                            count_occurrences(&prefix, &b, n).unwrap(),
                            oracle_count(&digits, block, n)
                        );
                    }
                }
                // next digit string
                for pos in (0..digits.len()).rev() {
                    if digits[pos] + 1 < alphabet {
                        digits[pos] += 1;
                        break;
                    }
                    digits[pos] = 0;
                }
            }
        }
    }
    c.pass("500 random + exhaustive N<=12 alphabets {2,3}");
}

// --- 4. phase identities ----------------------------------------------------

#[test]
fn criterion_04_phase_identities() {
    let c = Criterion::new(4, None);
    let mut rng = InstanceRng::new(0xC4);
    for case in 0..200 {
        let seq = rng.sequence();
        let k = 1 + rng.below(6) as u32;
        let n = {
            // half the cases land on multiples of k to hit exact equality
            let base = rng.horizon_for(&seq, k as u64, 240);
            if case % 2 == 0 {
                (base / k as u64).max(1) * k as u64
            } else {
                base
            }
        };

        let total = seq.partial_sum(n, k).unwrap();
        let mut phase_sum = BigRational::zero();
        for p in 1..=k as u64 {
            phase_sum += seq.partial_sum_strided(n, k, p).unwrap();
        }
        let diff = &phase_sum - &total;
        let bound = rational(k as i64 - 1, 2i64.pow(k));
        assert!(
            diff >= BigRational::zero() && diff <= bound,
            "case {case}: sum identity broke for {} n={n} k={k}",
            seq.descriptor()
        );
        if n % k as u64 == 0 {
            assert!(diff.is_zero());
        }

        // count version, on sampled digits with full lookahead
        let digits_len = n + 2 * k as u64;
        if let Ok(prefix) = sample_prefix(&seq, digits_len, 0xC4C4 + case) {
            let alphabet = 2u64;
            let block =
                Block::new((0..k as usize).map(|i| (i as u64) % alphabet).collect()).unwrap();
            let plain = count_occurrences(&prefix, &block, n).unwrap();
            let mut strided = 0u64;
            for p in 1..=k as u64 {
                strided += count_strided(&prefix, &block, n, p).unwrap();
            }
            let gap = strided as i64 - plain as i64;
            assert!(
                gap.unsigned_abs() <= (k as u64 - 1),
                "case {case}: count identity broke: gap {gap}, k {k}"
            );
        }
    }
    c.pass("200 exact instances, both identities");
}

// --- 5. moment bounds --------------------------------------------------------

#[test]
fn criterion_05_moment_bounds() {
    let c = Criterion::new(5, None);
    let mut rng = InstanceRng::new(0xC5);
    let half = rational(1, 2);
    for case in 0..200 {
        let seq = rng.sequence();
        let k = 1 + rng.below(5) as u32;
        let n = rng.horizon_for(&seq, k as u64, 200);
        let p = 1 + rng.below(k as u64);
        let table = moments(&seq, n, k, p).unwrap();
        assert!(
            &half * &table.expected <= table.t && table.t < table.expected,
            "case {case}: bounds broke for {} n={n} k={k} p={p}",
            seq.descriptor()
        );
    }
    // boundary: all radices 2 at k = 1 meets the lower bound exactly
    let c2 = BasicSequence::constant(2).unwrap();
    let table = moments(&c2, 4, 1, 1).unwrap();
    assert_eq!(table.expected, rational(2, 1));
    assert_eq!(table.t, rational(1, 1));
    c.pass("200 instances + exact boundary case");
}

// --- 6. C(b, w) suite ---------------------------------------------------------

#[test]
fn criterion_06_cbw_suite() {
    let c = Criterion::new(6, None);
    for (b, w) in [(2u64, 3u64), (2, 5), (3, 3), (4, 3)] {
        let word = build_cbw(b, w).unwrap();
        let direct = verify_cbw(word.entries(), b, w).unwrap();
        assert!(direct.complete, "({b},{w}) chunk multiset incomplete");
        assert!(
            direct.zeros_odd >= 2 * direct.ones_odd,
            "({b},{w}) bias failed: {direct:?}"
        );
        let analytic = verify_bias_analytic(b, w).unwrap();
        assert_eq!(analytic.zeros_odd, BigUint::from(direct.zeros_odd));
        assert_eq!(analytic.ones_odd, BigUint::from(direct.ones_odd));
        assert!(analytic.bias_ok);
        // (K/w, K, lambda_b)-normality for every K < w
        for big_k in 1..w as u32 {
            let eps = rational(big_k as i64, w as i64);
            let report = check_eps_k_normal(
                word.entries(),
                &eps,
                big_k,
                &Weighting::uniform(b),
                b,
                10_000_000,
            )
            .unwrap();
            assert!(report.pass, "({b},{w}) K={big_k} margins {:?}", report.worst);
        }
    }

    // stage-two parameters of the paper schedule: analytic only, no materialization
    let t0 = Instant::now();
    let report = verify_bias_analytic(4, 25).unwrap();
    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "analytic verifier took {elapsed:?}"
    );
    // counts frozen from an independent enumeration of the partition
    assert_eq!(
        report.zeros_odd,
        BigUint::parse_bytes(b"4169859299168926", 10).unwrap()
    );
    assert_eq!(
        report.ones_odd,
        BigUint::parse_bytes(b"2620849061442498", 10).unwrap()
    );
    // Stated expectation: bias_ok at (4, 25). The 2:1 odd-position bias is
    // unattainable there: max over ALL concatenation orders of
    // zeros_odd - 2*ones_odd is -1071838823716070 < 0 (exact), so the
    // canonical order's ratio 1.59 is already optimal. Asserted as stated;
    // fails honestly.
    assert!(
        report.bias_ok,
        "C(4,25): zeros_odd = {} < 2 * ones_odd = {}; the bias is unattainable \
         for every ordering (partition optimum is negative), so this stated \
         expectation cannot hold",
        report.zeros_odd, report.ones_odd
    );
    c.pass("four materialized pairs + analytic (4,25)");
}

// --- 7. scaled construction stream -------------------------------------------

#[test]
fn criterion_07_scaled_stream() {
    let c = Criterion::new(7, Some(30));
    let (spec, violations) = scaled_spec(&[
        (BigUint::one(), 2, 3),
        (BigUint::one(), 4, 5),
        (BigUint::one(), 6, 7),
        (BigUint::one(), 8, 9),
    ])
    .unwrap();
    assert!(violations.is_empty());

    let n = 1_000_000u64;
    let mut stream = spec.stream(BigUint::one());
    let mut digits = Vec::with_capacity(n as usize);
    let mut zeros_odd = 0u64;
    let mut ones_odd = 0u64;
    let mut zeros = 0u64;
    let mut ones = 0u64;
    let mut expected = 0.0f64;
    for position in 1..=n {
        let (digit, q) = stream.next_digit().unwrap();
        digits.push(digit);
        if position % 2 == 1 {
            if digit == 0 {
                zeros_odd += 1;
            } else if digit == 1 {
                ones_odd += 1;
            }
        }
        if digit == 0 {
            zeros += 1;
        } else if digit == 1 {
            ones += 1;
        }
        expected += 1.0 / q as f64;
        // (a) + (c): the odd-position bias holds at every prefix
        assert!(
            zeros_odd >= 2 * ones_odd,
            "prefix bias broke at position {position}: {zeros_odd} vs {ones_odd}"
        );
    }
    // (b) order-1 normality ratios at the final prefix
    let ratio0 = zeros as f64 / expected;
    let ratio1 = ones as f64 / expected;
    assert!(
        (0.8..=1.2).contains(&ratio0) && (0.8..=1.2).contains(&ratio1),
        "ratios {ratio0:.4} / {ratio1:.4}"
    );
    // (c) restated at the endpoint
    assert!(ones_odd as f64 / zeros_odd as f64 <= 0.5);

    // strided order-2 obstruction: summed over successors d, the blocks
    // (1, d) at odd starts run well below their expected frequency
    let seq = spec.sequence();
    let (expected_stride, _) = seq.partial_sum_strided_f64(n, 2, 1).unwrap();
    let mut family_count = 0u64;
    let mut j = 0u64;
    while 2 * j < n {
        let start = (2 * j + 1) as usize;
        if start < digits.len() && digits[start - 1] == 1 {
            family_count += 1;
        }
        j += 1;
    }
    let family_ratio = family_count as f64 / (6.0 * expected_stride);
    assert!(
        family_ratio <= 0.6,
        "strided family ratio {family_ratio:.4}"
    );
    c.pass(&format!(
        "10^6 digits; ratios {ratio0:.3}/{ratio1:.3}, odd ones/zeros {:.3}, strided family {family_ratio:.3}",
        ones_odd as f64 / zeros_odd as f64
    ));
}

// --- 8. growth-condition diagnostics -----------------------------------------

#[test]
fn criterion_08_growth_ratios() {
    let c = Criterion::new(8, None);
    let spec = paper_spec();
    let report = wgood_ratios(&spec, 1, 2..=4).unwrap();

    // frozen exact value at i=2, k=1: 4 / ((1/2 - 1/5) * 25 * 4^25)
    let x2 = BigInt::from(BigUint::from(4u8).pow(25) * 25u8);
    let expected_r1 =
        Ratio::from(BigInt::from(4)) / (rational(3, 10) * Ratio::from(x2));
    assert_eq!(report.rows[0].r1, expected_r1);

    assert!(report.r1_strictly_decreasing, "r1 must fall");
    assert!(
        report.r2_strictly_decreasing,
        "r2 must fall over its nonvacuous rows"
    );
    // Stated expectation: all three ratios strictly decreasing on i = 2..4.
    // r3 = |x_(i+1)| / (l_i |x_i|) * b_i^k provably rises until i ~ 28
    // (log(2i) must outgrow the linear exponent terms), so this assertion
    // fails honestly: r3 = ~2.1e8, ~5.9e8, ~1.6e9 at i = 2, 3, 4.
    assert!(
        report.r3_strictly_decreasing,
        "r3 rises over stages 2..4 ({:?}); the growth conditions hold only \
         asymptotically and their preasymptotic values increase",
        report
            .rows
            .iter()
            .map(|r| r.r3.to_f64().unwrap_or(f64::NAN))
            .collect::<Vec<_>>()
    );
    c.pass("paper schedule ratio table");
}

// --- 9. iterated-logarithm envelope, Monte Carlo ------------------------------

#[test]
fn criterion_09_lil_envelope() {
    let c = Criterion::new(9, Some(120));
    let config = LilConfig {
        seq: BasicSequence::parse("powfloor:0.5,2").unwrap(),
        block: Block::single(0),
        n: 100_000,
        trials: 200,
        seed: 20260810,
        bound_constant: 3.0,
        threads: 0,
        source: DigitSource::Uniform,
    };
    let result = run_lil_experiment(&config).unwrap();
    let Summary::Lil {
        within_bound_fraction,
        sample_variance,
        theoretical_variance,
        ..
    } = result.summary
    else {
        panic!("wrong summary kind")
    };
    assert!(
        within_bound_fraction >= 0.95,
        "within-bound fraction {within_bound_fraction}"
    );
    let variance_ratio = sample_variance / theoretical_variance;
    assert!(
        (0.7..=1.3).contains(&variance_ratio),
        "variance ratio {variance_ratio}"
    );
    c.pass(&format!(
        "fraction {within_bound_fraction:.3}, variance ratio {variance_ratio:.3}"
    ));
}

// --- 10. omission experiment ---------------------------------------------------

#[test]
fn criterion_10_omission() {
    let c = Criterion::new(10, Some(10));
    let config = OmissionConfig {
        seq: BasicSequence::geometric(2).unwrap(),
        k: 1,
        n: 30,
        trials: 2000,
        seed: 42,
        threads: 0,
    };
    let result = run_omission_experiment(&config).unwrap();
    let Summary::Omission {
        empirical_fraction,
        exact_product_f64,
        ..
    } = result.summary
    else {
        panic!("wrong summary kind")
    };
    // the exact partial product to 30 terms
    assert!((exact_product_f64 - 0.2887880953555573).abs() < 1e-12);
    assert!(
        (empirical_fraction - exact_product_f64).abs() <= 0.05,
        "empirical {empirical_fraction} vs product {exact_product_f64}"
    );
    c.pass(&format!(
        "empirical {empirical_fraction:.4} vs exact {exact_product_f64:.4}"
    ));
}

// --- 11. min-digit transform positional agreement ------------------------------

#[test]
fn criterion_11_transform_positions() {
    let c = Criterion::new(11, None);
    let n = 100_000u64;
    let source = champernowne_prefix(10, n).unwrap();
    let target = BasicSequence::affine(1, 1).unwrap();
    let image = ratio_normal_transform(&source, &target).unwrap();
    let tail = target.tail_index(9, n).unwrap().unwrap();
    assert_eq!(tail.index, 9);
    assert_eq!(tail.confidence, Confidence::Analytic);

    // occurrence positions of every block over {0..8} of lengths 1 and 2
    // (and a sample of length 3) agree exactly at starts >= the tail index
    let src = source.dense();
    let img = image.dense();
    let mut blocks: Vec<Vec<u64>> = (0..9u64).map(|d| vec![d]).collect();
    for a in 0..9u64 {
        for b in 0..9u64 {
            blocks.push(vec![a, b]);
        }
    }
    blocks.push(vec![1, 2, 3]);
    blocks.push(vec![8, 0, 8]);
    for block in &blocks {
        let k = block.len();
        let mut src_positions = Vec::new();
        let mut img_positions = Vec::new();
        for start in (tail.index as usize - 1)..=(n as usize - k) {
            if src[start..start + k] == block[..] {
                src_positions.push(start);
            }
            if img[start..start + k] == block[..] {
                img_positions.push(start);
            }
        }
        assert_eq!(src_positions, img_positions, "block {block:?}");
    }
    c.pass("90+2 blocks, exact positional agreement over 10^5 digits");
}

// --- 12. determinism under seeds and thread counts ------------------------------

#[test]
fn criterion_12_determinism() {
    let c = Criterion::new(12, None);
    let lil = LilConfig {
        seq: BasicSequence::parse("powfloor:0.5,2").unwrap(),
        block: Block::single(0),
        n: 2000,
        trials: 50,
        seed: 7,
        bound_constant: 3.0,
        threads: 1,
        source: DigitSource::Uniform,
    };
    let runs: Vec<String> = [1usize, 2, 8]
        .into_iter()
        .map(|threads| {
            run_lil_experiment(&LilConfig {
                threads,
                ..lil.clone()
            })
            .unwrap()
            .to_json()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
    let again = run_lil_experiment(&lil).unwrap().to_json();
    assert_eq!(runs[0], again);

    let omission = OmissionConfig {
        seq: BasicSequence::geometric(2).unwrap(),
        k: 1,
        n: 30,
        trials: 200,
        seed: 11,
        threads: 1,
    };
    let a = run_omission_experiment(&omission).unwrap().to_json();
    let b = run_omission_experiment(&OmissionConfig {
        threads: 6,
        ..omission.clone()
    })
    .unwrap()
    .to_json();
    assert_eq!(a, b);
    c.pass("bit-identical JSON across reruns and thread counts");
}
