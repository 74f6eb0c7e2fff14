//! Uniformly sampled Cantor digits, exact occurrence moments, and seeded
//! Monte Carlo experiments for the typical-number asymptotics.
//!
//! For a uniform x, the digits E_n are independent with E_n uniform on
//! [0, q_n). A fixed block B of length k occurring at start m = ik + p is a
//! Bernoulli variable with
//!
//!   F = 1 / (q_m ... q_{m+k-1}),   V = F - F^2,
//!
//! and t(n, p) = sum of V over starts is the variance scale entering the
//! law-of-the-iterated-logarithm envelope sqrt(2 t log log t).

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, BigUint, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{count_occurrences, Block};
use crate::error::{Error, Result};
use crate::expansion::DigitPrefix;
use crate::report::SCHEMA_VERSION;
use crate::rng::SplitMix64;
use crate::sequences::{rho, BasicSequence, QVal};

/// Where experiment digits come from; the constant source is an adversarial
/// control, not a distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitSource {
    Uniform,
    ConstantDigit(u64),
}

impl DigitSource {
    fn label(&self) -> String {
        match self {
            DigitSource::Uniform => "uniform".into(),
            DigitSource::ConstantDigit(d) => format!("constant:{d}"),
        }
    }
}

fn sample_digits_into(
    seq: &BasicSequence,
    n: u64,
    rng: &mut SplitMix64,
    source: &DigitSource,
    prefix: &mut DigitPrefix,
) -> Result<()> {
    for m in 1..=n {
        match source {
            DigitSource::Uniform => match seq.q_val(m)? {
                QVal::Small(q) => prefix.push_small_unchecked(rng.uniform_u64(q)),
                QVal::Big(q) => prefix.push_unchecked(rng.uniform_big(&q)),
            },
            DigitSource::ConstantDigit(d) => {
                let q = seq.q_val(m)?;
                if q.le_u64(*d) {
                    return Err(Error::DigitOutOfRange {
                        position: m,
                        digit: d.to_string(),
                        q: q.to_biguint().to_string(),
                    });
                }
                prefix.push_small_unchecked(*d);
            }
        }
    }
    Ok(())
}

/// n digits drawn independently, E_m uniform on [0, q_m), deterministic
/// under the seed.
pub fn sample_prefix(seq: &BasicSequence, n: u64, seed: u64) -> Result<DigitPrefix> {
    let mut rng = SplitMix64::for_trial(seed, 0);
    let mut prefix = DigitPrefix::empty(seq.clone());
    sample_digits_into(seq, n, &mut rng, &DigitSource::Uniform, &mut prefix)?;
    Ok(prefix)
}

/// Exact per-start moments for block occurrences at stride k, phase p.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub k: u32,
    pub p: u64,
    pub n: u64,
    /// F at start ik + p for i = 0..=rho(n, k)
    pub f: Vec<BigRational>,
    /// V = F - F^2 at the same starts
    pub v: Vec<BigRational>,
    /// t(n, p) = sum of V
    pub t: BigRational,
    /// S(n, k, p) = sum of F
    pub expected: BigRational,
}

pub fn moments(seq: &BasicSequence, n: u64, k: u32, p: u64) -> Result<MomentTable> {
    let k64 = k.max(1) as u64;
    if !(1..=k64).contains(&p) {
        return Err(Error::InvalidConfig(format!("phase {p} outside [1, {k64}]")));
    }
    let mut f = Vec::new();
    let mut v = Vec::new();
    // group by window product so the exact sums stay cheap when radices repeat
    let mut groups: BTreeMap<BigUint, u64> = BTreeMap::new();
    for i in 0..=rho(n, k64) {
        let start = i * k64 + p;
        let mut prod = BigUint::one();
        for off in 0..k64 {
            prod *= seq.q_at(start + off)?;
        }
        let fi = Ratio::new(BigInt::one(), BigInt::from(prod.clone()));
        let vi = &fi - &fi * &fi;
        f.push(fi);
        v.push(vi);
        *groups.entry(prod).or_insert(0) += 1;
    }
    let mut t = BigRational::zero();
    let mut expected = BigRational::zero();
    for (prod, count) in groups {
        let fi = Ratio::new(BigInt::from(count), BigInt::from(prod.clone()));
        let sq = Ratio::new(
            BigInt::from(count),
            BigInt::from(&prod * &prod),
        );
        expected += &fi;
        t += fi - sq;
    }
    Ok(MomentTable {
        k,
        p,
        n,
        f,
        v,
        t,
        expected,
    })
}

/// Normalized deviation (N(n,p) - S(n,k,p)) / sqrt(2 t log log t), or None
/// when t <= e makes the envelope undefined.
pub fn lil_deviation(
    digits: &DigitPrefix,
    block: &Block,
    n: u64,
    p: u64,
) -> Result<Option<f64>> {
    let k = block.len() as u32;
    let count = crate::counting::count_strided(digits, block, n, p)?;
    let table = moments(digits.seq(), n, k, p)?;
    let t = table.t.to_f64().unwrap_or(f64::NAN);
    if t.is_nan() || t <= std::f64::consts::E {
        return Ok(None);
    }
    let expected = table.expected.to_f64().unwrap_or(f64::NAN);
    let denom = (2.0 * t * t.ln().ln()).sqrt();
    Ok(Some((count as f64 - expected) / denom))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub kind: String,
    pub seq: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<String>,
    pub k: u32,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_constant: Option<f64>,
    pub source: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub count: u64,
    /// (count - expected) / sqrt(2 t log log t); absent when the envelope
    /// does not apply
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Summary {
    Lil {
        expected_count: f64,
        theoretical_variance: f64,
        mean_count: f64,
        sample_variance: f64,
        bound_radius: f64,
        within_bound_fraction: f64,
    },
    Omission {
        zero_free_trials: u64,
        empirical_fraction: f64,
        exact_product: String,
        exact_product_f64: f64,
    },
}

/// Re-running with the identical configuration and seed reproduces this
/// bit-exactly, for any thread count.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub schema_version: String,
    pub config: ConfigEcho,
    pub per_trial: Vec<TrialRecord>,
    pub summary: Summary,
}

impl ExperimentResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiment result serializes")
    }
}

#[derive(Debug, Clone)]
pub struct LilConfig {
    pub seq: BasicSequence,
    pub block: Block,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    /// C in the acceptance envelope C * sqrt(2 t log log t)
    pub bound_constant: f64,
    /// 0 picks the library default; the value never changes results
    pub threads: usize,
    pub source: DigitSource,
}

fn run_parallel<F>(threads: usize, trials: u64, per_trial: F) -> Result<Vec<u64>>
where
    F: Fn(u64) -> Result<u64> + Sync + Send,
{
    let runner = || -> Result<Vec<u64>> {
        (0..trials)
            .into_par_iter()
            .map(&per_trial)
            .collect::<std::result::Result<Vec<u64>, Error>>()
    };
    if threads == 0 {
        runner()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(runner)
    }
}

/// Sample `trials` prefixes, count occurrences of the block among starts
/// <= n, and compare the spread against the sqrt(2 t log log t) envelope.
pub fn run_lil_experiment(config: &LilConfig) -> Result<ExperimentResult> {
    let k = config.block.len() as u32;
    if config.trials == 0 || config.n < k as u64 {
        return Err(Error::InvalidConfig(
            "need trials >= 1 and n >= block length".into(),
        ));
    }
    let mut warnings = Vec::new();
    if !config.seq.infinite_in_limit() {
        warnings.push("sequence is not infinite in limit; the asymptotics are not expected to apply".into());
    }

    let digits_needed = config.n + config.block.len() - 1;
    // envelope scale: t-bar = sum over phases of t(n, p)
    let mut t_bar = BigRational::zero();
    for p in 1..=k as u64 {
        t_bar += moments(&config.seq, config.n, k, p)?.t;
    }
    let t_bar = t_bar.to_f64().unwrap_or(f64::NAN);
    if t_bar.is_nan() || t_bar <= std::f64::consts::E {
        return Err(Error::InvalidConfig(format!(
            "variance scale t = {t_bar} is below e; the envelope is undefined"
        )));
    }
    let expected = config
        .seq
        .partial_sum(config.n, k)?
        .to_f64()
        .unwrap_or(f64::NAN);
    let envelope_scale = (2.0 * t_bar * t_bar.ln().ln()).sqrt();
    let bound_radius = config.bound_constant * envelope_scale;

    let counts = run_parallel(config.threads, config.trials, |trial| {
        let mut rng = SplitMix64::for_trial(config.seed, trial);
        let mut prefix = DigitPrefix::empty(config.seq.clone());
        sample_digits_into(
            &config.seq,
            digits_needed,
            &mut rng,
            &config.source,
            &mut prefix,
        )?;
        count_occurrences(&prefix, &config.block, config.n)
    })?;

    let trials_f = config.trials as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / trials_f;
    let sample_variance = if config.trials > 1 {
        counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / (trials_f - 1.0)
    } else {
        0.0
    };
    let within = counts
        .iter()
        .filter(|&&c| (c as f64 - expected).abs() <= bound_radius)
        .count() as f64
        / trials_f;

    Ok(ExperimentResult {
        schema_version: SCHEMA_VERSION.into(),
        config: ConfigEcho {
            kind: "lil".into(),
            seq: config.seq.descriptor(),
            block: Some(config.block.to_string()),
            k,
            n: config.n,
            trials: config.trials,
            seed: config.seed,
            bound_constant: Some(config.bound_constant),
            source: config.source.label(),
            warnings,
        },
        per_trial: counts
            .into_iter()
            .enumerate()
            .map(|(i, count)| TrialRecord {
                trial: i as u64,
                count,
                deviation: Some((count as f64 - expected) / envelope_scale),
            })
            .collect(),
        summary: Summary::Lil {
            expected_count: expected,
            theoretical_variance: t_bar,
            mean_count: mean,
            sample_variance,
            bound_radius,
            within_bound_fraction: within,
        },
    })
}

#[derive(Debug, Clone)]
pub struct OmissionConfig {
    pub seq: BasicSequence,
    pub k: u32,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub threads: usize,
}

/// Fraction of sampled prefixes with no occurrence of the k-zero block among
/// starts <= n - k + 1, next to the exact product
/// prod_{j=1..n-k+1} (1 - 1/(q_j ... q_{j+k-1})).
pub fn run_omission_experiment(config: &OmissionConfig) -> Result<ExperimentResult> {
    if config.trials == 0 || config.k == 0 || config.n < config.k as u64 {
        return Err(Error::InvalidConfig(
            "need trials >= 1 and n >= k >= 1".into(),
        ));
    }
    let k64 = config.k as u64;
    let starts = config.n - k64 + 1;
    let zero_block = Block::new(vec![0; config.k as usize]).expect("k >= 1");

    let mut product = BigRational::one();
    let one = BigRational::one();
    for j in 1..=starts {
        let mut prod = BigUint::one();
        for off in 0..k64 {
            prod *= config.seq.q_at(j + off)?;
        }
        product *= &one - Ratio::new(BigInt::one(), BigInt::from(prod));
    }

    let counts = run_parallel(config.threads, config.trials, |trial| {
        let mut rng = SplitMix64::for_trial(config.seed, trial);
        let mut prefix = DigitPrefix::empty(config.seq.clone());
        sample_digits_into(
            &config.seq,
            config.n,
            &mut rng,
            &DigitSource::Uniform,
            &mut prefix,
        )?;
        count_occurrences(&prefix, &zero_block, starts)
    })?;

    let zero_free = counts.iter().filter(|&&c| c == 0).count() as u64;
    Ok(ExperimentResult {
        schema_version: SCHEMA_VERSION.into(),
        config: ConfigEcho {
            kind: "omission".into(),
            seq: config.seq.descriptor(),
            block: Some(zero_block.to_string()),
            k: config.k,
            n: config.n,
            trials: config.trials,
            seed: config.seed,
            bound_constant: None,
            source: DigitSource::Uniform.label(),
            warnings: Vec::new(),
        },
        per_trial: counts
            .into_iter()
            .enumerate()
            .map(|(i, count)| TrialRecord {
                trial: i as u64,
                count,
                deviation: None,
            })
            .collect(),
        summary: Summary::Omission {
            zero_free_trials: zero_free,
            empirical_fraction: zero_free as f64 / config.trials as f64,
            exact_product: product.to_string(),
            exact_product_f64: product.to_f64().unwrap_or(f64::NAN),
        },
    })
}
