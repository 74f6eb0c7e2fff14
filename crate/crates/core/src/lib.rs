//! Cantor series expansions with position-dependent radices: exact digit
//! expansion of rationals, digit-block occurrence statistics, divergence
//! classification of the radix sequences, explicit digit constructions with
//! random access at astronomical positions, and reproducible Monte Carlo
//! experiments for the typical-number asymptotics.
//!
//! A *basic sequence* q_1, q_2, ... (every q_n >= 2) fixes the expansion
//! x = sum E_n / (q_1 q_2 ... q_n) with digits 0 <= E_n < q_n. The crate is
//! organized around that object:
//!
//! * [`sequences`]: descriptor language, exact partial sums S(n, k) and
//!   their strided variants, divergence classification.
//! * [`expansion`]: greedy digit expansion of rationals, prefix values and
//!   intervals, the digit file format.
//! * [`counting`]: overlapping and strided block counting, weightings, and
//!   normality ratio reports.
//! * [`construct`]: canonical C(b, w) words, staged concatenation schedules
//!   with exact big-integer positions, growth-condition diagnostics, the
//!   min-digit transform, Champernowne prefixes.
//! * [`stochastic`]: seeded digit sampling, exact occurrence moments, and
//!   the iterated-logarithm / omission experiments.

pub mod construct;
pub mod counting;
pub mod error;
pub mod expansion;
pub mod report;
pub mod rng;
pub mod sequences;
pub mod stochastic;

pub use construct::{
    build_cbw, cbw_digit_at, champernowne_prefix, paper_spec, ratio_normal_transform,
    scaled_spec, spec_digit_at, verify_bias_analytic, verify_cbw, wgood_ratios, BiasReport,
    CbwVerification, ConstructionSpec, WgoodReport, WgoodRow,
};
pub use counting::{
    check_eps_k_normal, count_in_word, count_occurrences, count_strided, normality_report,
    ratio_report, strided_report, strong_normality_report, uniform_weight, Block,
    EpsNormalReport, Weighting,
};
pub use error::{Error, Result};
pub use expansion::{expand_rational, prefix_interval, prefix_value, DigitPrefix};
pub use report::{Point, Series, StatReport, SCHEMA_VERSION};
pub use rng::SplitMix64;
pub use sequences::{
    rho, Alpha, BasicSequence, ClassifyConfig, Confidence, DivergenceReport, QVal, ReportKind,
    SequenceFamily, TailIndex, Verdict,
};
pub use stochastic::{
    lil_deviation, moments, run_lil_experiment, run_omission_experiment, sample_prefix,
    DigitSource, ExperimentResult, LilConfig, MomentTable, OmissionConfig, Summary,
};
