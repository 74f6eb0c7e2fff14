use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num::BigUint;

use cantor_core::{
    cbw_digit_at, count_occurrences, expand_rational, paper_spec, sample_prefix, BasicSequence,
    Block,
};

fn bench_counting(c: &mut Criterion) {
    let seq = BasicSequence::constant(4).unwrap();
    let prefix = sample_prefix(&seq, 1_000_000, 7).unwrap();
    let block = Block::parse("0,1").unwrap();
    c.bench_function("count_occurrences_1e6", |b| {
        b.iter(|| count_occurrences(black_box(&prefix), black_box(&block), 999_999).unwrap())
    });
}

fn bench_expansion(c: &mut Criterion) {
    let seq = BasicSequence::affine(1, 1).unwrap();
    let (num, den) = (BigUint::from(355u32), BigUint::from(1130u32));
    c.bench_function("expand_rational_depth_500", |b| {
        b.iter(|| expand_rational(black_box(&num), black_box(&den), &seq, 500).unwrap())
    });
}

fn bench_random_access(c: &mut Criterion) {
    // single digit near the middle of C(4, 25), ~1.4e16 digits in
    let idx = BigUint::from(4u8).pow(25) * 12u8 + 17u8;
    c.bench_function("cbw_digit_at_4_25", |b| {
        b.iter(|| cbw_digit_at(4, 25, black_box(&idx)).unwrap())
    });

    let spec = paper_spec();
    let position = BigUint::from(10u8).pow(30);
    c.bench_function("paper_spec_digit_at_1e30", |b| {
        b.iter(|| spec.digit_at(black_box(&position)).unwrap())
    });
}

fn bench_partial_sums(c: &mut Criterion) {
    let seq = BasicSequence::parse("powfloor:0.5,2").unwrap();
    c.bench_function("exact_partial_sum_1e4_k2", |b| {
        b.iter(|| seq.partial_sum(black_box(10_000), 2).unwrap())
    });
    c.bench_function("f64_partial_sum_1e6_k2", |b| {
        b.iter(|| seq.partial_sum_f64(black_box(1_000_000), 2).unwrap())
    });
}

criterion_group!(
    benches,
    bench_counting,
    bench_expansion,
    bench_random_access,
    bench_partial_sums
);
criterion_main!(benches);
