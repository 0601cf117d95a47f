use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use wbl_bench::unbiased;
use wbl_core::diameter::build_low_diameter_tree;
use wbl_core::engine::{never, run_match, GameConfig, Player, StartPolicy};
use wbl_core::minbox::{fuzz_schedule, Adversary, MinBoxState};
use wbl_core::profile::ConstantsProfile;
use wbl_core::solver::{value_longest_cycle, DEFAULT_BUDGET};
use wbl_core::strategies::{IsolateMany, PreventLongCycle, RandomBreaker, RandomWalker};
use wbl_core::unbiased::Thm1Walker;

fn engine(c: &mut Criterion) {
    c.bench_function("random_match_n500", |b| {
        b.iter(|| {
            run_match(
                unbiased(500, 3),
                &mut RandomWalker::new(),
                &mut RandomBreaker::new(),
                &never,
            )
            .unwrap()
        })
    });
}

fn cycle(c: &mut Criterion) {
    let mut g = c.benchmark_group("thm1");
    g.sample_size(10);
    g.bench_function("cycle_vs_prevent_n2000", |b| {
        b.iter(|| {
            let mut w = Thm1Walker::new(ConstantsProfile::paper());
            run_match(
                unbiased(2000, 0),
                &mut w,
                &mut PreventLongCycle::new(),
                &never,
            )
            .unwrap()
        })
    });
    g.finish();
}

fn tree(c: &mut Criterion) {
    let mut g = c.benchmark_group("tree");
    g.sample_size(10);
    g.bench_function("isolateB_n10000_b10", |b| {
        b.iter(|| {
            let cfg = GameConfig::new(10_000, 10, Player::Breaker);
            build_low_diameter_tree(cfg, ConstantsProfile::paper(), &mut IsolateMany::new())
                .unwrap()
        })
    });
    g.finish();
}

fn minbox(c: &mut Criterion) {
    c.bench_function("minbox_max_danger_move", |b| {
        b.iter_batched(
            || {
                let mut s = MinBoxState::uniform(10_000, 400, 0.05, 10);
                for i in 0..2000 {
                    s.breaker_take(i % 10_000, 3);
                }
                s
            },
            |mut s| s.maker_move_max_danger(),
            BatchSize::LargeInput,
        )
    });
    c.bench_function("minbox_harmonic_schedule", |b| {
        b.iter(|| fuzz_schedule(10_000, 100, Adversary::Harmonic, 1, 300))
    });
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("solver");
    g.sample_size(10);
    g.bench_function("longest_n5_b1", |b| {
        b.iter(|| {
            value_longest_cycle(
                5,
                1,
                Player::Walker,
                StartPolicy::Declared(0),
                DEFAULT_BUDGET,
            )
            .unwrap()
            .value
        })
    });
    g.bench_function("longest_n6_b1", |b| {
        b.iter(|| {
            value_longest_cycle(
                6,
                1,
                Player::Breaker,
                StartPolicy::Declared(0),
                DEFAULT_BUDGET,
            )
            .unwrap()
            .value
        })
    });
    g.finish();
}

criterion_group!(benches, engine, cycle, tree, minbox, solver);
criterion_main!(benches);
