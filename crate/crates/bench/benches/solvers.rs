use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use robust_pomdp::benchmarks::{bird_fixture, pennies_fixture};
use robust_pomdp::bounds::{fib_bound, DEFAULT_BOUND_TOL};
use robust_pomdp::hsvi::{ab_hsvi, solve_me_exact, Clock, SolveConfig, DEFAULT_TICK_S};
use robust_pomdp::lp::{agent_lp, nature_lp};
use robust_pomdp_bench::{random_vectors, rocksample_ab};

fn games(c: &mut Criterion) {
    let vs = random_vectors(50, 10, 1);
    let q: Vec<usize> = (0..10).collect();
    c.bench_function("nature_lp 50x10", |b| b.iter(|| nature_lp(black_box(&vs), &q).unwrap()));
    c.bench_function("agent_lp 50x10", |b| b.iter(|| agent_lp(black_box(&vs), &q).unwrap()));
}

fn bounds(c: &mut Criterion) {
    let m = rocksample_ab(3, 1, 3);
    c.bench_function("fib rocksample(3,1,3)", |b| b.iter(|| fib_bound(black_box(&m.base), DEFAULT_BOUND_TOL)));
}

fn solvers(c: &mut Criterion) {
    let rs = rocksample_ab(2, 1, 2);
    let mut cfg = SolveConfig::for_rewards(&rs.base.env.reward);
    cfg.clock = Clock::Logical { tick_s: DEFAULT_TICK_S };
    c.bench_function("ab_hsvi rocksample(2,1,2)", |b| b.iter(|| ab_hsvi(black_box(&rs), &cfg).unwrap()));
    let pennies = pennies_fixture();
    c.bench_function("exact pennies", |b| b.iter(|| solve_me_exact(black_box(&pennies), 1).unwrap()));
    let bird = bird_fixture();
    c.bench_function("exact bird H=3", |b| b.iter(|| solve_me_exact(black_box(&bird), 3).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = games, bounds, solvers
}
criterion_main!(benches);
