use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use groupshift_core::sft::Window;
use groupshift_core::{
    estimate, exact_z, snake_shift, Alphabet, Budget, Element, ForbiddenPattern, Group, GroupSpec,
    Oracle, Pattern, SftSpec, SubsetFamily, Support,
};

fn pair_sft(g: Arc<Group>, steps: &[&str]) -> SftSpec {
    let rules = steps
        .iter()
        .map(|w| {
            let p = Pattern::new(
                vec![Element::identity(), g.canonicalize_str(w).unwrap()],
                vec![1, 1],
            )
            .unwrap();
            ForbiddenPattern::from_pattern(&p, 2)
        })
        .collect();
    SftSpec::new(g, Alphabet::numbered(2), rules).unwrap()
}

fn group(spec: GroupSpec) -> Arc<Group> {
    Arc::new(Group::new(spec).unwrap())
}

fn balls(c: &mut Criterion) {
    c.bench_function("ball radius 6 in Z^2", |b| {
        b.iter(|| group(GroupSpec::z2()).ball(black_box(6)).unwrap().len())
    });
    let heis = GroupSpec {
        name: "Z^2 x| Z".into(),
        generators: vec!["x".into(), "y".into(), "t".into()],
        oracle: Oracle::Semidirect {
            matrix: vec![vec![1, 0], vec![1, 1]],
        },
        relators: Vec::new(),
    };
    c.bench_function("ball radius 4 in Z^2 x| Z", |b| {
        b.iter(|| group(heis.clone()).ball(black_box(4)).unwrap().len())
    });
}

fn windows(c: &mut Criterion) {
    let g = group(GroupSpec::z2());
    let x = pair_sft(g.clone(), &["a", "b"]);
    let b6 = Support::new(g.ball(6).unwrap().elements);
    let budget = Budget::default();
    let mut slow = c.benchmark_group("window");
    slow.sample_size(10);
    slow.bench_function("hard square count on ball 6", |b| {
        b.iter(|| Window::new(&x, &b6).unwrap().count(&budget).unwrap())
    });
    slow.finish();
    let snake = snake_shift().unwrap();
    let b2 = Support::new(snake.group().ball(2).unwrap().elements);
    c.bench_function("snake count on ball 2", |b| {
        b.iter(|| Window::new(&snake, &b2).unwrap().count(&budget).unwrap())
    });
}

fn entropy(c: &mut Criterion) {
    let budget = Budget::default();
    let golden = pair_sft(group(GroupSpec::z()), &["a"]);
    c.bench_function("exact entropy of golden mean, memory 3", |b| {
        b.iter(|| exact_z(&golden, black_box(3), &budget).unwrap().entropy)
    });
    let hard = pair_sft(group(GroupSpec::z2()), &["a", "b"]);
    let mut slow = c.benchmark_group("estimator");
    slow.sample_size(10);
    slow.bench_function("hard square to n = 3", |b| {
        b.iter(|| estimate(&hard, 3, &SubsetFamily::Capped(12), &budget).unwrap())
    });
    slow.finish();
}

criterion_group!(benches, balls, windows, entropy);
criterion_main!(benches);
