use criterion::{black_box, criterion_group, criterion_main, Criterion};
use locality_lab::search::min_colours;
use locality_lab::simulator::{reference_colour_reduction, CycleInstance};
use locality_lab::speedup::speedup;
use locality_lab::tuple::TupleIndexer;
use locality_lab::{ColouringFunction, Limits};

fn verify(c: &mut Criterion) {
    let f = ColouringFunction::from_fn(60, 3, 3, &Limits::default(), |t| {
        (t[0] + 2 * t[1] + t[2]) % 3 + 1
    })
    .unwrap();
    c.bench_function("verify n=60 k=3", |b| {
        b.iter(|| black_box(f.verify_with_cap(1000)))
    });
}

fn speedup_step(c: &mut Criterion) {
    let witness = min_colours(8, 3, 8).unwrap().found().unwrap().witness;
    c.bench_function("speedup n=8 k=3", |b| {
        b.iter(|| black_box(speedup(&witness).unwrap()))
    });
    let wide = ColouringFunction::from_fn(40, 3, 4, &Limits::default(), |t| {
        (t[0] * 7 + t[1] * 3 + t[2]) % 4 + 1
    })
    .unwrap();
    c.bench_function("speedup n=40 k=3 c=4", |b| {
        b.iter(|| black_box(speedup(&wide).unwrap()))
    });
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("min_colours");
    group.sample_size(10);
    group.bench_function("n=8 k=2", |b| {
        b.iter(|| black_box(min_colours(8, 2, 8).unwrap()))
    });
    group.bench_function("n=7 k=3", |b| {
        b.iter(|| black_box(min_colours(7, 3, 7).unwrap()))
    });
    group.finish();
}

fn rank(c: &mut Criterion) {
    let ix = TupleIndexer::new(1000, 3).unwrap();
    let len = ix.len();
    c.bench_function("rank+unrank n=1000 k=3", |b| {
        let mut r = 0u64;
        b.iter(|| {
            r = (r + 7919) % len;
            let t = ix.unrank(r).unwrap();
            black_box(ix.rank(&t).unwrap())
        })
    });
}

fn reduction(c: &mut Criterion) {
    let cycle = CycleInstance::random(1000, 1).unwrap();
    c.bench_function("reference reduction n=1000", |b| {
        b.iter(|| black_box(reference_colour_reduction(&cycle).unwrap()))
    });
}

criterion_group!(kernels, verify, speedup_step, search, rank, reduction);
criterion_main!(kernels);
