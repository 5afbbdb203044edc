use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fqrigid::field::FieldCtx;
use fqrigid::{build_field, CosetUnion, Element, LinearizedMap};

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    for (p, n) in [(3u64, 4u32), (37, 2), (2, 12), (101, 2)] {
        g.bench_function(format!("F_{p}^{n}"), |b| b.iter(|| FieldCtx::with_cap(black_box(p), n, 1 << 22).unwrap()));
    }
    g.finish();
}

fn arithmetic(c: &mut Criterion) {
    let f = build_field(37, 2).unwrap();
    let xs: Vec<Element> = f.nonzero().take(512).collect();
    c.bench_function("mul_add 512x512 in F_1369", |b| {
        b.iter(|| {
            let mut acc = Element::ZERO;
            for &x in &xs {
                for &y in &xs {
                    acc = f.add(acc, f.mul(x, y));
                }
            }
            acc
        })
    });
    let set = CosetUnion::new(f.clone(), 4, [0, 1]).unwrap();
    c.bench_function("coset membership F_1369", |b| b.iter(|| f.nonzero().filter(|&x| set.contains(x)).count()));
}

fn direction_sets(c: &mut Criterion) {
    let f = build_field(7, 2).unwrap();
    let u = f.generator();
    let map = LinearizedMap::new(f.clone(), vec![Element::ONE, u]).unwrap();
    c.bench_function("directions of a linearized map on F_49", |b| b.iter(|| black_box(&map).directions().len()));
    let table = map.table();
    c.bench_function("directions of a value table on F_49", |b| {
        b.iter(|| fqrigid::directions::directions_of_function(&f, black_box(&table)).unwrap().len())
    });
}

criterion_group!(benches, construction, arithmetic, direction_sets);
criterion_main!(benches);
