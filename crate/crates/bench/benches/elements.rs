use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mhd_vem::forms::ElementSpaces;
use mhd_vem::polybasis::{polygon_quadrature, Pk2Decomposition};
use mhd_vem::MeshFamily;
use mhd_vem_bench::mesh;

fn quadrature(c: &mut Criterion) {
    let geom = mesh(MeshFamily::Voronoi, 8).geometry();
    let cell = &geom.elements[0];
    let mut group = c.benchmark_group("polygon_quadrature");
    for degree in [2, 6, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(degree), &degree, |b, &d| {
            b.iter(|| polygon_quadrature(black_box(cell), d))
        });
    }
    group.finish();
}

fn element_spaces(c: &mut Criterion) {
    let geom = mesh(MeshFamily::Voronoi, 8).geometry();
    let cell = &geom.elements[0];
    let mut group = c.benchmark_group("element_spaces");
    for k in 1..=3 {
        let decomp = Pk2Decomposition::new(k).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| ElementSpaces::new(black_box(cell), k, &decomp).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, quadrature, element_spaces);
criterion_main!(benches);
