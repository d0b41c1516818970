//! Sequential against rayon-parallel kernels on the same inputs.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use portflow::exec;
use portflow::fluid::{BoundaryConditions, Fluid, FluidParams};
use portflow::forms::{circulation, interior_product_top, Form};
use portflow::mesh::periodic_square;
use portflow::Vec2;

fn taylor_green(res: usize) -> (Fluid, Form) {
    let c = periodic_square(res, 2.0 * std::f64::consts::PI).unwrap();
    let f = Fluid::new(FluidParams { kappa: 0.01, lambda: 0.0, rho: 1.0 }, BoundaryConditions::default(), c).unwrap();
    let v = circulation(f.mesh(), |x| Vec2::new(x.x.sin() * x.y.cos(), -x.x.cos() * x.y.sin()));
    (f, v)
}

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", false), ("parallel", true)]
}

fn bench_rates(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("fluid_rates");
    for res in [32, 64, 128] {
        let (f, v) = taylor_green(res);
        let w = f.walls().unwrap();
        for (name, on) in modes() {
            exec::set_parallel(on);
            g.bench_with_input(BenchmarkId::new(name, res), &res, |b, _| b.iter(|| f.rates(&f.geo, black_box(&v.values), &w).unwrap()));
        }
    }
    g.finish();
    exec::set_parallel(true);
}

fn bench_step(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("fluid_step");
    g.sample_size(10);
    for res in [32, 64] {
        let (f, v) = taylor_green(res);
        let s = f.initial_state(v).unwrap();
        for (name, on) in modes() {
            exec::set_parallel(on);
            g.bench_with_input(BenchmarkId::new(name, res), &res, |b, _| b.iter(|| f.step(black_box(&s), 0.01).unwrap()));
        }
    }
    g.finish();
    exec::set_parallel(true);
}

fn bench_contraction(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("interior_product_top");
    for res in [64, 256] {
        let c = periodic_square(res, 1.0).unwrap();
        let h = Form::primal(&c, 2, (0..c.n_triangles()).map(|t| (t as f64).sin() * c.triangle_area(t)).collect()).unwrap();
        let u: Vec<Vec2> = c.vertices().iter().map(|x| Vec2::new(x.y, -x.x)).collect();
        for (name, on) in modes() {
            exec::set_parallel(on);
            g.bench_with_input(BenchmarkId::new(name, res), &res, |b, _| b.iter(|| interior_product_top(&c, black_box(&u), &h).unwrap()));
        }
    }
    g.finish();
    exec::set_parallel(true);
}

criterion_group!(benches, bench_rates, bench_step, bench_contraction);
criterion_main!(benches);
