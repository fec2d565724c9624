use criterion::{black_box, criterion_group, criterion_main, Criterion};

use qdthz::cavity::{Calibration, RabiConvention};
use qdthz::electronic::axial_levels;
use qdthz::*;
use qdthz_bench::reference_setup;

fn axial(c: &mut Criterion) {
    for n in [1024, 4096] {
        let (g, grid) = reference_setup(n);
        c.bench_function(&format!("axial_solve_{n}"), |b| {
            b.iter(|| axial_levels(&g, &grid, black_box(1.2), 6).unwrap())
        });
    }
}

fn sweep(c: &mut Criterion) {
    let (g, grid) = reference_setup(1024);
    let mut group = c.benchmark_group("stark");
    group.sample_size(10);
    group.bench_function("map_1024x51", |b| b.iter(|| stark_map(&g, &grid, 0.0, 2.5, black_box(51)).unwrap()));
    group.finish();
}

fn phonon(c: &mut Criterion) {
    let (env, shape) = (PhononEnvironment::gaas(), ApproxDotShape::reference());
    c.bench_function("relaxation_12.25", |b| b.iter(|| relaxation_rate(black_box(12.25), &env, &shape).unwrap()));
}

fn gate(c: &mut Criterion) {
    let (g, grid) = reference_setup(1024);
    let map = stark_map(&g, &grid, 0.0, 2.5, 51).unwrap();
    let points = operating_points(&map, 11.5, 15.0, RootChoice::Highest).unwrap();
    let model =
        CouplingModel::new(&map, CavityMode::reference(), LaserDrive::reference(), RabiConvention::HalfAmplitude)
            .unwrap();
    let plan = PlanOptions { calibration: Calibration::Bare, rise_time_ns: 1e-6, ..PlanOptions::default() };
    let seq = plan_cnot(&model, &points, &plan).unwrap();
    let sys = System::new(model, Model::Effective, 2, 2).unwrap();
    let mut group = c.benchmark_group("gate");
    group.sample_size(10);
    group.bench_function("effective_kernel", |b| {
        b.iter(|| simulate_gate(&sys, &seq, GateMode::Kernel, &GateOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, axial, sweep, phonon, gate);
criterion_main!(benches);
