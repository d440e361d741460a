use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gradobs_core::sensing::{DEFAULT_GROUP_TOL, DEFAULT_RANK_TOL};
use gradobs_core::{
    assemble_output_map, design_gain, group_eigenvalues, simulate_coupled, strategic_rank_test, BcFamily,
    BoundaryRegion, BoundarySegment, Measurement, ModalBasis, ModalField, Profile, QuadratureRule, RectDomain,
    SensorSpec, Side, SystemSpec, Target, TraceOperator,
};

fn setup() -> (std::sync::Arc<ModalBasis>, Vec<SensorSpec>, QuadratureRule) {
    let d = RectDomain::new(1.0, 1.2).unwrap();
    let b = ModalBasis::new(d, BcFamily::NeumannCosine, 8, 8).unwrap();
    let sensors = vec![
        SensorSpec::Pointwise { location: [0.31, 0.47] },
        SensorSpec::InternalZone {
            x: (0.6, 0.75),
            y: (0.2, 0.4),
            profile: Profile::Constant(1.0),
        },
        SensorSpec::BoundaryZone {
            segments: vec![(
                BoundarySegment::new(Side::Left, 0.1, 0.5, &d).unwrap(),
                Profile::Constant(1.0),
            )],
            measurement: Measurement::Trace,
        },
    ];
    (b, sensors, QuadratureRule::gauss_legendre(64).unwrap())
}

fn bench_assembly(c: &mut Criterion) {
    let (b, sensors, rule) = setup();
    c.bench_function("assemble_output_map", |bch| {
        bch.iter(|| assemble_output_map(black_box(&sensors), &b, &rule).unwrap())
    });
}

fn bench_rank_test(c: &mut Criterion) {
    let (b, sensors, rule) = setup();
    let out = assemble_output_map(&sensors, &b, &rule).unwrap();
    let groups = group_eigenvalues(&b, 4, DEFAULT_GROUP_TOL).unwrap();
    c.bench_function("strategic_rank_test_j4", |bch| {
        bch.iter(|| strategic_rank_test(black_box(&out), &groups, DEFAULT_RANK_TOL).unwrap())
    });
}

fn bench_simulation(c: &mut Criterion) {
    let (b, sensors, rule) = setup();
    let d = *b.domain();
    let out = assemble_output_map(&sensors, &b, &rule).unwrap();
    let x0 = b.project(|p| (3.0 * p[0]).sin() * p[1], &rule).unwrap();
    let sys = SystemSpec::new(&b)
        .with_reaction(2.0)
        .unwrap()
        .with_initial_state(x0)
        .unwrap();
    let region = BoundaryRegion::single(d, BoundarySegment::full(Side::Bottom, &d));
    let gain = design_gain(&out, &sys, 0.5, &Target::Region(region.clone()), &rule).unwrap();
    let gamma = TraceOperator::new(&b, &region, &rule).unwrap();
    let z0 = ModalField::zeros(&b);
    c.bench_function("simulate_coupled_t4", |bch| {
        bch.iter(|| simulate_coupled(&sys, &out, &gain, black_box(&z0), 4.0, 0.01, &gamma).unwrap())
    });
}

criterion_group!(benches, bench_assembly, bench_rank_test, bench_simulation);
criterion_main!(benches);
