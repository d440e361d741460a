//! Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Every reference value is computed here from an independent route (quadrature oracles,
//! finite differences, a brute-force observability Gramian, a direct ODE integrator, repeated
//! runs of the shipped binary) rather than read back from the code under test.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use gradobs_cli::commands::neutral_mode_report;
use gradobs_cli::ScenarioConfig;
use gradobs_core::nalgebra::{DMatrix, DVector};
use gradobs_core::observer::{actuator_input_map, integrate_observer_rk4};
use gradobs_core::sensing::{DEFAULT_GROUP_TOL, DEFAULT_RANK_TOL};
use gradobs_core::trace::FnVectorField;
use gradobs_core::{
    assemble_output_map, boundary_gradient_trace, design_gain, extend_by_zero, fit_decay, gradient_adjoint,
    group_eigenvalues, proposition_check, simulate_coupled, strategic_rank_test, BcFamily, BoundaryRegion,
    BoundarySegment, BoundaryTraceField, Measurement, ModalBasis, ModalField, Mode, Profile, QuadratureRule,
    RectDomain, SensorSpec, Side, Signal, SystemSpec, Target, TraceOperator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = (bool, String);
type Criterion = (&'static str, fn() -> Verdict);

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn load(name: &str) -> ScenarioConfig {
    ScenarioConfig::from_path(&scenarios_dir().join(format!("{name}.toml"))).unwrap()
}

// ---------------------------------------------------------------------------------------------
// 1. Operator chain

fn criterion_1() -> Verdict {
    let d = RectDomain::new(1.3, 0.9).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;

    // H¹ Gram matrix by tensor quadrature of values and gradients.
    let rule = QuadratureRule::gauss_legendre(40).unwrap();
    let mut gram_dev: f64 = 0.0;
    for bc in [BcFamily::NeumannCosine, BcFamily::DirichletSine] {
        let b = ModalBasis::new(d, bc, 8, 8).unwrap();
        let mut gram = DMatrix::<f64>::zeros(b.len(), b.len());
        for (p, w) in rule.tensor((0.0, d.a1()), (0.0, d.a2())) {
            let v = DVector::from_iterator(b.len(), b.modes().iter().map(|&m| b.eigenfunction_eval(m, p).unwrap()));
            let g: Vec<[f64; 2]> = b
                .modes()
                .iter()
                .map(|&m| b.grad_eigenfunction_eval(m, p).unwrap())
                .collect();
            let gx = DVector::from_iterator(b.len(), g.iter().map(|g| g[0]));
            let gy = DVector::from_iterator(b.len(), g.iter().map(|g| g[1]));
            gram += (&v * v.transpose() + &gx * gx.transpose() + &gy * gy.transpose()) * w;
        }
        gram_dev = gram_dev.max((gram - DMatrix::<f64>::identity(b.len(), b.len())).amax());
    }
    ok &= gram_dev < 1e-8;
    notes.push(format!("gram dev {gram_dev:.1e}"));

    // Analytic gradients against central differences.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = 1e-6;
    let mut fd_dev: f64 = 0.0;
    for bc in [BcFamily::NeumannCosine, BcFamily::DirichletSine] {
        let b = ModalBasis::new(d, bc, 8, 8).unwrap();
        for _ in 0..10 {
            let p = [
                rng.random_range(0.05..d.a1() - 0.05),
                rng.random_range(0.05..d.a2() - 0.05),
            ];
            for &m in b.modes() {
                let g = b.grad_eigenfunction_eval(m, p).unwrap();
                let f = |q: [f64; 2]| b.eigenfunction_eval(m, q).unwrap();
                let fx = (f([p[0] + h, p[1]]) - f([p[0] - h, p[1]])) / (2.0 * h);
                let fy = (f([p[0], p[1] + h]) - f([p[0], p[1] - h])) / (2.0 * h);
                fd_dev = fd_dev.max((g[0] - fx).abs()).max((g[1] - fy).abs());
            }
        }
    }
    ok &= fd_dev < 1e-6;
    notes.push(format!("fd dev {fd_dev:.1e}"));

    // Restriction / zero-extension duality.
    let brule = QuadratureRule::gauss_legendre(64).unwrap();
    let region = BoundaryRegion::new(
        d,
        vec![
            BoundarySegment::new(Side::Bottom, 0.2, 0.9, &d).unwrap(),
            BoundarySegment::new(Side::Left, 0.1, 0.6, &d).unwrap(),
        ],
    )
    .unwrap();
    let full = region.boundary_partition();
    let b = ModalBasis::new(d, BcFamily::NeumannCosine, 8, 8).unwrap();
    let mut dual_dev: f64 = 0.0;
    for _ in 0..10 {
        let f = ModalField::from_coeffs(&b, DVector::from_fn(b.len(), |_, _| rng.random_range(-1.0..1.0))).unwrap();
        let tf = boundary_gradient_trace(&f, &full, &brule).unwrap();
        let n = region.segments().len() * brule.order();
        let gv: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        let g = BoundaryTraceField::from_values(region.clone(), &brule, gv).unwrap();
        let lhs = tf.restrict(&region).unwrap().inner(&g).unwrap();
        let rhs = tf.inner(&extend_by_zero(&g, &full).unwrap()).unwrap();
        dual_dev = dual_dev.max((lhs - rhs).abs());
    }
    ok &= dual_dev < 1e-12;
    notes.push(format!("duality dev {dual_dev:.1e}"));

    // <grad u, Y> = -<grad u, grad v> for v = grad* Y and boundary-vanishing u.
    let solver: Arc<ModalBasis> = ModalBasis::new(d, BcFamily::DirichletSine, 8, 8).unwrap();
    let srule = QuadratureRule::gauss_legendre(48).unwrap();
    let oracle = QuadratureRule::gauss_legendre(60).unwrap();
    let mut adj_dev: f64 = 0.0;
    for _ in 0..10 {
        let u = ModalField::from_coeffs(
            &solver,
            DVector::from_fn(solver.len(), |_, _| rng.random_range(-1.0..1.0)),
        )
        .unwrap();
        let a: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = move |p: [f64; 2]| {
            [
                a[0] + a[1] * p[0] * p[1] + a[2] * (2.0 * p[0]).sin(),
                a[3] * p[0] + a[4] * (3.0 * p[1]).cos() + a[5] * (p[0] - p[1]).exp(),
            ]
        };
        let v = gradient_adjoint(&FnVectorField::new(d, &y), &solver, &srule).unwrap();
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for (p, w) in oracle.tensor((0.0, d.a1()), (0.0, d.a2())) {
            let gu = u.gradient(p).unwrap();
            let gv = v.gradient(p).unwrap();
            let yv = y(p);
            lhs += w * (gu[0] * yv[0] + gu[1] * yv[1]);
            rhs -= w * (gu[0] * gv[0] + gu[1] * gv[1]);
        }
        adj_dev = adj_dev.max((lhs - rhs).abs());
    }
    ok &= adj_dev < 1e-8;
    notes.push(format!("adjoint dev {adj_dev:.1e} (10 functions)"));
    (ok, notes.join(", "))
}

// ---------------------------------------------------------------------------------------------
// 2. Rank test against a brute-force observability Gramian

fn trace_or_flux(bc: BcFamily) -> Measurement {
    match bc {
        BcFamily::NeumannCosine => Measurement::Trace,
        BcFamily::DirichletSine => Measurement::Flux,
    }
}

/// A coordinate in `(0, len)`, snapped to a nodal fraction of the side with probability `snap`.
fn coord(rng: &mut ChaCha8Rng, len: f64, snap: f64) -> f64 {
    if rng.random_bool(snap) {
        let (p, q) = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4)][rng.random_range(0..5)];
        len * p as f64 / q as f64
    } else {
        len * rng.random_range(0.05..0.95)
    }
}

fn random_sensor(rng: &mut ChaCha8Rng, d: &RectDomain, bc: BcFamily, snap: f64) -> SensorSpec {
    let (a1, a2) = (d.a1(), d.a2());
    match rng.random_range(0..5) {
        0 => SensorSpec::Pointwise {
            location: [coord(rng, a1, snap), coord(rng, a2, snap)],
        },
        1 => {
            let (cx, cy) = (coord(rng, a1, snap), coord(rng, a2, snap));
            let (hx, hy) = (0.04 * a1, 0.05 * a2);
            SensorSpec::InternalZone {
                x: ((cx - hx).max(0.0), (cx + hx).min(a1)),
                y: ((cy - hy).max(0.0), (cy + hy).min(a2)),
                profile: Profile::Constant(1.0),
            }
        }
        2 => {
            let (cx, cy) = (coord(rng, a1, snap), coord(rng, a2, snap));
            let (start, end) = if rng.random_bool(0.5) {
                let h = 0.05 * a1;
                ([(cx - h).max(0.0), cy], [(cx + h).min(a1), cy])
            } else {
                let h = 0.05 * a2;
                ([cx, (cy - h).max(0.0)], [cx, (cy + h).min(a2)])
            };
            SensorSpec::Filament {
                start,
                end,
                profile: Profile::Constant(1.0),
            }
        }
        3 => {
            let side = Side::ALL[rng.random_range(0..4)];
            let s = coord(rng, side.length(d), snap);
            SensorSpec::BoundaryPointwise {
                location: side.point(s, d),
                measurement: trace_or_flux(bc),
            }
        }
        _ => {
            let side = Side::ALL[rng.random_range(0..4)];
            let len = side.length(d);
            let c = coord(rng, len, snap);
            let h = 0.06 * len;
            SensorSpec::BoundaryZone {
                segments: vec![(
                    BoundarySegment::new(side, (c - h).max(0.0), (c + h).min(len), d).unwrap(),
                    Profile::Constant(1.0),
                )],
                measurement: trace_or_flux(bc),
            }
        }
    }
}

/// Smallest over largest eigenvalue of `W = int_0^1 e^{Lambda t} C^T C e^{Lambda t} dt` on the
/// modes of the first groups, with the time integral done by composite Gauss–Legendre.
fn gramian_ratio(c: &DMatrix<f64>, lam: &[f64], idx: &[usize]) -> f64 {
    let cs = c.select_columns(idx);
    let ctc = cs.transpose() * &cs;
    let tr = QuadratureRule::gauss_legendre(16).unwrap();
    let panels = 40;
    let mut w = DMatrix::<f64>::zeros(idx.len(), idx.len());
    for p in 0..panels {
        let lo = p as f64 / panels as f64;
        for (t, wt) in tr.on_interval(lo, lo + 1.0 / panels as f64) {
            let e = DVector::from_iterator(idx.len(), idx.iter().map(|&k| (lam[k] * t).exp()));
            w += ctc.component_mul(&(&e * e.transpose())) * wt;
        }
    }
    let ev = w.symmetric_eigenvalues();
    ev.min() / ev.max()
}

const GRAMIAN_FULL: f64 = 1e-12;
const GRAMIAN_DEFICIENT: f64 = 1e-16;

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rule = QuadratureRule::gauss_legendre(64).unwrap();
    let (mut decided, mut agree, mut excluded, mut deficient) = (0, 0, 0, 0);
    let mut disagreements = Vec::new();
    let mut tries = 0;
    while decided < 20 && tries < 400 {
        tries += 1;
        let bc = if rng.random_bool(0.5) {
            BcFamily::NeumannCosine
        } else {
            BcFamily::DirichletSine
        };
        let a1 = rng.random_range(0.8..1.3);
        // Some square domains to include repeated eigenvalues.
        let a2 = if rng.random_bool(0.25) {
            a1
        } else {
            rng.random_range(0.7..1.4)
        };
        let d = RectDomain::new(a1, a2).unwrap();
        let b = ModalBasis::new(d, bc, 8, 8).unwrap();
        let j = rng.random_range(1..=4);
        let q = if rng.random_bool(0.6) {
            1
        } else {
            rng.random_range(2..=3)
        };
        let sensors: Vec<SensorSpec> = (0..q).map(|_| random_sensor(&mut rng, &d, bc, 0.6)).collect();
        let Ok(c) = assemble_output_map(&sensors, &b, &rule) else {
            continue;
        };
        let groups = group_eigenvalues(&b, j, DEFAULT_GROUP_TOL).unwrap();
        // Near-coincident eigenvalues in different groups make the Gramian unresolvable.
        let min_gap = groups
            .windows(2)
            .map(|w| (w[0].eigenvalue - w[1].eigenvalue).abs())
            .fold(f64::INFINITY, f64::min);
        let report = strategic_rank_test(&c, &groups, DEFAULT_RANK_TOL).unwrap();
        let idx: Vec<usize> = groups.iter().flat_map(|g| g.indices.iter().copied()).collect();
        let ratio = gramian_ratio(&c.row_normalized(), b.eigenvalues(), &idx);
        let gram_verdict = if ratio > GRAMIAN_FULL {
            Some(true)
        } else if ratio < GRAMIAN_DEFICIENT {
            Some(false)
        } else {
            None
        };
        if report.any_marginal() || gram_verdict.is_none() || min_gap < 1e-2 {
            excluded += 1;
            continue;
        }
        decided += 1;
        deficient += usize::from(!report.is_strategic());
        if gram_verdict == Some(report.is_strategic()) {
            agree += 1;
        } else {
            disagreements.push(format!("{bc:?} {a1:.3}x{a2:.3} J={j} ratio {ratio:.1e}"));
        }
    }
    let ok = decided == 20 && agree == 20 && deficient > 0 && deficient < 20;
    (
        ok,
        format!(
            "{agree}/{decided} agree ({deficient} rank-deficient), {excluded} marginal excluded{}",
            if disagreements.is_empty() {
                String::new()
            } else {
                format!("; mismatches: {}", disagreements.join("; "))
            }
        ),
    )
}

// ---------------------------------------------------------------------------------------------
// 3. Closed-form placement criteria against the rank test

/// One scenario per closed-form placement pattern, each with a `_violating` twin.
const PLACEMENT_SCENARIOS: [&str; 6] = [
    "internal_zone",
    "flux_zone",
    "flux_zone_two_sides",
    "point",
    "filament",
    "flux_point",
];

fn criterion_3() -> Verdict {
    let mut matching = 0;
    let mut notes = Vec::new();
    for base in PLACEMENT_SCENARIOS {
        let mut pair_ok = true;
        for (suffix, expect) in [("", true), ("_violating", false)] {
            let cfg = load(&format!("{base}{suffix}"));
            let r = cfg.resolve().unwrap();
            let c = assemble_output_map(&r.sensors, &r.basis, &r.rule).unwrap();
            let groups = group_eigenvalues(&r.basis, cfg.groups, DEFAULT_GROUP_TOL).unwrap();
            let report = strategic_rank_test(&c, &groups, DEFAULT_RANK_TOL).unwrap();
            let predicted = proposition_check(&r.sensors[0], &r.basis, cfg.groups, DEFAULT_GROUP_TOL)
                .unwrap()
                .predicted_strategic();
            let sigma = report.min_singular_value();
            let ok =
                predicted == Some(report.is_strategic()) && report.is_strategic() == expect && (expect || sigma < 1e-8);
            if !ok {
                notes.push(format!(
                    "{base}{suffix}: predicted {predicted:?}, rank {} (sigma_min {sigma:.1e})",
                    report.is_strategic()
                ));
            }
            pair_ok &= ok;
        }
        matching += usize::from(pair_ok);
    }
    let ok = matching >= 6;
    let mut msg = format!("{matching}/6 scenario pairs match");
    if !notes.is_empty() {
        msg.push_str(&format!("; {}", notes.join("; ")));
    }
    (ok, msg)
}

// ---------------------------------------------------------------------------------------------
// 4. Neutral-mode example

fn criterion_4() -> Verdict {
    let cfg = load("neutral_mode");
    let rep = neutral_mode_report(&cfg).unwrap();
    let names_neutral = rep.omega_failing.iter().any(|(_, m)| m.contains(&Mode::new(0, 0)));
    let a = !rep.omega_detectable && names_neutral;
    let b = rep.omega_relative_gap() <= 0.01 && rep.gamma_error_at_check < 1e-6 && rep.t_check <= 2.0 + 1e-9;
    let c = rep.family_strategic;
    (
        a && b && c,
        format!(
            "(a) Ω-detectable {} naming (0, 0): {names_neutral}; (b) at t = {} |Ω err - |c||/|c| = {:.1e}, Γ* err {:.1e}; (c) m = 1 family strategic {} (sigma_min {:.2e})",
            rep.omega_detectable,
            rep.t_check,
            rep.omega_relative_gap(),
            rep.gamma_error_at_check,
            rep.family_strategic,
            rep.family_min_singular_value
        ),
    )
}

// ---------------------------------------------------------------------------------------------
// 5. Closed-loop spectrum and decay on strategic configurations

struct Config {
    sys: SystemSpec,
    sensors: Vec<SensorSpec>,
    region: BoundaryRegion,
    z0: ModalField,
}

fn random_region(rng: &mut ChaCha8Rng, d: &RectDomain) -> BoundaryRegion {
    let side = Side::ALL[rng.random_range(0..4)];
    let len = side.length(d);
    let lo = rng.random_range(0.0..0.4) * len;
    let hi = rng.random_range(0.6..1.0) * len;
    BoundaryRegion::single(*d, BoundarySegment::new(side, lo, hi, d).unwrap())
}

fn random_field(rng: &mut ChaCha8Rng, b: &Arc<ModalBasis>, scale: f64) -> ModalField {
    ModalField::from_coeffs(b, DVector::from_fn(b.len(), |_, _| scale * rng.random_range(-1.0..1.0))).unwrap()
}

/// A random plant whose least stable mode grows at rate `growth` (the reaction shift is set
/// relative to the top eigenvalue), observed by three interior points.
fn random_config(rng: &mut ChaCha8Rng, growth: f64, with_input: bool, n_max: usize) -> Config {
    let bc = if rng.random_bool(0.5) {
        BcFamily::NeumannCosine
    } else {
        BcFamily::DirichletSine
    };
    let d = RectDomain::new(rng.random_range(0.8..1.3), rng.random_range(0.8..1.3)).unwrap();
    let b = ModalBasis::new(d, bc, n_max, n_max).unwrap();
    let sensors: Vec<SensorSpec> = (0..3)
        .map(|_| SensorSpec::Pointwise {
            location: [d.a1() * rng.random_range(0.1..0.9), d.a2() * rng.random_range(0.1..0.9)],
        })
        .collect();
    let top = b.eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sys = SystemSpec::new(&b)
        .with_reaction(growth - top)
        .unwrap()
        .with_initial_state(random_field(rng, &b, 1.0))
        .unwrap();
    if with_input {
        let act = [SensorSpec::Pointwise {
            location: [d.a1() * rng.random_range(0.2..0.8), d.a2() * rng.random_range(0.2..0.8)],
        }];
        let bmat = actuator_input_map(&act, &b, &QuadratureRule::gauss_legendre(8).unwrap()).unwrap();
        let signal = Signal::Sine {
            amplitude: rng.random_range(0.5..2.0),
            frequency: rng.random_range(0.5..3.0),
            phase: rng.random_range(0.0..1.0),
        };
        sys = sys.with_input(bmat, vec![signal]).unwrap();
    }
    let region = random_region(rng, &d);
    let z0 = random_field(rng, &b, 0.5);
    Config {
        sys,
        sensors,
        region,
        z0,
    }
}

fn criterion_5() -> Verdict {
    let alpha = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rule = QuadratureRule::gauss_legendre(64).unwrap();
    let (mut done, mut tries) = (0, 0);
    let mut worst_eig = f64::NEG_INFINITY;
    let mut worst_rate = f64::INFINITY;
    let mut ok = true;
    while done < 10 && tries < 100 {
        tries += 1;
        let with_input = rng.random_bool(0.5);
        let growth = rng.random_range(0.0..2.0);
        let cfg = random_config(&mut rng, growth, with_input, 8);
        let b = cfg.sys.basis().clone();
        let c = assemble_output_map(&cfg.sensors, &b, &rule).unwrap();
        let groups = group_eigenvalues(&b, 4, DEFAULT_GROUP_TOL).unwrap();
        let report = strategic_rank_test(&c, &groups, DEFAULT_RANK_TOL).unwrap();
        if !report.is_strategic() || report.any_marginal() {
            continue;
        }
        let gain = design_gain(&c, &cfg.sys, alpha, &Target::Omega, &rule).unwrap();
        // Spectrum of the full closed-loop generator, independent of the design's bookkeeping.
        let lam = cfg.sys.eigenvalues();
        let m = DMatrix::from_diagonal(&DVector::from_vec(lam)) - gain.matrix() * c.matrix();
        let max_re = m
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        worst_eig = worst_eig.max(max_re);
        ok &= max_re <= -alpha + 1e-6;

        let gamma = TraceOperator::new(&b, &cfg.region, &rule).unwrap();
        let rec = simulate_coupled(&cfg.sys, &c, &gain, &cfg.z0, 4.0, 0.01, &gamma).unwrap();
        let fit = fit_decay(&rec.times, &rec.gamma_error_norm, 0.5).unwrap();
        let rate = if fit.converged() { f64::INFINITY } else { fit.rate };
        worst_rate = worst_rate.min(rate);
        ok &= rate >= 0.95 * alpha;
        done += 1;
    }
    ok &= done == 10;
    (
        ok,
        format!("{done} configurations (top mode growth in [0, 2)): max Re eig {worst_eig:.6}, min fitted Γ* rate {worst_rate:.4}"),
    )
}

// ---------------------------------------------------------------------------------------------
// 6. Exact propagation against a fixed-step fourth-order integrator

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let rule = QuadratureRule::gauss_legendre(64).unwrap();
    let mut worst: f64 = 0.0;
    let mut done = 0;
    let mut tries = 0;
    while done < 5 && tries < 50 {
        tries += 1;
        let growth = rng.random_range(1.0..3.0);
        let cfg = random_config(&mut rng, growth, true, 8);
        let b = cfg.sys.basis().clone();
        let c = assemble_output_map(&cfg.sensors, &b, &rule).unwrap();
        let Ok(gain) = design_gain(&c, &cfg.sys, 0.5, &Target::Omega, &rule) else {
            continue;
        };
        let gamma = TraceOperator::new(&b, &cfg.region, &rule).unwrap();
        let rec = simulate_coupled(&cfg.sys, &c, &gain, &cfg.z0, 2.0, 0.01, &gamma).unwrap();
        let rk = integrate_observer_rk4(&cfg.sys, &c, &gain, &cfg.z0, 2.0, 5e-4, 0.01).unwrap();
        for (e, r) in rec.error.iter().zip(&rk) {
            worst = worst.max((e.coeffs() - r).amax());
        }
        done += 1;
    }
    (
        done == 5 && worst < 1e-6,
        format!("{done} configurations, max |e_expm - e_rk4| = {worst:.2e}"),
    )
}

// ---------------------------------------------------------------------------------------------
// 7. Nested regions

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rule = QuadratureRule::gauss_legendre(64).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut instants = 0;
    for _ in 0..5 {
        let cfg = random_config(&mut rng, 2.0, false, 6);
        let b = cfg.sys.basis().clone();
        let d = *b.domain();
        let c = assemble_output_map(&cfg.sensors, &b, &rule).unwrap();
        let Ok(gain) = design_gain(&c, &cfg.sys, 0.5, &Target::Omega, &rule) else {
            continue;
        };
        let outer = BoundaryRegion::new(
            d,
            vec![
                BoundarySegment::new(Side::Bottom, 0.1 * d.a1(), 0.8 * d.a1(), &d).unwrap(),
                BoundarySegment::new(Side::Right, 0.0, 0.5 * d.a2(), &d).unwrap(),
                BoundarySegment::full(Side::Top, &d),
            ],
        )
        .unwrap();
        let inner = [
            BoundaryRegion::single(d, outer.segments()[0]),
            BoundaryRegion::new(d, vec![outer.segments()[1], outer.segments()[2]]).unwrap(),
        ];
        let outer_op = TraceOperator::new(&b, &outer, &rule).unwrap();
        let rec = simulate_coupled(&cfg.sys, &c, &gain, &cfg.z0, 4.0, 0.01, &outer_op).unwrap();
        for reg in &inner {
            let op = TraceOperator::new(&b, reg, &rule).unwrap();
            for (small, big) in rec.error_norms_on(&op).iter().zip(&rec.gamma_error_norm) {
                worst = worst.max(small - big);
                instants += 1;
            }
        }
    }
    (
        instants > 0 && worst <= 0.0,
        format!("{instants} instants, max (‖Γ¹*‖ - ‖Γ*‖) = {worst:.2e}"),
    )
}

// ---------------------------------------------------------------------------------------------
// 8. Reproducible outputs from the shipped binary

fn run_scenario(name: &str, out: &Path) -> std::io::Result<i32> {
    let cmd = match name {
        "neutral_mode" => "example-3-7",
        "unstable_reaction" => "simulate",
        n if n.starts_with("sweep") => "sweep",
        _ => "rank-check",
    };
    let status = Command::new(env!("CARGO_BIN_EXE_gradobs"))
        .args([cmd, "--config"])
        .arg(scenarios_dir().join(format!("{name}.toml")))
        .arg("--out")
        .arg(out)
        .arg("--emit-mode-coeffs")
        .output()?
        .status;
    Ok(status.code().unwrap_or(-1))
}

fn criterion_8() -> Verdict {
    let mut names: Vec<String> = fs::read_dir(scenarios_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "toml").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    let mut files = 0;
    let mut csv_files = 0;
    let mut diffs = Vec::new();
    for name in &names {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let ca = run_scenario(name, a.path()).unwrap();
        let cb = run_scenario(name, b.path()).unwrap();
        if ca != cb || ca == 1 {
            diffs.push(format!("{name}: exit codes {ca}/{cb}"));
        }
        let mut listing: Vec<_> = fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        listing.sort();
        for f in listing {
            files += 1;
            csv_files += usize::from(Path::new(&f).extension().is_some_and(|e| e == "csv"));
            let x = fs::read(a.path().join(&f)).unwrap();
            let y = fs::read(b.path().join(&f)).unwrap_or_default();
            if x != y {
                diffs.push(format!("{name}/{}", f.to_string_lossy()));
            }
        }
    }
    (
        diffs.is_empty() && csv_files >= names.len(),
        format!(
            "{} scenarios, {files} files ({csv_files} CSV) byte-identical across two runs{}",
            names.len(),
            if diffs.is_empty() {
                String::new()
            } else {
                format!("; differences: {}", diffs.join(", "))
            }
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("operator chain", criterion_1),
        ("rank test vs Gramian", criterion_2),
        ("placement criteria", criterion_3),
        ("neutral-mode example", criterion_4),
        ("closed-loop decay", criterion_5),
        ("expm vs RK4", criterion_6),
        ("nested regions", criterion_7),
        ("reproducible outputs", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        failed += usize::from(!ok);
        println!(
            "criterion {}: {} [{name}] {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
