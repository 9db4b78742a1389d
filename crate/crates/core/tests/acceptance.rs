//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the test harness so the lines appear in order. The process fails when a
//! criterion fails that is not listed in `KNOWN_FAILURES`; listed ones are still printed as FAIL.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selfdual_ns::axisym::*;
use selfdual_ns::config::SimConfig;
use selfdual_ns::diagnostics::balance_drift;
use selfdual_ns::helical::build_basis;
use selfdual_ns::initial::{random_band_scalar, random_band_vector, taylor_green};
use selfdual_ns::integrate::Scheme;
use selfdual_ns::kernels::verify_kernels;
use selfdual_ns::ns::{run, selfdual_initial};
use selfdual_ns::scalar::{scalar_rhs, scalar_rhs_direct, ScalarSolver};
use selfdual_ns::spectral::{helical_project, make_grid, HelicalSign, SpectralScalar, SpectralVector};
use selfdual_ns::stationary::*;
use selfdual_ns::verification::*;

/// Criteria that fail for documented reasons: the closed-form kernels as printed carry the
/// conjugations of the opposite variant (they match the toggled kernels to roundoff).
const KNOWN_FAILURES: &[&str] = &["A3"];

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: impl Into<String>) -> Line {
    let l = Line { id, pass, detail: detail.into() };
    println!("{} {} {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail);
    l
}

fn a1() -> Line {
    let start = Instant::now();
    let r = verify_equivalence(&TrajectoryCheck::default()).expect("equivalence run");
    let secs = start.elapsed().as_secs_f64();
    let ok = r.max_deviation <= 1e-9 && secs <= 120.0;
    line("A1", ok, format!("max relative deviation {:.3e} (tol 1e-9) over {} samples, {secs:.1} s (limit 120 s)", r.max_deviation, r.comparisons))
}

fn a2() -> Line {
    let r = verify_symmetry(&TrajectoryCheck { seed: 2, ..Default::default() }).expect("symmetry run");
    line("A2", r.max_deviation <= 1e-9, format!("max relative deviation {:.3e} (tol 1e-9) to T = {}", r.max_deviation, r.final_time))
}

fn a3() -> Line {
    let start = Instant::now();
    let r = verify_kernels(10_000, 7, 1e-12);
    let literal = r.variants.iter().map(|v| v.max_abs_deviation).fold(0.0, f64::max);
    let toggled = r.variants.iter().map(|v| v.max_abs_deviation_toggled).fold(0.0, f64::max);
    let parity = r.variants.iter().all(|v| v.parity_confirmed == r.samples && v.parity_confirmed_closed_form == r.samples);
    line(
        "A3",
        r.pass,
        format!(
            "closed forms vs direct {literal:.3e} (tol 1e-12); vs conjugation-toggled direct {toggled:.3e}; parity on every sample: {parity}; {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn a4() -> Line {
    // self-dual data
    let grid = make_grid([32; 3], 2.0 * PI).unwrap();
    let basis = build_basis(&grid);
    let cfg = SimConfig { t_end: 0.2, output_every: 1, ..SimConfig::default() };
    let u0 = selfdual_initial(&random_band_scalar(&grid, 4.0, 1.0, 3), &basis);
    let sd = run(&cfg, u0, |_, _| {}).expect("self-dual run");
    let e0 = sd.records[0].energy;
    let helicity = sd.records.iter().map(|r| r.helicity.abs()).fold(0.0, f64::max) / e0;
    let split = sd.records.iter().map(|r| (r.ec_plus - r.ec_minus).abs() / r.ec_plus.max(r.ec_minus)).fold(0.0, f64::max);
    // generic viscous data: Taylor–Green for energy, random helical data for helicity
    let tg = run(&SimConfig { t_end: 1.0, output_every: 1, ..SimConfig::default() }, taylor_green(&grid, 1.0), |_, _| {})
        .expect("Taylor–Green run");
    let generic = run(&cfg, random_band_vector(&grid, 4.0, 1.0, 5), |_, _| {}).expect("generic run");
    let d_tg = balance_drift(&tg.records).unwrap();
    let d_gen = balance_drift(&generic.records).unwrap();
    let energy = d_tg.energy_drift.max(d_gen.energy_drift);
    let ok = helicity <= 1e-10 && split <= 1e-10 && energy <= 1e-8 && d_gen.helicity_drift <= 1e-8;
    line(
        "A4",
        ok,
        format!(
            "self-dual max|H|/E(0) {helicity:.2e} (1e-10), Ec+ vs Ec- {split:.2e} (1e-10); energy balance drift {energy:.2e} (1e-8), helicity balance drift {:.2e} (1e-8)",
            d_gen.helicity_drift
        ),
    )
}

fn a5() -> Line {
    let mut worst: f64 = 0.0;
    for n in [8, 12] {
        let grid = make_grid([n; 3], 2.0 * PI).unwrap();
        let basis = build_basis(&grid);
        for seed in 0..50 {
            let v = random_band_scalar(&grid, n as f64, 1.0, 1000 + seed);
            let fast = scalar_rhs(&v, &basis, 0.1, false);
            let direct = scalar_rhs_direct(&v, &basis, 0.1, false).expect("direct evaluation");
            worst = worst.max(fast.relative_distance(&direct));
        }
    }
    line("A5", worst <= 1e-12, format!("fast vs direct scalar rhs, 100 fields on 8³ and 12³: {worst:.2e} (tol 1e-12)"))
}

fn a6() -> Vec<Line> {
    let base = AxisymCheck::default();
    let start = Instant::now();
    let b = axisym_cross_check(&base).expect("baseline cross-check");
    let fine = base.at_resolution(64);
    let f = axisym_cross_check(&fine).expect("refined cross-check");
    let smaller = base.at_resolution(32);
    let small = axisym_cross_check(&AxisymCheck { box_size: 2.0 * PI, radial_nodes: 24, ..smaller }).expect("32³ cross-check");
    let trajectory = line(
        "A6",
        b.deviation <= 1e-3 && f.deviation < b.deviation,
        format!(
            "trajectory: {}³/L={:.2}: {:.3e} (tol 1e-3), {}³/L={:.2}: {:.3e} (decreasing); change over T {:.1}%; edge/peak {:.1e}; {:.0} s",
            base.resolution,
            base.box_size,
            b.deviation,
            fine.resolution,
            fine.box_size,
            f.deviation,
            100.0 * b.change,
            b.edge_ratio,
            start.elapsed().as_secs_f64()
        ),
    );
    println!(
        "   info: 32³ with L = 2π (width {} exceeds the 1e-8 confinement radius): {:.3e}",
        base.width, small.deviation
    );

    // parity: the odd sector is invariant step by step
    let ax = make_axisym_grid(32, 32, 6.0, 2.0 * PI).unwrap();
    let v = confined_profile(&ax, 0.8, 3, 1.0, 4);
    let odd = v.sub(&v.reflect());
    let mut worst: f64 = 0.0;
    let mut s = AxisymSolver::new(&odd, 0.05, 1e-3, Scheme::Rk4IntegratingFactor, TermSet::Consistent).unwrap();
    for _ in 0..20 {
        s.step().unwrap();
        let p = s.profile();
        worst = worst.max(p.add(&p.reflect()).norm() / p.norm());
    }
    let parity = line("A6", worst <= 1e-11, format!("parity: odd sector kept to {worst:.2e} per step over 20 steps (tol 1e-11)"));

    // swirl of the swirl-free sector, lifted and evolved in the box
    let n = 32;
    let grid = make_grid([n; 3], 2.0 * PI).unwrap();
    let basis = Arc::new(build_basis(&grid));
    let ax = make_axisym_grid(24, n, PI, 2.0 * PI).unwrap();
    let v = confined_profile(&ax, 0.4, 2, 1.0, 11);
    let big_v = v.sub(&v.reflect());
    let mut solver = ScalarSolver::new(lift_to_3d(&big_v, &grid).unwrap(), basis.clone(), 0.05, 1e-3, Scheme::Rk4IntegratingFactor, true).unwrap();
    let mut mean: f64 = mean_swirl_fraction(&solver.velocity());
    let mut pointwise: f64 = swirl_fraction(&solver.velocity());
    for _ in 0..100 {
        solver.step().unwrap();
    }
    let u = solver.velocity();
    mean = mean.max(mean_swirl_fraction(&u));
    pointwise = pointwise.max(swirl_fraction(&u));
    let generic = mean_swirl_fraction(&lifted_velocity(&v, &basis).unwrap());
    let swirl = line(
        "A6",
        mean <= 1e-6,
        format!(
            "swirl: azimuthal-mean u_θ of the odd sector {mean:.2e} (tol 1e-6) to T = 0.1; generic data {generic:.2e}; pointwise |u_θ| incl. periodic images {pointwise:.2e}"
        ),
    );
    vec![trajectory, parity, swirl]
}

fn a7() -> Line {
    let g = make_axisym_grid(32, 16, 6.0, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = [0.0f64; 2];
    for i in 0..20 {
        let w = confined_profile(&g, rng.random_range(0.4..0.9), rng.random_range(1..4), rng.random_range(0.1..3.0), i);
        for (k, set) in [TermSet::AsPublished, TermSet::Consistent].into_iter().enumerate() {
            let r = stationary_residual_with(&w, 0.05, set).unwrap();
            worst[k] = worst[k].max(r.relative_distance(&substitution_oracle(&w, 0.05, set).unwrap()));
        }
    }
    let zero = solve_stationary(&AxisymScalar::zeros(&g), 0.05, &NewtonParams::default()).unwrap();
    let ok = worst[0] <= 1e-6 && worst[1] <= 1e-6 && zero.converged && zero.residual_norm == 0.0;
    line(
        "A7",
        ok,
        format!(
            "stationary residual vs substitution, 20 potentials: as published {:.2e}, consistent {:.2e} (tol 1e-6); zero guess residual {}",
            worst[0], worst[1], zero.residual_norm
        ),
    )
}

fn a8() -> Line {
    // modal → physical → modal on full-band data, and physical → modal → physical on smooth data
    let grid = make_grid([32, 24, 16], 2.0 * PI).unwrap();
    let s = random_band_scalar(&grid, 64.0, 1.0, 3);
    let v = random_band_vector(&grid, 64.0, 1.0, 3);
    let mut round = SpectralScalar::from_physical(&grid, &s.to_physical())
        .relative_distance(&s)
        .max(SpectralVector::from_physical(&grid, &v.to_physical()).relative_distance(&v));
    let smooth = SpectralScalar::from_fn(&grid, |x| (x[0] + 2.0 * x[1]).sin() * x[2].cos() + 0.3 * (3.0 * x[2]).sin());
    let values = smooth.to_physical();
    let back = SpectralScalar::from_physical(&grid, &values).to_physical();
    let scale = values.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    round = round.max(values.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale);

    let u = random_band_vector(&make_grid([16; 3], 2.0 * PI).unwrap(), 6.0, 1.0, 9);
    let plus = helical_project(&u, HelicalSign::Plus).unwrap();
    let minus = helical_project(&u, HelicalSign::Minus).unwrap();
    let partition = plus.add(&minus).relative_distance(&u);
    let orthogonal = plus.inner(&minus).abs() / u.l2_norm_sq();

    let scaling = verify_scaling(&TrajectoryCheck { seed: 4, ..Default::default() }).expect("scaling run");
    let ok = round <= 1e-13 && partition <= 1e-12 && orthogonal <= 1e-12 && scaling.max_deviation <= 1e-9;
    line(
        "A8",
        ok,
        format!(
            "transform round trip {round:.2e} (1e-13); helical partition {partition:.2e}, orthogonality {orthogonal:.2e} (1e-12); scaling covariance λ=2 {:.2e} (1e-9)",
            scaling.max_deviation
        ),
    )
}

fn main() -> ExitCode {
    let mut lines = vec![a1(), a2(), a3(), a4(), a5()];
    lines.extend(a6());
    lines.extend([a7(), a8()]);
    let unexpected: Vec<&str> = lines.iter().filter(|l| !l.pass && !KNOWN_FAILURES.contains(&l.id)).map(|l| l.id).collect();
    let known: Vec<&str> = lines.iter().filter(|l| !l.pass && KNOWN_FAILURES.contains(&l.id)).map(|l| l.id).collect();
    println!(
        "acceptance: {} of {} checks pass; known failures {:?}; unexpected failures {:?}",
        lines.iter().filter(|l| l.pass).count(),
        lines.len(),
        known,
        unexpected
    );
    if unexpected.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
