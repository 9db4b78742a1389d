//! End-to-end checks shared by the command line and the acceptance suite.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::axisym::{confined_profile, lift_to_3d, make_axisym_grid, sample_from_3d, AxisymSolver, TermSet};
use crate::helical::build_basis;
use crate::initial::{random_band_scalar, random_band_vector};
use crate::integrate::Scheme;
use crate::ns::{dual_transform, selfdual_initial, NsSolver};
use crate::diagnostics::scaling_transform;
use crate::scalar::ScalarSolver;
use crate::spectral::{make_grid, resample, SpectralVector};
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct TrajectoryCheck {
    pub resolution: usize,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Integer frequency radius of the random initial data.
    pub band: f64,
    pub amplitude: f64,
    pub seed: u64,
    pub scheme: Scheme,
    pub dealias: bool,
    /// Steps between comparisons.
    pub every: usize,
}

impl Default for TrajectoryCheck {
    fn default() -> Self {
        Self {
            resolution: 32,
            nu: 0.05,
            dt: 1e-3,
            t_end: 0.5,
            band: 4.0,
            amplitude: 1.0,
            seed: 1,
            scheme: Scheme::Rk4IntegratingFactor,
            dealias: true,
            every: 10,
        }
    }
}

impl TrajectoryCheck {
    fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectoryReport {
    /// Largest relative L² distance over the compared times.
    pub max_deviation: f64,
    pub comparisons: usize,
    pub final_time: f64,
}

fn compare_in_lockstep(
    check: &TrajectoryCheck,
    mut step: impl FnMut() -> Result<()>,
    mut distance: impl FnMut() -> f64,
) -> Result<TrajectoryReport> {
    let steps = check.steps();
    let mut report = TrajectoryReport { max_deviation: distance(), comparisons: 1, final_time: 0.0 };
    for n in 1..=steps {
        step()?;
        if n % check.every.max(1) == 0 || n == steps {
            report.max_deviation = report.max_deviation.max(distance());
            report.comparisons += 1;
        }
    }
    report.final_time = steps as f64 * check.dt;
    Ok(report)
}

/// Evolves `selfdual_initial(v₀)` with the velocity solver and `v₀` with the scalar solver,
/// comparing the velocity with the reconstruction along the way.
pub fn verify_equivalence(check: &TrajectoryCheck) -> Result<TrajectoryReport> {
    let n = check.resolution;
    let grid = make_grid([n; 3], 2.0 * PI)?;
    let basis = Arc::new(build_basis(&grid));
    let v0 = random_band_scalar(&grid, check.band, check.amplitude, check.seed);
    let u0 = selfdual_initial(&v0, &basis);
    let ns = std::cell::RefCell::new(NsSolver::new(u0, check.nu, check.dt, check.scheme, check.dealias)?);
    let scalar = std::cell::RefCell::new(ScalarSolver::new(v0, basis, check.nu, check.dt, check.scheme, check.dealias)?);
    compare_in_lockstep(
        check,
        || {
            ns.borrow_mut().step()?;
            scalar.borrow_mut().step()
        },
        || scalar.borrow().velocity().relative_distance(ns.borrow().velocity()),
    )
}

/// Evolves a generic `u₀` and its dual image, comparing `dual(u(t))` with the evolved image.
pub fn verify_symmetry(check: &TrajectoryCheck) -> Result<TrajectoryReport> {
    let n = check.resolution;
    let grid = make_grid([n; 3], 2.0 * PI)?;
    let u0 = random_band_vector(&grid, check.band, check.amplitude, check.seed);
    let a = std::cell::RefCell::new(NsSolver::new(dual_transform(&u0), check.nu, check.dt, check.scheme, check.dealias)?);
    let b = std::cell::RefCell::new(NsSolver::new(u0, check.nu, check.dt, check.scheme, check.dealias)?);
    compare_in_lockstep(
        check,
        || {
            a.borrow_mut().step()?;
            b.borrow_mut().step()
        },
        || a.borrow().velocity().relative_distance(&dual_transform(b.borrow().velocity())),
    )
}

/// Evolves `u₀` on a grid of half the resolution and `λu₀(λx)`, `λ = 2`, on the full grid with
/// `dt/λ²`, comparing `λu(λ²t, λx)` with the rescaled run. The coarse 2/3 mask maps onto the fine
/// one, so the two discrete flows correspond exactly.
pub fn verify_scaling(check: &TrajectoryCheck) -> Result<TrajectoryReport> {
    const LAMBDA: usize = 2;
    let n = check.resolution;
    let coarse = make_grid([n / LAMBDA; 3], 2.0 * PI)?;
    let fine = make_grid([n; 3], 2.0 * PI)?;
    let u0 = random_band_vector(&coarse, check.band, check.amplitude, check.seed);
    let lift = |u: &SpectralVector| scaling_transform(&resample(u, &fine), LAMBDA);
    let dt_fine = check.dt / (LAMBDA * LAMBDA) as f64;
    let a = std::cell::RefCell::new(NsSolver::new(u0.clone(), check.nu, check.dt, check.scheme, check.dealias)?);
    let b = std::cell::RefCell::new(NsSolver::new(lift(&u0)?, check.nu, dt_fine, check.scheme, check.dealias)?);
    let failure = std::cell::RefCell::new(None);
    let report = compare_in_lockstep(
        check,
        || {
            a.borrow_mut().step()?;
            b.borrow_mut().step()
        },
        || match lift(a.borrow().velocity()) {
            Ok(u) => b.borrow().velocity().relative_distance(&u),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

/// Axisymmetric profile evolved by the profile equation and, lifted, by the periodic scalar solver.
#[derive(Debug, Clone, Copy)]
pub struct AxisymCheck {
    /// Cartesian resolution; also the number of axial modes.
    pub resolution: usize,
    /// Box size; the cylinder radius is half of it.
    pub box_size: f64,
    pub radial_nodes: usize,
    pub width: f64,
    pub modes: usize,
    pub amplitude: f64,
    pub seed: u64,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub set: TermSet,
}

impl Default for AxisymCheck {
    fn default() -> Self {
        Self {
            resolution: 48,
            box_size: 3.0 * PI,
            radial_nodes: 36,
            width: 0.6,
            modes: 2,
            amplitude: 1.0,
            seed: 11,
            nu: 0.05,
            dt: 1e-3,
            t_end: 0.1,
            set: TermSet::Consistent,
        }
    }
}

impl AxisymCheck {
    /// The same check at resolution `n` with the grid spacing kept: the box (and the cylinder)
    /// grows with `n`, so the periodic images recede as the grids refine.
    pub fn at_resolution(&self, n: usize) -> Self {
        let ratio = n as f64 / self.resolution as f64;
        Self {
            resolution: n,
            box_size: self.box_size * ratio,
            radial_nodes: (self.radial_nodes as f64 * ratio).round() as usize,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AxisymReport {
    /// `‖v_axisym(T) − v_lifted(T)‖ / ‖v_lifted(T)‖` on the radial nodes.
    pub deviation: f64,
    /// `‖v(T) − v(0)‖ / ‖v(0)‖`, to show the run is not trivially short.
    pub change: f64,
    /// Edge-to-peak ratio of the initial profile.
    pub edge_ratio: f64,
}

pub fn axisym_cross_check(check: &AxisymCheck) -> Result<AxisymReport> {
    let n = check.resolution;
    let grid = make_grid([n; 3], check.box_size)?;
    let basis = Arc::new(build_basis(&grid));
    let ax = make_axisym_grid(check.radial_nodes, n, 0.5 * check.box_size, check.box_size)?;
    let v0 = confined_profile(&ax, check.width, check.modes, check.amplitude, check.seed);
    let mut a = AxisymSolver::new(&v0, check.nu, check.dt, Scheme::Rk4IntegratingFactor, check.set)?;
    let mut b = ScalarSolver::new(lift_to_3d(&v0, &grid)?, basis, check.nu, check.dt, Scheme::Rk4IntegratingFactor, true)?;
    for _ in 0..(check.t_end / check.dt).round() as usize {
        a.step()?;
        b.step()?;
    }
    let va = a.profile();
    let vb = sample_from_3d(b.profile(), &ax)?;
    Ok(AxisymReport { deviation: va.relative_distance(&vb), change: va.relative_distance(&v0), edge_ratio: v0.edge_ratio() })
}
