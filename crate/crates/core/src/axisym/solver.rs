use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::field::{apply_symbol, AxisymScalar};
use super::grid::AxisymGrid;
use super::rhs::rhs_coeffs;
use super::terms::TermSet;
use crate::error::{Error, Result};
use crate::integrate::{Scheme, Stepper};
use crate::ns::{check_finite, RunFailure, Trajectory};

#[derive(Debug, Clone)]
pub struct AxisymState {
    pub t: f64,
    pub v: AxisymScalar,
}

/// Per-sample summary of an axisymmetric run.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct AxisymRecord {
    pub t: f64,
    pub norm: f64,
    pub max_abs: f64,
    pub edge_ratio: f64,
}

impl AxisymRecord {
    pub const CSV_HEADER: &'static str = "t,norm,max_abs,edge_ratio";

    pub fn of(s: &AxisymState) -> Self {
        Self { t: s.t, norm: s.v.norm(), max_abs: s.v.max_abs(), edge_ratio: s.v.edge_ratio() }
    }

    pub fn csv_row(&self) -> String {
        format!("{:e},{:e},{:e},{:e}", self.t, self.norm, self.max_abs, self.edge_ratio)
    }
}

/// Time stepping of the axisymmetric profile in mixed Fourier–Bessel coefficients;
/// viscosity is integrated exactly per mode as in the 3D solvers.
#[derive(Debug, Clone)]
pub struct AxisymSolver {
    grid: Arc<AxisymGrid>,
    t: f64,
    coeffs: Vec<Complex64>,
    set: TermSet,
    stepper: Stepper,
}

impl AxisymSolver {
    pub fn new(v0: &AxisymScalar, nu: f64, dt: f64, scheme: Scheme, set: TermSet) -> Result<Self> {
        if !(nu >= 0.0) || !(dt > 0.0) {
            return Err(Error::Constraint(format!("need nu ≥ 0 and dt > 0, got nu = {nu}, dt = {dt}")));
        }
        if !v0.is_confined() {
            log::warn!("initial profile is not confined (edge/peak {:.1e})", v0.edge_ratio());
        }
        let grid = v0.grid().clone();
        let ones = vec![Complex64::new(nu, 0.0); grid.len()];
        let rates = apply_symbol(&grid, &ones, 0.0, 2.0, false).iter().map(|c| c.re).collect();
        Ok(Self { t: 0.0, coeffs: v0.coeffs(), set, stepper: Stepper::new(scheme, dt, rates), grid })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn profile(&self) -> AxisymScalar {
        AxisymScalar::from_coeffs(&self.grid, &self.coeffs)
    }

    pub fn state(&self) -> AxisymState {
        AxisymState { t: self.t, v: self.profile() }
    }

    pub fn step(&mut self) -> Result<()> {
        let (grid, set) = (&self.grid, self.set);
        let failure = std::cell::RefCell::new(None);
        let next = self.stepper.step(&self.coeffs, |c| {
            let v = AxisymScalar::from_coeffs(grid, c);
            match rhs_coeffs(&v, c, 0.0, set) {
                Ok(n) => n,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    vec![Complex64::new(f64::NAN, 0.0); c.len()]
                }
            }
        });
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        check_finite(&next, self.t)?;
        self.coeffs = next;
        self.t += self.stepper.dt();
        Ok(())
    }
}

/// Integrates for `steps` steps, sampling every `every` steps and at the end.
pub fn run_axisym(
    solver: &mut AxisymSolver,
    steps: usize,
    every: usize,
    mut observe: impl FnMut(&AxisymState, &AxisymRecord),
) -> Result<Trajectory<AxisymState, AxisymRecord>, RunFailure<AxisymState, AxisymRecord>> {
    let every = every.max(1);
    let mut records = Vec::new();
    let mut sample = |solver: &AxisymSolver, records: &mut Vec<_>| {
        let s = solver.state();
        let r = AxisymRecord::of(&s);
        observe(&s, &r);
        records.push(r);
    };
    sample(solver, &mut records);
    for n in 1..=steps {
        if let Err(error) = solver.step() {
            return Err(RunFailure { error, records, last_good: solver.state() });
        }
        if n % every == 0 || n == steps {
            sample(solver, &mut records);
        }
    }
    Ok(Trajectory { records, final_state: solver.state() })
}
