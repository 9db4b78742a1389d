//! Rotational-form pseudo-spectral Navier–Stokes integrator, the duality
//! transform and self-dual initial data.

use std::sync::Arc;

use num_complex::Complex64;

use crate::config::SimConfig;
use crate::diagnostics::{compute_record, DiagnosticsRecord, Monitor};
use crate::error::{Error, Result};
use crate::helical::{reconstruct_plus, HelicalBasis};
use crate::integrate::{Scheme, Stepper};
use crate::spectral::{cross_product, curl, leray_project, reflect, Grid, HelicalSign, SpectralScalar, SpectralVector};

#[derive(Debug, Clone)]
pub struct NsState {
    pub t: f64,
    pub u: SpectralVector,
}

/// `P(u × ω)`, with the product optionally passed through the 2/3 mask.
///
/// The gradient `∇(|u|²/2 + p)` is removed by the Leray projection; the mean
/// of `u × ω` vanishes identically and is zeroed explicitly.
pub fn nonlinear_rhs_ns(u: &SpectralVector, dealias: bool) -> SpectralVector {
    let w = cross_product(u, &curl(u), dealias);
    let mut out = leray_project(&w);
    out.set(0, [Complex64::default(); 3]);
    out
}

pub(crate) fn viscous_rates(grid: &Grid, nu: f64, components: usize) -> Vec<f64> {
    let one: Vec<f64> = (0..grid.len()).map(|i| nu * grid.kmag(i).powi(2)).collect();
    one.iter().copied().cycle().take(components * grid.len()).collect()
}

/// `u_t = νΔu + P(u × ω)`.
pub fn time_derivative(u: &SpectralVector, nu: f64, dealias: bool) -> SpectralVector {
    let grid = u.grid();
    let mut out = nonlinear_rhs_ns(u, dealias);
    let n = grid.len();
    for (j, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c -= u.coeffs()[j] * (nu * grid.kmag(j % n).powi(2));
    }
    out
}

pub(crate) fn check_finite(c: &[Complex64], last_good_time: f64) -> Result<()> {
    if c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { last_good_time })
    }
}

/// Largest speed on the collocation grid.
pub fn max_speed(u: &SpectralVector) -> f64 {
    let p = u.to_physical();
    let n = u.grid().len();
    (0..n).map(|i| (p[i] * p[i] + p[n + i] * p[n + i] + p[2 * n + i] * p[2 * n + i]).sqrt()).fold(0.0, f64::max)
}

/// Warns when `dt` exceeds the advective limit `cfl·Δx/max|u|`.
pub fn check_cfl(u: &SpectralVector, dt: f64, cfl: f64) -> bool {
    let umax = max_speed(u);
    let limit = cfl * u.grid().spacing() / umax;
    let ok = umax == 0.0 || dt <= limit;
    if !ok {
        log::warn!("dt = {dt:e} exceeds the CFL limit {limit:e} (max|u| = {umax:e})");
    }
    ok
}

/// Stateful integrator; keeps multistep history between calls.
#[derive(Debug, Clone)]
pub struct NsSolver {
    state: NsState,
    nu: f64,
    dealias: bool,
    stepper: Stepper,
}

impl NsSolver {
    pub fn new(u0: SpectralVector, nu: f64, dt: f64, scheme: Scheme, dealias: bool) -> Result<Self> {
        u0.require_zero_mean("initial velocity")?;
        if !(nu >= 0.0) || !(dt > 0.0) {
            return Err(Error::Constraint(format!("need nu ≥ 0 and dt > 0, got nu = {nu}, dt = {dt}")));
        }
        let grid = u0.grid().clone();
        let stepper = Stepper::new(scheme, dt, viscous_rates(&grid, nu, 3));
        let mut u = leray_project(&u0);
        u.set(0, [Complex64::default(); 3]);
        Ok(Self { state: NsState { t: 0.0, u }, nu, dealias, stepper })
    }

    pub fn from_config(u0: SpectralVector, cfg: &SimConfig) -> Result<Self> {
        Self::new(u0, cfg.nu, cfg.dt, cfg.scheme, cfg.dealias)
    }

    pub fn state(&self) -> &NsState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn velocity(&self) -> &SpectralVector {
        &self.state.u
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dt(&self) -> f64 {
        self.stepper.dt()
    }

    pub fn time_derivative(&self) -> SpectralVector {
        time_derivative(&self.state.u, self.nu, self.dealias)
    }

    pub fn step(&mut self) -> Result<()> {
        let grid = self.state.u.grid().clone();
        let dealias = self.dealias;
        let next = self.stepper.step(self.state.u.coeffs(), |c| {
            let u = SpectralVector::from_coeffs(&grid, c.to_vec());
            nonlinear_rhs_ns(&u, dealias).into_coeffs()
        });
        check_finite(&next, self.state.t)?;
        let t = self.state.t + self.stepper.dt();
        self.state = NsState { t, u: SpectralVector::from_coeffs(&grid, next).with_flags(true, HelicalSign::Mixed) };
        Ok(())
    }
}

/// Advances one step from scratch. Multistep schemes start with their
/// one-step variant here; use [`NsSolver`] for trajectories.
pub fn step(state: &NsState, cfg: &SimConfig) -> Result<NsState> {
    check_cfl(&state.u, cfg.dt, cfg.cfl);
    let mut s = NsSolver::from_config(state.u.clone(), cfg)?;
    s.state.t = state.t;
    s.step()?;
    Ok(s.state)
}

/// `u₀ = u₊ − u₊ʳ` with `u₊` reconstructed from `v₀`; odd in `x` by construction.
pub fn selfdual_initial(v0: &SpectralScalar, basis: &HelicalBasis) -> SpectralVector {
    let up = reconstruct_plus(v0, basis);
    up.sub(&reflect(&up)).with_flags(true, HelicalSign::Mixed)
}

/// `u ↦ −u(−x)`, the action of `u₊ → −u₋ʳ, u₋ → −u₊ʳ` on the full velocity.
pub fn dual_transform(u: &SpectralVector) -> SpectralVector {
    reflect(u).scaled(-1.0)
}

/// Diagnostics and final state of a completed run.
#[derive(Debug, Clone)]
pub struct Trajectory<S = NsState, R = DiagnosticsRecord> {
    pub records: Vec<R>,
    pub final_state: S,
}

/// A run that stopped early; everything computed before the failure is kept.
#[derive(Debug)]
pub struct RunFailure<S = NsState, R = DiagnosticsRecord> {
    pub error: Error,
    pub records: Vec<R>,
    pub last_good: S,
}

impl<S, R> std::fmt::Display for RunFailure<S, R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({} samples kept)", self.error, self.records.len())
    }
}

impl<S: std::fmt::Debug, R: std::fmt::Debug> std::error::Error for RunFailure<S, R> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Integrates to `cfg.t_end`, recording diagnostics every `cfg.output_every`
/// steps (and at the final step). `observe` sees each sampled state.
pub fn run(
    cfg: &SimConfig,
    u0: SpectralVector,
    mut observe: impl FnMut(&NsState, &DiagnosticsRecord),
) -> Result<Trajectory, RunFailure> {
    let grid: Arc<Grid> = u0.grid().clone();
    let mut solver = match NsSolver::from_config(u0, cfg) {
        Ok(s) => s,
        Err(error) => {
            let last_good = NsState { t: 0.0, u: SpectralVector::zeros(&grid) };
            return Err(RunFailure { error, records: Vec::new(), last_good });
        }
    };
    let mut monitor = Monitor::new(cfg.nu);
    let mut records = Vec::new();
    let mut sample = |s: &NsSolver, records: &mut Vec<DiagnosticsRecord>| {
        let r = compute_record(s.time(), s.velocity(), Some(&s.time_derivative()), &mut monitor);
        observe(s.state(), &r);
        records.push(r);
    };
    check_cfl(solver.velocity(), cfg.dt, cfg.cfl);
    sample(&solver, &mut records);
    let steps = cfg.steps();
    for n in 1..=steps {
        // a failed step leaves the state untouched
        if let Err(error) = solver.step() {
            return Err(RunFailure { error, records, last_good: solver.state });
        }
        if n % cfg.output_every == 0 || n == steps {
            check_cfl(solver.velocity(), cfg.dt, cfg.cfl);
            sample(&solver, &mut records);
        }
    }
    Ok(Trajectory { records, final_state: solver.state })
}
