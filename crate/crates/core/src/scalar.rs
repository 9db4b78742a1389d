//! The reduced scalar equation for the helical profile `v` of a self-dual flow.
//!
//! With `u₊ = v ∗ h` and `u = u₊ − u₊ʳ`, the profile obeys
//! `v_t − νΔv = conj(ĥ)·F[(u₊ − u₊ʳ) × (Λu₊ + Λu₊ʳ)]`, the +helical part of
//! the Navier–Stokes nonlinearity. Two evaluators are provided: a
//! pseudo-spectral one and a direct triad sum.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::SimConfig;
use crate::diagnostics::{compute_record, DiagnosticsRecord, Monitor};
use crate::error::{Error, Result};
use crate::helical::{reconstruct_plus, HelicalBasis};
use crate::integrate::{Scheme, Stepper};
use crate::ns::{check_cfl, check_finite, selfdual_initial, viscous_rates, RunFailure, Trajectory};
use crate::spectral::{cross_product, lambda_pow, reflect, SpectralScalar, SpectralVector};

/// Largest grid accepted by [`scalar_rhs_direct`].
pub const DIRECT_LIMIT: usize = 16 * 16 * 16;

/// Nonlinear part `conj(ĥ)·F[(u₊ − u₊ʳ) × Λ(u₊ + u₊ʳ)]`.
pub fn scalar_nonlinear(v: &SpectralScalar, basis: &HelicalBasis, dealias: bool) -> SpectralScalar {
    let grid = basis.grid();
    let up = reconstruct_plus(v, basis);
    let upr = reflect(&up);
    let a = up.sub(&upr);
    // Λ of a zero-mean field never fails
    let b = lambda_pow(&up.add(&upr), 1.0).expect("reconstructed field has zero mean");
    let w = cross_product(&a, &b, dealias);
    let coeffs = (0..grid.len()).map(|idx| basis.project(idx, w.at(idx))).collect();
    SpectralScalar::from_coeffs(grid, coeffs)
}

fn add_viscous(mut out: SpectralScalar, v: &SpectralScalar, nu: f64) -> SpectralScalar {
    let grid = v.grid().clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c -= v.coeffs()[idx] * (nu * grid.kmag(idx).powi(2));
    }
    out
}

/// `v_t` by the pseudo-spectral evaluator.
pub fn scalar_rhs(v: &SpectralScalar, basis: &HelicalBasis, nu: f64, dealias: bool) -> SpectralScalar {
    add_viscous(scalar_nonlinear(v, basis, dealias), v, nu)
}

#[inline]
fn triple(a: [Complex64; 3], b: [Complex64; 3], c: [Complex64; 3]) -> Complex64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) + a[1] * (b[2] * c[0] - b[0] * c[2]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// `v_t` by the four-term triad sum over `ζ + η = ξ` (indices wrap modulo the
/// grid, matching the collocation product):
///
/// `Σ |η| [v_ζ v_η h̄_ξ·(h_ζ×h_η) + v_ζ v̄_η h̄_ξ·(h_ζ×h̄_η)
///        − v̄_ζ v_η h̄_ξ·(h̄_ζ×h_η) − v̄_ζ v̄_η h̄_ξ·(h̄_ζ×h̄_η)]`
///
/// where `v̄_ζ = v̂(−ζ)` and `h̄ = conj(ĥ)`. Cost is quadratic in the mode count.
pub fn scalar_rhs_direct(v: &SpectralScalar, basis: &HelicalBasis, nu: f64, dealias: bool) -> Result<SpectralScalar> {
    let grid = basis.grid().clone();
    let n = grid.len();
    if n > DIRECT_LIMIT {
        return Err(Error::GridTooLarge { modes: n, limit: DIRECT_LIMIT });
    }
    let vc = v.coeffs();
    let active: Vec<usize> = (0..n).filter(|&i| vc[i] != Complex64::default() && grid.is_retained(i)).collect();
    let dims = grid.n();
    let wrap = |f: i64, a: usize| f.rem_euclid(dims[a] as i64) as usize;

    let out: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|xi| {
            if !grid.is_retained(xi) || xi == 0 || (dealias && !grid.in_mask(xi)) {
                return Complex64::default();
            }
            let hx = basis.at(xi).map(|z| z.conj());
            let fx = grid.frequency(xi);
            let mut acc = Complex64::default();
            for &eta in &active {
                let fe = grid.frequency(eta);
                let zeta = grid.flat_index([0, 1, 2].map(|a| wrap(fx[a] - fe[a], a)));
                let vz = vc[zeta];
                if vz == Complex64::default() {
                    continue;
                }
                let (ve, vzb, veb) = (vc[eta], vc[grid.neg_index(zeta)], vc[grid.neg_index(eta)]);
                let (hz, he) = (basis.at(zeta), basis.at(eta));
                let (hzb, heb) = (hz.map(|z| z.conj()), he.map(|z| z.conj()));
                let s = vz * ve * triple(hx, hz, he) + vz * veb * triple(hx, hz, heb)
                    - vzb * ve * triple(hx, hzb, he)
                    - vzb * veb * triple(hx, hzb, heb);
                acc += s * grid.kmag(eta);
            }
            acc
        })
        .collect();
    Ok(add_viscous(SpectralScalar::from_coeffs(&grid, out), v, nu))
}

#[derive(Debug, Clone)]
pub struct ScalarState {
    pub t: f64,
    pub v: SpectralScalar,
}

/// Integrates the scalar equation with the same schemes as the velocity solver.
#[derive(Debug, Clone)]
pub struct ScalarSolver {
    state: ScalarState,
    basis: Arc<HelicalBasis>,
    nu: f64,
    dealias: bool,
    stepper: Stepper,
}

impl ScalarSolver {
    pub fn new(v0: SpectralScalar, basis: Arc<HelicalBasis>, nu: f64, dt: f64, scheme: Scheme, dealias: bool) -> Result<Self> {
        v0.require_zero_mean("initial scalar profile")?;
        if !(nu >= 0.0) || !(dt > 0.0) {
            return Err(Error::Constraint(format!("need nu ≥ 0 and dt > 0, got nu = {nu}, dt = {dt}")));
        }
        if !basis.grid().same_as(v0.grid()) {
            return Err(Error::GridMismatch);
        }
        let stepper = Stepper::new(scheme, dt, viscous_rates(basis.grid(), nu, 1));
        let mut v = v0;
        let grid = basis.grid().clone();
        for (idx, c) in v.coeffs_mut().iter_mut().enumerate() {
            if idx == 0 || !grid.is_retained(idx) {
                *c = Complex64::default();
            }
        }
        Ok(Self { state: ScalarState { t: 0.0, v }, basis, nu, dealias, stepper })
    }

    pub fn from_config(v0: SpectralScalar, basis: Arc<HelicalBasis>, cfg: &SimConfig) -> Result<Self> {
        Self::new(v0, basis, cfg.nu, cfg.dt, cfg.scheme, cfg.dealias)
    }

    pub fn state(&self) -> &ScalarState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn profile(&self) -> &SpectralScalar {
        &self.state.v
    }

    pub fn basis(&self) -> &Arc<HelicalBasis> {
        &self.basis
    }

    /// The self-dual velocity `u₊ − u₊ʳ` carried by the current profile.
    pub fn velocity(&self) -> SpectralVector {
        selfdual_initial(&self.state.v, &self.basis)
    }

    pub fn time_derivative(&self) -> SpectralScalar {
        scalar_rhs(&self.state.v, &self.basis, self.nu, self.dealias)
    }

    /// Time derivative of [`Self::velocity`]; the reconstruction is linear.
    pub fn velocity_derivative(&self) -> SpectralVector {
        selfdual_initial(&self.time_derivative(), &self.basis)
    }

    pub fn step(&mut self) -> Result<()> {
        let grid = self.basis.grid().clone();
        let (basis, dealias) = (&self.basis, self.dealias);
        let next = self.stepper.step(self.state.v.coeffs(), |c| {
            let v = SpectralScalar::from_coeffs(&grid, c.to_vec());
            scalar_nonlinear(&v, basis, dealias).into_coeffs()
        });
        check_finite(&next, self.state.t)?;
        self.state = ScalarState { t: self.state.t + self.stepper.dt(), v: SpectralScalar::from_coeffs(&grid, next) };
        Ok(())
    }
}

/// Scalar analogue of [`crate::ns::run`]; diagnostics are those of the
/// reconstructed self-dual velocity.
pub fn run_scalar(
    cfg: &SimConfig,
    v0: SpectralScalar,
    basis: Arc<HelicalBasis>,
    mut observe: impl FnMut(&ScalarState, &DiagnosticsRecord),
) -> Result<Trajectory<ScalarState>, RunFailure<ScalarState>> {
    let grid = v0.grid().clone();
    let mut solver = match ScalarSolver::from_config(v0, basis, cfg) {
        Ok(s) => s,
        Err(error) => {
            let last_good = ScalarState { t: 0.0, v: SpectralScalar::zeros(&grid) };
            return Err(RunFailure { error, records: Vec::new(), last_good });
        }
    };
    let mut monitor = Monitor::new(cfg.nu);
    let mut records = Vec::new();
    let mut sample = |s: &ScalarSolver, records: &mut Vec<DiagnosticsRecord>| {
        let u = s.velocity();
        check_cfl(&u, cfg.dt, cfg.cfl);
        let r = compute_record(s.time(), &u, Some(&s.velocity_derivative()), &mut monitor);
        observe(s.state(), &r);
        records.push(r);
    };
    sample(&solver, &mut records);
    let steps = cfg.steps();
    for n in 1..=steps {
        if let Err(error) = solver.step() {
            return Err(RunFailure { error, records, last_good: solver.state });
        }
        if n % cfg.output_every == 0 || n == steps {
            sample(&solver, &mut records);
        }
    }
    Ok(Trajectory { records, final_state: solver.state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::helical::{build_basis, decompose_plus};
    use crate::ns::nonlinear_rhs_ns;
    use crate::spectral::{helical_project, make_grid, HelicalSign};
    use crate::testing::random_scalar;
    use std::f64::consts::PI;

    #[test]
    fn zero_profile() {
        let g = make_grid([8, 8, 8], 2.0 * PI).unwrap();
        let basis = build_basis(&g);
        let z = SpectralScalar::zeros(&g);
        assert_eq!(scalar_rhs(&z, &basis, 0.1, true).l2_norm(), 0.0);
        assert_eq!(scalar_rhs_direct(&z, &basis, 0.1, true).unwrap().l2_norm(), 0.0);
    }

    #[test]
    fn matches_ns_helical_part() {
        let g = make_grid([12, 12, 12], 2.0 * PI).unwrap();
        let basis = build_basis(&g);
        let v = random_scalar(&g, 4, 12);
        let u = selfdual_initial(&v, &basis);
        let n = nonlinear_rhs_ns(&u, true);
        let from_ns = decompose_plus(&helical_project(&n, HelicalSign::Plus).unwrap(), &basis).unwrap();
        let own = scalar_nonlinear(&v, &basis, true);
        assert!(own.l2_norm() > 0.0);
        assert!(own.relative_distance(&from_ns) < 1e-12);
    }

    #[test]
    fn direct_sum_agrees_and_is_real() {
        let g = make_grid([8, 8, 8], 2.0 * PI).unwrap();
        let basis = build_basis(&g);
        let v = random_scalar(&g, 4, 5);
        for dealias in [false, true] {
            let fast = scalar_rhs(&v, &basis, 0.2, dealias);
            let slow = scalar_rhs_direct(&v, &basis, 0.2, dealias).unwrap();
            assert!(fast.relative_distance(&slow) < 1e-12, "dealias = {dealias}");
            assert!(slow.hermitian_defect() < 1e-13 * slow.l2_norm());
        }
    }

    #[test]
    fn single_mode_pair_stays_on_triad_closure() {
        let g = make_grid([8, 8, 8], 2.0 * PI).unwrap();
        let basis = build_basis(&g);
        let v = SpectralScalar::from_fn(&g, |x| (x[0] + x[2]).cos() + 0.5 * (x[1] - x[2]).sin());
        let fast = scalar_nonlinear(&v, &basis, false);
        let slow = scalar_rhs_direct(&v, &basis, 0.0, false).unwrap();
        assert!(fast.relative_distance(&slow) < 1e-12);
        let k0 = v.coeffs().iter().enumerate().filter(|(_, c)| c.norm() > 0.0).map(|(i, _)| g.frequency(i)).collect::<Vec<_>>();
        for (idx, c) in fast.coeffs().iter().enumerate() {
            if c.norm() > 1e-13 {
                let f = g.frequency(idx);
                let reachable = k0.iter().any(|a| k0.iter().any(|b| [0, 1, 2].iter().all(|&j| a[j] + b[j] == f[j])));
                assert!(reachable, "mode {f:?} outside the triad closure");
            }
        }
    }

    #[test]
    fn refuses_large_grids() {
        let g = make_grid([18, 16, 16], 2.0 * PI).unwrap();
        let basis = build_basis(&g);
        assert!(matches!(
            scalar_rhs_direct(&SpectralScalar::zeros(&g), &basis, 0.0, true),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn nonlinearity_is_quadratic() {
        let g = make_grid([8, 8, 8], 2.0 * PI).unwrap();
        let basis = build_basis(&g);
        let v = random_scalar(&g, 3, 7);
        let a = scalar_nonlinear(&v.scaled(-2.5), &basis, true);
        let b = scalar_nonlinear(&v, &basis, true).scaled(6.25);
        assert!(a.relative_distance(&b) < 1e-13);
    }

    #[test]
    fn viscous_decay_of_small_data() {
        let g = make_grid([8, 8, 8], 2.0 * PI).unwrap();
        let basis = Arc::new(build_basis(&g));
        let cfg = SimConfig { resolution: [8; 3], nu: 1.0, dt: 0.01, t_end: 0.5, output_every: 5, ..Default::default() };
        let v0 = random_scalar(&g, 3, 1).scaled(0.01);
        let mut norms = Vec::new();
        let tr = run_scalar(&cfg, v0, basis.clone(), |s, _| norms.push(s.v.l2_norm())).unwrap();
        assert!(norms.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(tr.records.len(), norms.len());
        let zero = run_scalar(&cfg, SpectralScalar::zeros(&g), basis, |_, _| {}).unwrap();
        assert_eq!(zero.final_state.v.l2_norm(), 0.0);
    }
}
