//! Stationary form of the axisymmetric profile equation.
//!
//! With the potential `w = Λ′⁻¹Λ⁻¹v`, a time-independent profile satisfies
//!
//! ```text
//! −2√2 ν ΔΔΔ′ w = Σ sᵢ Oᵢ{ Lᵢ · Rᵢ }
//! ```
//!
//! (the profile equation multiplied through by `ΛΛ′`). The residual here is
//! left side minus right side; a damped Newton–Krylov iteration searches for zeros.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::axisym::{
    apply_symbol, assemble, axisym_rhs_with, fac, lambda_3d_pow_axisym, lambda_prime_pow, term, AxisymScalar,
    Sector, Sectors, Term, TermSet, CONSISTENT_TERMS, VISCOUS_TERM,
};
use crate::error::{Error, Result};

use Sector::{Even as WP, Odd as WM};

/// The stationary equation as historically written out in `w`, with `Δ = −Λ²` and
/// `Δ′ = −Λ′²` folded into the signs.
pub const PUBLISHED_STATIONARY_TERMS: [Term; 10] = [
    term(1, 1.0, 2, 0, false, fac(WP, 0, 1, true, false), fac(WP, 0, 1, true, true)),
    term(2, -1.0, 2, 0, false, fac(WM, 0, 0, true, true), fac(WM, 0, 2, true, false)),
    term(3, 1.0, 0, 0, true, fac(WM, 2, 0, true, false), fac(WM, 0, 2, true, false)),
    term(4, -1.0, 0, 0, true, fac(WM, 2, 0, false, false), fac(WM, 2, 2, false, false)),
    term(5, -1.0, 0, 1, false, fac(WM, 2, 0, true, false), fac(WP, 0, 1, true, true)),
    term(6, 1.0, 0, 1, false, fac(WM, 2, 0, false, false), fac(WP, 2, 1, false, true)),
    term(7, -1.0, 0, 0, true, fac(WP, 0, 1, true, false), fac(WM, 2, 1, true, false)),
    term(8, 1.0, 0, 0, true, fac(WP, 2, 1, false, false), fac(WP, 2, 1, false, false)),
    term(9, 1.0, 0, 1, false, fac(WM, 0, 0, true, true), fac(WP, 2, 1, true, false)),
    term(10, -1.0, 0, 1, false, fac(WM, 2, 0, false, true), fac(WP, 2, 1, false, false)),
];

/// Terms of the stationary equation for a given form of the profile equation.
pub fn stationary_terms(set: TermSet) -> Vec<Term> {
    match set {
        TermSet::AsPublished => PUBLISHED_STATIONARY_TERMS.to_vec(),
        TermSet::Consistent => CONSISTENT_TERMS.iter().map(Term::substituted).collect(),
    }
}

/// Left side `2√2 ν Λ⁴Λ′² w` (linear) and right side (quadratic) of the stationary equation.
#[derive(Debug, Clone)]
pub struct StationaryParts {
    pub viscous: AxisymScalar,
    pub nonlinear: AxisymScalar,
}

impl StationaryParts {
    pub fn residual(&self) -> AxisymScalar {
        self.viscous.sub(&self.nonlinear)
    }
}

fn viscous_coeffs(w: &AxisymScalar, c: &[Complex64], nu: f64) -> Result<Vec<Complex64>> {
    let g = w.grid();
    let mut out = apply_symbol(g, c, 2.0, 4.0, false);
    out.iter_mut().for_each(|x| *x *= 2.0 * SQRT_2 * nu);
    if out.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
        return Err(Error::Assembly { term: VISCOUS_TERM });
    }
    Ok(out)
}

pub fn stationary_parts(w: &AxisymScalar, nu: f64, set: TermSet) -> Result<StationaryParts> {
    let g = w.grid();
    let c = w.coeffs();
    let viscous = viscous_coeffs(w, &c, nu)?;
    let nonlinear = assemble(g, &Sectors::from_values(g, w.values()), &stationary_terms(set), |_| true, 1.0)?;
    Ok(StationaryParts {
        viscous: AxisymScalar::from_coeffs(g, &viscous),
        nonlinear: AxisymScalar::from_coeffs(g, &nonlinear),
    })
}

/// Left minus right side of the stationary equation.
pub fn stationary_residual(w: &AxisymScalar, nu: f64) -> Result<AxisymScalar> {
    stationary_residual_with(w, nu, TermSet::Consistent)
}

pub fn stationary_residual_with(w: &AxisymScalar, nu: f64, set: TermSet) -> Result<AxisymScalar> {
    Ok(stationary_parts(w, nu, set)?.residual())
}

/// `−2√2 ΛΛ′ ∂t v` at `v = ΛΛ′w`, evaluated through the profile equation: the same
/// quantity as the stationary residual, reached by a different route.
pub fn substitution_oracle(w: &AxisymScalar, nu: f64, set: TermSet) -> Result<AxisymScalar> {
    let v = lambda_prime_pow(&lambda_3d_pow_axisym(w, 1.0)?, 1.0)?;
    let rhs = axisym_rhs_with(&v, nu, set)?;
    Ok(lambda_prime_pow(&lambda_3d_pow_axisym(&rhs, 1.0)?, 1.0)?.scaled(-2.0 * SQRT_2))
}

/// Size measures tied to the `BMO⁻¹` control of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BmoReport {
    /// `sup |∂r w|` over the nodes.
    pub sup_wr: f64,
    /// Largest mean oscillation of `Λ′w` over dyadic boxes of the `(r, z)` half-plane,
    /// weighted by `r dr dz`. A proxy, not the BMO norm.
    pub bmo_proxy: f64,
}

pub fn bmo_diagnostic(w: &AxisymScalar) -> BmoReport {
    let g = w.grid();
    let sup_wr = w.radial_derivative().iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let f = lambda_prime_pow(w, 1.0).map(AxisymScalar::into_values).unwrap_or_else(|_| vec![f64::NAN; g.len()]);
    let (nr, nz) = (g.nr(), g.nz());
    let nodes = g.nodes();
    let weight: Vec<f64> = (0..nr)
        .map(|j| {
            let lo = if j == 0 { 0.0 } else { 0.5 * (nodes[j - 1] + nodes[j]) };
            let hi = if j + 1 == nr { g.radius() } else { 0.5 * (nodes[j] + nodes[j + 1]) };
            nodes[j] * (hi - lo)
        })
        .collect();
    let mut proxy: f64 = 0.0;
    let mut level = 0;
    while (1usize << level) <= nr.min(nz) / 2 {
        let parts = 1usize << level;
        let rbin = |j: usize| ((nodes[j] / g.radius() * parts as f64) as usize).min(parts - 1);
        let zbin = |l: usize| l * parts / nz;
        let mut sums = vec![(0.0, 0.0); parts * parts];
        for j in 0..nr {
            for l in 0..nz {
                let s = &mut sums[rbin(j) * parts + zbin(l)];
                s.0 += weight[j] * f[j * nz + l];
                s.1 += weight[j];
            }
        }
        let mut osc = vec![0.0; parts * parts];
        for j in 0..nr {
            for l in 0..nz {
                let b = rbin(j) * parts + zbin(l);
                let mean = sums[b].0 / sums[b].1;
                osc[b] += weight[j] * (f[j * nz + l] - mean).abs();
            }
        }
        for (o, s) in osc.iter().zip(&sums) {
            if s.1 > 0.0 {
                proxy = proxy.max(o / s.1);
            }
        }
        level += 1;
    }
    BmoReport { sup_wr, bmo_proxy: proxy }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonParams {
    pub max_iter: usize,
    /// Convergence when `‖F(w)‖ ≤ tol · max(‖Lw₀‖, 1)`, `L` the viscous operator.
    pub tol: f64,
    pub krylov_dim: usize,
    pub krylov_tol: f64,
    pub max_halvings: usize,
    pub set: TermSet,
}

impl Default for NewtonParams {
    fn default() -> Self {
        Self { max_iter: 30, tol: 1e-10, krylov_dim: 60, krylov_tol: 1e-8, max_halvings: 12, set: TermSet::Consistent }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NewtonStep {
    pub iteration: usize,
    pub residual_norm: f64,
    pub step_length: f64,
    pub krylov_iterations: usize,
    pub krylov_residual: f64,
}

#[derive(Debug, Clone)]
pub struct StationaryOutcome {
    pub w: AxisymScalar,
    pub residual_norm: f64,
    pub converged: bool,
    /// Residual before the first step, then one entry per accepted or rejected step.
    pub history: Vec<NewtonStep>,
    /// Why the iteration stopped without converging.
    pub failure: Option<String>,
}

/// Largest edge value allowed for an iterate, relative to the larger of its own and the guess's peak;
/// trial steps beyond it are damped like steps that fail to decrease the residual.
const ITERATE_EDGE_TOL: f64 = 1e-3;

struct Problem<'a> {
    like: &'a AxisymScalar,
    nu: f64,
    set: TermSet,
}

impl Problem<'_> {
    fn field(&self, x: &[f64]) -> AxisymScalar {
        AxisymScalar::from_values(self.like.grid(), x.to_vec()).expect("length matches grid")
    }

    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(stationary_residual_with(&self.field(x), self.nu, self.set)?.into_values())
    }

    /// Exact for the quadratic residual: `(F(w+εx) − F(w−εx)) / 2ε`.
    fn jacobian(&self, w: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let xmax = inf_norm(x);
        if xmax == 0.0 {
            return Ok(vec![0.0; x.len()]);
        }
        let eps = inf_norm(w).max(1.0) / xmax;
        let plus: Vec<f64> = w.iter().zip(x).map(|(a, b)| a + eps * b).collect();
        let minus: Vec<f64> = w.iter().zip(x).map(|(a, b)| a - eps * b).collect();
        let (fp, fm) = (self.residual(&plus)?, self.residual(&minus)?);
        Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * eps)).collect())
    }

    /// Inverse of the viscous operator `2√2 ν Λ⁴Λ′²`.
    fn precondition(&self, x: &[f64]) -> Vec<f64> {
        let g = self.like.grid();
        let mut c = apply_symbol(g, &g.forward(x), -2.0, -4.0, false);
        c.iter_mut().for_each(|v| *v /= 2.0 * SQRT_2 * self.nu);
        g.inverse(&c)
    }
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Right-preconditioned GMRES for `J M⁻¹ y = b` from `y = 0`; returns `M⁻¹ y`,
/// the iteration count and the final relative residual.
fn gmres(p: &Problem, w: &[f64], b: &[f64], dim: usize, tol: f64) -> Result<(Vec<f64>, usize, f64)> {
    let beta = dot(b, b).sqrt();
    if beta == 0.0 {
        return Ok((vec![0.0; b.len()], 0, 0.0));
    }
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|x| x / beta).collect()];
    let mut h: Vec<Vec<f64>> = Vec::new();
    let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut rhs = vec![beta];
    let mut rel = 1.0;
    let mut k = 0;
    while k < dim {
        let mut v = p.jacobian(w, &p.precondition(&basis[k]))?;
        let mut col = vec![0.0; k + 2];
        for (i, q) in basis.iter().enumerate() {
            col[i] = dot(&v, q);
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= col[i] * b);
        }
        col[k + 1] = dot(&v, &v).sqrt();
        for i in 0..k {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let r = col[k].hypot(col[k + 1]);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (col[k] / r, col[k + 1] / r) };
        let next_norm = col[k + 1];
        col[k] = r;
        col[k + 1] = 0.0;
        cs.push(c);
        sn.push(s);
        rhs.push(-s * rhs[k]);
        rhs[k] *= c;
        h.push(col);
        k += 1;
        rel = rhs[k].abs() / beta;
        if rel <= tol || next_norm <= 1e-14 * beta {
            break;
        }
        basis.push(v.iter().map(|x| x / next_norm).collect());
    }
    // back substitution on the triangular system
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| h[j][i] * y[j]).sum();
        y[i] = (rhs[i] - s) / h[i][i];
    }
    let mut z = vec![0.0; b.len()];
    for (yi, q) in y.iter().zip(&basis) {
        z.iter_mut().zip(q).for_each(|(a, b)| *a += yi * b);
    }
    Ok((p.precondition(&z), k, rel))
}

/// Damped Newton–Krylov search for a zero of [`stationary_residual_with`].
///
/// Returns the final iterate and its full history whether or not it converged; errors are
/// reserved for iterates the method cannot continue from.
pub fn solve_stationary(w0: &AxisymScalar, nu: f64, params: &NewtonParams) -> Result<StationaryOutcome> {
    if !(nu > 0.0) {
        return Err(Error::Solver(format!("the viscous preconditioner needs nu > 0, got {nu}")));
    }
    if !w0.is_confined() {
        return Err(Error::Solver(format!("initial guess not confined (edge/peak {:.1e})", w0.edge_ratio())));
    }
    let problem = Problem { like: w0, nu, set: params.set };
    let scale = stationary_parts(w0, nu, params.set)?.viscous.norm().max(1.0);
    let peak0 = w0.max_abs();
    let norm = |x: &[f64]| problem.field(x).norm();

    let mut w = w0.values().to_vec();
    let mut f = problem.residual(&w)?;
    let mut fnorm = norm(&f);
    let mut history =
        vec![NewtonStep { iteration: 0, residual_norm: fnorm, step_length: 0.0, krylov_iterations: 0, krylov_residual: 0.0 }];
    let mut failure = None;
    for it in 1..=params.max_iter {
        if fnorm <= params.tol * scale {
            break;
        }
        let b: Vec<f64> = f.iter().map(|x| -x).collect();
        let (delta, kits, krel) = gmres(&problem, &w, &b, params.krylov_dim, params.krylov_tol)?;
        let mut lambda = 1.0;
        let mut accepted = None;
        let mut best_edge = f64::INFINITY;
        let mut confined_trials = 0;
        for _ in 0..=params.max_halvings {
            let trial: Vec<f64> = w.iter().zip(&delta).map(|(a, d)| a + lambda * d).collect();
            let iterate = problem.field(&trial);
            let edge = iterate.edge_ratio() * iterate.max_abs();
            if edge > ITERATE_EDGE_TOL * iterate.max_abs().max(peak0) {
                best_edge = best_edge.min(edge);
                lambda *= 0.5;
                continue;
            }
            confined_trials += 1;
            let ft = problem.residual(&trial)?;
            let n = norm(&ft);
            if n.is_finite() && n < (1.0 - 1e-4 * lambda) * fnorm {
                accepted = Some((trial, ft, n));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, ft, n)) => {
                w = trial;
                f = ft;
                fnorm = n;
                history.push(NewtonStep {
                    iteration: it,
                    residual_norm: n,
                    step_length: lambda,
                    krylov_iterations: kits,
                    krylov_residual: krel,
                });
            }
            None => {
                history.push(NewtonStep {
                    iteration: it,
                    residual_norm: fnorm,
                    step_length: 0.0,
                    krylov_iterations: kits,
                    krylov_residual: krel,
                });
                failure = Some(if confined_trials == 0 {
                    format!("every damped step leaves the confined class (edge value ≥ {best_edge:.2e})")
                } else {
                    format!("no decrease after {} step halvings", params.max_halvings)
                });
                break;
            }
        }
    }
    let converged = fnorm <= params.tol * scale;
    if !converged && failure.is_none() {
        failure = Some(format!("no convergence in {} iterations", params.max_iter));
    }
    Ok(StationaryOutcome { w: problem.field(&w), residual_norm: fnorm, converged, history, failure })
}
