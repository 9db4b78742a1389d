//! Fourier-multiplier operators on periodic fields.
//!
//! Every differential or nonlocal operator drops the Nyquist planes, so
//! outputs of these functions are always Hermitian-consistent.

use std::sync::Arc;

use num_complex::Complex64;

use super::field::{HelicalSign, SpectralScalar, SpectralVector};
use super::grid::Grid;
use crate::error::{Error, Result};

/// Scalar and vector fields share the modewise operators.
pub trait ModalField: Clone {
    fn grid(&self) -> &Arc<Grid>;
    fn coeffs(&self) -> &[Complex64];
    fn coeffs_mut(&mut self) -> &mut [Complex64];
    /// Number of stacked components.
    fn components(&self) -> usize;
    /// Same kind of field, same flags, new coefficients on `grid`.
    fn on_grid(&self, grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self;
    /// Flag bookkeeping after a reflection `x -> -x`.
    fn after_reflect(self) -> Self {
        self
    }
}

impl ModalField for SpectralScalar {
    fn grid(&self) -> &Arc<Grid> {
        SpectralScalar::grid(self)
    }
    fn coeffs(&self) -> &[Complex64] {
        SpectralScalar::coeffs(self)
    }
    fn coeffs_mut(&mut self) -> &mut [Complex64] {
        SpectralScalar::coeffs_mut(self)
    }
    fn components(&self) -> usize {
        1
    }
    fn on_grid(&self, grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        SpectralScalar::from_coeffs(grid, coeffs)
    }
}

impl ModalField for SpectralVector {
    fn grid(&self) -> &Arc<Grid> {
        SpectralVector::grid(self)
    }
    fn coeffs(&self) -> &[Complex64] {
        SpectralVector::coeffs(self)
    }
    fn coeffs_mut(&mut self) -> &mut [Complex64] {
        SpectralVector::coeffs_mut(self)
    }
    fn components(&self) -> usize {
        3
    }
    fn on_grid(&self, grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        SpectralVector::from_coeffs(grid, coeffs).with_flags(self.is_divergence_free(), self.helical_sign())
    }
    fn after_reflect(self) -> Self {
        // curl anticommutes with reflection
        let (div, sign) = (self.is_divergence_free(), self.helical_sign().flip());
        self.with_flags(div, sign)
    }
}

fn apply_multiplier<F: ModalField>(f: &F, m: impl Fn(usize) -> Complex64) -> F {
    let mut out = f.clone();
    let n = f.grid().len();
    let grid = f.grid().clone();
    for (j, c) in out.coeffs_mut().iter_mut().enumerate() {
        let idx = j % n;
        *c = if grid.is_retained(idx) { *c * m(idx) } else { Complex64::default() };
    }
    out
}

/// Multiplies every mode by `|k|^s`.
///
/// For `s < 0` the zero mode is set to zero and the input must have zero mean.
pub fn lambda_pow<F: ModalField>(f: &F, s: f64) -> Result<F> {
    let n = f.grid().len();
    if s < 0.0 {
        let scale = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mean = (0..f.components()).map(|c| f.coeffs()[c * n].norm()).fold(0.0, f64::max);
        if mean > 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroMode("negative power of Λ"));
        }
    }
    let grid = f.grid().clone();
    Ok(apply_multiplier(f, |idx| {
        let k = grid.kmag(idx);
        if k == 0.0 {
            Complex64::default()
        } else {
            Complex64::new(k.powf(s), 0.0)
        }
    }))
}

/// Keeps only modes inside the 2/3 dealiasing mask.
pub fn dealias<F: ModalField>(f: &F) -> F {
    let grid = f.grid().clone();
    let n = grid.len();
    let mut out = f.clone();
    for (j, c) in out.coeffs_mut().iter_mut().enumerate() {
        if !grid.in_mask(j % n) {
            *c = Complex64::default();
        }
    }
    out
}

/// Evaluates `f(-x)`: coefficient `c(k)` becomes `c(-k)`.
pub fn reflect<F: ModalField>(f: &F) -> F {
    let grid = f.grid().clone();
    let n = grid.len();
    let mut out = f.clone();
    let src = f.coeffs();
    for (j, c) in out.coeffs_mut().iter_mut().enumerate() {
        let (comp, idx) = (j / n, j % n);
        *c = src[comp * n + grid.neg_index(idx)];
    }
    out.after_reflect()
}

#[inline]
pub(crate) fn cross(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn ik_cross(k: [f64; 3], u: [Complex64; 3]) -> [Complex64; 3] {
    let i = Complex64::i();
    [
        i * (u[2] * k[1] - u[1] * k[2]),
        i * (u[0] * k[2] - u[2] * k[0]),
        i * (u[1] * k[0] - u[0] * k[1]),
    ]
}

/// `∇ × u`, coefficientwise `i k × û`.
pub fn curl(u: &SpectralVector) -> SpectralVector {
    let grid = u.grid().clone();
    let mut out = SpectralVector::zeros(&grid);
    for idx in 0..grid.len() {
        if grid.is_retained(idx) {
            out.set(idx, ik_cross(grid.k(idx), u.at(idx)));
        }
    }
    let sign = match u.helical_sign() {
        s @ (HelicalSign::Plus | HelicalSign::Minus) if u.is_divergence_free() => s,
        _ => HelicalSign::Mixed,
    };
    out.with_flags(true, sign)
}

/// `∇φ`, coefficientwise `i k φ̂`.
pub fn gradient(phi: &SpectralScalar) -> SpectralVector {
    let grid = phi.grid().clone();
    let mut out = SpectralVector::zeros(&grid);
    let i = Complex64::i();
    for idx in 0..grid.len() {
        if grid.is_retained(idx) {
            let k = grid.k(idx);
            let c = phi.coeffs()[idx] * i;
            out.set(idx, [c * k[0], c * k[1], c * k[2]]);
        }
    }
    out.with_flags(false, HelicalSign::Mixed)
}

/// `∇·u` as a scalar field.
pub fn divergence(u: &SpectralVector) -> SpectralScalar {
    let grid = u.grid().clone();
    let mut out = SpectralScalar::zeros(&grid);
    let i = Complex64::i();
    for idx in 0..grid.len() {
        if grid.is_retained(idx) {
            let k = grid.k(idx);
            let v = u.at(idx);
            out.coeffs_mut()[idx] = i * (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]);
        }
    }
    out
}

/// Removes the gradient part: `û - k (k·û)/|k|²`. The zero mode is unchanged.
pub fn leray_project(u: &SpectralVector) -> SpectralVector {
    let grid = u.grid().clone();
    let mut out = SpectralVector::zeros(&grid);
    out.set(0, u.at(0));
    for idx in 1..grid.len() {
        if !grid.is_retained(idx) {
            continue;
        }
        let k = grid.k(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let v = u.at(idx);
        let d = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
        out.set(idx, [v[0] - d * k[0], v[1] - d * k[1], v[2] - d * k[2]]);
    }
    out.with_flags(true, HelicalSign::Mixed)
}

/// `½(u ± Λ⁻¹∇×u)`, the projection onto one sign of the curl spectrum.
pub fn helical_project(u: &SpectralVector, sign: HelicalSign) -> Result<SpectralVector> {
    let s = match sign {
        HelicalSign::Plus => 1.0,
        HelicalSign::Minus => -1.0,
        HelicalSign::Mixed => return Ok(u.clone()),
    };
    u.require_zero_mean("helical projection")?;
    let grid = u.grid().clone();
    let mut out = SpectralVector::zeros(&grid);
    for idx in 1..grid.len() {
        if !grid.is_retained(idx) {
            continue;
        }
        let v = u.at(idx);
        let c = ik_cross(grid.k(idx), v);
        let inv = s / grid.kmag(idx);
        out.set(idx, [0, 1, 2].map(|j| (v[j] + c[j] * inv) * 0.5));
    }
    Ok(out.with_flags(true, sign))
}

/// Largest modewise violation of `i k × û = σ|k| û`, relative to `max |k||û|`.
pub fn helical_residual(u: &SpectralVector, sign: HelicalSign) -> f64 {
    let s = match sign {
        HelicalSign::Plus => 1.0,
        HelicalSign::Minus => -1.0,
        HelicalSign::Mixed => return 0.0,
    };
    let grid = u.grid();
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for idx in 0..grid.len() {
        let v = u.at(idx);
        let c = ik_cross(grid.k(idx), v);
        let km = grid.kmag(idx);
        let r: f64 = (0..3).map(|j| (c[j] - v[j] * (s * km)).norm_sqr()).sum::<f64>().sqrt();
        num = num.max(r);
        den = den.max(km * (0..3).map(|j| v[j].norm_sqr()).sum::<f64>().sqrt());
    }
    if den > 0.0 { num / den } else { 0.0 }
}

/// Copies coefficients onto another grid of the same box: zero padding when
/// refining, truncation when coarsening. Modes not retained on either grid are dropped.
pub fn resample<F: ModalField>(f: &F, target: &Arc<Grid>) -> F {
    let src = f.grid();
    let (ns, nt) = (src.len(), target.len());
    let mut coeffs = vec![Complex64::default(); f.components() * nt];
    for idx in 0..ns {
        let freq = src.frequency(idx);
        if !src.is_retained(idx) || !target.contains_frequency(freq) {
            continue;
        }
        let t = target.index_of(freq);
        if !target.is_retained(t) {
            continue;
        }
        for c in 0..f.components() {
            coeffs[c * nt + t] = f.coeffs()[c * ns + idx];
        }
    }
    f.on_grid(target, coeffs)
}

/// Pseudo-spectral `a × b`: products on the collocation grid, optionally
/// followed by the 2/3 mask.
pub fn cross_product(a: &SpectralVector, b: &SpectralVector, mask: bool) -> SpectralVector {
    let grid = a.grid().clone();
    assert!(grid.same_as(b.grid()));
    let n = grid.len();
    let pa = a.to_physical();
    let pb = b.to_physical();
    let mut w = vec![0.0; 3 * n];
    for i in 0..n {
        let x = [pa[i], pa[n + i], pa[2 * n + i]];
        let y = [pb[i], pb[n + i], pb[2 * n + i]];
        w[i] = x[1] * y[2] - x[2] * y[1];
        w[n + i] = x[2] * y[0] - x[0] * y[2];
        w[2 * n + i] = x[0] * y[1] - x[1] * y[0];
    }
    let out = SpectralVector::from_physical(&grid, &w);
    if mask { dealias(&out) } else { out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::make_grid;
    use crate::testing::{random_scalar, random_solenoidal};
    use std::f64::consts::PI;

    fn grid8() -> Arc<Grid> {
        make_grid([8, 8, 8], 2.0 * PI).unwrap()
    }

    #[test]
    fn lambda_single_modes() {
        let g = make_grid([16, 16, 16], 2.0 * PI).unwrap();
        let f = SpectralScalar::from_fn(&g, |x| x[0].cos());
        let l = lambda_pow(&f, 2.0).unwrap();
        assert!(l.relative_distance(&f) < 1e-14);
        let f = SpectralScalar::from_fn(&g, |x| (3.0 * x[0] + 4.0 * x[1]).sin());
        let l = lambda_pow(&f, 1.0).unwrap();
        assert!(l.relative_distance(&f.scaled(5.0)) < 1e-14);
    }

    #[test]
    fn lambda_inverse_identity_and_zero_mode_error() {
        let g = grid8();
        let f = random_scalar(&g, 3, 11);
        let back = lambda_pow(&lambda_pow(&f, -1.0).unwrap(), 1.0).unwrap();
        assert!(back.relative_distance(&f) < 1e-14);
        let shifted = SpectralScalar::from_fn(&g, |x| 1.0 + x[0].cos());
        assert!(matches!(lambda_pow(&shifted, -0.5), Err(Error::ZeroMode(_))));
    }

    #[test]
    fn curl_of_shear() {
        let g = grid8();
        let u = SpectralVector::from_fn(&g, |x| [x[1].sin(), 0.0, 0.0]);
        let w = curl(&u);
        let expect = SpectralVector::from_fn(&g, |x| [0.0, 0.0, -x[1].cos()]);
        assert!(w.relative_distance(&expect) < 1e-14);
        assert!(w.is_divergence_free());
    }

    #[test]
    fn gradients_are_curl_free_and_projected_away() {
        let g = grid8();
        let phi = random_scalar(&g, 3, 5);
        let grad = gradient(&phi);
        assert!(curl(&grad).l2_norm() < 1e-13 * grad.l2_norm());
        assert!(leray_project(&grad).l2_norm() < 1e-13 * grad.l2_norm());
    }

    #[test]
    fn leray_fixes_solenoidal_fields() {
        let g = grid8();
        let u = SpectralVector::from_fn(&g, |x| [x[1].sin(), x[0].sin(), 0.0]);
        for idx in 0..g.len() {
            let k = g.k(idx);
            let v = u.at(idx);
            assert!((v[0] * k[0] + v[1] * k[1] + v[2] * k[2]).norm() < 1e-15);
        }
        assert!(leray_project(&u).relative_distance(&u) < 1e-14);
        let r = random_solenoidal(&g, 3, 9);
        assert!(leray_project(&r).relative_distance(&r) < 1e-14);
    }

    #[test]
    fn abc_flow_is_plus_helical() {
        let g = grid8();
        let (a, b, c) = (1.0, 0.7, 0.3);
        let u = SpectralVector::from_fn(&g, |x| {
            [a * x[2].sin() + c * x[1].cos(), b * x[0].sin() + a * x[2].cos(), c * x[1].sin() + b * x[0].cos()]
        });
        let plus = helical_project(&u, HelicalSign::Plus).unwrap();
        let minus = helical_project(&u, HelicalSign::Minus).unwrap();
        assert!(plus.relative_distance(&u) < 1e-14);
        assert!(minus.l2_norm() < 1e-14 * u.l2_norm());
    }

    #[test]
    fn helical_partition_orthogonality_and_eigen_relation() {
        let g = grid8();
        let u = random_solenoidal(&g, 3, 1);
        let p = helical_project(&u, HelicalSign::Plus).unwrap();
        let m = helical_project(&u, HelicalSign::Minus).unwrap();
        assert!(p.add(&m).relative_distance(&u) < 1e-14);
        assert!(p.inner(&m).abs() <= 1e-12 * u.l2_norm_sq());
        assert!(helical_residual(&p, HelicalSign::Plus) < 1e-12);
        assert!(helical_residual(&m, HelicalSign::Minus) < 1e-12);
        let lm = lambda_pow(&m, 1.0).unwrap();
        assert!(curl(&m).relative_distance(&lm.scaled(-1.0)) < 1e-13);
        let lp = lambda_pow(&p, 1.0).unwrap();
        assert!(curl(&p).relative_distance(&lp) < 1e-13);
    }

    #[test]
    fn helical_projection_rejects_mean_flow() {
        let g = grid8();
        let u = SpectralVector::from_fn(&g, |x| [1.0 + x[1].sin(), 0.0, 0.0]);
        assert!(matches!(helical_project(&u, HelicalSign::Plus), Err(Error::ZeroMode(_))));
    }

    #[test]
    fn reflection_parity() {
        let g = grid8();
        let even = SpectralScalar::from_fn(&g, |x| x[0].cos());
        let odd = SpectralScalar::from_fn(&g, |x| x[0].sin());
        assert!(reflect(&even).relative_distance(&even) < 1e-15);
        assert!(reflect(&odd).relative_distance(&odd.scaled(-1.0)) < 1e-15);
        let f = random_scalar(&g, 4, 2);
        assert_eq!(reflect(&reflect(&f)).coeffs(), f.coeffs());
        let u = random_solenoidal(&g, 3, 3);
        let lhs = curl(&reflect(&u));
        let rhs = reflect(&curl(&u)).scaled(-1.0);
        assert!(lhs.relative_distance(&rhs) < 1e-13);
    }

    #[test]
    fn reflection_matches_physical_resampling() {
        let g = make_grid([8, 10, 12], 2.0 * PI).unwrap();
        let f = random_scalar(&g, 3, 8);
        let vals = f.to_physical();
        let n = g.n();
        let mut flipped = vec![0.0; vals.len()];
        for idx in 0..g.len() {
            let i = g.axis_indices(idx);
            let j = [0, 1, 2].map(|a| (n[a] - i[a]) % n[a]);
            flipped[g.flat_index(j)] = vals[idx];
        }
        let r = SpectralScalar::from_physical(&g, &flipped);
        assert!(r.relative_distance(&reflect(&f)) < 1e-14);
    }

    #[test]
    fn dealias_behaviour() {
        let g = grid8();
        let inside = SpectralScalar::from_fn(&g, |x| (2.0 * x[0]).cos() + x[1].sin());
        assert!(dealias(&inside).relative_distance(&inside) < 1e-15);
        let outside = SpectralScalar::from_fn(&g, |x| (3.0 * x[2]).cos());
        assert!(dealias(&outside).l2_norm() < 1e-15 * outside.l2_norm());
        let f = random_scalar(&g, 4, 6);
        assert_eq!(dealias(&dealias(&f)).coeffs(), dealias(&f).coeffs());
    }
}
