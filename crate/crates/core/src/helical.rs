//! Unit helical eigenvectors and the scalar profile of a +helical field.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{helical_residual, Grid, HelicalSign, SpectralScalar, SpectralVector};

/// How the basis is fixed on the `k₃` axis, where the off-axis formula degenerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisConvention {
    /// `ĥ(0, 0, k₃) = (1, i sgn k₃, 0)/√2`.
    CircularXY,
}

/// `ĥ(k) = g/|g|` with `d = (-k₂, k₁, 0)` and `g = i d - k × d / |k|`.
///
/// Returns `None` when `k₁ = k₂ = 0`.
pub fn off_axis_vector(k: [f64; 3]) -> Option<[Complex64; 3]> {
    let horizontal = k[0].hypot(k[1]);
    if horizontal == 0.0 {
        return None;
    }
    let kmag = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let d = [-k[1], k[0], 0.0];
    let kxd = [k[1] * d[2] - k[2] * d[1], k[2] * d[0] - k[0] * d[2], k[0] * d[1] - k[1] * d[0]];
    let g = [0, 1, 2].map(|j| Complex64::new(-kxd[j] / kmag, d[j]));
    let norm = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Some(g.map(|c| c / norm))
}

/// Unit +helical eigenvector of `i k ×` for any `k ≠ 0`; zero at `k = 0`.
pub fn helical_vector(k: [f64; 3]) -> [Complex64; 3] {
    if let Some(h) = off_axis_vector(k) {
        return h;
    }
    if k[2] == 0.0 {
        return [Complex64::default(); 3];
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(r, 0.0), Complex64::new(0.0, r * k[2].signum()), Complex64::default()]
}

/// Precomputed `ĥ(k)` for every mode of a grid.
#[derive(Debug, Clone)]
pub struct HelicalBasis {
    grid: Arc<Grid>,
    h: Vec<[Complex64; 3]>,
    axis_convention: AxisConvention,
}

/// Builds `ĥ` on every retained mode; zero at `k = 0` and on Nyquist planes.
pub fn build_basis(grid: &Arc<Grid>) -> HelicalBasis {
    let h = (0..grid.len())
        .map(|idx| {
            if grid.is_retained(idx) {
                helical_vector(grid.k(idx))
            } else {
                [Complex64::default(); 3]
            }
        })
        .collect();
    HelicalBasis { grid: grid.clone(), h, axis_convention: AxisConvention::CircularXY }
}

impl HelicalBasis {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        self.h[idx]
    }

    pub fn axis_convention(&self) -> AxisConvention {
        self.axis_convention
    }

    /// `conj(ĥ(k))·w`.
    #[inline]
    pub fn project(&self, idx: usize, w: [Complex64; 3]) -> Complex64 {
        let h = &self.h[idx];
        h[0].conj() * w[0] + h[1].conj() * w[1] + h[2].conj() * w[2]
    }
}

/// Scalar profile `v̂ = conj(ĥ)·û₊` of a +helical zero-mean field.
pub fn decompose_plus(u_plus: &SpectralVector, basis: &HelicalBasis) -> Result<SpectralScalar> {
    const TOL: f64 = 1e-10;
    let residual = helical_residual(u_plus, HelicalSign::Plus);
    if residual > TOL {
        return Err(Error::Decomposition { residual, tolerance: TOL });
    }
    u_plus.require_zero_mean("helical decomposition")?;
    let grid = basis.grid();
    let coeffs = (0..grid.len()).map(|idx| basis.project(idx, u_plus.at(idx))).collect();
    Ok(SpectralScalar::from_coeffs(grid, coeffs))
}

/// `û₊ = v̂ ĥ`, the +helical field with scalar profile `v`.
pub fn reconstruct_plus(v: &SpectralScalar, basis: &HelicalBasis) -> SpectralVector {
    let grid = basis.grid();
    let mut out = SpectralVector::zeros(grid);
    for idx in 0..grid.len() {
        let c = v.coeffs()[idx];
        out.set(idx, basis.at(idx).map(|h| h * c));
    }
    out.with_flags(true, HelicalSign::Plus)
}
