use std::sync::Arc;

use num_complex::Complex64;

use super::grid::AxisymGrid;
use crate::error::{Error, Result};

/// Edge-to-peak ratio below which a field counts as confined to the cylinder.
pub const CONFINEMENT_TOL: f64 = 1e-8;

/// An axisymmetric scalar `f(r, z)` held as values on the radial nodes × uniform `z` points,
/// laid out `j·Nz + l`.
#[derive(Debug, Clone)]
pub struct AxisymScalar {
    grid: Arc<AxisymGrid>,
    values: Vec<f64>,
}

impl AxisymScalar {
    pub fn zeros(grid: &Arc<AxisymGrid>) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn from_values(grid: &Arc<AxisymGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} values for a {}-point grid", values.len(), grid.len())));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn from_fn(grid: &Arc<AxisymGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.nodes()[i / grid.nz()], grid.z(i % grid.nz()))).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn from_coeffs(grid: &Arc<AxisymGrid>, coeffs: &[Complex64]) -> Self {
        Self { grid: grid.clone(), values: grid.inverse(coeffs) }
    }

    pub fn grid(&self) -> &Arc<AxisymGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, j: usize, l: usize) -> f64 {
        self.values[j * self.grid.nz() + l]
    }

    /// Mixed Fourier–Bessel coefficients.
    pub fn coeffs(&self) -> Vec<Complex64> {
        self.grid.forward(&self.values)
    }

    /// `f(r, −z)`.
    pub fn reflect(&self) -> Self {
        let nz = self.grid.nz();
        let values = (0..self.values.len()).map(|i| self.values[i - i % nz + (nz - i % nz) % nz]).collect();
        Self { grid: self.grid.clone(), values }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|x| a * x).collect() }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert!(self.grid.same_as(&other.grid), "axisymmetric grid mismatch");
        Self { grid: self.grid.clone(), values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect() }
    }

    /// `(∫ |f|² dx)^½` over the cylinder.
    pub fn norm(&self) -> f64 {
        self.grid.norm_sq(&self.coeffs()).sqrt()
    }

    pub fn relative_distance(&self, other: &Self) -> f64 {
        let d = self.sub(other).norm();
        let n = self.norm().max(other.norm());
        if n == 0.0 { d } else { d / n }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest value on the outermost radial node relative to the peak; zero for a zero field.
    pub fn edge_ratio(&self) -> f64 {
        let nz = self.grid.nz();
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self.values[(self.grid.nr() - 1) * nz..].iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        edge / peak
    }

    pub fn is_confined(&self) -> bool {
        self.edge_ratio() <= CONFINEMENT_TOL
    }

    pub fn require_confined(&self) -> Result<()> {
        let e = self.edge_ratio();
        if e <= CONFINEMENT_TOL {
            Ok(())
        } else {
            Err(Error::Domain(format!("field not confined: edge/peak = {e:.2e}")))
        }
    }

    /// Values of `∂r f` (an order-1 expansion).
    pub fn radial_derivative(&self) -> Vec<f64> {
        let mut c = self.coeffs();
        scale_radial(&self.grid, &mut c);
        self.grid.inverse_order1(&c)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }
}

/// Multiplies mixed coefficients by `−kₘ`, turning order-0 coefficients of `f` into order-1
/// coefficients of `∂r f`.
pub(crate) fn scale_radial(grid: &AxisymGrid, c: &mut [Complex64]) {
    let nz = grid.nz();
    for (i, x) in c.iter_mut().enumerate() {
        *x *= -grid.kr()[i / nz];
    }
}

/// Symbol of `Λ′^lp Λ^l ∂z^dz` on mode `(m, n)`, where `Λ′ = (−Δ_h)^½` and `Λ = (−Δ)^½`.
pub(crate) fn symbol(grid: &AxisymGrid, lp: f64, l: f64, dz: bool, m: usize, n: usize) -> Complex64 {
    let kr = grid.kr()[m];
    let kz = grid.kz()[n];
    let mut s = Complex64::new(kr.powf(lp) * (kr * kr + kz * kz).powf(0.5 * l), 0.0);
    if dz {
        s *= Complex64::new(0.0, kz);
    }
    s
}

pub(crate) fn apply_symbol(grid: &AxisymGrid, c: &[Complex64], lp: f64, l: f64, dz: bool) -> Vec<Complex64> {
    let nz = grid.nz();
    c.iter().enumerate().map(|(i, x)| x * symbol(grid, lp, l, dz, i / nz, i % nz)).collect()
}

fn checked(f: &AxisymScalar, lp: f64, l: f64) -> Result<AxisymScalar> {
    let c = apply_symbol(&f.grid, &f.coeffs(), lp, l, false);
    if c.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Domain(format!("Λ′^{lp} Λ^{l} is not finite on this field")));
    }
    Ok(AxisymScalar::from_coeffs(&f.grid, &c))
}

/// `Λ′^s f`, the horizontal fractional Laplacian `(−∂r² − ∂r/r)^{s/2}`.
///
/// All radial wavenumbers are positive, so negative powers are defined; fields that are not
/// confined are still transformed, but the result then depends on the cylinder radius.
pub fn lambda_prime_pow(f: &AxisymScalar, s: f64) -> Result<AxisymScalar> {
    if !f.is_confined() {
        log::warn!("Λ′^{s} applied to a field that is not confined (edge/peak {:.1e})", f.edge_ratio());
    }
    checked(f, s, 0.0)
}

/// `Λ^s f` with `Λ = (−Δ)^½` acting on the axisymmetric representation.
pub fn lambda_3d_pow_axisym(f: &AxisymScalar, s: f64) -> Result<AxisymScalar> {
    checked(f, 0.0, s)
}
