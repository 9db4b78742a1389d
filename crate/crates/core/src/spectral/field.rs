use std::sync::Arc;

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Helical content of a divergence-free vector field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HelicalSign {
    Plus,
    Minus,
    Mixed,
}

impl HelicalSign {
    pub fn flip(self) -> Self {
        match self {
            HelicalSign::Plus => HelicalSign::Minus,
            HelicalSign::Minus => HelicalSign::Plus,
            HelicalSign::Mixed => HelicalSign::Mixed,
        }
    }
}

/// Fourier coefficients of a real scalar field.
#[derive(Debug, Clone)]
pub struct SpectralScalar {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

/// Fourier coefficients of a real vector field, component-major.
#[derive(Debug, Clone)]
pub struct SpectralVector {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
    divergence_free: bool,
    helical: HelicalSign,
}

fn norm_sq(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

fn hermitian_defect(grid: &Grid, c: &[Complex64]) -> f64 {
    (0..grid.len())
        .filter(|&i| grid.is_retained(i))
        .map(|i| (c[i] - c[grid.neg_index(i)].conj()).norm())
        .fold(0.0, f64::max)
}

impl SpectralScalar {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len(), "coefficient array does not match grid");
        Self { grid: grid.clone(), coeffs }
    }

    pub fn from_physical(grid: &Arc<Grid>, values: &[f64]) -> Self {
        assert_eq!(values.len(), grid.len());
        Self::from_coeffs(grid, grid.fft().forward_real(values))
    }

    /// Samples `f(x1, x2, x3)` on the collocation nodes.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.len())
            .map(|idx| {
                let i = grid.axis_indices(idx);
                f([0, 1, 2].map(|a| grid.coordinate(a, i[a])))
            })
            .collect();
        Self::from_physical(grid, &values)
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.grid.fft().inverse_real(&self.coeffs)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `∫ |f|^2 dx` over the box.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.volume() * norm_sq(&self.coeffs)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Largest violation of `c(-k) = conj(c(k))` over retained modes.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.grid, &self.coeffs)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::from_coeffs(&self.grid, self.coeffs.iter().map(|c| c * a).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.grid.same_as(&other.grid));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.grid.same_as(&other.grid));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    /// Relative L2 distance `‖self - other‖ / ‖other‖` (absolute when `other` vanishes).
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let d = self.sub(other).l2_norm();
        let r = other.l2_norm();
        if r > 0.0 { d / r } else { d }
    }
}

impl SpectralVector {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); 3 * grid.len()],
            divergence_free: true,
            helical: HelicalSign::Mixed,
        }
    }

    /// Wraps coefficients without asserting any structural flag.
    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), 3 * grid.len(), "coefficient array does not match grid");
        Self { grid: grid.clone(), coeffs, divergence_free: false, helical: HelicalSign::Mixed }
    }

    pub fn from_components(c: [SpectralScalar; 3]) -> Self {
        let grid = c[0].grid.clone();
        assert!(c.iter().all(|s| s.grid.same_as(&grid)));
        let mut coeffs = Vec::with_capacity(3 * grid.len());
        for s in c {
            coeffs.extend(s.coeffs);
        }
        Self::from_coeffs(&grid, coeffs)
    }

    /// Component-major physical values.
    pub fn from_physical(grid: &Arc<Grid>, values: &[f64]) -> Self {
        let n = grid.len();
        assert_eq!(values.len(), 3 * n);
        let fft = grid.fft();
        let (c0, c1) = fft.forward_real_pair(&values[..n], &values[n..2 * n], grid.neg_map());
        let c2 = fft.forward_real(&values[2 * n..]);
        let mut coeffs = c0;
        coeffs.extend(c1);
        coeffs.extend(c2);
        Self::from_coeffs(grid, coeffs)
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let n = grid.len();
        let mut values = vec![0.0; 3 * n];
        for idx in 0..n {
            let i = grid.axis_indices(idx);
            let u = f([0, 1, 2].map(|a| grid.coordinate(a, i[a])));
            for c in 0..3 {
                values[c * n + idx] = u[c];
            }
        }
        Self::from_physical(grid, &values)
    }

    pub fn to_physical(&self) -> Vec<f64> {
        let fft = self.grid.fft();
        let (mut a, b) = fft.inverse_real_pair(self.component(0), self.component(1));
        a.extend(b);
        a.extend(fft.inverse_real(self.component(2)));
        a
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_scalar(&self, c: usize) -> SpectralScalar {
        SpectralScalar::from_coeffs(&self.grid, self.component(c).to_vec())
    }

    /// The coefficient 3-vector at one mode.
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        let n = self.grid.len();
        [self.coeffs[idx], self.coeffs[n + idx], self.coeffs[2 * n + idx]]
    }

    pub fn set(&mut self, idx: usize, v: [Complex64; 3]) {
        let n = self.grid.len();
        self.coeffs[idx] = v[0];
        self.coeffs[n + idx] = v[1];
        self.coeffs[2 * n + idx] = v[2];
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    pub fn helical_sign(&self) -> HelicalSign {
        self.helical
    }

    pub fn with_flags(mut self, divergence_free: bool, helical: HelicalSign) -> Self {
        self.divergence_free = divergence_free;
        self.helical = helical;
        self
    }

    pub fn mean(&self) -> [Complex64; 3] {
        self.at(0)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.volume() * norm_sq(&self.coeffs)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `∫ a·b dx` for real fields.
    pub fn inner(&self, other: &Self) -> f64 {
        assert!(self.grid.same_as(&other.grid));
        let s: f64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a.conj() * b).re).sum();
        self.grid.volume() * s
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.len();
        (0..3)
            .map(|c| hermitian_defect(&self.grid, &self.coeffs[c * n..(c + 1) * n]))
            .fold(0.0, f64::max)
    }

    /// `max_k |k·u(k)| / max_k |k||u(k)|`.
    pub fn divergence_residual(&self) -> f64 {
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.k(idx);
            let u = self.at(idx);
            let d = u[0] * k[0] + u[1] * k[1] + u[2] * k[2];
            num = num.max(d.norm());
            den = den.max(self.grid.kmag(idx) * (u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr()).sqrt());
        }
        if den > 0.0 { num / den } else { 0.0 }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= a);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.grid.same_as(&other.grid));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        let helical = if self.helical == other.helical { self.helical } else { HelicalSign::Mixed };
        Self::from_coeffs(&self.grid, coeffs)
            .with_flags(self.divergence_free && other.divergence_free, helical)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn relative_distance(&self, other: &Self) -> f64 {
        let d = self.sub(other).l2_norm();
        let r = other.l2_norm();
        if r > 0.0 { d / r } else { d }
    }

    /// Fails when the mean is not zero to roundoff.
    pub fn require_zero_mean(&self, context: &'static str) -> Result<()> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let m = self.mean().iter().map(|c| c.norm()).fold(0.0, f64::max);
        if m > 1e-13 * scale.max(f64::MIN_POSITIVE) {
            Err(Error::ZeroMode(context))
        } else {
            Ok(())
        }
    }
}

impl SpectralScalar {
    pub fn require_zero_mean(&self, context: &'static str) -> Result<()> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if self.mean().norm() > 1e-13 * scale.max(f64::MIN_POSITIVE) {
            Err(Error::ZeroMode(context))
        } else {
            Ok(())
        }
    }
}
