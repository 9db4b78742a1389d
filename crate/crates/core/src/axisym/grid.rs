//! Mixed Fourier–Bessel discretization of axisymmetric functions `f(r, z)`.
//!
//! Radially `f(r) = Σₘ aₘ J₀(kₘ r)` with `kₘ = j₀,ₘ/R`, collocated on the
//! quasi-discrete Hankel nodes `rⱼ = j₀,ⱼ R / j₀,ₙ₊₁`; in `z` a Fourier series
//! of period `Lz`. Radial derivatives of order-0 expansions are order-1
//! expansions `Σ −kₘ aₘ J₁(kₘ r)`, evaluated through a second matrix.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// The `m`-th positive zero of `J₀` (1-based), by McMahon's expansion refined with Newton.
pub fn bessel_j0_zero(m: usize) -> f64 {
    assert!(m >= 1);
    let b = (m as f64 - 0.25) * PI;
    let mut x = b + 1.0 / (8.0 * b) - 31.0 / (384.0 * b.powi(3)) + 3779.0 / (15360.0 * b.powi(5));
    for _ in 0..8 {
        let dx = libm::j0(x) / libm::j1(x);
        x += dx;
        if dx.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

pub struct AxisymGrid {
    nr: usize,
    nz: usize,
    radius: f64,
    lz: f64,
    kr: Vec<f64>,
    nodes: Vec<f64>,
    kz: Vec<f64>,
    /// `J₁(j₀,ₘ)²`, for Parseval norms.
    j1_sq: Vec<f64>,
    // row-major radial matrices
    eval0: Vec<f64>,
    eval1: Vec<f64>,
    analyze0: Vec<f64>,
    analyze1: Vec<f64>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for AxisymGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AxisymGrid")
            .field("nr", &self.nr)
            .field("nz", &self.nz)
            .field("radius", &self.radius)
            .field("lz", &self.lz)
            .finish()
    }
}

fn invert(m: &DMatrix<f64>, what: &str) -> Result<Vec<f64>> {
    let inv = m.clone().lu().try_inverse().ok_or_else(|| Error::InvalidGrid(format!("singular {what} matrix")))?;
    Ok(row_major(&inv))
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
}

pub fn make_axisym_grid(nr: usize, nz: usize, radius: f64, lz: f64) -> Result<Arc<AxisymGrid>> {
    AxisymGrid::new(nr, nz, radius, lz).map(Arc::new)
}

impl AxisymGrid {
    pub fn new(nr: usize, nz: usize, radius: f64, lz: f64) -> Result<Self> {
        if nr < 4 || nz < 4 || nz % 2 != 0 {
            return Err(Error::InvalidGrid(format!("need Nr ≥ 4 and even Nz ≥ 4, got {nr} × {nz}")));
        }
        if !(radius > 0.0 && lz > 0.0) {
            return Err(Error::InvalidGrid(format!("radius and period must be positive, got {radius}, {lz}")));
        }
        let zeros: Vec<f64> = (1..=nr + 1).map(bessel_j0_zero).collect();
        let kr: Vec<f64> = zeros[..nr].iter().map(|j| j / radius).collect();
        let nodes: Vec<f64> = zeros[..nr].iter().map(|j| j * radius / zeros[nr]).collect();
        let b0 = DMatrix::from_fn(nr, nr, |j, m| libm::j0(kr[m] * nodes[j]));
        let b1 = DMatrix::from_fn(nr, nr, |j, m| libm::j1(kr[m] * nodes[j]));
        let kz = (0..nz)
            .map(|n| {
                let f = if n < nz / 2 { n as f64 } else { n as f64 - nz as f64 };
                if n == nz / 2 { 0.0 } else { 2.0 * PI * f / lz }
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            nr,
            nz,
            radius,
            lz,
            j1_sq: zeros[..nr].iter().map(|&j| libm::j1(j).powi(2)).collect(),
            kr,
            nodes,
            kz,
            analyze0: invert(&b0, "order-0")?,
            analyze1: invert(&b1, "order-1")?,
            eval0: row_major(&b0),
            eval1: row_major(&b1),
            fft_forward: planner.plan_fft_forward(nz),
            fft_inverse: planner.plan_fft_inverse(nz),
        })
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn len(&self) -> usize {
        self.nr * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn lz(&self) -> f64 {
        self.lz
    }

    /// Radial wavenumbers `kₘ`.
    pub fn kr(&self) -> &[f64] {
        &self.kr
    }

    /// Radial collocation nodes.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Axial wavenumbers in FFT order; zero on the Nyquist mode.
    pub fn kz(&self) -> &[f64] {
        &self.kz
    }

    pub fn z(&self, l: usize) -> f64 {
        l as f64 * self.lz / self.nz as f64
    }

    pub fn is_nyquist(&self, n: usize) -> bool {
        n == self.nz / 2
    }

    /// Index of `−kz`.
    pub fn neg_z(&self, n: usize) -> usize {
        (self.nz - n) % self.nz
    }

    pub fn same_as(&self, other: &AxisymGrid) -> bool {
        std::ptr::eq(self, other)
            || (self.nr == other.nr && self.nz == other.nz && self.radius == other.radius && self.lz == other.lz)
    }

    fn z_forward(&self, values: &[f64]) -> Vec<Complex64> {
        let nz = self.nz;
        let mut out: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let scale = 1.0 / nz as f64;
        for row in out.chunks_exact_mut(nz) {
            self.fft_forward.process(row);
            row.iter_mut().for_each(|c| *c *= scale);
            row[nz / 2] = Complex64::default();
        }
        out
    }

    fn z_inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut buf = spec.to_vec();
        for row in buf.chunks_exact_mut(self.nz) {
            self.fft_inverse.process(row);
        }
        buf.iter().map(|c| c.re).collect()
    }

    fn radial_apply(&self, mat: &[f64], data: &[Complex64]) -> Vec<Complex64> {
        let (nr, nz) = (self.nr, self.nz);
        let mut out = vec![Complex64::default(); nr * nz];
        for i in 0..nr {
            let dst = &mut out[i * nz..(i + 1) * nz];
            for j in 0..nr {
                let a = mat[i * nr + j];
                for (d, s) in dst.iter_mut().zip(&data[j * nz..(j + 1) * nz]) {
                    *d += s * a;
                }
            }
        }
        out
    }

    /// Node values → mixed coefficients `c[m·Nz + n]` of `Σ cₘₙ J₀(kₘr) e^{i kz z}`.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        self.radial_apply(&self.analyze0, &self.z_forward(values))
    }

    /// Mixed order-0 coefficients → node values.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.z_inverse(&self.radial_apply(&self.eval0, coeffs))
    }

    /// Node values → coefficients of the `J₁(kₘr)` expansion.
    pub fn forward_order1(&self, values: &[f64]) -> Vec<Complex64> {
        self.radial_apply(&self.analyze1, &self.z_forward(values))
    }

    /// Order-1 coefficients → node values.
    pub fn inverse_order1(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.z_inverse(&self.radial_apply(&self.eval1, coeffs))
    }

    /// `∫ |f|² dx` over the cylinder (including the `2π` from the angle),
    /// by Parseval on mixed order-0 coefficients.
    pub fn norm_sq(&self, coeffs: &[Complex64]) -> f64 {
        let w = PI * self.lz * self.radius * self.radius;
        (0..self.nr)
            .map(|m| self.j1_sq[m] * coeffs[m * self.nz..(m + 1) * self.nz].iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * w
    }

    /// Evaluates an order-0 coefficient set at arbitrary `(r, z)`; zero for `r ≥ R`.
    pub fn evaluate(&self, coeffs: &[Complex64], r: f64, z: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        let phases: Vec<Complex64> = (0..self.nz)
            .map(|n| {
                let f = if n < self.nz / 2 { n as f64 } else { n as f64 - self.nz as f64 };
                Complex64::from_polar(1.0, 2.0 * PI * f * z / self.lz)
            })
            .collect();
        (0..self.nr)
            .map(|m| {
                let zsum: Complex64 = (0..self.nz).map(|n| coeffs[m * self.nz + n] * phases[n]).sum();
                zsum.re * libm::j0(self.kr[m] * r)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_bessel_zeros() {
        let known = [2.404_825_557_695_773, 5.520_078_110_286_311, 8.653_727_912_911_013, 11.791_534_439_014_281];
        for (m, z) in known.iter().enumerate() {
            assert!((bessel_j0_zero(m + 1) - z).abs() < 1e-13);
        }
        assert!(libm::j0(bessel_j0_zero(40)).abs() < 1e-14);
    }

    #[test]
    fn round_trips() {
        let g = AxisymGrid::new(24, 16, 5.0, 2.0 * PI).unwrap();
        let f: Vec<f64> = (0..g.nr())
            .flat_map(|j| {
                let r = g.nodes()[j];
                (0..g.nz()).map(move |l| (-r * r).exp() * (1.0 + 0.3 * (l as f64 * 2.0 * PI / 16.0).sin()))
            })
            .collect();
        let back = g.inverse(&g.forward(&f));
        let err = f.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        let back1 = g.inverse_order1(&g.forward_order1(&f));
        let err1 = f.iter().zip(&back1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err1 < 1e-10, "{err1}");
    }

    #[test]
    fn radial_derivative_chain() {
        // f = e^{-r²} cos z, ∂r f = -2r e^{-r²} cos z
        let g = AxisymGrid::new(40, 8, 6.0, 2.0 * PI).unwrap();
        let vals = |h: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
            (0..g.nr()).flat_map(|j| (0..g.nz()).map(move |l| (j, l))).map(|(j, l)| h(g.nodes()[j], g.z(l))).collect()
        };
        let f = vals(&|r, z| (-r * r).exp() * z.cos());
        let df = vals(&|r, z| -2.0 * r * (-r * r).exp() * z.cos());
        let c0 = g.forward(&f);
        let via_chain: Vec<Complex64> =
            c0.iter().enumerate().map(|(i, c)| c * -g.kr()[i / g.nz()]).collect();
        let c1 = g.forward_order1(&df);
        let err = c1.iter().zip(&via_chain).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
        let back = g.inverse_order1(&via_chain);
        assert!(back.iter().zip(&df).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn parseval_norm() {
        // ∫ e^{-2r²} dx over the cylinder: 2π Lz ∫ e^{-2r²} r dr = π Lz / 2
        let g = AxisymGrid::new(32, 4, 6.0, 2.0 * PI).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|i| (-(g.nodes()[i / 4]).powi(2)).exp()).collect();
        let n = g.norm_sq(&g.forward(&f));
        assert!((n - PI * 2.0 * PI / 2.0).abs() < 1e-10 * n);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(AxisymGrid::new(3, 8, 1.0, 1.0).is_err());
        assert!(AxisymGrid::new(8, 7, 1.0, 1.0).is_err());
        assert!(AxisymGrid::new(8, 8, -1.0, 1.0).is_err());
    }
}
