//! Transfer between the axisymmetric representation and the periodic box.
//!
//! The symmetry axis sits at the box centre `(L/2, L/2, ·)`, which is also a centre of the
//! point reflection `x → −x` on the torus, so `v(r, −z)` corresponds to the 3D reflection.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::field::AxisymScalar;
use super::grid::AxisymGrid;
use crate::error::{Error, Result};
use crate::helical::HelicalBasis;
use crate::ns::selfdual_initial;
use crate::spectral::{Grid, SpectralScalar, SpectralVector};

fn check_geometry(ax: &AxisymGrid, grid: &Grid) -> Result<()> {
    let l = grid.length();
    if (ax.lz() - l).abs() > 1e-12 * l {
        return Err(Error::InvalidGrid(format!("axial period {} differs from box size {l}", ax.lz())));
    }
    if ax.radius() > 0.5 * l * (1.0 + 1e-12) {
        return Err(Error::InvalidGrid(format!("radius {} exceeds half the box {l}", ax.radius())));
    }
    Ok(())
}

fn z_phases(ax: &AxisymGrid, z: f64) -> Vec<Complex64> {
    let nz = ax.nz();
    (0..nz)
        .map(|n| {
            if ax.is_nyquist(n) {
                return Complex64::default();
            }
            let f = if n < nz / 2 { n as f64 } else { n as f64 - nz as f64 };
            Complex64::from_polar(1.0, 2.0 * PI * f * z / ax.lz())
        })
        .collect()
}

/// Evaluates the profile on the box, `v(√((x−L/2)² + (y−L/2)²), z)`, zero outside the cylinder.
/// The mean, which carries no velocity, is dropped.
pub fn lift_to_3d(v: &AxisymScalar, grid: &Arc<Grid>) -> Result<SpectralScalar> {
    let ax = v.grid();
    check_geometry(ax, grid)?;
    let [n0, n1, n2] = grid.n();
    let (nr, nz) = (ax.nr(), ax.nz());
    let c = v.coeffs();
    let half = 0.5 * grid.length();
    let phases: Vec<Vec<Complex64>> = (0..n2).map(|i| z_phases(ax, grid.coordinate(2, i))).collect();
    let mut values = vec![0.0; grid.len()];
    for i1 in 0..n1 {
        let y = grid.coordinate(1, i1) - half;
        for i0 in 0..n0 {
            let x = grid.coordinate(0, i0) - half;
            let r = x.hypot(y);
            if r >= ax.radius() {
                continue;
            }
            let bess: Vec<f64> = ax.kr().iter().map(|k| libm::j0(k * r)).collect();
            let mut h = vec![Complex64::default(); nz];
            for m in 0..nr {
                for (hn, cm) in h.iter_mut().zip(&c[m * nz..(m + 1) * nz]) {
                    *hn += cm * bess[m];
                }
            }
            for (i2, ph) in phases.iter().enumerate() {
                let s: Complex64 = h.iter().zip(ph).map(|(a, b)| a * b).sum();
                values[grid.flat_index([i0, i1, i2])] = s.re;
            }
        }
    }
    let mut f = SpectralScalar::from_physical(grid, &values);
    f.coeffs_mut()[0] = Complex64::default();
    Ok(f)
}

/// Evaluates a periodic field along the ray `(L/2 + r, L/2, z)` at the axisymmetric nodes.
pub fn sample_from_3d(f: &SpectralScalar, ax: &Arc<AxisymGrid>) -> Result<AxisymScalar> {
    let grid = f.grid();
    check_geometry(ax, grid)?;
    let [n0, n1, n2] = grid.n();
    let half = 0.5 * grid.length();
    let scale = 2.0 * PI / grid.length();
    let freq = |n: usize, i: usize| if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
    // sum over y at y = L/2: e^{i k₂ L/2} = (−1)^{f₂}
    let mut g = vec![Complex64::default(); n0 * n2];
    for idx in (0..grid.len()).filter(|&i| grid.is_retained(i)) {
        let [i0, i1, i2] = grid.axis_indices(idx);
        let sign = if freq(n1, i1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        g[i2 * n0 + i0] += f.coeffs()[idx] * sign;
    }
    let mut values = vec![0.0; ax.len()];
    for (j, &r) in ax.nodes().iter().enumerate() {
        let xph: Vec<Complex64> =
            (0..n0).map(|i0| Complex64::from_polar(1.0, freq(n0, i0) as f64 * scale * (half + r))).collect();
        let h: Vec<Complex64> = (0..n2).map(|i2| (0..n0).map(|i0| g[i2 * n0 + i0] * xph[i0]).sum()).collect();
        for l in 0..ax.nz() {
            let z = ax.z(l);
            let s: Complex64 =
                (0..n2).map(|i2| h[i2] * Complex64::from_polar(1.0, freq(n2, i2) as f64 * scale * z)).sum();
            values[j * ax.nz() + l] = s.re;
        }
    }
    AxisymScalar::from_values(ax, values)
}

/// Self-dual velocity `u₊ − u₊ʳ` of a lifted profile.
pub fn lifted_velocity(v: &AxisymScalar, basis: &HelicalBasis) -> Result<SpectralVector> {
    Ok(selfdual_initial(&lift_to_3d(v, basis.grid())?, basis))
}

/// Azimuthal velocity about the box axis relative to the total: `‖u_θ‖ / ‖u‖` over the nodes.
pub fn swirl_fraction(u: &SpectralVector) -> f64 {
    let grid = u.grid();
    let phys = u.to_physical();
    let n = grid.len();
    let half = 0.5 * grid.length();
    let (mut swirl, mut total) = (0.0, 0.0);
    for idx in 0..n {
        let [i0, i1, _] = grid.axis_indices(idx);
        let x = grid.coordinate(0, i0) - half;
        let y = grid.coordinate(1, i1) - half;
        let r = x.hypot(y);
        let (ux, uy, uz) = (phys[idx], phys[n + idx], phys[2 * n + idx]);
        total += ux * ux + uy * uy + uz * uz;
        if r > 0.0 {
            swirl += ((-y * ux + x * uy) / r).powi(2);
        }
    }
    if total == 0.0 { 0.0 } else { (swirl / total).sqrt() }
}

/// Swirl carried by the azimuthal mean: `(∫ ⟨u_θ⟩² / ∫ |u|²)^½`, with `⟨u_θ⟩` the average of
/// `u_θ` over circles about the axis, integrated over the cylinder `r < L/2`, and `|u|²` over the box.
///
/// Per mode, the circle average of `u_θ e^{ik·x}` is `ω̂_z J1(κr)/κ` (Stokes), so the measure is
/// evaluated exactly on `n/2` radii and the grid's `z` levels. Non-axisymmetric parts of the
/// flow, such as the influence of periodic images, do not contribute.
pub fn mean_swirl_fraction(u: &SpectralVector) -> f64 {
    let grid = u.grid();
    let total = u.l2_norm_sq() / grid.volume();
    if total == 0.0 {
        return 0.0;
    }
    let [n0, _, n2] = grid.n();
    let half = 0.5 * grid.length();
    let nrad = n0 / 2;
    let dr = half / nrad as f64;
    let radii: Vec<f64> = (0..nrad).map(|j| (j as f64 + 0.5) * dr).collect();
    // modes with horizontal wavenumber, with the phase of the box centre folded in
    let mut modes = Vec::new();
    for idx in (0..grid.len()).filter(|&i| grid.is_retained(i)) {
        let [kx, ky, kz] = grid.k(idx);
        let kappa = kx.hypot(ky);
        if kappa == 0.0 {
            continue;
        }
        let [ux, uy, _] = u.at(idx);
        let [fx, fy, _] = grid.frequency(idx);
        let centre = if (fx + fy).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let a = Complex64::new(0.0, 1.0) * (kx * uy - ky * ux) / kappa * centre;
        let bessel: Vec<f64> = radii.iter().map(|r| libm::j1(kappa * r)).collect();
        modes.push((a, kz, bessel));
    }
    let mut acc = 0.0;
    for i2 in 0..n2 {
        let z = grid.coordinate(2, i2);
        let mut mean = vec![0.0; nrad];
        for (a, kz, bessel) in &modes {
            let b = (a * Complex64::from_polar(1.0, kz * z)).re;
            mean.iter_mut().zip(bessel).for_each(|(m, j)| *m += b * j);
        }
        acc += mean.iter().zip(&radii).map(|(m, r)| m * m * r).sum::<f64>();
    }
    // ∫ 2πr dr dz over the cylinder, in units of the box volume
    let cyl = acc * 2.0 * PI * dr / (n2 as f64 * grid.length().powi(2));
    (cyl / total).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axisym::grid::make_axisym_grid;
    use crate::axisym::profile::confined_profile;
    use crate::spectral::make_grid;

    #[test]
    fn lift_and_sample_round_trip() {
        let g3 = make_grid([32, 32, 32], 2.0 * PI).unwrap();
        let ax = make_axisym_grid(24, 16, PI, 2.0 * PI).unwrap();
        let v = confined_profile(&ax, 0.4, 2, 1.0, 4);
        assert!(v.is_confined());
        let f = lift_to_3d(&v, &g3).unwrap();
        let back = sample_from_3d(&f, &ax).unwrap();
        let d = back.relative_distance(&v);
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn geometry_is_checked() {
        let g3 = make_grid([16, 16, 16], 2.0 * PI).unwrap();
        let ax = make_axisym_grid(8, 8, 4.0, 2.0 * PI).unwrap();
        assert!(lift_to_3d(&AxisymScalar::zeros(&ax), &g3).is_err());
        let ax = make_axisym_grid(8, 8, 3.0, PI).unwrap();
        assert!(lift_to_3d(&AxisymScalar::zeros(&ax), &g3).is_err());
    }

    #[test]
    fn mean_swirl_of_rigid_rotation() {
        // u = ω × (x − c) restricted to a smooth vortex: u_θ(r) = r e^{−r²}, mean swirl is all of it
        let g3 = make_grid([32, 32, 32], 2.0 * PI).unwrap();
        let half = PI;
        let u = SpectralVector::from_fn(&g3, |[x, y, _]| {
            let (dx, dy) = (x - half, y - half);
            let e = (-(dx * dx + dy * dy)).exp();
            [-dy * e, dx * e, 0.0]
        });
        let f = mean_swirl_fraction(&u);
        let s = swirl_fraction(&u);
        assert!((f - s).abs() < 1e-3 * s, "{f} vs {s}");
        // a uniform-in-plane shear has no circulation about the axis
        let shear = SpectralVector::from_fn(&g3, |[_, _, z]| [z.sin(), 0.0, 0.0]);
        assert!(mean_swirl_fraction(&shear) < 1e-14);
    }

    #[test]
    fn odd_profile_has_no_mean_swirl() {
        let g3 = make_grid([32, 32, 32], 2.0 * PI).unwrap();
        let basis = crate::helical::build_basis(&g3);
        let ax = make_axisym_grid(24, 32, PI, 2.0 * PI).unwrap();
        let v = confined_profile(&ax, 0.45, 2, 1.0, 3);
        let odd = v.sub(&v.reflect());
        assert!(mean_swirl_fraction(&lifted_velocity(&odd, &basis).unwrap()) < 1e-12);
        assert!(mean_swirl_fraction(&lifted_velocity(&v, &basis).unwrap()) > 1e-2);
    }
}
