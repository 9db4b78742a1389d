//! Initial-data builders.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{ConfigErrors, ConfigIssue, InitialKind, SimConfig};
use crate::error::{Error, Result};
use crate::helical::{decompose_plus, HelicalBasis};
use crate::snapshot::{read_snapshot, Snapshot, SnapshotKind};
use crate::spectral::{helical_project, leray_project, Grid, HelicalSign, SpectralScalar, SpectralVector};

fn in_band(grid: &Grid, idx: usize, band: f64) -> bool {
    if idx == 0 || !grid.is_retained(idx) {
        return false;
    }
    let f = grid.frequency(idx);
    let r2 = (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]) as f64;
    r2 <= band * band
}

fn random_hermitian(grid: &Grid, band: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut c = vec![Complex64::default(); grid.len()];
    for idx in 0..grid.len() {
        let m = grid.neg_index(idx);
        if idx < m && in_band(grid, idx, band) {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            c[idx] = Complex64::new(re, im);
            c[m] = c[idx].conj();
        }
    }
    c
}

fn normalize(c: &mut [Complex64], rms: f64) {
    let s: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if s > 0.0 {
        let a = rms / s.sqrt();
        c.iter_mut().for_each(|z| *z *= a);
    }
}

/// Random real zero-mean scalar supported on integer frequencies `|f| ≤ band`,
/// scaled to the given root-mean-square value.
pub fn random_band_scalar(grid: &Arc<Grid>, band: f64, rms: f64, seed: u64) -> SpectralScalar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = random_hermitian(grid, band, &mut rng);
    normalize(&mut c, rms);
    SpectralScalar::from_coeffs(grid, c)
}

/// Random real zero-mean divergence-free field on `|f| ≤ band` with the given
/// root-mean-square speed.
pub fn random_band_vector(grid: &Arc<Grid>, band: f64, rms: f64, seed: u64) -> SpectralVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = Vec::with_capacity(3 * grid.len());
    for _ in 0..3 {
        coeffs.extend(random_hermitian(grid, band, &mut rng));
    }
    let mut u = leray_project(&SpectralVector::from_coeffs(grid, coeffs));
    normalize(u.coeffs_mut(), rms);
    u
}

/// Taylor–Green vortex `A (sin x cos y cos z, -cos x sin y cos z, 0)` in box units.
pub fn taylor_green(grid: &Arc<Grid>, amplitude: f64) -> SpectralVector {
    let s = 2.0 * PI / grid.length();
    SpectralVector::from_fn(grid, |x| {
        let (a, b, c) = (s * x[0], s * x[1], s * x[2]);
        [amplitude * a.sin() * b.cos() * c.cos(), -amplitude * a.cos() * b.sin() * c.cos(), 0.0]
    })
    .with_flags(true, HelicalSign::Mixed)
}

/// Arnold–Beltrami–Childress flow on the lowest shell; `∇×u = (2π/L) u`.
pub fn abc_flow(grid: &Arc<Grid>, a: f64, b: f64, c: f64) -> SpectralVector {
    let s = 2.0 * PI / grid.length();
    SpectralVector::from_fn(grid, |x| {
        let (x1, x2, x3) = (s * x[0], s * x[1], s * x[2]);
        [a * x3.sin() + c * x2.cos(), b * x1.sin() + a * x3.cos(), c * x2.sin() + b * x1.cos()]
    })
    .with_flags(true, HelicalSign::Plus)
}

fn config_grid(cfg: &SimConfig) -> Result<Arc<Grid>> {
    crate::spectral::make_grid(cfg.resolution, cfg.box_size)
}

fn load(cfg: &SimConfig) -> Result<Snapshot> {
    let path = cfg.initial.path.as_ref().ok_or_else(|| {
        Error::Config(ConfigErrors(vec![ConfigIssue { line: None, message: "initial.kind = file requires initial.path".into() }]))
    })?;
    let snap = read_snapshot(path)?;
    if snap.kind != SnapshotKind::Axisym && snap.dims.map(|n| n as usize) != cfg.resolution {
        log::warn!("snapshot dims {:?} override resolution {:?}", snap.dims, cfg.resolution);
    }
    Ok(snap)
}

/// Initial velocity described by a configuration.
pub fn velocity_from_config(cfg: &SimConfig, seed: u64) -> Result<SpectralVector> {
    match cfg.initial.kind {
        InitialKind::TaylorGreen => Ok(taylor_green(&config_grid(cfg)?, cfg.initial.amplitude)),
        InitialKind::RandomBand => Ok(random_band_vector(&config_grid(cfg)?, cfg.initial.band, cfg.initial.amplitude, seed)),
        InitialKind::File => load(cfg)?.to_vector(),
    }
}

/// Initial scalar `v₀` described by a configuration. Taylor–Green data contributes its `u₊` sector.
pub fn scalar_from_config(cfg: &SimConfig, basis: &HelicalBasis, seed: u64) -> Result<SpectralScalar> {
    let v = match cfg.initial.kind {
        InitialKind::TaylorGreen => {
            let up = helical_project(&taylor_green(basis.grid(), cfg.initial.amplitude), HelicalSign::Plus)?;
            decompose_plus(&up, basis)?
        }
        InitialKind::RandomBand => random_band_scalar(basis.grid(), cfg.initial.band, cfg.initial.amplitude, seed),
        InitialKind::File => load(cfg)?.to_scalar()?,
    };
    if v.grid().n() != basis.grid().n() || v.grid().length() != basis.grid().length() {
        return Err(Error::GridMismatch);
    }
    Ok(v)
}
