use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::field::AxisymScalar;
use super::grid::AxisymGrid;

/// `Δ_h² e^{−r²/2s²}`, normalized to 1 on the axis.
///
/// Two horizontal Laplacians give the profile vanishing horizontal moments, so fractional
/// operators such as `Λ′⁻¹` keep it well localized.
pub fn radial_bump(r: f64, width: f64) -> f64 {
    let a = 1.0 / (width * width);
    let x = a * r * r;
    (1.0 - x + x * x / 8.0) * (-0.5 * x).exp()
}

/// A random axisymmetric profile `radial_bump(r) · Σₙ (αₙ cos nκz + βₙ sin nκz)` with
/// `n ≤ modes`, `κ = 2π/Lz`, scaled to peak `amplitude`. Both `z`-parities are present.
pub fn confined_profile(grid: &Arc<AxisymGrid>, width: f64, modes: usize, amplitude: f64, seed: u64) -> AxisymScalar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ab: Vec<(f64, f64)> = (0..=modes)
        .map(|_| (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let kappa = 2.0 * PI / grid.lz();
    let v = AxisymScalar::from_fn(grid, |r, z| {
        let zpart: f64 = ab.iter().enumerate().map(|(n, (a, b))| a * (n as f64 * kappa * z).cos() + b * (n as f64 * kappa * z).sin()).sum();
        radial_bump(r, width) * zpart
    });
    let peak = v.max_abs();
    if peak == 0.0 { v } else { v.scaled(amplitude / peak) }
}
