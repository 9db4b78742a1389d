//! Pseudo-spectral simulation and verification tools for the self-dual
//! reduction of the 3D incompressible Navier–Stokes equations.
//!
//! The velocity `u` splits into curl eigen-sectors `u₊` and `u₋`. Fields with
//! `u₋(x) = -u₊(-x)` are preserved by the flow, and then `u₊ = v ∗ h` for a
//! single real scalar `v` and a fixed unit helical basis `ĥ(k)`. The crate
//! evolves both the full velocity and the scalar `v`, checks that they agree,
//! and carries the axisymmetric and stationary forms of the scalar equation.

pub mod axisym;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod helical;
pub mod initial;
pub mod integrate;
pub mod kernels;
pub mod ns;
pub mod scalar;
pub mod snapshot;
pub mod spectral;
pub mod stationary;
pub mod verification;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testing {
    use std::sync::Arc;

    use crate::spectral::{Grid, SpectralScalar, SpectralVector};

    pub fn random_scalar(g: &Arc<Grid>, band: usize, seed: u64) -> SpectralScalar {
        crate::initial::random_band_scalar(g, band as f64, 1.0, seed)
    }

    pub fn random_solenoidal(g: &Arc<Grid>, band: usize, seed: u64) -> SpectralVector {
        crate::initial::random_band_vector(g, band as f64, 1.0, seed)
    }
}
