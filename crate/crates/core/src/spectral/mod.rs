//! Periodic-box Fourier infrastructure.

mod fft;
mod field;
mod grid;
mod ops;

pub use fft::Fft3;
pub use field::{HelicalSign, SpectralScalar, SpectralVector};
pub use grid::{make_grid, Grid};
pub use ops::{
    cross_product, curl, dealias, divergence, gradient, helical_project, helical_residual,
    lambda_pow, leray_project, reflect, resample, ModalField,
};
pub(crate) use ops::{cross, ik_cross};
