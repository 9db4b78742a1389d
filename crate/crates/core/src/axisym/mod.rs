//! Axisymmetric reduction of the scalar profile equation.
//!
//! For `v = v(r, z)` the self-dual velocity has no azimuthal dependence, and the
//! profile equation closes on functions of `(r, z)`. Horizontal operators act
//! through a Fourier–Bessel basis on a cylinder of radius `R`; fields are expected
//! to be confined well inside it.

mod field;
mod grid;
mod lift;
mod profile;
mod rhs;
mod solver;
mod terms;

pub use field::{lambda_3d_pow_axisym, lambda_prime_pow, AxisymScalar, CONFINEMENT_TOL};
pub use grid::{bessel_j0_zero, make_axisym_grid, AxisymGrid};
pub use lift::{lift_to_3d, lifted_velocity, mean_swirl_fraction, sample_from_3d, swirl_fraction};
pub use profile::{confined_profile, radial_bump};
pub use rhs::{axisym_rhs, axisym_rhs_with, odd_even_rhs, swirl_free_rhs, term_contributions, ODD_TOL};
pub use solver::{run_axisym, AxisymRecord, AxisymSolver, AxisymState};
pub use terms::{Factor, Sector, Term, TermSet, CONSISTENT_TERMS, PUBLISHED_TERMS, VISCOUS_TERM};

pub(crate) use field::apply_symbol;
pub(crate) use terms::{assemble, fac, term, Sectors};
