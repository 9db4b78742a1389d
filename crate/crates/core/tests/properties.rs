use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use selfdual_ns::axisym::{axisym_rhs_with, confined_profile, make_axisym_grid, odd_even_rhs, AxisymGrid, TermSet};
use selfdual_ns::helical::{build_basis, decompose_plus, reconstruct_plus, HelicalBasis};
use selfdual_ns::initial::{random_band_scalar, random_band_vector};
use selfdual_ns::ns::{dual_transform, nonlinear_rhs_ns};
use selfdual_ns::spectral::{
    helical_project, lambda_pow, leray_project, make_grid, reflect, Grid, HelicalSign, SpectralVector,
};

fn grid() -> Arc<Grid> {
    thread_local!(static G: Arc<Grid> = make_grid([12; 3], 2.0 * PI).unwrap());
    G.with(Arc::clone)
}

fn basis() -> Arc<HelicalBasis> {
    thread_local!(static B: Arc<HelicalBasis> = Arc::new(build_basis(&grid())));
    B.with(Arc::clone)
}

fn axisym_grid() -> Arc<AxisymGrid> {
    thread_local!(static G: Arc<AxisymGrid> = make_axisym_grid(24, 12, 5.0, 2.0 * PI).unwrap());
    G.with(Arc::clone)
}

fn field(seed: u64, band: f64) -> SpectralVector {
    random_band_vector(&grid(), band, 1.0, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn physical_round_trip(seed in any::<u64>(), band in 1.0f64..5.0) {
        let u = field(seed, band);
        let back = SpectralVector::from_physical(&grid(), &u.to_physical());
        prop_assert!(back.relative_distance(&u) < 1e-13);
    }

    #[test]
    fn reflection_and_duality_are_involutions(seed in any::<u64>()) {
        let u = field(seed, 4.0);
        let twice = reflect(&reflect(&u));
        prop_assert_eq!(twice.coeffs(), u.coeffs());
        prop_assert!(dual_transform(&dual_transform(&u)).relative_distance(&u) < 1e-15);
    }

    #[test]
    fn helical_parts_partition_and_are_orthogonal(seed in any::<u64>()) {
        let u = field(seed, 4.0);
        let p = helical_project(&u, HelicalSign::Plus).unwrap();
        let m = helical_project(&u, HelicalSign::Minus).unwrap();
        prop_assert!(p.add(&m).relative_distance(&leray_project(&u)) < 1e-14);
        prop_assert!(p.inner(&m).abs() <= 1e-14 * u.l2_norm_sq());
    }

    #[test]
    fn plus_scalar_round_trip(seed in any::<u64>()) {
        let v = random_band_scalar(&grid(), 4.0, 1.0, seed);
        let u = reconstruct_plus(&v, &basis());
        prop_assert!(decompose_plus(&u, &basis()).unwrap().relative_distance(&v) < 1e-14);
    }

    #[test]
    fn fractional_powers_invert(seed in any::<u64>(), s in -2.0f64..2.0) {
        let u = field(seed, 4.0);
        let back = lambda_pow(&lambda_pow(&u, s).unwrap(), -s).unwrap();
        prop_assert!(back.relative_distance(&u) < 1e-13);
    }

    #[test]
    fn nonlinearity_is_quadratic_and_conserves_energy(seed in any::<u64>(), a in -3.0f64..3.0) {
        let u = field(seed, 3.0);
        let n = nonlinear_rhs_ns(&u, true);
        let na = nonlinear_rhs_ns(&u.scaled(a), true);
        prop_assert!(na.relative_distance(&n.scaled(a * a)) < 1e-12);
        prop_assert!(u.inner(&n).abs() <= 1e-12 * u.l2_norm() * n.l2_norm());
    }

    #[test]
    fn profile_rhs_is_quadratic_and_keeps_odd_data_odd(seed in any::<u64>(), a in 0.1f64..3.0) {
        let g = axisym_grid();
        let v = confined_profile(&g, 0.6, 2, 1.0, seed);
        let odd = v.sub(&v.reflect());
        for set in [TermSet::Consistent, TermSet::AsPublished] {
            let r = axisym_rhs_with(&v, 0.0, set).unwrap();
            let ra = axisym_rhs_with(&v.scaled(a), 0.0, set).unwrap();
            prop_assert!(ra.relative_distance(&r.scaled(a * a)) < 1e-12);
            let (_, even) = odd_even_rhs(&odd, 0.05, set).unwrap();
            prop_assert!(even.max_abs() <= 1e-12 * odd.max_abs());
        }
    }
}
