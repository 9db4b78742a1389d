use std::f64::consts::PI;
use std::sync::Arc;

use selfdual_ns::axisym::*;
use selfdual_ns::helical::build_basis;
use selfdual_ns::integrate::Scheme;
use selfdual_ns::scalar::scalar_nonlinear;
use selfdual_ns::spectral::make_grid;

fn gaussian_grid() -> Arc<AxisymGrid> {
    make_axisym_grid(40, 16, 6.0, 2.0 * PI).unwrap()
}

fn gaussian(r: f64, z: f64) -> f64 {
    (-r * r).exp() * (z.cos() + 0.5 * (3.0 * z).sin())
}

#[test]
fn lambda_prime_squared_matches_finite_differences() {
    let g = gaussian_grid();
    let f = AxisymScalar::from_fn(&g, gaussian);
    assert!(f.is_confined());
    let spectral = lambda_prime_pow(&f, 2.0).unwrap();
    let h = 1e-4;
    let fd = AxisymScalar::from_fn(&g, |r, z| {
        let (a, b, c) = (gaussian(r - h, z), gaussian(r, z), gaussian(r + h, z));
        -((a - 2.0 * b + c) / (h * h) + (c - a) / (2.0 * h * r))
    });
    let d = spectral.relative_distance(&fd);
    assert!(d < 1e-6, "{d}");
}

#[test]
fn lambda_prime_inverse_is_identity() {
    let g = gaussian_grid();
    let f = AxisymScalar::from_fn(&g, gaussian);
    let back = lambda_prime_pow(&lambda_prime_pow(&f, -1.0).unwrap(), 1.0).unwrap();
    assert!(back.relative_distance(&f) < 1e-9);
}

#[test]
fn full_laplacian_splits_into_radial_and_axial_parts() {
    let g = gaussian_grid();
    let f = AxisymScalar::from_fn(&g, gaussian);
    let lam2 = lambda_3d_pow_axisym(&f, 2.0).unwrap();
    // −∂z² of cos z + ½ sin 3z is cos z + 9/2 sin 3z
    let dzz = AxisymScalar::from_fn(&g, |r, z| (-r * r).exp() * (z.cos() + 4.5 * (3.0 * z).sin()));
    let expect = lambda_prime_pow(&f, 2.0).unwrap().add(&dzz);
    assert!(lam2.relative_distance(&expect) < 1e-8);
}

fn profile(seed: u64) -> AxisymScalar {
    let g = make_axisym_grid(32, 16, 6.0, 2.0 * PI).unwrap();
    confined_profile(&g, 0.8, 3, 1.0, seed)
}

#[test]
fn even_data_leaves_only_pure_even_terms() {
    let v = profile(1);
    let even = v.add(&v.reflect());
    for set in [TermSet::Consistent, TermSet::AsPublished] {
        let parts = term_contributions(&even, set).unwrap();
        for (t, p) in set.terms().iter().zip(&parts) {
            let carries_odd = t.left.sector == Sector::Odd || t.right.sector == Sector::Odd;
            if carries_odd {
                assert_eq!(p.max_abs(), 0.0, "{} term {}", set.name(), t.number);
            } else {
                assert!(p.max_abs() > 0.0, "{} term {}", set.name(), t.number);
            }
        }
        // the odd equation reduces to its pure-even terms
        let (odd, _) = odd_even_rhs(&even, 0.0, set).unwrap();
        let pure: Vec<usize> = set
            .terms()
            .iter()
            .filter(|t| t.is_odd() && t.left.sector == Sector::Even && t.right.sector == Sector::Even)
            .map(|t| t.number)
            .collect();
        let sum = pure.iter().fold(AxisymScalar::zeros(v.grid()), |a, &n| a.add(&parts[n - 1]));
        // contributions are for ∂t v; the odd equation carries twice that
        assert!(odd.relative_distance(&sum.scaled(2.0)) < 1e-12);
        let expected: &[usize] = if set == TermSet::Consistent { &[1, 7, 8] } else { &[1, 8] };
        assert_eq!(pure, expected);
    }
}

#[test]
fn swirl_free_rhs_of_zero_is_zero() {
    let z = AxisymScalar::zeros(profile(0).grid());
    assert_eq!(swirl_free_rhs(&z, 0.1, TermSet::Consistent).unwrap().max_abs(), 0.0);
}

fn parity_defect(v: &AxisymScalar, odd: bool) -> f64 {
    let r = v.reflect();
    let wrong = if odd { v.add(&r) } else { v.sub(&r) };
    wrong.norm() / v.norm()
}

#[test]
fn odd_sector_is_invariant_even_sector_is_not() {
    let v = profile(2);
    for set in [TermSet::Consistent, TermSet::AsPublished] {
        let mut s = AxisymSolver::new(&v.sub(&v.reflect()), 0.05, 1e-3, Scheme::Rk4IntegratingFactor, set).unwrap();
        for _ in 0..3 {
            s.step().unwrap();
            let d = parity_defect(&s.profile(), true);
            assert!(d <= 1e-11, "{}: {d}", set.name());
        }
        // the pure-even odd terms feed the odd part from even data
        let mut s = AxisymSolver::new(&v.add(&v.reflect()), 0.05, 1e-3, Scheme::Rk4IntegratingFactor, set).unwrap();
        s.step().unwrap();
        assert!(parity_defect(&s.profile(), false) > 1e-6);
    }
}

#[test]
fn consistent_table_tracks_the_cartesian_nonlinearity() {
    let n = 48;
    let l = 3.0 * PI;
    let g3 = make_grid([n, n, n], l).unwrap();
    let basis = build_basis(&g3);
    let ax = make_axisym_grid(36, n, l / 2.0, l).unwrap();
    let v = confined_profile(&ax, 0.6, 2, 1.0, 11);
    assert!(v.is_confined());
    let cartesian = sample_from_3d(&scalar_nonlinear(&lift_to_3d(&v, &g3).unwrap(), &basis, true), &ax).unwrap();
    let consistent = axisym_rhs_with(&v, 0.0, TermSet::Consistent).unwrap().relative_distance(&cartesian);
    let published = axisym_rhs_with(&v, 0.0, TermSet::AsPublished).unwrap().relative_distance(&cartesian);
    // the residual is the periodic-image background of the Cartesian solution
    println!("consistent {consistent:.3e}, as published {published:.3e}");
    assert!(consistent < 5e-2, "{consistent}");
    assert!(published > 0.5, "{published}");
}

#[test]
fn run_records_every_sample() {
    let v = profile(3);
    let mut s = AxisymSolver::new(&v, 0.05, 1e-3, Scheme::ImexCnAb2, TermSet::Consistent).unwrap();
    let mut seen = 0;
    let traj = run_axisym(&mut s, 10, 4, |_, _| seen += 1).unwrap();
    assert_eq!(seen, 4);
    let times: Vec<f64> = traj.records.iter().map(|r| r.t).collect();
    assert!((times[3] - 0.01).abs() < 1e-15 && times[1] > 0.0);
    assert!(traj.records.iter().all(|r| r.norm > 0.0 && r.edge_ratio < 1e-6));
}
