use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::field::AxisymScalar;
use super::terms::{add_viscous, assemble, term_coeffs, Sectors, TermSet};
use crate::error::{Error, Result};

pub(crate) fn rhs_coeffs(v: &AxisymScalar, c: &[Complex64], nu: f64, set: TermSet) -> Result<Vec<Complex64>> {
    rhs_from_sectors(v, &Sectors::split(v.grid(), c), c, nu, set)
}

fn rhs_from_sectors(v: &AxisymScalar, sectors: &Sectors, c: &[Complex64], nu: f64, set: TermSet) -> Result<Vec<Complex64>> {
    let g = v.grid();
    let mut out = assemble(g, sectors, set.terms(), |_| true, 0.5 / SQRT_2)?;
    add_viscous(g, &mut out, c, nu)?;
    Ok(out)
}

/// `∂t v` for the axisymmetric profile: the ten quadratic terms over `2√2` plus `νΔv`.
pub fn axisym_rhs(v: &AxisymScalar, nu: f64) -> Result<AxisymScalar> {
    axisym_rhs_with(v, nu, TermSet::Consistent)
}

pub fn axisym_rhs_with(v: &AxisymScalar, nu: f64, set: TermSet) -> Result<AxisymScalar> {
    let c = rhs_from_sectors(v, &Sectors::from_values(v.grid(), v.values()), &v.coeffs(), nu, set)?;
    Ok(AxisymScalar::from_coeffs(v.grid(), &c))
}

/// Each quadratic term's contribution to `∂t v`, in equation order.
pub fn term_contributions(v: &AxisymScalar, set: TermSet) -> Result<Vec<AxisymScalar>> {
    let g = v.grid();
    let sectors = Sectors::from_values(g, v.values());
    set.terms()
        .iter()
        .map(|t| {
            let c = term_coeffs(g, &sectors, t)?;
            Ok(AxisymScalar::from_coeffs(g, &c).scaled(0.5 / SQRT_2))
        })
        .collect()
}

/// Right sides of the equations for `v − vʳ` and `v + vʳ`; half their sum is [`axisym_rhs_with`].
pub fn odd_even_rhs(v: &AxisymScalar, nu: f64, set: TermSet) -> Result<(AxisymScalar, AxisymScalar)> {
    let g = v.grid();
    let sectors = Sectors::from_values(g, v.values());
    let mut odd = assemble(g, &sectors, set.terms(), |t| t.is_odd(), 1.0 / SQRT_2)?;
    let mut even = assemble(g, &sectors, set.terms(), |t| !t.is_odd(), 1.0 / SQRT_2)?;
    add_viscous(g, &mut odd, &sectors.odd, nu)?;
    add_viscous(g, &mut even, &sectors.even, nu)?;
    Ok((AxisymScalar::from_coeffs(g, &odd), AxisymScalar::from_coeffs(g, &even)))
}

/// Relative size of the even part allowed in a swirl-free profile.
pub const ODD_TOL: f64 = 1e-10;

/// `∂t V` for an odd profile `V = v − vʳ` (no swirl): only products of odd factors survive.
pub fn swirl_free_rhs(big_v: &AxisymScalar, nu: f64, set: TermSet) -> Result<AxisymScalar> {
    let even = big_v.add(&big_v.reflect());
    let n = big_v.norm();
    if even.norm() > ODD_TOL * n {
        return Err(Error::Constraint(format!(
            "swirl-free profile must be odd in z: even part {:.2e} of {:.2e}",
            even.norm() * 0.5,
            n
        )));
    }
    let g = big_v.grid();
    let c = big_v.coeffs();
    let sectors = Sectors { even: vec![Complex64::default(); c.len()], odd: c.clone() };
    let mut out = assemble(g, &sectors, set.terms(), |t| t.is_odd(), 1.0 / SQRT_2)?;
    add_viscous(g, &mut out, &c, nu)?;
    Ok(AxisymScalar::from_coeffs(g, &out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axisym::grid::make_axisym_grid;
    use crate::axisym::profile::confined_profile;
    use std::f64::consts::PI;

    fn sample(seed: u64) -> AxisymScalar {
        let g = make_axisym_grid(32, 16, 6.0, 2.0 * PI).unwrap();
        confined_profile(&g, 0.8, 3, 1.0, seed)
    }

    #[test]
    fn zero_profile_has_zero_rhs() {
        let v = AxisymScalar::zeros(sample(0).grid());
        for set in [TermSet::Consistent, TermSet::AsPublished] {
            assert_eq!(axisym_rhs_with(&v, 0.1, set).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn contributions_sum_to_rhs_and_all_terms_act() {
        let v = sample(1);
        for set in [TermSet::Consistent, TermSet::AsPublished] {
            let parts = term_contributions(&v, set).unwrap();
            assert_eq!(parts.len(), 10);
            let total = parts.iter().skip(1).fold(parts[0].clone(), |a, b| a.add(b));
            let rhs = axisym_rhs_with(&v, 0.0, set).unwrap();
            assert!(total.relative_distance(&rhs) < 1e-12);
            for (i, p) in parts.iter().enumerate() {
                assert!(p.norm() > 1e-6 * rhs.norm(), "term {} inactive", i + 1);
            }
        }
    }

    #[test]
    fn odd_even_split_recombines() {
        let v = sample(2);
        for set in [TermSet::Consistent, TermSet::AsPublished] {
            let (odd, even) = odd_even_rhs(&v, 0.05, set).unwrap();
            let rhs = axisym_rhs_with(&v, 0.05, set).unwrap();
            assert!(odd.add(&even).scaled(0.5).relative_distance(&rhs) < 1e-12);
            // parities: odd part flips under reflection, even part does not
            assert!(odd.add(&odd.reflect()).norm() < 1e-12 * odd.norm());
            assert!(even.sub(&even.reflect()).norm() < 1e-12 * even.norm());
        }
    }

    #[test]
    fn odd_profile_drives_no_even_part() {
        let v = sample(3);
        let odd_v = v.sub(&v.reflect()).scaled(0.5);
        for set in [TermSet::Consistent, TermSet::AsPublished] {
            let (_, even) = odd_even_rhs(&odd_v, 0.0, set).unwrap();
            assert!(even.max_abs() <= 1e-13 * odd_v.max_abs());
            let sf = swirl_free_rhs(&odd_v.scaled(2.0), 0.1, set).unwrap();
            let (odd, _) = odd_even_rhs(&odd_v, 0.1, set).unwrap();
            assert!(sf.relative_distance(&odd) < 1e-12);
        }
    }

    #[test]
    fn swirl_free_rejects_even_data() {
        let v = sample(4);
        assert!(matches!(swirl_free_rhs(&v, 0.1, TermSet::Consistent), Err(Error::Constraint(_))));
    }

    #[test]
    fn rhs_is_quadratic_without_viscosity() {
        let v = sample(5);
        let a = axisym_rhs(&v, 0.0).unwrap();
        let b = axisym_rhs(&v.scaled(-3.0), 0.0).unwrap();
        assert!(b.relative_distance(&a.scaled(9.0)) < 1e-12);
    }

    #[test]
    fn viscous_part_is_the_laplacian() {
        let v = sample(6);
        let a = axisym_rhs(&v, 0.3).unwrap().sub(&axisym_rhs(&v, 0.0).unwrap());
        let lap = crate::axisym::lambda_3d_pow_axisym(&v, 2.0).unwrap().scaled(-0.3);
        assert!(a.relative_distance(&lap) < 1e-10);
    }
}
