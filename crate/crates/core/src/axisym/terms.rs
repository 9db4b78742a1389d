//! The quadratic terms of the axisymmetric profile equation.
//!
//! Writing `P = v + vʳ`, `M = v − vʳ` (`vʳ(r, z) = v(r, −z)`), `A = Λ′⁻¹Λ⁻¹`,
//! `B = Λ′⁻¹`, `C = Λ′Λ⁻¹`, the equation reads
//!
//! ```text
//! 2√2 (∂t − νΔ) v = Σ sᵢ Oᵢ{ Lᵢ · Rᵢ }
//! ```
//!
//! with ten products of two factors, each factor a fractional power of `Λ′`, `Λ` applied to
//! `P` or `M` and optionally differentiated in `r` and `z`. Two tables are provided:
//! [`TermSet::Consistent`] is the form obtained by projecting the 3D self-dual nonlinearity
//! and agrees with the Cartesian solver; [`TermSet::AsPublished`] is the historical
//! transcription, which differs in the sign of the terms coming from the `e_r`/`e_z`
//! components and in the seventh term.

use num_complex::Complex64;

use super::field::{apply_symbol, scale_radial};
use super::grid::AxisymGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// `v + vʳ`, even in `z`.
    Even,
    /// `v − vʳ`, odd in `z`.
    Odd,
}

/// `∂r^dr ∂z^dz Λ′^lp Λ^l` applied to a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub sector: Sector,
    pub lp: i8,
    pub l: i8,
    pub dr: bool,
    pub dz: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    /// 1-based position in the equation; the viscous term is number 11.
    pub number: usize,
    pub sign: f64,
    /// Outer operator `∂z^dz Λ′^lp Λ^l`.
    pub lp: i8,
    pub l: i8,
    pub dz: bool,
    pub left: Factor,
    pub right: Factor,
}

pub const VISCOUS_TERM: usize = 11;

impl Term {
    /// The same term written for `w` with `v = ΛΛ′w`, multiplied through by `ΛΛ′`.
    pub fn substituted(&self) -> Term {
        let lift = |f: Factor| Factor { lp: f.lp + 1, l: f.l + 1, ..f };
        Term { lp: self.lp + 1, l: self.l + 1, left: lift(self.left), right: lift(self.right), ..*self }
    }

    /// True when the term changes sign under `z → −z`, i.e. it drives `v − vʳ`.
    pub fn is_odd(&self) -> bool {
        let odd = |f: &Factor| usize::from(f.dz) + usize::from(f.sector == Sector::Odd);
        (usize::from(self.dz) + odd(&self.left) + odd(&self.right)) % 2 == 1
    }

    fn involves(&self, s: Sector) -> bool {
        self.left.sector == s || self.right.sector == s
    }
}

pub(crate) const fn fac(sector: Sector, lp: i8, l: i8, dr: bool, dz: bool) -> Factor {
    Factor { sector, lp, l, dr, dz }
}

pub(crate) const fn term(number: usize, sign: f64, lp: i8, l: i8, dz: bool, left: Factor, right: Factor) -> Term {
    Term { number, sign, lp, l, dz, left, right }
}

use Sector::{Even as P, Odd as M};

const T2: Term = term(2, 1.0, 1, -1, false, fac(M, -1, -1, true, true), fac(M, -1, 1, true, false));
const T5: Term = term(5, -1.0, -1, 0, false, fac(M, 1, -1, true, false), fac(P, -1, 0, true, true));
const T6: Term = term(6, 1.0, -1, 0, false, fac(M, 1, -1, false, false), fac(P, 1, 0, false, true));
const T9: Term = term(9, 1.0, -1, 0, false, fac(M, -1, -1, true, true), fac(P, 1, 0, true, false));
const T10: Term = term(10, -1.0, -1, 0, false, fac(M, 1, -1, false, true), fac(P, 1, 0, false, false));

const fn flipped(t: Term) -> Term {
    Term { sign: -t.sign, ..t }
}

/// Projection of the 3D nonlinearity onto the axisymmetric profile.
pub const CONSISTENT_TERMS: [Term; 10] = [
    term(1, -1.0, 1, -1, false, fac(P, -1, 0, true, false), fac(P, -1, 0, true, true)),
    T2,
    term(3, -1.0, -1, -1, true, fac(M, 1, -1, true, false), fac(M, -1, 1, true, false)),
    term(4, 1.0, -1, -1, true, fac(M, 1, -1, false, false), fac(M, 1, 1, false, false)),
    T5,
    T6,
    term(7, 1.0, -1, -1, true, fac(P, -1, 0, true, false), fac(P, 1, 0, true, false)),
    term(8, -1.0, -1, -1, true, fac(P, 1, 0, false, false), fac(P, 1, 0, false, false)),
    T9,
    T10,
];

/// The historical transcription of the same equation.
pub const PUBLISHED_TERMS: [Term; 10] = [
    term(1, 1.0, 1, -1, false, fac(P, -1, 0, true, false), fac(P, -1, 0, true, true)),
    flipped(T2),
    term(3, 1.0, -1, -1, true, fac(M, 1, -1, true, false), fac(M, -1, 1, true, false)),
    term(4, -1.0, -1, -1, true, fac(M, 1, -1, false, false), fac(M, 1, 1, false, false)),
    T5,
    T6,
    term(7, -1.0, -1, -1, true, fac(P, -1, 0, true, false), fac(M, 1, 0, true, false)),
    term(8, 1.0, -1, -1, true, fac(P, 1, 0, false, false), fac(P, 1, 0, false, false)),
    T9,
    T10,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TermSet {
    #[default]
    Consistent,
    AsPublished,
}

impl TermSet {
    pub fn terms(self) -> &'static [Term; 10] {
        match self {
            Self::Consistent => &CONSISTENT_TERMS,
            Self::AsPublished => &PUBLISHED_TERMS,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Consistent => "consistent",
            Self::AsPublished => "as-published",
        }
    }
}

/// Mixed coefficients of `P` and `M`.
pub(crate) struct Sectors {
    pub even: Vec<Complex64>,
    pub odd: Vec<Complex64>,
}

impl Sectors {
    pub(crate) fn split(grid: &AxisymGrid, c: &[Complex64]) -> Self {
        let nz = grid.nz();
        let refl = |i: usize| c[i - i % nz + grid.neg_z(i % nz)];
        Self {
            even: (0..c.len()).map(|i| c[i] + refl(i)).collect(),
            odd: (0..c.len()).map(|i| c[i] - refl(i)).collect(),
        }
    }

    /// Splits in value space, where reflection is an exact permutation of the nodes.
    pub(crate) fn from_values(grid: &AxisymGrid, values: &[f64]) -> Self {
        let nz = grid.nz();
        let refl = |i: usize| values[i - i % nz + (nz - i % nz) % nz];
        let even: Vec<f64> = (0..values.len()).map(|i| values[i] + refl(i)).collect();
        let odd: Vec<f64> = (0..values.len()).map(|i| values[i] - refl(i)).collect();
        Self { even: grid.forward(&even), odd: grid.forward(&odd) }
    }

    fn get(&self, s: Sector) -> &[Complex64] {
        match s {
            Sector::Even => &self.even,
            Sector::Odd => &self.odd,
        }
    }
}

fn factor_values(grid: &AxisymGrid, sectors: &Sectors, f: &Factor) -> Vec<f64> {
    let mut c = apply_symbol(grid, sectors.get(f.sector), f.lp as f64, f.l as f64, f.dz);
    if f.dr {
        scale_radial(grid, &mut c);
        grid.inverse_order1(&c)
    } else {
        grid.inverse(&c)
    }
}

/// Coefficients of `sᵢ Oᵢ{Lᵢ Rᵢ}` for one term.
pub(crate) fn term_coeffs(grid: &AxisymGrid, sectors: &Sectors, t: &Term) -> Result<Vec<Complex64>> {
    let a = factor_values(grid, sectors, &t.left);
    let b = if t.right == t.left { a.clone() } else { factor_values(grid, sectors, &t.right) };
    let product: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let mut c = apply_symbol(grid, &grid.forward(&product), t.lp as f64, t.l as f64, t.dz);
    c.iter_mut().for_each(|x| *x *= t.sign);
    if c.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
        return Err(Error::Assembly { term: t.number });
    }
    Ok(c)
}

/// `scale · Σ` over the selected terms, skipping terms whose sectors vanish.
pub(crate) fn assemble(
    grid: &AxisymGrid,
    sectors: &Sectors,
    terms: &[Term],
    select: impl Fn(&Term) -> bool,
    scale: f64,
) -> Result<Vec<Complex64>> {
    let zero = |s: &[Complex64]| s.iter().all(|x| *x == Complex64::default());
    let (p0, m0) = (zero(&sectors.even), zero(&sectors.odd));
    let mut out = vec![Complex64::default(); grid.len()];
    for t in terms.iter().filter(|t| select(t)) {
        if (p0 && t.involves(Sector::Even)) || (m0 && t.involves(Sector::Odd)) {
            continue;
        }
        let c = term_coeffs(grid, sectors, t)?;
        out.iter_mut().zip(&c).for_each(|(o, x)| *o += x * scale);
    }
    Ok(out)
}

pub(crate) fn add_viscous(grid: &AxisymGrid, out: &mut [Complex64], c: &[Complex64], nu: f64) -> Result<()> {
    if nu == 0.0 {
        return Ok(());
    }
    let lap = apply_symbol(grid, c, 0.0, 2.0, false);
    for (o, x) in out.iter_mut().zip(&lap) {
        *o -= x * nu;
    }
    if out.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
        return Err(Error::Assembly { term: VISCOUS_TERM });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbering_and_parity() {
        for set in [TermSet::Consistent, TermSet::AsPublished] {
            let nums: Vec<usize> = set.terms().iter().map(|t| t.number).collect();
            assert_eq!(nums, (1..=10).collect::<Vec<_>>());
        }
        let odd = |set: TermSet| -> Vec<usize> { set.terms().iter().filter(|t| t.is_odd()).map(|t| t.number).collect() };
        assert_eq!(odd(TermSet::AsPublished), vec![1, 2, 3, 4, 8]);
        assert_eq!(odd(TermSet::Consistent), vec![1, 2, 3, 4, 7, 8]);
    }

    #[test]
    fn tables_differ_only_where_expected() {
        for (c, p) in CONSISTENT_TERMS.iter().zip(&PUBLISHED_TERMS) {
            match c.number {
                5 | 6 | 9 | 10 => assert_eq!(c, p),
                7 => assert_ne!(c.right.sector, p.right.sector),
                _ => assert_eq!(Term { sign: -p.sign, ..*p }, *c),
            }
        }
    }
}
