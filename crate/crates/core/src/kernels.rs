//! Triad interaction kernels `conj(ĥ(ξ))·[ĥ(ζ) × ĥ(η)]` and their conjugate
//! variants: direct evaluation, the published closed forms, and a sampling
//! verifier.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::helical::off_axis_vector;

/// Which of `ĥ(ζ)`, `ĥ(η)` enter conjugated; `ĥ(ξ)` is always conjugated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelVariant {
    /// `h̄(ξ)·[h(ζ) × h(η)]`
    Hhh,
    /// `h̄(ξ)·[h̄(ζ) × h(η)]`
    ConjZeta,
    /// `h̄(ξ)·[h(ζ) × h̄(η)]`
    ConjEta,
    /// `h̄(ξ)·[h̄(ζ) × h̄(η)]`
    ConjBoth,
}

impl KernelVariant {
    pub const ALL: [KernelVariant; 4] = [Self::Hhh, Self::ConjZeta, Self::ConjEta, Self::ConjBoth];

    fn conjugations(self) -> (bool, bool) {
        match self {
            Self::Hhh => (false, false),
            Self::ConjZeta => (true, false),
            Self::ConjEta => (false, true),
            Self::ConjBoth => (true, true),
        }
    }

    /// The variant with the conjugations on `ĥ(ζ)` and `ĥ(η)` both flipped.
    pub fn toggled(self) -> Self {
        match self {
            Self::Hhh => Self::ConjBoth,
            Self::ConjZeta => Self::ConjEta,
            Self::ConjEta => Self::ConjZeta,
            Self::ConjBoth => Self::Hhh,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Hhh => "hhh",
            Self::ConjZeta => "conj-zeta",
            Self::ConjEta => "conj-eta",
            Self::ConjBoth => "conj-both",
        }
    }
}

fn helical_off_axis(k: [f64; 3], label: &str) -> Result<[Complex64; 3]> {
    off_axis_vector(k).ok_or_else(|| Error::Domain(format!("{label} = {k:?} lies on the k₃ axis")))
}

/// The kernel from the basis vectors themselves.
pub fn kernel_direct(variant: KernelVariant, xi: [f64; 3], zeta: [f64; 3], eta: [f64; 3]) -> Result<Complex64> {
    let hx = helical_off_axis(xi, "ξ")?;
    let mut hz = helical_off_axis(zeta, "ζ")?;
    let mut he = helical_off_axis(eta, "η")?;
    let (cz, ce) = variant.conjugations();
    if cz {
        hz = hz.map(|z| z.conj());
    }
    if ce {
        he = he.map(|z| z.conj());
    }
    let c = crate::spectral::cross(hz, he);
    Ok(hx[0].conj() * c[0] + hx[1].conj() * c[1] + hx[2].conj() * c[2])
}

/// The closed forms as published, term by term.
///
/// Each has the shape `{A − i B}/(2√2|ξ'||ζ'||η'|)`, where `x'` is the
/// horizontal part of `x`.
pub fn kernel_closed_form(variant: KernelVariant, xi: [f64; 3], zeta: [f64; 3], eta: [f64; 3]) -> Result<Complex64> {
    let hyp = |k: [f64; 3]| k[0].hypot(k[1]);
    let norm = |k: [f64; 3]| (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let (xp, zp, ep) = (hyp(xi), hyp(zeta), hyp(eta));
    for (p, k, label) in [(xp, xi, "ξ"), (zp, zeta, "ζ"), (ep, eta, "η")] {
        if p == 0.0 {
            return Err(Error::Domain(format!("{label} = {k:?} lies on the k₃ axis")));
        }
    }
    let (nx, nz, ne) = (norm(xi), norm(zeta), norm(eta));
    let [x1, x2, x3] = xi;
    let [z1, z2, z3] = zeta;
    let [e1, e2, e3] = eta;
    let (xp2, zp2, ep2) = (xp * xp, zp * zp, ep * ep);
    let zde = z1 * e1 + z2 * e2;
    let xde = x1 * e1 + x2 * e2;
    let xdz = x1 * z1 + x2 * z2;

    let (re, im) = match variant {
        KernelVariant::Hhh => (
            xp2 * (z1 * e2 - z2 * e1) / nx * (1.0 - z3 * e3 / (nz * ne))
                + zp2 * (x2 * e1 - x1 * e2) / nz * (1.0 - x3 * e3 / (nx * ne))
                + ep2 * (x1 * z2 - x2 * z1) / ne * (1.0 - x3 * z3 / (nx * nz)),
            xp2 * zde * (e3 / (nx * ne) - z3 / (nx * nz)) + zp2 * xde * (x3 / (nx * nz) - e3 / (nz * ne))
                - ep2 * xdz * (x3 / (nx * ne) - z3 / (nz * ne)),
        ),
        KernelVariant::ConjZeta => (
            xp2 * (-z1 * e2 + z2 * e1) / nx * (1.0 + z3 * e3 / (nz * ne))
                + zp2 * (x2 * e1 - x1 * e2) / nz * (1.0 - x3 * e3 / (nx * ne))
                + ep2 * (-x1 * z2 + x2 * z1) / ne * (1.0 + x3 * z3 / (nx * nz)),
            -xp2 * zde * (e3 / (nx * ne) + z3 / (nx * nz)) + zp2 * xde * (x3 / (nx * nz) - e3 / (nz * ne))
                + ep2 * xdz * (x3 / (nx * ne) + z3 / (nz * ne)),
        ),
        KernelVariant::ConjEta => (
            xp2 * (-z1 * e2 + z2 * e1) / nx * (1.0 + z3 * e3 / (nz * ne))
                + zp2 * (-x2 * e1 + x1 * e2) / nz * (1.0 + x3 * e3 / (nx * ne))
                + ep2 * (-x1 * z2 + x2 * z1) / ne * (-1.0 + x3 * z3 / (nx * nz)),
            xp2 * zde * (e3 / (nx * ne) + z3 / (nx * nz)) - zp2 * xde * (x3 / (nx * nz) + e3 / (nz * ne))
                + ep2 * xdz * (-x3 / (nx * ne) + z3 / (nz * ne)),
        ),
        KernelVariant::ConjBoth => (
            xp2 * (z1 * e2 - z2 * e1) / nx * (1.0 - z3 * e3 / (nz * ne))
                + zp2 * (-x2 * e1 + x1 * e2) / nz * (1.0 + x3 * e3 / (nx * ne))
                + ep2 * (-x1 * z2 + x2 * z1) / ne * (1.0 + x3 * z3 / (nx * nz)),
            -xp2 * zde * (e3 / (nx * ne) - z3 / (nx * nz)) - zp2 * xde * (x3 / (nx * nz) + e3 / (nz * ne))
                + ep2 * xdz * (x3 / (nx * ne) + z3 / (nz * ne)),
        ),
    };
    let pre = 1.0 / (2.0 * std::f64::consts::SQRT_2 * xp * zp * ep);
    Ok(Complex64::new(re, -im) * pre)
}

/// `(k₁, −k₂, k₃)`.
pub fn mirror_x2(k: [f64; 3]) -> [f64; 3] {
    [k[0], -k[1], k[2]]
}

/// Per-variant results of [`verify_kernels`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantReport {
    pub variant: KernelVariant,
    /// `max |closed − direct|` over the samples.
    pub max_abs_deviation: f64,
    /// `max |closed − direct(toggled variant)|`: how well the published form
    /// matches the kernel with the `ζ`, `η` conjugations flipped.
    pub max_abs_deviation_toggled: f64,
    /// Samples on which the real part flips and the imaginary part is kept
    /// under `(ζ₂, η₂) → (−ζ₂, −η₂)`, so the symmetrized kernel is `i·Im K`.
    pub parity_confirmed: usize,
    /// Same parity test applied to the closed form.
    pub parity_confirmed_closed_form: usize,
    /// `max |closed − direct|` on triads without `ξ = ζ + η`.
    pub max_abs_deviation_unconstrained: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub variants: Vec<VariantReport>,
    /// Every variant within tolerance and parity confirmed on every sample.
    pub pass: bool,
}

/// Integer wavevector with `|kᵢ| ≤ r` and nonzero horizontal part.
fn random_off_axis(rng: &mut ChaCha8Rng, r: i64) -> [f64; 3] {
    loop {
        let k = [0; 3].map(|_| rng.random_range(-r..=r) as f64);
        if k[0] != 0.0 || k[1] != 0.0 {
            return k;
        }
    }
}

/// Samples random off-axis integer triads with `ξ = ζ + η` and compares
/// closed forms against direct evaluation.
pub fn verify_kernels(samples: usize, seed: u64, tolerance: f64) -> KernelReport {
    const RANGE: i64 = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triads = Vec::with_capacity(samples);
    while triads.len() < samples {
        let zeta = random_off_axis(&mut rng, RANGE);
        let eta = random_off_axis(&mut rng, RANGE);
        let xi = [zeta[0] + eta[0], zeta[1] + eta[1], zeta[2] + eta[2]];
        if xi[0] != 0.0 || xi[1] != 0.0 {
            triads.push((xi, zeta, eta));
        }
    }
    let free: Vec<_> = (0..samples)
        .map(|_| (random_off_axis(&mut rng, RANGE), random_off_axis(&mut rng, RANGE), random_off_axis(&mut rng, RANGE)))
        .collect();

    let parity_holds = |k: Complex64, m: Complex64| {
        let scale = k.norm().max(1.0);
        (k.re + m.re).abs() <= tolerance * scale && (k.im - m.im).abs() <= tolerance * scale
    };

    let variants: Vec<VariantReport> = KernelVariant::ALL
        .iter()
        .map(|&variant| {
            let mut rep = VariantReport {
                variant,
                max_abs_deviation: 0.0,
                max_abs_deviation_toggled: 0.0,
                parity_confirmed: 0,
                parity_confirmed_closed_form: 0,
                max_abs_deviation_unconstrained: 0.0,
            };
            for &(xi, zeta, eta) in &triads {
                // all three arguments are off axis by construction
                let d = kernel_direct(variant, xi, zeta, eta).unwrap();
                let c = kernel_closed_form(variant, xi, zeta, eta).unwrap();
                rep.max_abs_deviation = rep.max_abs_deviation.max((c - d).norm());
                let t = kernel_direct(variant.toggled(), xi, zeta, eta).unwrap();
                rep.max_abs_deviation_toggled = rep.max_abs_deviation_toggled.max((c - t).norm());
                let (mx, mz, me) = (mirror_x2(xi), mirror_x2(zeta), mirror_x2(eta));
                let dm = kernel_direct(variant, mx, mz, me).unwrap();
                let cm = kernel_closed_form(variant, mx, mz, me).unwrap();
                rep.parity_confirmed += parity_holds(d, dm) as usize;
                rep.parity_confirmed_closed_form += parity_holds(c, cm) as usize;
            }
            for &(xi, zeta, eta) in &free {
                let d = kernel_direct(variant, xi, zeta, eta).unwrap();
                let c = kernel_closed_form(variant, xi, zeta, eta).unwrap();
                rep.max_abs_deviation_unconstrained = rep.max_abs_deviation_unconstrained.max((c - d).norm());
            }
            rep
        })
        .collect();
    let pass = variants.iter().all(|v| v.max_abs_deviation <= tolerance && v.parity_confirmed == samples);
    KernelReport { samples, seed, tolerance, variants, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triad(z: [f64; 3], e: [f64; 3]) -> ([f64; 3], [f64; 3], [f64; 3]) {
        ([z[0] + e[0], z[1] + e[1], z[2] + e[2]], z, e)
    }

    #[test]
    fn on_axis_arguments_are_rejected() {
        let (x, z, e) = triad([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        for v in KernelVariant::ALL {
            assert!(matches!(kernel_direct(v, x, z, e), Err(Error::Domain(_))));
            assert!(matches!(kernel_closed_form(v, x, z, e), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn direct_kernel_bounds_and_degeneracy() {
        let (x, z, e) = triad([1.0, 2.0, -1.0], [-3.0, 1.0, 2.0]);
        for v in KernelVariant::ALL {
            assert!(kernel_direct(v, x, z, e).unwrap().norm() <= 1.0 + 1e-15);
        }
        let k = [2.0, -1.0, 3.0];
        let x = [4.0, -2.0, 6.0];
        assert!(kernel_direct(KernelVariant::Hhh, x, k, k).unwrap().norm() < 1e-15);
        assert!(kernel_direct(KernelVariant::ConjBoth, x, k, k).unwrap().norm() < 1e-15);
    }

    #[test]
    fn swapping_zeta_and_eta_negates_hhh() {
        let (x, z, e) = triad([1.0, 2.0, 0.0], [2.0, -1.0, 3.0]);
        let a = kernel_direct(KernelVariant::Hhh, x, z, e).unwrap();
        let b = kernel_direct(KernelVariant::Hhh, x, e, z).unwrap();
        assert!((a + b).norm() < 1e-15);
        let ca = kernel_closed_form(KernelVariant::Hhh, x, z, e).unwrap();
        let cb = kernel_closed_form(KernelVariant::Hhh, x, e, z).unwrap();
        assert!((ca + cb).norm() < 1e-14);
    }

    #[test]
    fn closed_forms_match_kernels_with_toggled_conjugations() {
        // h̄(ξ)·[h̄(ζ) × h̄(η)] = conj(h(ξ)·[h(ζ) × h(η)]), so toggling both
        // inner conjugations is the same as conjugating with ĥ(ξ) unbarred
        let (x, z, e) = triad([1.0, 1.0, 1.0], [2.0, -1.0, 1.0]);
        for v in KernelVariant::ALL {
            let c = kernel_closed_form(v, x, z, e).unwrap();
            let t = kernel_direct(v.toggled(), x, z, e).unwrap();
            assert!((c - t).norm() < 1e-14, "{v:?}");
            assert!((c - kernel_direct(v, x, z, e).unwrap()).norm() > 0.1, "{v:?}");
        }
    }

    #[test]
    fn mirror_symmetrization_keeps_imaginary_part() {
        let (x, z, e) = triad([3.0, 1.0, -2.0], [-1.0, 2.0, 1.0]);
        for v in KernelVariant::ALL {
            let k = kernel_direct(v, x, z, e).unwrap();
            let m = kernel_direct(v, mirror_x2(x), mirror_x2(z), mirror_x2(e)).unwrap();
            let sym = (k + m) * 0.5;
            assert!(sym.re.abs() < 1e-15);
            assert!((sym.im - k.im).abs() < 1e-15);
        }
    }

    #[test]
    fn report_is_deterministic_and_empty_run_passes() {
        let a = verify_kernels(200, 7, 1e-12);
        let b = verify_kernels(200, 7, 1e-12);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for v in &a.variants {
            assert!(v.max_abs_deviation_toggled < 1e-13);
            assert_eq!(v.parity_confirmed_closed_form, 200);
            assert_eq!(v.parity_confirmed, 200);
        }
        let empty = verify_kernels(0, 1, 1e-12);
        assert!(empty.pass);
        assert!(empty.variants.iter().all(|v| v.max_abs_deviation == 0.0));
    }
}
