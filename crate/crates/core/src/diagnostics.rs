//! Energies, helicity, critical energies, balance laws and blow-up monitors.
//!
//! All integrals are evaluated in Fourier space (Parseval), so `∫ f g dx`
//! becomes `L³ Σ conj(f̂) ĝ`.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{curl, ik_cross, ModalField, SpectralVector};

/// One time sample of every monitored quantity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `½‖u‖²`.
    pub energy: f64,
    /// `ν∫₀ᵗ‖∇u‖²`.
    pub dissipation: f64,
    /// `½∫u·ω`.
    pub helicity: f64,
    /// `ν∫₀ᵗ∫∇u·∇ω`.
    pub helicity_flux: f64,
    /// `½‖Λ^½u₊‖² + ν∫₀ᵗ‖Λ^½∇u₊‖²`.
    pub ec_plus: f64,
    pub ec_minus: f64,
    /// Largest `|ω|` over the collocation nodes (a grid sup, not the continuum sup).
    pub max_vorticity: f64,
    /// `∫₀ᵗ max|ω|`.
    pub bkm: f64,
    /// `‖u + uʳ‖/‖u‖`; zero for exactly odd fields.
    pub selfdual_residual: f64,
    pub div_residual: f64,
    /// Energy fraction in the outer third of the resolved band.
    pub tail_fraction: f64,
}

pub const CSV_HEADER: &str =
    "t,E,D,H_inst,H_visc,Ec_plus,Ec_minus,max_vort,bkm,selfdual_res,div_res,tail_frac";

impl DiagnosticsRecord {
    pub fn csv_row(&self) -> String {
        let v = [
            self.t,
            self.energy,
            self.dissipation,
            self.helicity,
            self.helicity_flux,
            self.ec_plus,
            self.ec_minus,
            self.max_vorticity,
            self.bkm,
            self.selfdual_residual,
            self.div_residual,
            self.tail_fraction,
        ];
        v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",")
    }

    /// `E_c(u) = E_c(u₊) + E_c(u₋)`.
    pub fn critical_energy(&self) -> f64 {
        self.ec_plus + self.ec_minus
    }
}

/// Writes the header followed by one row per record.
pub fn write_csv<W: Write>(mut w: W, records: &[DiagnosticsRecord]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

// Integrands of the four accumulated terms, in record order:
// dissipation, helicity flux, Ec₊ flux, Ec₋ flux.
const NACC: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: f64,
    rate: [f64; NACC],
    slope: Option<[f64; NACC]>,
    max_vorticity: f64,
}

/// Running time integrals between samples.
///
/// With time derivatives supplied at both ends of an interval the rule is the
/// endpoint-corrected trapezoid `h/2 (f₀+f₁) + h²/12 (f₀' − f₁')`, which is
/// fourth-order; otherwise the plain trapezoid.
#[derive(Debug, Clone)]
pub struct Monitor {
    nu: f64,
    last: Option<Sample>,
    integrals: [f64; NACC],
    bkm: f64,
}

impl Monitor {
    pub fn new(nu: f64) -> Self {
        Self { nu, last: None, integrals: [0.0; NACC], bkm: 0.0 }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    fn advance(&mut self, s: Sample) {
        if let Some(p) = self.last {
            let h = s.t - p.t;
            for j in 0..NACC {
                let mut inc = 0.5 * h * (p.rate[j] + s.rate[j]);
                if let (Some(a), Some(b)) = (p.slope, s.slope) {
                    inc += h * h / 12.0 * (a[j] - b[j]);
                }
                self.integrals[j] += inc;
            }
            self.bkm += 0.5 * h * (p.max_vorticity + s.max_vorticity);
        }
        self.last = Some(s);
    }
}

/// Computes all quantities of `u` at time `t` and advances the monitor's
/// integrals. `u_t` (the full time derivative) enables the fourth-order
/// quadrature; pass `None` for the plain trapezoid.
pub fn compute_record(t: f64, u: &SpectralVector, u_t: Option<&SpectralVector>, monitor: &mut Monitor) -> DiagnosticsRecord {
    let grid = u.grid();
    let vol = grid.volume();
    let nu = monitor.nu;
    let cutoff = grid.dealias_cutoff();

    let mut energy = 0.0;
    let mut helicity = 0.0;
    let mut ec = [0.0; 2];
    let mut rate = [0.0; NACC];
    let mut slope = [0.0; NACC];
    let mut tail = 0.0;
    let mut odd_defect = 0.0;

    let dot = |a: [Complex64; 3], b: [Complex64; 3]| (0..3).map(|j| (a[j].conj() * b[j]).re).sum::<f64>();
    let norm2 = |a: [Complex64; 3]| (0..3).map(|j| a[j].norm_sqr()).sum::<f64>();

    for idx in 1..grid.len() {
        if !grid.is_retained(idx) {
            continue;
        }
        let v = u.at(idx);
        let e = norm2(v);
        let r = u.at(grid.neg_index(idx));
        odd_defect += norm2([0, 1, 2].map(|j| v[j] + r[j]));
        if e == 0.0 && u_t.is_none() {
            continue;
        }
        let k = grid.k(idx);
        let km = grid.kmag(idx);
        let k2 = km * km;
        let c = ik_cross(k, v);
        let p = [0, 1, 2].map(|j| (v[j] + c[j] / km) * 0.5);
        let m = [0, 1, 2].map(|j| (v[j] - c[j] / km) * 0.5);
        let (np, nm) = (norm2(p), norm2(m));
        let vc = dot(v, c);

        energy += e;
        helicity += vc;
        ec[0] += km * np;
        ec[1] += km * nm;
        rate[0] += k2 * e;
        rate[1] += k2 * vc;
        rate[2] += k2 * km * np;
        rate[3] += k2 * km * nm;

        let f = grid.frequency(idx);
        if (0..3).any(|a| 3 * f[a].abs() > 2 * cutoff[a]) {
            tail += e;
        }

        if let Some(ut) = u_t {
            let w = ut.at(idx);
            let cw = ik_cross(k, w);
            let pw = [0, 1, 2].map(|j| (w[j] + cw[j] / km) * 0.5);
            let mw = [0, 1, 2].map(|j| (w[j] - cw[j] / km) * 0.5);
            slope[0] += 2.0 * k2 * dot(v, w);
            slope[1] += 2.0 * k2 * dot(v, cw);
            slope[2] += 2.0 * k2 * km * dot(p, pw);
            slope[3] += 2.0 * k2 * km * dot(m, mw);
        }
    }
    let total = energy + norm2(u.at(0));

    let omega = curl(u).to_physical();
    let n = grid.len();
    let max_vorticity = (0..n)
        .map(|i| (omega[i] * omega[i] + omega[n + i] * omega[n + i] + omega[2 * n + i] * omega[2 * n + i]).sqrt())
        .fold(0.0, f64::max);

    let scale = nu * vol;
    monitor.advance(Sample {
        t,
        rate: rate.map(|x| x * scale),
        slope: u_t.map(|_| slope.map(|x| x * scale)),
        max_vorticity,
    });
    let acc = monitor.integrals;

    DiagnosticsRecord {
        t,
        energy: 0.5 * vol * total,
        dissipation: acc[0],
        helicity: 0.5 * vol * helicity,
        helicity_flux: acc[1],
        ec_plus: 0.5 * vol * ec[0] + acc[2],
        ec_minus: 0.5 * vol * ec[1] + acc[3],
        max_vorticity,
        bkm: monitor.bkm,
        selfdual_residual: if total > 0.0 { (odd_defect / total).sqrt() } else { 0.0 },
        div_residual: u.divergence_residual(),
        tail_fraction: if total > 0.0 { tail / total } else { 0.0 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceDrift {
    /// `max_t |E(t) + D(t) − E(0)| / E(0)`.
    pub energy_drift: f64,
    /// `max_t |H(t) + H_visc(t) − H(0)|`, relative to `max(|H(0)|, E_c(0))`.
    pub helicity_drift: f64,
}

/// Worst deviation from the energy and helicity balance laws along a trajectory.
///
/// Helicity can vanish identically, so its drift is normalized by the larger
/// of `|H(0)|` and the initial critical energy, which bounds `|H|`.
pub fn balance_drift(records: &[DiagnosticsRecord]) -> Result<BalanceDrift> {
    if records.len() < 2 {
        return Err(Error::InsufficientData("balance drift needs at least two samples"));
    }
    let r0 = records[0];
    let e_scale = if r0.energy > 0.0 { r0.energy } else { 1.0 };
    let h_scale = r0.helicity.abs().max(r0.critical_energy());
    let h_scale = if h_scale > 0.0 { h_scale } else { 1.0 };
    let mut out = BalanceDrift { energy_drift: 0.0, helicity_drift: 0.0 };
    for r in records {
        out.energy_drift = out.energy_drift.max((r.energy + r.dissipation - r0.energy).abs() / e_scale);
        out.helicity_drift =
            out.helicity_drift.max((r.helicity + r.helicity_flux - r0.helicity).abs() / h_scale);
    }
    Ok(out)
}

/// `u ↦ λu(λx)`: moves the coefficient at frequency `f` to `λf` and multiplies by `λ`.
///
/// Coefficients below `1e-14` of the largest are treated as zero and dropped.
pub fn scaling_transform<F: ModalField>(u: &F, lambda: usize) -> Result<F> {
    let grid = u.grid().clone();
    let n = grid.len();
    let ncomp = u.components();
    let mut out = vec![Complex64::default(); ncomp * n];
    let l = lambda as i64;
    // transform roundoff in unsupported modes is not support
    let floor = 1e-14 * u.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    for idx in 0..n {
        if (0..ncomp).all(|c| u.coeffs()[c * n + idx].norm() <= floor) {
            continue;
        }
        let f = grid.frequency(idx);
        let g = f.map(|x| x * l);
        if !grid.contains_frequency(g) || !grid.is_retained(grid.index_of(g)) {
            return Err(Error::ScalingOverflow { factor: lambda, frequency: f });
        }
        let t = grid.index_of(g);
        for c in 0..ncomp {
            out[c * n + t] = u.coeffs()[c * n + idx] * lambda as f64;
        }
    }
    Ok(u.on_grid(&grid, out))
}

/// Time series relevant to singularity formation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupReport {
    pub t: Vec<f64>,
    pub max_vorticity: Vec<f64>,
    pub bkm: Vec<f64>,
    pub tail_fraction: Vec<f64>,
    /// First time at which the spectral tail exceeded the trust threshold.
    pub resolution_lost_at: Option<f64>,
}

/// Tail fraction beyond which a run is considered under-resolved.
pub const TAIL_THRESHOLD: f64 = 0.01;

pub fn blowup_monitors(records: &[DiagnosticsRecord]) -> BlowupReport {
    BlowupReport {
        t: records.iter().map(|r| r.t).collect(),
        max_vorticity: records.iter().map(|r| r.max_vorticity).collect(),
        bkm: records.iter().map(|r| r.bkm).collect(),
        tail_fraction: records.iter().map(|r| r.tail_fraction).collect(),
        resolution_lost_at: records.iter().find(|r| r.tail_fraction > TAIL_THRESHOLD).map(|r| r.t),
    }
}
