use std::f64::consts::PI;
use std::sync::Arc;

use super::fft::Fft3;
use crate::error::{Error, Result};

/// Periodic box discretization.
///
/// Coefficients are stored x-fastest: the flat index of `(i0, i1, i2)` is
/// `i0 + n0 * (i1 + n1 * i2)`. Index `i` along an axis carries the integer
/// frequency `i` for `i < n/2` and `i - n` otherwise. Modes on a Nyquist
/// plane have no partner under `k -> -k`; they are not retained by any
/// differential operator.
#[derive(Debug)]
pub struct Grid {
    n: [usize; 3],
    length: f64,
    freqs: [Vec<i64>; 3],
    dealias_cutoff: [i64; 3],
    kvec: Vec<[f64; 3]>,
    kmag: Vec<f64>,
    retained: Vec<bool>,
    mask: Vec<bool>,
    neg: Vec<usize>,
    fft: Fft3,
}

/// Validates the resolution and builds a shared grid.
pub fn make_grid(n: [usize; 3], length: f64) -> Result<Arc<Grid>> {
    Grid::new(n, length).map(Arc::new)
}

impl Grid {
    pub fn new(n: [usize; 3], length: f64) -> Result<Self> {
        for &ni in &n {
            if ni < 8 || ni % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "resolution {n:?}: every axis must be even and at least 8"
                )));
            }
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!("box size {length} must be positive")));
        }
        let freqs = n.map(|ni| {
            (0..ni)
                .map(|i| if i < ni / 2 { i as i64 } else { i as i64 - ni as i64 })
                .collect::<Vec<_>>()
        });
        // largest |k| with 3|k| < n: products of masked fields never alias back into the mask
        let dealias_cutoff = n.map(|ni| ((ni - 1) / 3) as i64);
        let scale = 2.0 * PI / length;
        let total: usize = n.iter().product();
        let mut kvec = Vec::with_capacity(total);
        let mut kmag = Vec::with_capacity(total);
        let mut retained = Vec::with_capacity(total);
        let mut mask = Vec::with_capacity(total);
        let mut neg = Vec::with_capacity(total);
        for i2 in 0..n[2] {
            for i1 in 0..n[1] {
                for i0 in 0..n[0] {
                    let idx = [i0, i1, i2];
                    let f = [freqs[0][i0], freqs[1][i1], freqs[2][i2]];
                    let keep = (0..3).all(|a| idx[a] != n[a] / 2);
                    let k = if keep {
                        f.map(|fi| fi as f64 * scale)
                    } else {
                        [0.0; 3]
                    };
                    kvec.push(k);
                    kmag.push((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt());
                    retained.push(keep);
                    mask.push(keep && (0..3).all(|a| f[a].abs() <= dealias_cutoff[a]));
                    let m = [(n[0] - i0) % n[0], (n[1] - i1) % n[1], (n[2] - i2) % n[2]];
                    neg.push(m[0] + n[0] * (m[1] + n[1] * m[2]));
                }
            }
        }
        Ok(Self {
            n,
            length,
            freqs,
            dealias_cutoff,
            kvec,
            kmag,
            retained,
            mask,
            neg,
            fft: Fft3::new(n),
        })
    }

    pub fn n(&self) -> [usize; 3] {
        self.n
    }

    pub fn len(&self) -> usize {
        self.kvec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kvec.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(3)
    }

    /// Grid spacing along the coarsest axis.
    pub fn spacing(&self) -> f64 {
        self.length / *self.n.iter().min().unwrap() as f64
    }

    pub fn dealias_cutoff(&self) -> [i64; 3] {
        self.dealias_cutoff
    }

    pub fn flat_index(&self, i: [usize; 3]) -> usize {
        i[0] + self.n[0] * (i[1] + self.n[1] * i[2])
    }

    pub fn axis_indices(&self, idx: usize) -> [usize; 3] {
        let i0 = idx % self.n[0];
        let rest = idx / self.n[0];
        [i0, rest % self.n[1], rest / self.n[1]]
    }

    /// Integer frequency triple of a flat index.
    pub fn frequency(&self, idx: usize) -> [i64; 3] {
        let i = self.axis_indices(idx);
        [self.freqs[0][i[0]], self.freqs[1][i[1]], self.freqs[2][i[2]]]
    }

    /// Flat index of an integer frequency, wrapping modulo the resolution.
    pub fn index_of(&self, f: [i64; 3]) -> usize {
        let i = [0, 1, 2].map(|a| f[a].rem_euclid(self.n[a] as i64) as usize);
        self.flat_index(i)
    }

    /// Whether `f` is representable without wrapping.
    pub fn contains_frequency(&self, f: [i64; 3]) -> bool {
        (0..3).all(|a| {
            let half = (self.n[a] / 2) as i64;
            f[a] > -half && f[a] < half
        })
    }

    /// Physical wavevector; zero on Nyquist planes.
    pub fn k(&self, idx: usize) -> [f64; 3] {
        self.kvec[idx]
    }

    pub fn kmag(&self, idx: usize) -> f64 {
        self.kmag[idx]
    }

    pub fn is_retained(&self, idx: usize) -> bool {
        self.retained[idx]
    }

    pub fn in_mask(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn neg_index(&self, idx: usize) -> usize {
        self.neg[idx]
    }

    pub fn neg_map(&self) -> &[usize] {
        &self.neg
    }

    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }

    /// Physical coordinate of a node along one axis.
    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        i as f64 * self.length / self.n[axis] as f64
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.length == other.length
    }
}
