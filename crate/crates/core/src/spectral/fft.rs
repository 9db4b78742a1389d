use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Plans for a 3D complex transform on an x-fastest array.
///
/// Forward transforms are normalized by `1/N` so that the output is the plain
/// Fourier-series coefficient array; inverse transforms are unnormalized.
pub struct Fft3 {
    n: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(n: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = n.map(|len| planner.plan_fft_forward(len));
        let inverse = n.map(|len| planner.plan_fft_inverse(len));
        Self { n, forward, inverse }
    }

    fn len(&self) -> usize {
        self.n.iter().product()
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [n0, n1, n2] = self.n;
        assert_eq!(data.len(), self.len());
        plans[0].process(data);

        let mut lines = vec![Complex64::default(); data.len()];
        // axis 1: lines indexed by (i2, i0)
        for i2 in 0..n2 {
            for i0 in 0..n0 {
                let line = &mut lines[(i2 * n0 + i0) * n1..][..n1];
                for (i1, slot) in line.iter_mut().enumerate() {
                    *slot = data[i0 + n0 * (i1 + n1 * i2)];
                }
            }
        }
        plans[1].process(&mut lines);
        for i2 in 0..n2 {
            for i0 in 0..n0 {
                let line = &lines[(i2 * n0 + i0) * n1..][..n1];
                for (i1, value) in line.iter().enumerate() {
                    data[i0 + n0 * (i1 + n1 * i2)] = *value;
                }
            }
        }

        // axis 2: lines indexed by (i1, i0)
        let plane = n0 * n1;
        for p in 0..plane {
            let line = &mut lines[p * n2..][..n2];
            for (i2, slot) in line.iter_mut().enumerate() {
                *slot = data[p + plane * i2];
            }
        }
        plans[2].process(&mut lines);
        for p in 0..plane {
            let line = &lines[p * n2..][..n2];
            for (i2, value) in line.iter().enumerate() {
                data[p + plane * i2] = *value;
            }
        }
    }

    /// Physical values to normalized coefficients, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// Coefficients to physical values, in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    /// Synthesizes two real fields with one complex transform.
    ///
    /// Both coefficient arrays must be Hermitian-symmetric.
    pub fn inverse_real_pair(&self, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let i = Complex64::i();
        let mut z: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + i * y).collect();
        self.inverse(&mut z);
        (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
    }

    pub fn inverse_real(&self, a: &[Complex64]) -> Vec<f64> {
        let mut z = a.to_vec();
        self.inverse(&mut z);
        z.iter().map(|c| c.re).collect()
    }

    /// Analyzes two real fields with one complex transform.
    ///
    /// `neg` maps each flat index to the index of the negated frequency.
    pub fn forward_real_pair(
        &self,
        a: &[f64],
        b: &[f64],
        neg: &[usize],
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
        self.forward(&mut z);
        let half_i = Complex64::new(0.0, -0.5);
        let mut out_a = Vec::with_capacity(z.len());
        let mut out_b = Vec::with_capacity(z.len());
        for (idx, zk) in z.iter().enumerate() {
            let zm = z[neg[idx]].conj();
            out_a.push((zk + zm) * 0.5);
            out_b.push((zk - zm) * half_i);
        }
        (out_a, out_b)
    }

    pub fn forward_real(&self, a: &[f64]) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut z);
        z
    }
}
