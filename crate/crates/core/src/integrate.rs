//! Time integration of `du/dt = -λ u + N(u)` with a diagonal linear part.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Classical RK4 on the integrating-factor transformed system.
    Rk4IntegratingFactor,
    /// Crank–Nicolson for the linear part, Adams–Bashforth 2 for `N`.
    ImexCnAb2,
}

impl Scheme {
    pub fn id(self) -> u8 {
        match self {
            Scheme::Rk4IntegratingFactor => 0,
            Scheme::ImexCnAb2 => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Scheme::Rk4IntegratingFactor),
            1 => Some(Scheme::ImexCnAb2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rk4IntegratingFactor => "rk4-integrating-factor",
            Scheme::ImexCnAb2 => "imex-cn-ab2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rk4-integrating-factor" | "rk4" => Some(Scheme::Rk4IntegratingFactor),
            "imex-cn-ab2" | "cnab2" => Some(Scheme::ImexCnAb2),
            _ => None,
        }
    }
}

/// One-step propagator for a fixed `dt` and per-entry decay rates `λ ≥ 0`.
#[derive(Debug, Clone)]
pub struct Stepper {
    scheme: Scheme,
    dt: f64,
    full: Vec<f64>,
    half: Vec<f64>,
    previous: Option<Vec<Complex64>>,
    rates: Vec<f64>,
}

fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += xi * a);
}

impl Stepper {
    pub fn new(scheme: Scheme, dt: f64, rates: Vec<f64>) -> Self {
        let full = rates.iter().map(|l| (-l * dt).exp()).collect();
        let half = rates.iter().map(|l| (-l * dt * 0.5).exp()).collect();
        Self { scheme, dt, full, half, previous: None, rates }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Forgets multistep history.
    pub fn reset(&mut self) {
        self.previous = None;
    }

    pub fn step<F>(&mut self, u: &[Complex64], nonlinear: F) -> Vec<Complex64>
    where
        F: Fn(&[Complex64]) -> Vec<Complex64>,
    {
        match self.scheme {
            Scheme::Rk4IntegratingFactor => self.step_rk4(u, nonlinear),
            Scheme::ImexCnAb2 => self.step_cnab2(u, nonlinear),
        }
    }

    fn damp(&self, x: &[Complex64], half: bool) -> Vec<Complex64> {
        let e = if half { &self.half } else { &self.full };
        x.iter().zip(e).map(|(c, f)| c * f).collect()
    }

    fn step_rk4<F>(&self, u: &[Complex64], nonlinear: F) -> Vec<Complex64>
    where
        F: Fn(&[Complex64]) -> Vec<Complex64>,
    {
        let h = self.dt;
        let a = nonlinear(u);

        let mut s = u.to_vec();
        axpy(&mut s, 0.5 * h, &a);
        let b = nonlinear(&self.damp(&s, true));

        let mut s = self.damp(u, true);
        axpy(&mut s, 0.5 * h, &b);
        let c = nonlinear(&s);

        let mut s = self.damp(u, false);
        axpy(&mut s, h, &self.damp(&c, true));
        let d = nonlinear(&s);

        let mut out = self.damp(u, false);
        axpy(&mut out, h / 6.0, &self.damp(&a, false));
        let mut bc = b;
        axpy(&mut bc, 1.0, &c);
        axpy(&mut out, h / 3.0, &self.damp(&bc, true));
        axpy(&mut out, h / 6.0, &d);
        out
    }

    fn step_cnab2<F>(&mut self, u: &[Complex64], nonlinear: F) -> Vec<Complex64>
    where
        F: Fn(&[Complex64]) -> Vec<Complex64>,
    {
        let h = self.dt;
        let n = nonlinear(u);
        let prev = self.previous.take().unwrap_or_else(|| n.clone());
        let out = u
            .iter()
            .zip(&self.rates)
            .enumerate()
            .map(|(j, (c, l))| {
                let explicit = n[j] * 1.5 - prev[j] * 0.5;
                (c * (1.0 - 0.5 * h * l) + explicit * h) / (1.0 + 0.5 * h * l)
            })
            .collect();
        self.previous = Some(n);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn linear_decay_is_exact_with_integrating_factor() {
        let rates = vec![0.0, 1.0, 7.5];
        let mut s = Stepper::new(Scheme::Rk4IntegratingFactor, 0.1, rates.clone());
        let mut u = vec![c(1.0), c(2.0), c(-1.0)];
        for _ in 0..10 {
            u = s.step(&u, |x| vec![Complex64::default(); x.len()]);
        }
        for (j, l) in rates.iter().enumerate() {
            let expect = [1.0, 2.0, -1.0][j] * (-l * 1.0f64).exp();
            assert!((u[j].re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn rk4_fourth_order_on_logistic_type_problem() {
        // u' = -u + u^2, exact u = 1/(1 + (1/u0 - 1) e^t)
        let exact = |t: f64, u0: f64| 1.0 / (1.0 + (1.0 / u0 - 1.0) * t.exp());
        let err = |dt: f64| {
            let mut s = Stepper::new(Scheme::Rk4IntegratingFactor, dt, vec![1.0]);
            let mut u = vec![c(0.5)];
            let steps = (1.0 / dt).round() as usize;
            for _ in 0..steps {
                u = s.step(&u, |x| vec![x[0] * x[0]]);
            }
            (u[0].re - exact(1.0, 0.5)).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!(ratio > 14.0 && ratio < 18.0, "observed ratio {ratio}");
    }

    #[test]
    fn cnab2_second_order() {
        let exact = |t: f64, u0: f64| 1.0 / (1.0 + (1.0 / u0 - 1.0) * t.exp());
        let err = |dt: f64| {
            let mut s = Stepper::new(Scheme::ImexCnAb2, dt, vec![1.0]);
            let mut u = vec![c(0.5)];
            for _ in 0..(1.0 / dt).round() as usize {
                u = s.step(&u, |x| vec![x[0] * x[0]]);
            }
            (u[0].re - exact(1.0, 0.5)).abs()
        };
        let ratio = err(0.01) / err(0.005);
        assert!(ratio > 3.5 && ratio < 4.5, "observed ratio {ratio}");
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::Rk4IntegratingFactor, Scheme::ImexCnAb2] {
            assert_eq!(Scheme::parse(s.name()), Some(s));
            assert_eq!(Scheme::from_id(s.id()), Some(s));
        }
    }
}
