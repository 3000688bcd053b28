//! Memory-kernel integration of the excited-state amplitude
//!
//! ```text
//! dp/dt + i omega0 p(t) + int_0^t f(t - s) p(s) ds = 0,   p(0) = 1,
//! ```
//!
//! solved in the frame rotating at `omega0`, where `u = exp(i omega0 t) p`
//! obeys `du/dt = -int_0^t k(t - s) u(s) ds` with `k(t) = f(t) exp(i omega0 t)`.
//!
//! The history integral uses the trapezoid rule on a uniform grid with the
//! kernel tabulated once. Each step takes an Adams-Bashforth-2 predictor and
//! a trapezoidal corrector; the corrector is linear in the new value and is
//! solved exactly, the predictor only serves as a local error monitor.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::C64;
use crate::reservoir::{KernelFunction, SpectralModel};
use crate::tolerances as tol;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    #[default]
    Rotating,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    #[default]
    Trapezoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub t_max: f64,
    pub dt: f64,
    #[serde(default)]
    pub frame: Frame,
    #[serde(default)]
    pub quadrature: Quadrature,
}

impl SolverConfig {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        let cfg = Self { t_max, dt, frame: Frame::Rotating, quadrature: Quadrature::Trapezoid };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Step of `1e-3` over the fastest rate of the model.
    pub fn default_for(model: &SpectralModel, t_max: f64) -> Result<Self> {
        let rate = match *model {
            SpectralModel::Lorentzian { gamma0, lambda, .. } => gamma0.max(lambda),
            SpectralModel::OhmicLike { omega_c, omega0, .. } => omega_c.max(omega0),
        };
        Self::new(t_max, (1e-3 / rate).min(t_max / 100.0))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(domain(format!("t_max = {} must be positive", self.t_max)));
        }
        if !(self.dt > 0.0 && self.dt <= self.t_max / 100.0 * (1.0 + 1e-12)) {
            return Err(domain(format!("dt = {} must lie in (0, t_max/100]", self.dt)));
        }
        Ok(())
    }

    /// Number of uniform steps; the effective step `t_max / steps` never exceeds `dt`.
    pub fn steps(&self) -> usize {
        (self.t_max / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    pub fn step(&self) -> f64 {
        self.t_max / self.steps() as f64
    }
}

/// Time series of the amplitude and its derived rates for one qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub omega0: f64,
    pub times: Vec<f64>,
    pub p: Vec<C64>,
    pub q: Vec<f64>,
    /// Decay rate; `None` where `q` is too small for the rate to be defined.
    pub gamma: Vec<Option<f64>>,
    /// Frequency shift; `None` where `p` vanishes.
    pub omega_shift: Vec<Option<f64>>,
}

impl EvolutionRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Rotating-frame amplitude `exp(i omega0 t) p(t)`.
    pub fn rotating_amplitude(&self) -> Vec<C64> {
        self.times.iter().zip(&self.p).map(|(&t, &p)| C64::from_polar(1.0, self.omega0 * t) * p).collect()
    }
}

/// Integrates the amplitude equation on `[0, t_max]`.
pub fn solve(kernel: &KernelFunction, omega0: f64, cfg: &SolverConfig) -> Result<EvolutionRecord> {
    cfg.validate()?;
    let n = cfg.steps();
    let h = cfg.step();
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let k: Vec<C64> = times.iter().map(|&t| kernel.eval(t) * C64::from_polar(1.0, omega0 * t)).collect();

    let u = integrate_rotating(&k, h, &times)?;

    let p: Vec<C64> = times.iter().zip(&u).map(|(&t, &u)| C64::from_polar(1.0, -omega0 * t) * u).collect();
    let q = u.iter().map(|z| z.norm_sqr().clamp(0.0, 1.0)).collect();
    Ok(EvolutionRecord { omega0, times, p, q, gamma: vec![None; n + 1], omega_shift: vec![None; n + 1] })
}

fn integrate_rotating(k: &[C64], h: f64, times: &[f64]) -> Result<Vec<C64>> {
    let n = k.len() - 1;
    let mut u = vec![C64::new(0.0, 0.0); n + 1];
    let mut du = vec![C64::new(0.0, 0.0); n + 1];
    u[0] = C64::new(1.0, 0.0);

    let k0 = k[0];
    let implicit = C64::new(1.0, 0.0) + k0 * (0.25 * h * h);
    for m in 1..=n {
        // History: h (k_m u_0 / 2 + sum_{j=1}^{m-1} k_{m-j} u_j).
        let mut acc = k[m] * u[0] * 0.5;
        for (kj, uj) in k[1..m].iter().rev().zip(&u[1..m]) {
            acc += kj * uj;
        }
        let history = acc * h;

        let predicted = if m == 1 { u[0] + du[0] * h } else { u[m - 1] + (du[m - 1] * 1.5 - du[m - 2] * 0.5) * h };
        u[m] = (u[m - 1] + (du[m - 1] - history) * (0.5 * h)) / implicit;
        du[m] = -(history + k0 * u[m] * (0.5 * h));

        let mismatch = (predicted - u[m]).norm();
        if mismatch > tol::PREDICTOR_CORRECTOR {
            return Err(Error::StepTooLarge { t: times[m], mismatch });
        }
    }
    Ok(u)
}

fn central_difference<T>(values: &[T], h: f64, i: usize) -> T
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Div<f64, Output = T>,
{
    let n = values.len() - 1;
    if i == 0 {
        (values[1] - values[0]) / h
    } else if i == n {
        (values[n] - values[n - 1]) / h
    } else {
        (values[i + 1] - values[i - 1]) / (2.0 * h)
    }
}

/// Fills `gamma = -d ln q / dt` and `omega_shift = -2 Im(p'/p)` by central
/// differences (one-sided at the ends). Samples touching `q < 1e-12` are
/// left undefined.
pub fn derive_rates(mut rec: EvolutionRecord) -> EvolutionRecord {
    let n = rec.len();
    if n < 2 {
        rec.gamma = vec![None; n];
        rec.omega_shift = vec![None; n];
        return rec;
    }
    let h = rec.times[1] - rec.times[0];
    let u = rec.rotating_amplitude();
    let defined = |i: usize| rec.q[i] >= tol::Q_UNDEFINED;
    let ln_q: Vec<f64> = rec.q.iter().map(|&q| if q > 0.0 { q.ln() } else { f64::NEG_INFINITY }).collect();

    let stencil_ok = |i: usize| {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(n - 1);
        (lo..=hi).all(defined)
    };

    rec.gamma = (0..n).map(|i| stencil_ok(i).then(|| -central_difference(&ln_q, h, i))).collect();
    rec.omega_shift = (0..n)
        .map(|i| {
            stencil_ok(i).then(|| {
                let du = central_difference(&u, h, i);
                2.0 * rec.omega0 - 2.0 * (du / u[i]).im
            })
        })
        .collect();
    rec
}

/// `dq/dt` by central differences (one-sided at the ends).
pub fn q_derivative(rec: &EvolutionRecord) -> Vec<f64> {
    let n = rec.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h = rec.times[1] - rec.times[0];
    (0..n).map(|i| central_difference(&rec.q, h, i)).collect()
}

/// Qubit energy `omega0 rho_11(0) q(t)`.
pub fn energy(rec: &EvolutionRecord, rho11_initial: f64, omega0: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&rho11_initial) {
        return Err(domain(format!("rho_11(0) = {rho11_initial} outside [0, 1]")));
    }
    Ok(rec.q.iter().map(|&q| omega0 * rho11_initial * q).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::{kernel, lorentzian_gamma_analytic, lorentzian_q_analytic};

    #[test]
    fn zero_kernel_is_free_precession() {
        let cfg = SolverConfig::new(5.0, 0.01).unwrap();
        let rec = solve(&KernelFunction::zero(), 1.3, &cfg).unwrap();
        for (t, p) in rec.times.iter().zip(&rec.p) {
            assert!((p - C64::from_polar(1.0, -1.3 * t)).norm() < 1e-12);
        }
        assert!(rec.q.iter().all(|&q| q == 1.0));

        let rec = derive_rates(rec);
        assert!(rec.gamma.iter().all(|g| g.unwrap().abs() < 1e-12));
        assert!(rec.omega_shift.iter().all(|w| (w.unwrap() - 2.6).abs() < 1e-9));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(1.0, 0.02).is_err());
        assert!(SolverConfig::new(0.0, 0.001).is_err());
        assert!(SolverConfig::new(1.0, 0.01).is_ok());
        let cfg = SolverConfig::new(1.0, 0.003).unwrap();
        assert!(cfg.step() <= 0.003);
    }

    #[test]
    fn lorentzian_matches_exact_solution() {
        let model = SpectralModel::lorentzian(1.0, 0.5);
        let k = kernel(&model).unwrap();
        let cfg = SolverConfig::new(10.0, 1e-3).unwrap();
        let rec = solve(&k, model.omega0(), &cfg).unwrap();
        let err = rec
            .times
            .iter()
            .zip(&rec.q)
            .map(|(&t, &q)| (q - lorentzian_q_analytic(&model, t).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "max error {err}");
        assert_eq!(rec.q[0], 1.0);
    }

    #[test]
    fn derived_gamma_matches_exact_rate() {
        let model = SpectralModel::lorentzian(1.0, 3.0);
        let rec = derive_rates(solve(&kernel(&model).unwrap(), 1.0, &SolverConfig::new(10.0, 1e-3).unwrap()).unwrap());
        for (i, &t) in rec.times.iter().enumerate() {
            if t < 0.1 {
                continue;
            }
            let exact = lorentzian_gamma_analytic(&model, t).unwrap();
            assert!((rec.gamma[i].unwrap() - exact).abs() < 1e-4, "t = {t}");
        }
    }

    #[test]
    fn ohmic_record_invariants() {
        let model = SpectralModel::ohmic(0.1, 3.0, 2.0);
        let cfg = SolverConfig::default_for(&model, 10.0).unwrap();
        let rec = solve(&kernel(&model).unwrap(), model.omega0(), &cfg).unwrap();
        assert_eq!(rec.q[0], 1.0);
        assert_eq!(rec.times.len(), rec.q.len());
        assert!(rec.p.iter().all(|p| p.norm() <= 1.0 + tol::AMPLITUDE_SLACK));
        assert!(rec.q.iter().all(|q| (0.0..=1.0).contains(q)));
    }

    #[test]
    fn step_too_large_is_reported() {
        // A violently fast kernel on a coarse grid trips the error monitor.
        let k = KernelFunction::custom(|t| C64::new(4.0e4 * (-10.0 * t).exp(), 0.0));
        let err = solve(&k, 0.0, &SolverConfig::new(10.0, 0.1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
    }

    #[test]
    fn energy_tracks_q() {
        let model = SpectralModel::lorentzian(1.0, 0.7);
        let rec = solve(&kernel(&model).unwrap(), 1.0, &SolverConfig::new(2.0, 0.01).unwrap()).unwrap();
        assert!(energy(&rec, 0.0, 1.0).unwrap().iter().all(|&e| e == 0.0));
        let e = energy(&rec, 1.0, 2.5).unwrap();
        assert_eq!(e[0], 2.5);
        let e = energy(&rec, 0.4, 1.0).unwrap();
        for (ei, qi) in e.iter().zip(&rec.q) {
            assert!((ei / e[0] - qi).abs() < 1e-15);
        }
        assert!(energy(&rec, 1.5, 1.0).is_err());
    }
}
