//! Reservoir spectral densities, their correlation kernels, and the exact
//! amplitude for the Lorentzian reservoir.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::C64;
use crate::tolerances as tol;

/// Spectral density of one qubit's reservoir.
///
/// * Lorentzian: `J(w) = gamma0 lambda^2 / (2 pi ((w - omega0)^2 + lambda^2))`
///   on the whole real line.
/// * Ohmic-like: `J(w) = eta w^s omega_c^(1-s) exp(-w / omega_c)` on `w >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectralModel {
    Lorentzian { gamma0: f64, lambda: f64, omega0: f64 },
    OhmicLike { eta: f64, s: f64, omega_c: f64, omega0: f64 },
}

impl SpectralModel {
    pub fn lorentzian(gamma0: f64, lambda: f64) -> Self {
        Self::Lorentzian { gamma0, lambda, omega0: 1.0 }
    }

    pub fn ohmic(eta: f64, s: f64, omega_c: f64) -> Self {
        Self::OhmicLike { eta, s, omega_c, omega0: 1.0 }
    }

    pub fn omega0(&self) -> f64 {
        match *self {
            Self::Lorentzian { omega0, .. } | Self::OhmicLike { omega0, .. } => omega0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Lorentzian { gamma0, lambda, omega0 } => gamma0 > 0.0 && lambda > 0.0 && omega0 > 0.0,
            Self::OhmicLike { eta, s, omega_c, omega0 } => eta > 0.0 && s > 0.0 && omega_c > 0.0 && omega0 > 0.0,
        };
        let finite = match *self {
            Self::Lorentzian { gamma0, lambda, omega0 } => [gamma0, lambda, omega0].iter().all(|x| x.is_finite()),
            Self::OhmicLike { eta, s, omega_c, omega0 } => [eta, s, omega_c, omega0].iter().all(|x| x.is_finite()),
        };
        if ok && finite {
            Ok(())
        } else {
            Err(domain(format!("invalid spectral model {self:?}")))
        }
    }

    /// `J(w)`.
    pub fn density(&self, w: f64) -> f64 {
        match *self {
            Self::Lorentzian { gamma0, lambda, omega0 } => {
                gamma0 * lambda * lambda / (2.0 * std::f64::consts::PI * ((w - omega0).powi(2) + lambda * lambda))
            }
            Self::OhmicLike { eta, s, omega_c, .. } => {
                if w < 0.0 {
                    0.0
                } else {
                    eta * w.powf(s) * omega_c.powf(1.0 - s) * (-w / omega_c).exp()
                }
            }
        }
    }
}

/// Analytic form behind a [`KernelFunction`].
#[derive(Clone)]
pub enum KernelForm {
    /// `amplitude * exp(-lambda t) * exp(-i omega0 t)`
    Lorentzian {
        amplitude: f64,
        lambda: f64,
        omega0: f64,
    },
    /// `amplitude * (1 + i omega_c t)^-(s+1)`
    OhmicLike {
        amplitude: f64,
        omega_c: f64,
        s: f64,
    },
    Zero,
    Custom(Arc<dyn Fn(f64) -> C64 + Send + Sync>),
}

/// Reservoir correlation function `f(t) = int J(w) exp(-i w t) dw`.
#[derive(Clone)]
pub struct KernelFunction {
    form: KernelForm,
}

impl fmt::Debug for KernelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KernelFunction({})", self.tag())
    }
}

impl KernelFunction {
    pub fn zero() -> Self {
        Self { form: KernelForm::Zero }
    }

    pub fn custom(f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self { form: KernelForm::Custom(Arc::new(f)) }
    }

    pub fn form(&self) -> &KernelForm {
        &self.form
    }

    pub fn tag(&self) -> &'static str {
        match self.form {
            KernelForm::Lorentzian { .. } => "lorentzian-exponential",
            KernelForm::OhmicLike { .. } => "ohmic-power-law",
            KernelForm::Zero => "zero",
            KernelForm::Custom(_) => "custom",
        }
    }

    pub fn eval(&self, t: f64) -> C64 {
        match &self.form {
            KernelForm::Lorentzian { amplitude, lambda, omega0 } => {
                C64::from_polar(amplitude * (-lambda * t).exp(), -omega0 * t)
            }
            KernelForm::OhmicLike { amplitude, omega_c, s } => C64::new(1.0, omega_c * t).powf(-(s + 1.0)) * amplitude,
            KernelForm::Zero => C64::new(0.0, 0.0),
            KernelForm::Custom(f) => f(t),
        }
    }
}

/// Closed-form correlation kernel of a spectral model.
pub fn kernel(model: &SpectralModel) -> Result<KernelFunction> {
    model.validate()?;
    let form = match *model {
        SpectralModel::Lorentzian { gamma0, lambda, omega0 } => {
            KernelForm::Lorentzian { amplitude: 0.5 * gamma0 * lambda, lambda, omega0 }
        }
        SpectralModel::OhmicLike { eta, s, omega_c, .. } => {
            KernelForm::OhmicLike { amplitude: eta * gamma_fn(s + 1.0) * omega_c * omega_c, omega_c, s }
        }
    };
    Ok(KernelFunction { form })
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler gamma function (Lanczos, g = 7), with reflection below 1/2.
pub fn gamma_fn(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Lorentzian parameters `(gamma0, lambda)`, or a domain error for other models.
fn lorentzian_params(model: &SpectralModel) -> Result<(f64, f64)> {
    match *model {
        SpectralModel::Lorentzian { gamma0, lambda, .. } => {
            model.validate()?;
            Ok((gamma0, lambda))
        }
        _ => Err(domain("exact solution exists only for the Lorentzian reservoir")),
    }
}

#[derive(Clone, Copy, Debug)]
enum Damping {
    /// `d^2 > 0`
    Over(f64),
    /// `d ~ 0`
    Critical,
    /// `d^2 < 0`, carries `|d|`
    Under(f64),
}

fn damping(gamma0: f64, lambda: f64) -> Damping {
    let d2 = lambda * lambda - 2.0 * gamma0 * lambda;
    let d = d2.abs().sqrt();
    if d < tol::CRITICAL_DAMPING * lambda {
        Damping::Critical
    } else if d2 > 0.0 {
        Damping::Over(d)
    } else {
        Damping::Under(d)
    }
}

/// Rotating-frame amplitude `u(t) = exp(i omega0 t) p(t)` and its derivative.
///
/// `u = exp(-lambda t/2) (cosh(dt/2) + (lambda/d) sinh(dt/2))`,
/// `du/dt = -gamma0 lambda exp(-lambda t/2) sinh(dt/2) / d`, continued
/// through `d = 0` and imaginary `d`.
pub fn lorentzian_amplitude(model: &SpectralModel, t: f64) -> Result<(f64, f64)> {
    let (gamma0, lambda) = lorentzian_params(model)?;
    if t < 0.0 {
        return Err(domain(format!("t = {t} < 0")));
    }
    let env = (-0.5 * lambda * t).exp();
    let half_t = 0.5 * t;
    // u = env (cosh x + (lambda t/2) sinh(x)/x), x = d t/2, and its circular
    // counterpart; written through sinh(x)/x so that d -> 0 loses no digits.
    let (even, odd_over_x) = match damping(gamma0, lambda) {
        Damping::Over(d) => {
            let x = half_t * d;
            if x < 20.0 {
                let shc = if x < 1e-4 { 1.0 + x * x / 6.0 } else { x.sinh() / x };
                (env * x.cosh(), env * shc)
            } else {
                // Expanded in exponentials so large d t cannot overflow.
                let grow = (half_t * (d - lambda)).exp();
                let decay = (-half_t * (d + lambda)).exp();
                (0.5 * (grow + decay), 0.5 * (grow - decay) / x)
            }
        }
        Damping::Critical => (env, env),
        Damping::Under(w) => {
            let x = half_t * w;
            let sinc = if x < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
            (env * x.cos(), env * sinc)
        }
    };
    Ok((even + lambda * half_t * odd_over_x, -gamma0 * lambda * half_t * odd_over_x))
}

/// Exact survival factor `q(t) = |p(t)|^2` for the Lorentzian reservoir.
pub fn lorentzian_q_analytic(model: &SpectralModel, t: f64) -> Result<f64> {
    let (u, _) = lorentzian_amplitude(model, t)?;
    Ok((u * u).clamp(0.0, 1.0))
}

/// `dq/dt = 2 u du/dt`.
pub fn lorentzian_dq_dt(model: &SpectralModel, t: f64) -> Result<f64> {
    let (u, du) = lorentzian_amplitude(model, t)?;
    Ok(2.0 * u * du)
}

/// Exact decay rate `Gamma(t) = 2 gamma0 lambda / (lambda + d coth(dt/2))`.
///
/// Returns `+-inf` where `q(t) = 0`.
pub fn lorentzian_gamma_analytic(model: &SpectralModel, t: f64) -> Result<f64> {
    let (gamma0, lambda) = lorentzian_params(model)?;
    if t <= 0.0 {
        return Err(domain(format!("t = {t} <= 0")));
    }
    let num = 2.0 * gamma0 * lambda;
    Ok(match damping(gamma0, lambda) {
        Damping::Over(d) => {
            let th = (0.5 * d * t).tanh();
            num * th / (lambda * th + d)
        }
        Damping::Critical => num * t / (lambda * t + 2.0),
        Damping::Under(w) => {
            let (s, c) = (0.5 * w * t).sin_cos();
            let den = lambda * s + w * c;
            if den == 0.0 {
                f64::INFINITY.copysign(num * s)
            } else {
                num * s / den
            }
        }
    })
}
