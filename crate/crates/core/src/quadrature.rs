//! Adaptive Gauss-Kronrod quadrature, used to evaluate reservoir correlation
//! functions directly from their spectral densities.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Result};
use crate::linalg::C64;
use crate::reservoir::SpectralModel;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).norm())
}

/// `int_a^b f`, bisecting until each panel's Gauss/Kronrod discrepancy is
/// below its share of `abs_tol + rel_tol |I|`.
pub fn integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<C64> {
    const MAX_PANELS: usize = 20_000;
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.norm()) {
        if panels.len() >= MAX_PANELS {
            return Err(domain(format!("quadrature on [{a}, {b}] did not converge (error {err:e})")));
        }
        let worst = panels.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).map(|(i, _)| i).unwrap_or(0);
        let (lo, hi, v, e) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        total += v1 + v2 - v;
        err += e1 + e2 - e;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
    Ok(panels.iter().map(|p| p.2).sum())
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
pub fn wynn_epsilon(partial: &[f64]) -> f64 {
    let n = partial.len();
    if n < 3 {
        return partial.last().copied().unwrap_or(0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial.to_vec();
    let mut best = partial[n - 1];
    for k in 1..n {
        let next: Vec<f64> = (0..cur.len() - 1)
            .map(|i| {
                let diff = cur[i + 1] - cur[i];
                if diff == 0.0 {
                    f64::INFINITY
                } else {
                    prev[i + 1] + 1.0 / diff
                }
            })
            .collect();
        if next.iter().any(|x| !x.is_finite()) {
            break;
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            best = *cur.last().unwrap();
        }
        if cur.len() < 2 {
            break;
        }
    }
    best
}

/// `int_0^inf g(x) cos(w x) dx` for smooth `g` decaying at least like `1/x^2`.
fn fourier_cos_half_line<G: Fn(f64) -> f64>(g: G, w: f64, scale: f64) -> Result<f64> {
    if w == 0.0 {
        // x = scale tan(theta) maps the half line onto [0, pi/2).
        let v = integrate(
            |th: f64| {
                let c = th.cos();
                C64::new(if c == 0.0 { 0.0 } else { g(scale * th.tan()) * scale / (c * c) }, 0.0)
            },
            0.0,
            FRAC_PI_2,
            1e-15,
            1e-13,
        )?;
        return Ok(v.re);
    }
    let half = PI / w.abs();
    let mut sum = 0.0;
    let mut partial = Vec::with_capacity(40);
    for k in 0..40 {
        let a = k as f64 * half;
        let seg = integrate(|x| C64::new(g(x) * (w * x).cos(), 0.0), a, a + half, 1e-16, 1e-13)?;
        sum += seg.re;
        partial.push(sum);
    }
    Ok(wynn_epsilon(&partial))
}

/// `f(tau) = int J(w) exp(-i w tau) dw` evaluated by quadrature of the
/// spectral density.
pub fn kernel_by_quadrature(model: &SpectralModel, tau: f64) -> Result<C64> {
    model.validate()?;
    if tau < 0.0 {
        return Err(domain(format!("tau = {tau} < 0")));
    }
    match *model {
        SpectralModel::Lorentzian { lambda, omega0, .. } => {
            // J is even about omega0, so only the cosine part survives.
            let even = fourier_cos_half_line(|x| model.density(omega0 + x), tau, lambda)?;
            Ok(C64::from_polar(2.0 * even, -omega0 * tau))
        }
        SpectralModel::OhmicLike { omega_c, .. } => {
            let upper = 80.0 * omega_c;
            let panels = (upper * tau / PI).ceil().max(16.0) as usize;
            let width = upper / panels as f64;
            let mut total = C64::new(0.0, 0.0);
            for i in 0..panels {
                let a = i as f64 * width;
                total += integrate(|w| C64::from_polar(model.density(w), -w * tau), a, a + width, 1e-16, 1e-13)?;
            }
            Ok(total)
        }
    }
}
