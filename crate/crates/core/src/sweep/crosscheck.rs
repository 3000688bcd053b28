//! Independent-route comparisons: solver against exact solution, kernels
//! against quadrature, closed forms against general pipelines, Kraus maps
//! against the direct state, and monotonicity against finite differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::{
    bdd_closed, discord_closed, hdd_closed, monotonicity_class, tdd_closed, InitialState, Measure, Monotonicity,
};
use crate::discord::{bdd_fidelity_max, hdd_eigen, tdd_x_state};
use crate::error::Result;
use crate::flow::{kraus_consistency_check, two_qubit_state};
use crate::linalg::C64;
use crate::par::{self, Exec};
use crate::quadrature::kernel_by_quadrature;
use crate::reservoir::{kernel, lorentzian_q_analytic, SpectralModel};
use crate::tolerances as tol;
use crate::volterra::{solve, SolverConfig};

use super::export::{CheckReport, CheckResult};

fn result(name: &str, errors: &[f64], tolerance: f64) -> CheckResult {
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    let finite = errors.iter().all(|e| e.is_finite());
    CheckResult {
        name: name.to_string(),
        samples: errors.len(),
        max_error,
        tolerance,
        passed: finite && max_error < tolerance,
    }
}

/// Largest `|q_solver - q_exact|` on `[0, 10]` with `dt = 1e-3`, one entry per width.
pub fn lorentzian_solver_errors(ratios: &[f64], t_max: f64, dt: f64, exec: Exec) -> Result<Vec<f64>> {
    let cfg = SolverConfig::new(t_max, dt)?;
    par::map_slice(ratios, exec, |&r| {
        let model = SpectralModel::lorentzian(1.0, r);
        let rec = solve(&kernel(&model)?, model.omega0(), &cfg)?;
        rec.times
            .iter()
            .zip(&rec.q)
            .try_fold(0.0f64, |acc, (&t, &q)| Ok(acc.max((q - lorentzian_q_analytic(&model, t)?).abs())))
    })
    .into_iter()
    .collect()
}

pub fn lorentzian_solver_check(exec: Exec) -> Result<CheckResult> {
    let errors = lorentzian_solver_errors(&[0.1, 0.5, 1.0, 2.0, 3.0], 10.0, 1e-3, exec)?;
    Ok(result("lorentzian-volterra-vs-analytic", &errors, 1e-6))
}

/// A random Lorentzian or Ohmic-like model within the checked ranges.
pub fn random_model(rng: &mut ChaCha8Rng, ohmic: bool) -> SpectralModel {
    if ohmic {
        SpectralModel::ohmic(rng.gen_range(0.01..1.0), rng.gen_range(0.5..4.0), rng.gen_range(0.5..3.0))
    } else {
        SpectralModel::lorentzian(rng.gen_range(0.1..2.0), rng.gen_range(0.05..3.0))
    }
}

/// Relative deviation of the closed-form kernel from quadrature of the
/// spectral density at `tau in {0, 0.1, 1, 5}` for `count` random models of
/// each family.
pub fn kernel_quadrature_check(count: usize, seed: u64, exec: Exec) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let models: Vec<SpectralModel> = (0..2 * count).map(|i| random_model(&mut rng, i % 2 == 1)).collect();
    let per_model: Vec<Result<Vec<f64>>> = par::map_slice(&models, exec, |m| {
        let k = kernel(m)?;
        [0.0, 0.1, 1.0, 5.0]
            .iter()
            .map(|&tau| {
                let exact = k.eval(tau);
                let quad = kernel_by_quadrature(m, tau)?;
                Ok((quad - exact).norm() / exact.norm())
            })
            .collect()
    });
    let mut errors = Vec::new();
    for r in per_model {
        errors.extend(r?);
    }
    Ok(result("kernel-vs-quadrature", &errors, 1e-7))
}

fn grid_states(n: usize) -> Vec<(f64, f64)> {
    (0..=n).flat_map(|i| (0..=n).map(move |j| (i as f64 / n as f64, j as f64 / n as f64))).collect()
}

/// Closed forms against the X-state formula, the `W` eigenvalue route and
/// the fidelity maximisation on an `(n+1) x (n+1)` grid over `(alpha^2, q)`.
pub fn discord_pipeline_checks(n: usize, exec: Exec) -> Result<Vec<CheckResult>> {
    let points = grid_states(n);
    let errs: Vec<Result<[f64; 3]>> = par::map_slice(&points, exec, |&(a2, q)| {
        let state = InitialState::new(a2)?;
        let rho = two_qubit_state(state, q)?;
        Ok([
            (tdd_closed(state, q)? - tdd_x_state(&rho)?).abs(),
            (hdd_closed(state, q)? - hdd_eigen(&rho)?).abs(),
            (bdd_closed(state, q)? - bdd_fidelity_max(&rho, tol::ANGLE_GRID)?).abs(),
        ])
    });
    let errs = errs.into_iter().collect::<Result<Vec<_>>>()?;
    let column = |k: usize| errs.iter().map(|e| e[k]).collect::<Vec<_>>();
    Ok(vec![
        result("tdd-closed-vs-x-state", &column(0), 1e-12),
        result("hdd-closed-vs-eigen", &column(1), 1e-6),
        result("bdd-closed-vs-fidelity-max", &column(2), 1e-4),
    ])
}

/// Kraus-channel construction against the direct state for random `(alpha^2, p)`.
pub fn kraus_check(count: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = Vec::with_capacity(count);
    for _ in 0..count {
        let state = InitialState::new(rng.gen_range(0.0..=1.0))?;
        let p = C64::from_polar(rng.gen_range(0.0..=1.0f64).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        errors.push(kraus_consistency_check(state, p)?);
    }
    Ok(result("kraus-vs-state", &errors, 1e-10))
}

/// Fraction of grid points where the monotonicity class disagrees with the
/// sign of a central difference of the closed form.
pub fn monotonicity_check() -> Result<CheckResult> {
    let h = 1e-7;
    let mut total = 0usize;
    let mut disagree = 0usize;
    for i in 1..20 {
        let state = InitialState::new(i as f64 / 20.0)?;
        for j in 1..1000 {
            let q = j as f64 / 1000.0;
            for m in Measure::ALL {
                let class = monotonicity_class(state, q, m)?;
                let diff = discord_closed(state, (q + h).min(1.0), m)? - discord_closed(state, q - h, m)?;
                let ok = match class {
                    Monotonicity::Increasing => diff > 0.0,
                    Monotonicity::Decreasing => diff < 0.0,
                    Monotonicity::Stationary => diff.abs() < 1e-6,
                };
                total += 1;
                disagree += usize::from(!ok);
            }
        }
    }
    let mut r = result("monotonicity-vs-finite-difference", &[disagree as f64 / total as f64], 1e-3);
    r.samples = total;
    Ok(r)
}

/// Hand-computed closed-form values.
fn closed_form_anchors() -> Result<CheckResult> {
    let bell_bures = ((2.0 + std::f64::consts::SQRT_2) * (1.0 - std::f64::consts::FRAC_1_SQRT_2)).sqrt();
    let errors = [
        (hdd_closed(InitialState::new(0.9)?, 0.5)? - 0.1).abs(),
        (bdd_closed(InitialState::new(0.5)?, 1.0)? - bell_bures).abs(),
        (tdd_closed(InitialState::new(0.5)?, 0.8)? - 0.8).abs(),
    ];
    Ok(result("closed-form-anchors", &errors, 1e-12))
}

/// Runs every comparison.
pub fn run_all(seed: u64, exec: Exec) -> Result<CheckReport> {
    let mut checks = vec![lorentzian_solver_check(exec)?, kernel_quadrature_check(20, seed, exec)?];
    checks.extend(discord_pipeline_checks(20, exec)?);
    checks.push(kraus_check(100, seed ^ 0x9e37)?);
    checks.push(monotonicity_check()?);
    checks.push(closed_form_anchors()?);
    Ok(CheckReport { checks })
}
