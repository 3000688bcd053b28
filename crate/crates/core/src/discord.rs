//! Geometric quantum discords of general two-qubit states, measured on
//! subsystem A.
//!
//! * Trace distance: exact for X states with vanishing `rho_14`, otherwise a
//!   multi-start search over the zero-discord set (upper bound).
//! * Hellinger distance: largest eigenvalue of the 3x3 correlation matrix
//!   built from `sqrt(rho)`, or a direct minimisation over projective
//!   measurements.
//! * Bures distance: maximal fidelity over measurement directions on the
//!   Bloch sphere.

use std::f64::consts::{PI, TAU};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closed_form::bures_from_fidelity;
use crate::error::{domain, Error, Result};
use crate::linalg::{
    bloch_operator, bloch_state, hermitian_eigenvalues, kron, matrix_sqrt_psd, paulis, trace_norm, ComplexMatrix,
    DensityMatrix,
};
use crate::optimize::{multistart, nelder_mead_restarted, uniform, NelderMeadOptions};
use crate::par::Exec;
use crate::tolerances as tol;

/// Point on the Bloch sphere, `theta in [0, pi]`, `phi in [0, 2 pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDirection {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) {
            return Err(domain(format!("direction ({theta}, {phi}) out of range")));
        }
        Ok(Self { theta, phi })
    }

    /// Wraps arbitrary angles into the canonical ranges.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let u = unit_vector(theta, phi);
        let theta = u[2].clamp(-1.0, 1.0).acos();
        let phi = u[1].atan2(u[0]).rem_euclid(TAU);
        Self { theta, phi: if phi >= TAU { 0.0 } else { phi } }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        unit_vector(self.theta, self.phi)
    }
}

fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// `p1 Pi_1 (x) rho_1 + (1 - p1) Pi_2 (x) rho_2` with `Pi_{1,2} = (I +- n.sigma)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroDiscordState {
    pub p1: f64,
    pub projector_dir: MeasurementDirection,
    pub bloch_b1: [f64; 3],
    pub bloch_b2: [f64; 3],
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl ZeroDiscordState {
    pub fn new(p1: f64, projector_dir: MeasurementDirection, bloch_b1: [f64; 3], bloch_b2: [f64; 3]) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(domain(format!("p1 = {p1} outside [0, 1]")));
        }
        if norm3(bloch_b1) > 1.0 + 1e-12 || norm3(bloch_b2) > 1.0 + 1e-12 {
            return Err(domain("Bloch vector longer than 1"));
        }
        Ok(Self { p1, projector_dir, bloch_b1, bloch_b2 })
    }

    pub fn matrix(&self) -> ComplexMatrix {
        cq_matrix(self.p1, self.projector_dir.unit_vector(), self.bloch_b1, self.bloch_b2)
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix())
    }
}

fn cq_matrix(p1: f64, n: [f64; 3], b1: [f64; 3], b2: [f64; 3]) -> ComplexMatrix {
    let pi1 = bloch_state(n);
    let pi2 = bloch_state([-n[0], -n[1], -n[2]]);
    let a = kron(&pi1, &bloch_state(b1)).scale_real(p1);
    let b = kron(&pi2, &bloch_state(b2)).scale_real(1.0 - p1);
    &a + &b
}

/// Which route produced a discord value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    EigenPipeline,
    BruteForce,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordValue {
    pub value: f64,
    pub method: Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordTriple {
    pub d_t: DiscordValue,
    pub d_l: DiscordValue,
    pub d_b: DiscordValue,
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    Ok(())
}

fn is_x_entry(i: usize, j: usize) -> bool {
    i == j || i + j == 3
}

/// Trace-distance discord `2 |rho_23|` of an X state with `rho_14 = 0`.
pub fn tdd_x_state(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let m = rho.matrix();
    let mut off_x: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if !is_x_entry(i, j) {
                off_x = off_x.max(m[(i, j)].norm());
            }
        }
    }
    if off_x > tol::X_SHAPE {
        return Err(Error::NotXState(off_x));
    }
    let r14 = m[(0, 3)].norm();
    if r14 >= tol::X_SHAPE {
        return Err(Error::UnsupportedXState(r14));
    }
    Ok(2.0 * m[(1, 2)].norm())
}

/// Settings for the trace-distance search over zero-discord states.
#[derive(Clone, Copy, Debug)]
pub struct TddSearch {
    pub restarts: usize,
    pub seed: u64,
    pub options: NelderMeadOptions,
    pub exec: Exec,
}

impl Default for TddSearch {
    fn default() -> Self {
        Self { restarts: tol::TDD_RESTARTS, seed: 0x7dd, options: NelderMeadOptions::default(), exec: Exec::Parallel }
    }
}

fn clamp_ball(x: &[f64]) -> [f64; 3] {
    let r = norm3([x[0], x[1], x[2]]);
    let s = if r > 1.0 { 1.0 / r } else { 1.0 };
    [x[0] * s, x[1] * s, x[2] * s]
}

/// Maps the nine free parameters onto a zero-discord state:
/// `p1 = sin^2 x0`, projector direction `(x1, x2)`, and two Bloch vectors
/// clamped to the unit ball.
pub fn zero_discord_from_params(x: &[f64]) -> ZeroDiscordState {
    assert_eq!(x.len(), 9, "zero-discord parametrisation has nine parameters");
    ZeroDiscordState {
        p1: x[0].sin().powi(2),
        projector_dir: MeasurementDirection::from_angles(x[1], x[2]),
        bloch_b1: clamp_ball(&x[3..6]),
        bloch_b2: clamp_ball(&x[6..9]),
    }
}

fn sample_zero_discord_params(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = vec![uniform(rng, 0.0, PI), uniform(rng, 0.0, PI), uniform(rng, 0.0, TAU)];
    for _ in 0..6 {
        x.push(uniform(rng, -1.0, 1.0));
    }
    x
}

/// Minimum trace distance to the zero-discord set, by multi-start Nelder-Mead.
pub fn tdd_bruteforce(rho: &DensityMatrix, restarts: usize) -> Result<f64> {
    tdd_bruteforce_with(rho, &TddSearch { restarts, ..Default::default() })
}

pub fn tdd_bruteforce_with(rho: &DensityMatrix, search: &TddSearch) -> Result<f64> {
    check_two_qubit(rho)?;
    let target = rho.matrix();
    let objective = |x: &[f64]| {
        let chi = cq_matrix(x[0].sin().powi(2), unit_vector(x[1], x[2]), clamp_ball(&x[3..6]), clamp_ball(&x[6..9]));
        trace_norm(&(target - &chi))
    };
    let best =
        multistart(objective, sample_zero_discord_params, search.restarts, search.seed, &search.options, search.exec)?;
    Ok(best.value)
}

fn local_paulis() -> [ComplexMatrix; 3] {
    let i2 = ComplexMatrix::identity(2);
    paulis().map(|s| kron(&s, &i2))
}

/// `W_ij = Tr{ sqrt(rho) (sigma_i (x) I) sqrt(rho) (sigma_j (x) I) }`.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<[[f64; 3]; 3]> {
    check_two_qubit(rho)?;
    let s = matrix_sqrt_psd(rho)?;
    let sig = local_paulis();
    let left: Vec<ComplexMatrix> = sig.iter().map(|p| &(&s * p) * &s).collect();
    let mut w = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let prod = &left[i] * &sig[j];
            let v = prod.trace().re;
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    Ok(w)
}

/// Hellinger discord `1 - lambda_max(W)`.
pub fn hdd_eigen(rho: &DensityMatrix) -> Result<f64> {
    let w = correlation_matrix(rho)?;
    let flat: Vec<f64> = w.iter().flatten().copied().collect();
    let lam = hermitian_eigenvalues(&ComplexMatrix::from_real(3, &flat))?;
    Ok((1.0 - lam[0]).max(0.0))
}

fn angular_refine_options(grid: usize) -> NelderMeadOptions {
    NelderMeadOptions { max_iter: tol::NM_MAX_ITER, ftol: 1e-14, xtol: 1e-10, initial_step: PI / grid as f64 }
}

/// Lattice minima polished by Nelder-Mead.
const POLISHED_CANDIDATES: usize = 4;

/// Minimises `f(theta, phi)` over a `grid x grid` lattice, then polishes the
/// best few lattice-local minima with restarted Nelder-Mead.
pub fn angular_minimize<F>(f: F, grid: usize) -> Result<(f64, MeasurementDirection)>
where
    F: Fn(f64, f64) -> f64,
{
    if grid < 2 {
        return Err(domain("angular grid needs at least 2 points per axis"));
    }
    let theta = |i: usize| PI * i as f64 / (grid - 1) as f64;
    let phi = |j: usize| TAU * j as f64 / grid as f64;
    let values: Vec<f64> = (0..grid * grid).map(|k| f(theta(k / grid), phi(k % grid))).collect();
    let at = |i: usize, j: usize| values[i * grid + j];

    // phi wraps around; theta does not.
    let is_local_min = |i: usize, j: usize| {
        let v = at(i, j);
        (i.saturating_sub(1)..=(i + 1).min(grid - 1)).all(|ii| {
            [grid - 1, 0, 1].iter().all(|&dj| {
                let jj = (j + dj) % grid;
                (ii == i && jj == j) || v <= at(ii, jj)
            })
        })
    };
    // The poles appear once per phi; keep one copy.
    let distinct = |i: usize, j: usize| j == 0 || (i != 0 && i != grid - 1);
    let mut candidates: Vec<usize> =
        (0..grid * grid).filter(|&k| distinct(k / grid, k % grid) && is_local_min(k / grid, k % grid)).collect();
    candidates.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    candidates.truncate(POLISHED_CANDIDATES);

    let best_k = (0..grid * grid).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty lattice");
    let mut best = (values[best_k], theta(best_k / grid), phi(best_k % grid));
    let opts = angular_refine_options(grid);
    for k in candidates {
        let x0 = [theta(k / grid), phi(k % grid)];
        let polished = nelder_mead_restarted(|x| f(x[0], x[1]), &x0, &opts, tol::NM_RESTARTS)?;
        if polished.value < best.0 {
            best = (polished.value, polished.x[0], polished.x[1]);
        }
    }
    Ok((best.0, MeasurementDirection::from_angles(best.1, best.2)))
}

/// `2 || sqrt(rho) - Pi(sqrt(rho)) ||_2^2` for the projective measurement along `u` on A.
pub fn hellinger_objective(sqrt_rho: &ComplexMatrix, u: [f64; 3]) -> f64 {
    let i2 = ComplexMatrix::identity(2);
    let p1 = kron(&bloch_state(u), &i2);
    let p2 = kron(&bloch_state([-u[0], -u[1], -u[2]]), &i2);
    let dephased = &(&(&p1 * sqrt_rho) * &p1) + &(&(&p2 * sqrt_rho) * &p2);
    let diff = sqrt_rho - &dephased;
    2.0 * diff.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Hellinger discord by direct minimisation over measurement directions.
pub fn hdd_bruteforce(rho: &DensityMatrix, grid: usize) -> Result<f64> {
    check_two_qubit(rho)?;
    let s = matrix_sqrt_psd(rho)?;
    let (v, _) = angular_minimize(|t, p| hellinger_objective(&s, unit_vector(t, p)), grid)?;
    Ok(v.max(0.0))
}

/// `(1 - Tr L + 2 (l_1 + l_2)) / 2` with `L = sqrt(rho)(u.sigma (x) I)sqrt(rho)`.
pub fn fidelity_objective(sqrt_rho: &ComplexMatrix, u: [f64; 3]) -> f64 {
    let op = kron(&bloch_operator(u), &ComplexMatrix::identity(2));
    let lambda = &(sqrt_rho * &op) * sqrt_rho;
    let ev = hermitian_eigenvalues(&lambda).expect("Lambda is Hermitian by construction");
    let tr: f64 = ev.iter().sum();
    0.5 * (1.0 - tr + 2.0 * (ev[0] + ev[1]))
}

/// Maximal fidelity between `rho` and the zero-discord set.
pub fn fidelity_max(rho: &DensityMatrix, grid: usize) -> Result<f64> {
    check_two_qubit(rho)?;
    let s = matrix_sqrt_psd(rho)?;
    let (v, _) = angular_minimize(|t, p| -fidelity_objective(&s, unit_vector(t, p)), grid)?;
    Ok(-v)
}

/// Bures discord from the maximised fidelity.
pub fn bdd_fidelity_max(rho: &DensityMatrix, grid: usize) -> Result<f64> {
    Ok(bures_from_fidelity(fidelity_max(rho, grid)?))
}

/// All three measures by the general routes: the X-state formula when it
/// applies (else the brute-force search), the `W` eigenvalue route, and the
/// fidelity maximisation.
pub fn discord_triple(rho: &DensityMatrix) -> Result<DiscordTriple> {
    let d_t = match tdd_x_state(rho) {
        Ok(v) => DiscordValue { value: v, method: Method::EigenPipeline },
        Err(Error::NotXState(_)) | Err(Error::UnsupportedXState(_)) => {
            DiscordValue { value: tdd_bruteforce(rho, tol::TDD_RESTARTS)?, method: Method::BruteForce }
        }
        Err(e) => return Err(e),
    };
    Ok(DiscordTriple {
        d_t,
        d_l: DiscordValue { value: hdd_eigen(rho)?, method: Method::EigenPipeline },
        d_b: DiscordValue { value: bdd_fidelity_max(rho, tol::ANGLE_GRID)?, method: Method::BruteForce },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::InitialState;
    use crate::flow::two_qubit_state;
    use approx::assert_abs_diff_eq;

    fn family(a2: f64, q: f64) -> DensityMatrix {
        two_qubit_state(InitialState::new(a2).unwrap(), q).unwrap()
    }

    fn product() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_diag(&[1.0, 0.0, 0.0, 0.0])).unwrap()
    }

    #[test]
    fn tdd_x_state_values() {
        assert_abs_diff_eq!(tdd_x_state(&family(0.5, 0.8)).unwrap(), 0.8, epsilon = 1e-15);
        assert_eq!(tdd_x_state(&product()).unwrap(), 0.0);
        assert_abs_diff_eq!(tdd_x_state(&family(0.5, 1.0)).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tdd_x_state_rejects_other_shapes() {
        let plus = C(0.5f64.sqrt());
        let bell_14 = DensityMatrix::pure(&[plus, C(0.0), C(0.0), plus]).unwrap();
        assert!(matches!(tdd_x_state(&bell_14), Err(Error::UnsupportedXState(_))));
        let psi = DensityMatrix::pure(&[C(0.6), C(0.8), C(0.0), C(0.0)]).unwrap();
        assert!(matches!(tdd_x_state(&psi), Err(Error::NotXState(_))));
    }

    #[allow(non_snake_case)]
    fn C(x: f64) -> crate::linalg::C64 {
        crate::linalg::C64::new(x, 0.0)
    }

    #[test]
    fn tdd_bruteforce_matches_x_formula() {
        let v = tdd_bruteforce(&family(0.5, 0.8), 20).unwrap();
        assert!((v - 0.8).abs() < 1e-3, "{v}");
        let v = tdd_bruteforce(&family(0.3, 0.5), 20).unwrap();
        assert!((v - 0.21f64.sqrt()).abs() < 1e-3, "{v}");
    }

    #[test]
    fn tdd_bruteforce_on_zero_discord_state() {
        let z = ZeroDiscordState::new(
            0.3,
            MeasurementDirection::new(1.1, 2.0).unwrap(),
            [0.2, -0.4, 0.5],
            [0.0, 0.9, -0.1],
        )
        .unwrap();
        let v = tdd_bruteforce(&z.density().unwrap(), 20).unwrap();
        assert!(v < 1e-6, "{v}");
    }

    #[test]
    fn hdd_eigen_values() {
        assert_abs_diff_eq!(hdd_eigen(&family(0.1, 0.5)).unwrap(), 0.18, epsilon = 1e-9);
        assert_abs_diff_eq!(hdd_eigen(&product()).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hdd_eigen(&family(0.5, 1.0)).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn hdd_bruteforce_values() {
        assert_abs_diff_eq!(hdd_bruteforce(&family(0.1, 0.5), 64).unwrap(), 0.18, epsilon = 1e-4);
        assert_abs_diff_eq!(hdd_bruteforce(&DensityMatrix::maximally_mixed(4), 64).unwrap(), 0.0, epsilon = 1e-6);
        let expect = 1.0 - 1.4 * 0.24f64.sqrt();
        assert_abs_diff_eq!(hdd_bruteforce(&family(0.7, 0.6), 64).unwrap(), expect, epsilon = 1e-4);
    }

    #[test]
    fn bdd_values() {
        let expect = bures_from_fidelity(0.95);
        assert_abs_diff_eq!(bdd_fidelity_max(&family(0.1, 0.5), 64).unwrap(), expect, epsilon = 1e-6);
        assert_abs_diff_eq!(bdd_fidelity_max(&product(), 64).unwrap(), 0.0, epsilon = 1e-6);
        let expect = bures_from_fidelity(0.5 + 0.175f64.sqrt());
        assert_abs_diff_eq!(bdd_fidelity_max(&family(0.7, 0.5), 64).unwrap(), expect, epsilon = 1e-6);
    }

    #[test]
    fn hellinger_objective_matches_correlation_matrix() {
        let rho = family(0.6, 0.4);
        let s = matrix_sqrt_psd(&rho).unwrap();
        let w = correlation_matrix(&rho).unwrap();
        let u = unit_vector(0.7, 2.1);
        let uwu: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| u[i] * w[i][j] * u[j]).sum();
        assert_abs_diff_eq!(hellinger_objective(&s, u), 1.0 - uwu, epsilon = 1e-12);
    }

    #[test]
    fn triple_reports_methods() {
        let t = discord_triple(&family(0.4, 0.6)).unwrap();
        assert_eq!(t.d_t.method, Method::EigenPipeline);
        assert_eq!(t.d_b.method, Method::BruteForce);
        assert!(t.d_t.value > 0.0 && t.d_l.value > 0.0 && t.d_b.value > 0.0);
    }

    #[test]
    fn direction_canonicalisation() {
        let d = MeasurementDirection::from_angles(-0.3, 7.0);
        let u = d.unit_vector();
        let v = unit_vector(-0.3, 7.0);
        for k in 0..3 {
            assert_abs_diff_eq!(u[k], v[k], epsilon = 1e-12);
        }
        assert!(MeasurementDirection::new(4.0, 0.0).is_err());
    }
}
