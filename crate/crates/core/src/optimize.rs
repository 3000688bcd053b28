//! Derivative-free minimization: Nelder-Mead simplex search and a seeded
//! multi-start driver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::tolerances as tol;

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Converged once the spread of simplex values drops below this...
    pub ftol: f64,
    /// ...and the simplex diameter (max-norm) drops below this.
    pub xtol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_iter: tol::NM_MAX_ITER, ftol: tol::NM_FTOL, xtol: f64::INFINITY, initial_step: 0.5 }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

const REFLECT: f64 = 1.0;

/// Expansion, contraction and shrink coefficients scaled with the dimension
/// (Gao and Han); they reduce to 2, 1/2, 1/2 for `n <= 2`.
fn coefficients(n: usize) -> (f64, f64, f64) {
    let n = n.max(2) as f64;
    (1.0 + 2.0 / n, 0.75 - 0.5 / n, 1.0 - 1.0 / n)
}

/// Minimizes `f` starting from `x0`.
///
/// Fails with [`Error::OptimizerDiverged`] if the simplex has not met both
/// tolerances after `max_iter` iterations.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64,
{
    match simplex_search(&f, x0, opts) {
        Run::Converged(m) => Ok(m),
        Run::Capped { spread, .. } => Err(Error::OptimizerDiverged { iterations: opts.max_iter, spread }),
    }
}

enum Run {
    Converged(Minimum),
    Capped { best: Minimum, spread: f64 },
}

fn simplex_search<F>(f: &F, x0: &[f64], opts: &NelderMeadOptions) -> Run
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(n > 0, "cannot minimize over zero parameters");
    let (expand, contract, shrink) = coefficients(n);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    let point = |c: &[f64], w: &[f64], coef: f64, out: &mut [f64]| {
        for k in 0..n {
            out[k] = c[k] + coef * (c[k] - w[k]);
        }
    };

    for iter in 0..opts.max_iter {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let f_spread = values[worst] - values[best];
        let diameter = simplex
            .iter()
            .map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if f_spread <= opts.ftol && diameter <= opts.xtol {
            return Run::Converged(Minimum { x: simplex[best].clone(), value: values[best], iterations: iter });
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for k in 0..n {
                centroid[k] += simplex[i][k];
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        point(&centroid, &simplex[worst], REFLECT, &mut trial);
        let f_r = f(&trial);

        if f_r < values[best] {
            point(&centroid, &simplex[worst], REFLECT * expand, &mut trial2);
            let f_e = f(&trial2);
            if f_e < f_r {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_e;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_r;
            continue;
        }

        // Contraction: outside if the reflection improved on the worst point.
        let (coef, reference) = if f_r < values[worst] { (contract, f_r) } else { (-contract, values[worst]) };
        point(&centroid, &simplex[worst], coef, &mut trial2);
        let f_c = f(&trial2);
        if f_c < reference {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = f_c;
            continue;
        }

        let anchor = simplex[best].clone();
        for (i, v) in simplex.iter_mut().enumerate() {
            if i == best {
                continue;
            }
            for k in 0..n {
                v[k] = anchor[k] + shrink * (v[k] - anchor[k]);
            }
            values[i] = f(v);
        }
    }

    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Run::Capped {
        best: Minimum { x: simplex[best].clone(), value: values[best], iterations: opts.max_iter },
        spread: hi - lo,
    }
}

/// Nelder-Mead with restarts: after each simplex finishes (or hits the
/// iteration cap) a fresh simplex is built around its best vertex. The run is
/// accepted once a simplex converges and improves on its starting value by
/// less than `ftol`, which guards against the simplex collapsing onto a kink
/// of a nonsmooth objective. `iterations` counts all simplices.
///
/// Fails with [`Error::OptimizerDiverged`] if that does not happen within
/// `max_restarts` fresh simplices.
pub fn nelder_mead_restarted<F>(f: F, x0: &[f64], opts: &NelderMeadOptions, max_restarts: usize) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64,
{
    match restarted_search(&f, x0, opts, max_restarts) {
        Run::Converged(m) => Ok(m),
        Run::Capped { best, spread } => Err(Error::OptimizerDiverged { iterations: best.iterations, spread }),
    }
}

fn restarted_search<F>(f: &F, x0: &[f64], opts: &NelderMeadOptions, max_restarts: usize) -> Run
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = x0.to_vec();
    let mut value = f(&x);
    let mut total = 0;
    let mut spread = f64::INFINITY;
    for _ in 0..=max_restarts {
        let (m, converged) = match simplex_search(f, &x, opts) {
            Run::Converged(m) => (m, true),
            Run::Capped { best, spread: s } => {
                spread = s;
                (best, false)
            }
        };
        total += m.iterations;
        let gain = value - m.value;
        if m.value < value {
            x = m.x;
            value = m.value;
        }
        if converged && gain < opts.ftol {
            return Run::Converged(Minimum { x, value, iterations: total });
        }
    }
    Run::Capped { best: Minimum { x, value, iterations: total }, spread }
}

/// Runs restarted Nelder-Mead from `restarts` starting points drawn by
/// `sample` from a ChaCha stream seeded per restart index, and returns the
/// best point found.
///
/// A start that is still creeping when its restart budget runs out still
/// contributes its best point. Fails with [`Error::OptimizerDiverged`] only
/// if no start settles.
///
/// Ties are broken by restart index, so the result does not depend on
/// whether restarts run in parallel.
pub fn multistart<F, S>(
    f: F,
    sample: S,
    restarts: usize,
    seed: u64,
    opts: &NelderMeadOptions,
    exec: Exec,
) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    assert!(restarts > 0, "need at least one restart");
    let results = par::map_indexed(restarts, exec, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let x0 = sample(&mut rng);
        restarted_search(&f, &x0, opts, tol::NM_RESTARTS)
    });
    let mut best: Option<Minimum> = None;
    let mut settled = false;
    let mut divergence = None;
    for r in results {
        let m = match r {
            Run::Converged(m) => {
                settled = true;
                m
            }
            Run::Capped { best, spread } => {
                divergence.get_or_insert((best.iterations, spread));
                best
            }
        };
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    match (settled, divergence) {
        (false, Some((iterations, spread))) => Err(Error::OptimizerDiverged { iterations, spread }),
        _ => Ok(best.expect("at least one restart")),
    }
}

/// Uniform draw in `[lo, hi)`; convenience for start samplers.
pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn finds_rosenbrock_minimum() {
        let opts = NelderMeadOptions { ftol: 1e-14, xtol: 1e-8, max_iter: 5000, initial_step: 0.5 };
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &opts).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m);
    }

    #[test]
    fn nonsmooth_objective() {
        let f = |x: &[f64]| (x[0] - 0.3).abs() + (x[1] + 0.2).abs() + (x[2]).abs();
        let m = nelder_mead(f, &[1.0, 1.0, 1.0], &NelderMeadOptions::default()).unwrap();
        assert!(m.value < 1e-6, "{:?}", m);
    }

    #[test]
    fn reports_divergence() {
        let opts = NelderMeadOptions { max_iter: 5, ..Default::default() };
        let err = nelder_mead(rosenbrock, &[-1.2, 1.0], &opts).unwrap_err();
        assert!(matches!(err, Error::OptimizerDiverged { iterations: 5, .. }));
    }

    #[test]
    fn restarts_escape_a_stalled_simplex() {
        // Diagonal valley of a kinked function; a single simplex tends to stall.
        let f = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>() + 10.0 * (x[0] - x[1]).abs() + 3.0;
        let x0 = [0.7, -0.4, 0.9, 0.3, -0.8, 0.2, 0.5, -0.6, 0.1];
        let m = nelder_mead_restarted(f, &x0, &NelderMeadOptions::default(), 20).unwrap();
        assert!(m.value - 3.0 < 1e-6, "{m:?}");
    }

    #[test]
    fn restarted_reports_divergence() {
        let opts = NelderMeadOptions { max_iter: 5, ..Default::default() };
        let err = nelder_mead_restarted(rosenbrock, &[-1.2, 1.0], &opts, 2).unwrap_err();
        assert!(matches!(err, Error::OptimizerDiverged { iterations: 15, .. }));
    }

    #[test]
    fn multistart_is_deterministic_across_execution_modes() {
        let f = |x: &[f64]| (x[0] * 3.0).sin() + 0.1 * x[0] * x[0];
        let sample = |rng: &mut ChaCha8Rng| vec![uniform(rng, -5.0, 5.0)];
        let opts = NelderMeadOptions { ftol: 1e-12, ..Default::default() };
        let a = multistart(f, sample, 8, 7, &opts, Exec::Sequential).unwrap();
        let b = multistart(f, sample, 8, 7, &opts, Exec::Parallel).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn multistart_fails_only_when_no_start_settles() {
        let sample = |rng: &mut ChaCha8Rng| vec![uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)];
        let capped = NelderMeadOptions { max_iter: 3, ..Default::default() };
        let err = multistart(rosenbrock, sample, 4, 1, &capped, Exec::Sequential).unwrap_err();
        assert!(matches!(err, Error::OptimizerDiverged { .. }));

        let sphere = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let m = multistart(sphere, sample, 4, 1, &capped, Exec::Sequential);
        assert!(m.is_err());
        let m = multistart(sphere, sample, 4, 1, &NelderMeadOptions::default(), Exec::Sequential).unwrap();
        assert!(m.value < 1e-8);
    }
}
