//! Piecewise analytic discords of the decaying two-qubit state
//! `alpha|10> + beta|01>` as functions of the survival factor `q`.
//!
//! The three measures depend on the reservoir only through `q in [0, 1]`.
//! Each piecewise formula switches branch at critical values of `q` that
//! depend on `alpha^2`; those are collected in [`CriticalPoints`].

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::tolerances as tol;

/// `sqrt((2 + sqrt 2)(1 - sqrt F))`, the Bures discord for a maximal fidelity `F`.
pub fn bures_from_fidelity(f_max: f64) -> f64 {
    let c = 2.0 + std::f64::consts::SQRT_2;
    (c * (1.0 - f_max.min(1.0).sqrt()).max(0.0)).sqrt()
}

/// Initial pure state parametrised by `alpha^2`; `beta^2 = 1 - alpha^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub alpha_sq: f64,
}

impl InitialState {
    pub fn new(alpha_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_sq) {
            return Err(domain(format!("alpha^2 = {alpha_sq} outside [0, 1]")));
        }
        Ok(Self { alpha_sq })
    }

    pub fn beta_sq(&self) -> f64 {
        1.0 - self.alpha_sq
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_sq.sqrt()
    }

    pub fn beta(&self) -> f64 {
        self.beta_sq().sqrt()
    }

    /// `alpha * beta`, taken as `sqrt(alpha^2 beta^2)` so that `alpha^2 = 1/2` gives exactly 1/2.
    pub fn alpha_beta(&self) -> f64 {
        (self.alpha_sq * self.beta_sq()).sqrt()
    }

    fn is_trivial(&self) -> bool {
        self.alpha_sq == 0.0 || self.alpha_sq == 1.0
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(domain(format!("q = {q} outside [0, 1]")));
    }
    Ok(())
}

/// `chi = 2 alpha^2 q - 1` and `xi = 4(1 - alpha^2 beta^2) q^2 - 4q + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxiliarySymbols {
    pub chi: f64,
    pub xi: f64,
}

pub fn auxiliary_symbols(state: InitialState, q: f64) -> AuxiliarySymbols {
    let a2b2 = state.alpha_sq * state.beta_sq();
    AuxiliarySymbols { chi: 2.0 * state.alpha_sq * q - 1.0, xi: 4.0 * (1.0 - a2b2) * q * q - 4.0 * q + 1.0 }
}

/// Critical `q` values; each pair is present only in the `alpha^2` range
/// where its formula applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoints {
    pub qc1: Option<f64>,
    pub qc2: Option<f64>,
    pub qc3: Option<f64>,
    pub qc4: Option<f64>,
    pub qc5: Option<f64>,
    pub qc6: Option<f64>,
}

/// Boundaries of the interval where the Hellinger discord follows
/// `1 - 2 alpha^2 sqrt(q(1-q))`. Defined for `alpha^2 >= 1/3`.
pub fn qc12(alpha_sq: f64) -> Option<(f64, f64)> {
    let disc = 3.0 * alpha_sq - 1.0;
    if disc < 0.0 || alpha_sq == 0.0 {
        return None;
    }
    let b2 = 1.0 - alpha_sq;
    let root = (b2 * disc).sqrt();
    let den = 2.0 * alpha_sq * (1.0 + 4.0 * b2 * b2);
    Some((((2.0 - alpha_sq) - root) / den, ((2.0 - alpha_sq) + root) / den))
}

/// Boundaries of the intermediate Bures branch for `alpha^2 in (1/3, 1/2]`.
pub fn qc34(alpha_sq: f64) -> Option<(f64, f64)> {
    let disc = 3.0 * alpha_sq - 1.0;
    if disc < 0.0 || alpha_sq == 0.0 {
        return None;
    }
    let a = alpha_sq.sqrt();
    let den = 2.0 * a * (1.0 + alpha_sq);
    let root = disc.sqrt();
    Some(((2.0 * a - root) / den, (2.0 * a + root) / den))
}

/// Boundaries of the intermediate Bures branch for `alpha^2 >= 1/2`.
pub fn qc56(alpha_sq: f64) -> (f64, f64) {
    let ab = (alpha_sq * (1.0 - alpha_sq)).sqrt();
    let den = 2.0 * (1.0 - ab * ab);
    ((1.0 - ab) / den, (1.0 + ab) / den)
}

pub fn critical_points(state: InitialState) -> CriticalPoints {
    let a2 = state.alpha_sq;
    let mut cp = CriticalPoints::default();
    if a2 > 1.0 / 3.0 {
        if let Some((c1, c2)) = qc12(a2) {
            cp.qc1 = Some(c1);
            cp.qc2 = Some(c2);
        }
    }
    if a2 > 1.0 / 3.0 && a2 <= 0.5 {
        if let Some((c3, c4)) = qc34(a2) {
            cp.qc3 = Some(c3);
            cp.qc4 = Some(c4);
        }
    }
    // Kept at alpha^2 = 1/2 as well, where qc5/qc6 coincide with qc3/qc4.
    if a2 >= 0.5 {
        let (c5, c6) = qc56(a2);
        cp.qc5 = Some(c5);
        cp.qc6 = Some(c6);
    }
    cp
}

/// `alpha^2` at which `qc3 = 1/2`: below it the Bures discord is
/// increasing in `q` everywhere. Found by bisection on `(1/3, 1/2)`.
pub fn bures_monotone_threshold() -> f64 {
    let g = |a2: f64| qc34(a2).map(|(c3, _)| c3 - 0.5).unwrap_or(f64::NAN);
    let (mut lo, mut hi) = (1.0 / 3.0 + 1e-15, 0.5);
    // qc3 decreases from 3/4 to 1/3 on this interval.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn tdd_closed(state: InitialState, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(2.0 * state.alpha_beta() * q)
}

fn in_interval(q: f64, bounds: Option<(f64, f64)>) -> bool {
    bounds.is_some_and(|(lo, hi)| q >= lo && q <= hi)
}

fn hdd_on_dip(state: InitialState, q: f64) -> bool {
    state.alpha_sq > 1.0 / 3.0 && in_interval(q, qc12(state.alpha_sq))
}

pub fn hdd_closed(state: InitialState, q: f64) -> Result<f64> {
    check_q(q)?;
    let a2 = state.alpha_sq;
    Ok(if hdd_on_dip(state, q) { 1.0 - 2.0 * a2 * (q * (1.0 - q)).sqrt() } else { 4.0 * a2 * state.beta_sq() * q })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FidelityBranch {
    /// `1 - alpha^2 q`
    Linear,
    /// `1/2 + sqrt(alpha^2 q (1-q))`
    Equatorial,
    /// `(1 + sqrt(xi + 4 alpha^2 q (1-q))) / 2`
    Polar,
}

fn fidelity_branch(state: InitialState, q: f64) -> FidelityBranch {
    let a2 = state.alpha_sq;
    if a2 <= 1.0 / 3.0 {
        FidelityBranch::Linear
    } else if a2 <= 0.5 {
        if in_interval(q, qc34(a2)) {
            FidelityBranch::Equatorial
        } else {
            FidelityBranch::Linear
        }
    } else if in_interval(q, Some(qc56(a2))) {
        FidelityBranch::Equatorial
    } else {
        FidelityBranch::Polar
    }
}

fn polar_radicand(state: InitialState, q: f64) -> f64 {
    auxiliary_symbols(state, q).xi + 4.0 * state.alpha_sq * q * (1.0 - q)
}

/// Maximal fidelity between the evolved state and the zero-discord set.
pub fn fidelity_max_closed(state: InitialState, q: f64) -> Result<f64> {
    check_q(q)?;
    let a2 = state.alpha_sq;
    Ok(match fidelity_branch(state, q) {
        FidelityBranch::Linear => 1.0 - a2 * q,
        FidelityBranch::Equatorial => 0.5 + (a2 * q * (1.0 - q)).sqrt(),
        FidelityBranch::Polar => 0.5 * (1.0 + polar_radicand(state, q).max(0.0).sqrt()),
    })
}

/// `1 - F_max`, formed without cancelling against 1 so that the Bures
/// discord keeps its digits as `q -> 0`.
fn fidelity_deficit(state: InitialState, q: f64) -> f64 {
    let a2 = state.alpha_sq;
    match fidelity_branch(state, q) {
        FidelityBranch::Linear => a2 * q,
        FidelityBranch::Equatorial => 0.5 - (a2 * q * (1.0 - q)).sqrt(),
        FidelityBranch::Polar => {
            // 1 - radicand = 4 q beta^2 (1 - beta^2 q)
            let b2 = state.beta_sq();
            let g = polar_radicand(state, q).max(0.0);
            2.0 * q * b2 * (1.0 - b2 * q) / (1.0 + g.sqrt())
        }
    }
}

fn bures_from_deficit(deficit: f64) -> f64 {
    let c = 2.0 + std::f64::consts::SQRT_2;
    let d = deficit.clamp(0.0, 1.0);
    (c * d / (1.0 + (1.0 - d).sqrt())).sqrt()
}

pub fn bdd_closed(state: InitialState, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(bures_from_deficit(fidelity_deficit(state, q)))
}

/// `dD_T/dq`.
pub fn tdd_dq(state: InitialState) -> f64 {
    2.0 * state.alpha_beta()
}

/// `dD_L/dq` on the open interval `0 < q < 1`.
pub fn hdd_dq(state: InitialState, q: f64) -> f64 {
    let a2 = state.alpha_sq;
    if hdd_on_dip(state, q) {
        -a2 * (1.0 - 2.0 * q) / (q * (1.0 - q)).sqrt()
    } else {
        4.0 * a2 * state.beta_sq()
    }
}

/// `dD_B/dq` on the open interval `0 < q < 1`.
pub fn bdd_dq(state: InitialState, q: f64) -> f64 {
    let a2 = state.alpha_sq;
    let b2 = state.beta_sq();
    let (f, df) = match fidelity_branch(state, q) {
        FidelityBranch::Linear => (1.0 - a2 * q, -a2),
        FidelityBranch::Equatorial => {
            let r = (a2 * q * (1.0 - q)).sqrt();
            (0.5 + r, a2 * (1.0 - 2.0 * q) / (2.0 * r))
        }
        FidelityBranch::Polar => {
            let g = polar_radicand(state, q);
            let dg = 8.0 * (1.0 - a2 * b2) * q - 4.0 + 4.0 * a2 - 8.0 * a2 * q;
            (0.5 * (1.0 + g.sqrt()), dg / (4.0 * g.sqrt()))
        }
    };
    let c = 2.0 + std::f64::consts::SQRT_2;
    let d = bures_from_deficit(fidelity_deficit(state, q));
    -c * df / (4.0 * f.sqrt() * d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Tdd,
    Hdd,
    Bdd,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Tdd, Measure::Hdd, Measure::Bdd];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Stationary,
}

pub fn discord_closed(state: InitialState, q: f64, measure: Measure) -> Result<f64> {
    match measure {
        Measure::Tdd => tdd_closed(state, q),
        Measure::Hdd => hdd_closed(state, q),
        Measure::Bdd => bdd_closed(state, q),
    }
}

pub fn discord_dq(state: InitialState, q: f64, measure: Measure) -> f64 {
    match measure {
        Measure::Tdd => tdd_dq(state),
        Measure::Hdd => hdd_dq(state, q),
        Measure::Bdd => bdd_dq(state, q),
    }
}

/// Direction in which a measure moves as `q` grows.
///
/// Decreasing regions: Hellinger on `(qc1, 1/2)` for `alpha^2 > 1/2`;
/// Bures on `[qc3, 1/2]` for `alpha^2 in (1/3, 1/2]` (empty below the
/// threshold where `qc3 = 1/2`) and on `[qc5, 1/2]` for `alpha^2 > 1/2`.
/// Everything else increases. Points where the analytic derivative is
/// within the stationary band are reported as `Stationary`.
pub fn monotonicity_class(state: InitialState, q: f64, measure: Measure) -> Result<Monotonicity> {
    if state.is_trivial() {
        return Err(domain(format!("alpha^2 = {} gives a product state", state.alpha_sq)));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(domain(format!("q = {q} outside (0, 1)")));
    }
    if discord_dq(state, q, measure).abs() < tol::STATIONARY {
        return Ok(Monotonicity::Stationary);
    }
    let a2 = state.alpha_sq;
    let decreasing = match measure {
        Measure::Tdd => false,
        Measure::Hdd => a2 > 0.5 && qc12(a2).is_some_and(|(c1, _)| q > c1 && q < 0.5),
        Measure::Bdd => {
            if a2 <= 1.0 / 3.0 {
                false
            } else if a2 <= 0.5 {
                qc34(a2).is_some_and(|(c3, _)| q >= c3 && q <= 0.5)
            } else {
                let (c5, _) = qc56(a2);
                q >= c5 && q <= 0.5
            }
        }
    };
    Ok(if decreasing { Monotonicity::Decreasing } else { Monotonicity::Increasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn st(a2: f64) -> InitialState {
        InitialState::new(a2).unwrap()
    }

    #[test]
    fn tdd_values() {
        assert_eq!(tdd_closed(st(0.5), 1.0).unwrap(), 1.0);
        assert_eq!(tdd_closed(st(0.0), 0.7).unwrap(), 0.0);
        assert_abs_diff_eq!(tdd_closed(st(0.3), 0.5).unwrap(), 0.21f64.sqrt(), epsilon = 1e-15);
        assert!(tdd_closed(st(0.3), 1.5).is_err());
    }

    #[test]
    fn hdd_values() {
        assert_abs_diff_eq!(hdd_closed(st(0.1), 0.5).unwrap(), 0.18, epsilon = 1e-15);
        assert_abs_diff_eq!(hdd_closed(st(0.7), 0.6).unwrap(), 1.0 - 1.4 * 0.24f64.sqrt(), epsilon = 1e-15);
        assert_eq!(hdd_closed(st(1.0), 0.4).unwrap(), 0.0);
        // alpha^2 = 0.9, q = 0.5 lies on the dip branch.
        assert_abs_diff_eq!(hdd_closed(st(0.9), 0.5).unwrap(), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn bdd_values() {
        // F = 0.95, D = sqrt((2 + sqrt 2)(1 - sqrt 0.95)).
        assert_abs_diff_eq!(bdd_closed(st(0.1), 0.5).unwrap(), 0.294023499404861, epsilon = 1e-12);
        assert_abs_diff_eq!(bdd_closed(st(0.5), 1.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(bdd_closed(st(0.0), 0.3).unwrap(), 0.0);
        // alpha^2 = 0.7, q = 0.5: equatorial branch, F = 1/2 + sqrt(0.175).
        assert_abs_diff_eq!(bdd_closed(st(0.7), 0.5).unwrap(), 0.37734403204422806, epsilon = 1e-12);
    }

    #[test]
    fn critical_point_anchors() {
        let cp = critical_points(st(0.5));
        assert_eq!(cp.qc1, Some(0.5));
        assert_eq!(cp.qc2, Some(1.0));
        assert_abs_diff_eq!(cp.qc5.unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cp.qc6.unwrap(), 1.0, epsilon = 1e-12);

        let cp = critical_points(st(1.0 / 3.0 + 1e-9));
        assert_abs_diff_eq!(cp.qc3.unwrap(), 0.75, epsilon = 1e-4);
        assert_abs_diff_eq!(cp.qc4.unwrap(), 0.75, epsilon = 1e-4);
        assert!(cp.qc5.is_none());

        let cp = critical_points(st(0.2));
        assert_eq!(cp, CriticalPoints::default());
    }

    #[test]
    fn critical_point_ranges() {
        for i in 1..100 {
            let a2 = i as f64 / 100.0;
            let cp = critical_points(st(a2));
            if let (Some(c1), Some(c2)) = (cp.qc1, cp.qc2) {
                assert!(c1 <= c2);
            }
            if let (Some(c3), Some(c4)) = (cp.qc3, cp.qc4) {
                assert!(c3 <= c4 && (1.0 / 3.0..=0.75).contains(&c3) && (0.75..=1.0).contains(&c4));
            }
            if let (Some(c5), Some(c6)) = (cp.qc5, cp.qc6) {
                assert!((1.0 / 3.0 - 1e-12..=0.5).contains(&c5), "{a2} {c5}");
                assert!((0.5..=1.0 + 1e-12).contains(&c6), "{a2} {c6}");
            }
        }
    }

    #[test]
    fn threshold_near_0382() {
        assert_abs_diff_eq!(bures_monotone_threshold(), 0.382, epsilon = 1e-3);
    }

    #[test]
    fn branches_are_continuous() {
        for i in 1..200 {
            let a2 = i as f64 / 200.0;
            let s = st(a2);
            let cp = critical_points(s);
            for qc in [cp.qc1, cp.qc2, cp.qc3, cp.qc4, cp.qc5, cp.qc6].into_iter().flatten() {
                if !(0.0..=1.0).contains(&qc) {
                    continue;
                }
                let jump = |m: Measure, eps: f64| {
                    let lo = (qc - eps).max(0.0);
                    let hi = (qc + eps).min(1.0);
                    (discord_closed(s, lo, m).unwrap() - discord_closed(s, hi, m).unwrap()).abs()
                };
                for m in Measure::ALL {
                    // Near q = 1 the square-root branches are steep; a genuine
                    // jump would not shrink with the probe width.
                    let wide = jump(m, 1e-12);
                    let narrow = jump(m, 1e-14);
                    assert!(wide < 1e-9 || narrow < 0.2 * wide, "{m:?} jumps by {wide} at alpha^2={a2}, q={qc}");
                }
            }
        }
    }

    #[test]
    fn monotonicity_examples() {
        assert_eq!(monotonicity_class(st(0.7), 0.45, Measure::Hdd).unwrap(), Monotonicity::Decreasing);
        assert_eq!(monotonicity_class(st(0.3), 0.9, Measure::Bdd).unwrap(), Monotonicity::Increasing);
        assert_eq!(monotonicity_class(st(0.5), 0.7, Measure::Tdd).unwrap(), Monotonicity::Increasing);
        assert_eq!(monotonicity_class(st(0.5), 0.5, Measure::Hdd).unwrap(), Monotonicity::Stationary);
        assert!(monotonicity_class(st(0.0), 0.5, Measure::Tdd).is_err());
        assert!(monotonicity_class(st(1.0), 0.5, Measure::Hdd).is_err());
        assert!(monotonicity_class(st(0.4), 1.0, Measure::Hdd).is_err());
    }
}
