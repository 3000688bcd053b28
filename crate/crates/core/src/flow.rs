//! Two-qubit state under identical local reservoirs, and classification of
//! information flow against discord enhancement.

use serde::{Deserialize, Serialize};

use crate::closed_form::{monotonicity_class, InitialState, Measure, Monotonicity};
use crate::error::{domain, Result};
use crate::linalg::{kron, ComplexMatrix, DensityMatrix, C64};
use crate::par::{self, Exec};
use crate::reservoir::{kernel, lorentzian_dq_dt, lorentzian_q_analytic, SpectralModel};
use crate::tolerances as tol;
use crate::volterra::{q_derivative, solve, SolverConfig};

/// X state reached from `alpha|10> + beta|01>` when each excitation survives
/// with probability `q`. Basis order `|11>, |10>, |01>, |00>`.
pub fn two_qubit_state(state: InitialState, q: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&q) {
        return Err(domain(format!("q = {q} outside [0, 1]")));
    }
    let a2 = state.alpha_sq;
    let b2 = state.beta_sq();
    let ab = state.alpha_beta();
    #[rustfmt::skip]
    let m = ComplexMatrix::from_real(4, &[
        0.0, 0.0,    0.0,    0.0,
        0.0, a2 * q, ab * q, 0.0,
        0.0, ab * q, b2 * q, 0.0,
        0.0, 0.0,    0.0,    1.0 - q,
    ]);
    DensityMatrix::new(m)
}

fn damping_kraus(p: C64) -> [ComplexMatrix; 2] {
    let z = C64::new(0.0, 0.0);
    let leak = C64::new((1.0 - p.norm_sqr()).max(0.0).sqrt(), 0.0);
    [ComplexMatrix::from_vec(2, vec![p, z, z, C64::new(1.0, 0.0)]), ComplexMatrix::from_vec(2, vec![z, z, leak, z])]
}

/// Applies the amplitude-damping channel with amplitude `p` to both qubits of
/// the initial pure state and returns the largest entrywise deviation from
/// [`two_qubit_state`] at `q = |p|^2`.
pub fn kraus_consistency_check(state: InitialState, p: C64) -> Result<f64> {
    if p.norm() > 1.0 + tol::AMPLITUDE_SLACK {
        return Err(domain(format!("|p| = {} > 1", p.norm())));
    }
    let psi = [C64::new(0.0, 0.0), C64::new(state.alpha(), 0.0), C64::new(state.beta(), 0.0), C64::new(0.0, 0.0)];
    let mut rho0 = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            rho0[(i, j)] = psi[i] * psi[j].conj();
        }
    }
    let ks = damping_kraus(p);
    let mut out = ComplexMatrix::zeros(4);
    for ka in &ks {
        for kb in &ks {
            let k = kron(ka, kb);
            out = &out + &(&(&k * &rho0) * &k.adjoint());
        }
    }
    let target = two_qubit_state(state, p.norm_sqr().min(1.0))?;
    Ok(out.max_abs_diff(target.matrix()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaSign {
    Negative,
    Positive,
    Zero,
    Undefined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Enhancement {
    Enhanced,
    Degraded,
    Stationary,
    Undefined,
}

/// Joint label of flow direction and discord response.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    /// Backflow, discord grows.
    Cyan,
    /// Forward flow, discord grows.
    Red,
    /// Backflow, discord does not grow.
    Orange,
    /// Forward flow, discord does not grow.
    Plain,
    Undefined,
}

impl Category {
    pub fn of(gamma_sign: GammaSign, enhancement: Enhancement) -> Self {
        let backflow = match gamma_sign {
            GammaSign::Undefined => return Category::Undefined,
            GammaSign::Negative => true,
            GammaSign::Positive | GammaSign::Zero => false,
        };
        match (backflow, enhancement) {
            (_, Enhancement::Undefined) => Category::Undefined,
            (true, Enhancement::Enhanced) => Category::Cyan,
            (false, Enhancement::Enhanced) => Category::Red,
            (true, _) => Category::Orange,
            (false, _) => Category::Plain,
        }
    }
}

/// One value per discord measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerMeasure<T> {
    pub tdd: T,
    pub hdd: T,
    pub bdd: T,
}

impl<T: Copy> PerMeasure<T> {
    pub fn splat(v: T) -> Self {
        Self { tdd: v, hdd: v, bdd: v }
    }

    pub fn get(&self, m: Measure) -> T {
        match m {
            Measure::Tdd => self.tdd,
            Measure::Hdd => self.hdd,
            Measure::Bdd => self.bdd,
        }
    }

    pub fn map<U>(&self, f: impl Fn(Measure, T) -> U) -> PerMeasure<U> {
        PerMeasure { tdd: f(Measure::Tdd, self.tdd), hdd: f(Measure::Hdd, self.hdd), bdd: f(Measure::Bdd, self.bdd) }
    }
}

/// Classification of one `(param, t)` sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowCell {
    pub param: f64,
    pub t: f64,
    pub gamma_sign: GammaSign,
    pub tdd: Enhancement,
    pub hdd: Enhancement,
    pub bdd: Enhancement,
    pub category: PerMeasure<Category>,
}

impl FlowCell {
    pub fn undefined(param: f64, t: f64) -> Self {
        Self::from_parts(param, t, GammaSign::Undefined, PerMeasure::splat(Enhancement::Undefined))
    }

    fn from_parts(param: f64, t: f64, gamma_sign: GammaSign, enh: PerMeasure<Enhancement>) -> Self {
        Self {
            param,
            t,
            gamma_sign,
            tdd: enh.tdd,
            hdd: enh.hdd,
            bdd: enh.bdd,
            category: enh.map(|_, e| Category::of(gamma_sign, e)),
        }
    }

    pub fn enhancement(&self, m: Measure) -> Enhancement {
        match m {
            Measure::Tdd => self.tdd,
            Measure::Hdd => self.hdd,
            Measure::Bdd => self.bdd,
        }
    }
}

/// Flow direction and per-measure enhancement at survival factor `q` moving
/// at rate `dq_dt`. Rates within `tol` of zero are treated as flat.
pub fn classify_cell(state: InitialState, q: f64, dq_dt: f64, tol: f64) -> (GammaSign, PerMeasure<Enhancement>) {
    if !(q > tol::Q_UNDEFINED && q < 1.0) || !dq_dt.is_finite() {
        return (GammaSign::Undefined, PerMeasure::splat(Enhancement::Undefined));
    }
    let flat = dq_dt.abs() <= tol;
    let gamma_sign = if flat {
        GammaSign::Zero
    } else if dq_dt > 0.0 {
        GammaSign::Negative
    } else {
        GammaSign::Positive
    };
    let enhancement = |m: Measure| {
        if flat {
            return Enhancement::Stationary;
        }
        // Product states carry no discord at any q.
        let Ok(mono) = monotonicity_class(state, q, m) else {
            return Enhancement::Stationary;
        };
        match (mono, dq_dt > 0.0) {
            (Monotonicity::Stationary, _) => Enhancement::Stationary,
            (Monotonicity::Increasing, true) | (Monotonicity::Decreasing, false) => Enhancement::Enhanced,
            _ => Enhancement::Degraded,
        }
    };
    let enh =
        PerMeasure { tdd: enhancement(Measure::Tdd), hdd: enhancement(Measure::Hdd), bdd: enhancement(Measure::Bdd) };
    (gamma_sign, enh)
}

/// Builds a [`FlowCell`] from [`classify_cell`].
pub fn flow_cell(state: InitialState, param: f64, t: f64, q: f64, dq_dt: f64) -> FlowCell {
    let (g, e) = classify_cell(state, q, dq_dt, tol::FLOW_DEADBAND);
    FlowCell::from_parts(param, t, g, e)
}

/// Parameter axis of a region map: `lambda/gamma0` for Lorentzian
/// reservoirs, `eta` for Ohmic-like ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    /// Time samples per parameter value, at `t_j = j t_max / n` for `j = 1..=n`.
    pub time_samples: usize,
}

impl RegionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(domain(format!("steps = {} < 2", self.steps)));
        }
        if self.time_samples < 1 {
            return Err(domain("time_samples must be positive"));
        }
        if !(self.min > 0.0 && self.max >= self.min && self.max.is_finite()) {
            return Err(domain(format!("parameter range [{}, {}] must be positive", self.min, self.max)));
        }
        Ok(())
    }

    pub fn params(&self) -> Vec<f64> {
        let span = self.max - self.min;
        (0..self.steps).map(|i| self.min + span * i as f64 / (self.steps - 1) as f64).collect()
    }
}

/// Model obtained by placing `param` on the sweep axis of `template`.
pub fn model_at(template: &SpectralModel, param: f64) -> SpectralModel {
    match *template {
        SpectralModel::Lorentzian { gamma0, omega0, .. } => {
            SpectralModel::Lorentzian { gamma0, lambda: param * gamma0, omega0 }
        }
        SpectralModel::OhmicLike { s, omega_c, omega0, .. } => {
            SpectralModel::OhmicLike { eta: param, s, omega_c, omega0 }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub param: f64,
    pub message: String,
}

/// Grid of flow cells, `cells[i][j]` at `params[i]`, `times[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub alpha_sq: f64,
    pub params: Vec<f64>,
    pub times: Vec<f64>,
    pub cells: Vec<Vec<FlowCell>>,
    pub failures: Vec<CellFailure>,
}

impl RegionMap {
    pub fn iter(&self) -> impl Iterator<Item = &FlowCell> {
        self.cells.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.params.len() * self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count(&self, m: Measure, c: Category) -> usize {
        self.iter().filter(|cell| cell.category.get(m) == c).count()
    }

    /// Share of all cells carrying category `c` for measure `m`.
    pub fn fraction(&self, m: Measure, c: Category) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.count(m, c) as f64 / self.len() as f64
        }
    }
}

/// `(q, dq/dt)` at each sample time for one model.
fn trajectory(model: &SpectralModel, times: &[f64], cfg: &SolverConfig) -> Result<Vec<(f64, f64)>> {
    match model {
        SpectralModel::Lorentzian { .. } => {
            times.iter().map(|&t| Ok((lorentzian_q_analytic(model, t)?, lorentzian_dq_dt(model, t)?))).collect()
        }
        SpectralModel::OhmicLike { .. } => {
            let n = times.len();
            let stride = ((cfg.t_max / n as f64) / cfg.dt - 1e-9).ceil().max(1.0) as usize;
            let fine = SolverConfig::new(cfg.t_max, cfg.t_max / (n * stride) as f64)?;
            let rec = solve(&kernel(model)?, model.omega0(), &fine)?;
            let dq = q_derivative(&rec);
            Ok((1..=n).map(|j| (rec.q[j * stride], dq[j * stride])).collect())
        }
    }
}

/// Sweeps the parameter axis and classifies every sample. Lorentzian
/// dynamics use the exact solution; Ohmic-like dynamics are integrated.
/// A parameter value whose solve fails yields a row of undefined cells and
/// an entry in `failures`.
pub fn region_map(
    state: InitialState,
    template: &SpectralModel,
    spec: &RegionSpec,
    cfg: &SolverConfig,
    exec: Exec,
) -> Result<RegionMap> {
    spec.validate()?;
    cfg.validate()?;
    template.validate()?;
    let params = spec.params();
    let n = spec.time_samples;
    let times: Vec<f64> = (1..=n).map(|j| j as f64 * cfg.t_max / n as f64).collect();

    let rows = par::map_slice(&params, exec, |&param| {
        let model = model_at(template, param);
        match trajectory(&model, &times, cfg) {
            Ok(traj) => Ok(times.iter().zip(traj).map(|(&t, (q, dq))| flow_cell(state, param, t, q, dq)).collect()),
            Err(e) => Err(CellFailure { param, message: e.to_string() }),
        }
    });

    let mut cells = Vec::with_capacity(rows.len());
    let mut failures = Vec::new();
    for (row, &param) in rows.into_iter().zip(&params) {
        match row {
            Ok(r) => cells.push(r),
            Err(f) => {
                cells.push(times.iter().map(|&t| FlowCell::undefined(param, t)).collect());
                failures.push(f);
            }
        }
    }
    Ok(RegionMap { alpha_sq: state.alpha_sq, params, times, cells, failures })
}
