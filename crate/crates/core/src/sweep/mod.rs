//! Batch runs: curve tables, region maps, single trajectories and the
//! cross-check suite, each written as CSV or JSON.

pub mod config;
pub mod crosscheck;
pub mod export;

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::closed_form::{bdd_closed, hdd_closed, tdd_closed, InitialState};
use crate::error::Result;
use crate::flow::{region_map, CellFailure, RegionMap};
use crate::par::{self, Exec};
use crate::reservoir::{kernel, SpectralModel};
use crate::volterra::{derive_rates, solve, SolverConfig};

use config::{Format, Mode, RunConfig};
use export::{serialize, CheckReport, CurveTable, RegionTable, Tabular, TrajectoryRow, TrajectoryTable};

/// What a run produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Artifact {
    Curves(CurveTable),
    RegionMap(RegionMap),
    Trajectory(TrajectoryTable),
    CrossCheck(CheckReport),
}

impl Artifact {
    pub fn encode(&self, format: Format, config_json: &str) -> Result<Vec<u8>> {
        match self {
            Artifact::Curves(t) => serialize(t, format, config_json),
            Artifact::RegionMap(m) => serialize(&RegionTable::from(m), format, config_json),
            Artifact::Trajectory(t) => serialize(t, format, config_json),
            Artifact::CrossCheck(r) => serialize(r, format, config_json),
        }
    }

    pub fn failures(&self) -> &[CellFailure] {
        match self {
            Artifact::RegionMap(m) => &m.failures,
            _ => &[],
        }
    }

    /// Cross-check comparisons outside tolerance.
    pub fn failed_checks(&self) -> usize {
        match self {
            Artifact::CrossCheck(r) => r.failed(),
            _ => 0,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            Artifact::Curves(t) => t.records().len(),
            Artifact::RegionMap(m) => m.len(),
            Artifact::Trajectory(t) => t.rows.len(),
            Artifact::CrossCheck(r) => r.checks.len(),
        }
    }
}

/// Summary returned to the caller after output has been written.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub artifact: Artifact,
    /// Failure manifest, written when any cell failed.
    pub manifest: Option<PathBuf>,
}

impl RunOutcome {
    pub fn success(&self) -> bool {
        self.artifact.failures().is_empty() && self.artifact.failed_checks() == 0
    }
}

/// Trajectory of one model sampled `samples + 1` times on `[0, t_max]`.
pub fn trajectory(
    state: InitialState,
    model: &SpectralModel,
    cfg: &SolverConfig,
    samples: usize,
) -> Result<TrajectoryTable> {
    let stride = ((cfg.t_max / samples as f64) / cfg.dt - 1e-9).ceil().max(1.0) as usize;
    let fine = SolverConfig::new(cfg.t_max, cfg.t_max / (samples * stride) as f64)?;
    let rec = derive_rates(solve(&kernel(model)?, model.omega0(), &fine)?);
    let rows = (0..=samples)
        .map(|j| {
            let i = j * stride;
            let q = rec.q[i];
            Ok(TrajectoryRow {
                t: rec.times[i],
                q,
                gamma: rec.gamma[i],
                omega: rec.omega_shift[i],
                d_t: tdd_closed(state, q)?,
                d_l: hdd_closed(state, q)?,
                d_b: bdd_closed(state, q)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryTable { rows })
}

/// Computes the artifact for a validated configuration.
pub fn compute(cfg: &RunConfig) -> Result<Artifact> {
    cfg.validate()?;
    let exec = par::exec_for(cfg.workers);
    par::with_workers(cfg.workers, || compute_with(cfg, exec))
}

fn compute_with(cfg: &RunConfig, exec: Exec) -> Result<Artifact> {
    Ok(match cfg.mode {
        Mode::Curves => Artifact::Curves(CurveTable::compute(&cfg.alpha_list, cfg.q_points)?),
        Mode::RegionMap => {
            let model = cfg.model()?;
            let map =
                region_map(cfg.initial_state()?, &model, &cfg.region_spec(&model)?, &cfg.solver_config(&model)?, exec)?;
            Artifact::RegionMap(map)
        }
        Mode::Trajectory => {
            let model = cfg.model()?;
            Artifact::Trajectory(trajectory(
                cfg.initial_state()?,
                &model,
                &cfg.solver_config(&model)?,
                cfg.time_samples,
            )?)
        }
        Mode::CrossCheck => Artifact::CrossCheck(crosscheck::run_all(cfg.seed, exec)?),
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    failures: &'a [CellFailure],
}

/// Path of the failure manifest next to `out`.
pub fn manifest_path(out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => {
            let mut s = p.as_os_str().to_owned();
            s.push(".failures.json");
            PathBuf::from(s)
        }
        None => PathBuf::from("gqd.failures.json"),
    }
}

/// Computes, writes the output, and writes a failure manifest if any cell failed.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let artifact = compute(cfg)?;
    let bytes = artifact.encode(cfg.output.format, &cfg.to_json())?;
    let out = cfg.output.path.as_deref();
    export::emit(&bytes, out)?;
    let manifest = if artifact.failures().is_empty() {
        None
    } else {
        let path = manifest_path(out);
        std::fs::write(&path, serde_json::to_vec_pretty(&Manifest { failures: artifact.failures() })?)?;
        Some(path)
    };
    Ok(RunOutcome { artifact, manifest })
}
