//! Output tables and their CSV / JSON encodings.
//!
//! CSV files start with `# ` followed by the run configuration as one line of
//! JSON, then a header row. Floats are written with 17 significant digits.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::closed_form::{bdd_closed, hdd_closed, InitialState};
use crate::error::{Error, Result};
use crate::flow::{CellFailure, FlowCell, RegionMap};

use super::config::Format;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

/// Something with a fixed column layout.
pub trait Tabular {
    fn header(&self) -> Vec<&'static str>;
    fn records(&self) -> Vec<Vec<String>>;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub alpha_sq: f64,
    pub q: f64,
    pub d_l: f64,
    pub d_b: f64,
}

/// Hellinger and Bures discord against `q` for several initial states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    /// `q_points` evenly spaced values of `q` on `[0, 1]` for each weight.
    pub fn compute(alpha_list: &[f64], q_points: usize) -> Result<Self> {
        let mut rows = Vec::with_capacity(alpha_list.len() * q_points);
        for &a2 in alpha_list {
            let state = InitialState::new(a2)?;
            for i in 0..q_points {
                let q = i as f64 / (q_points - 1) as f64;
                rows.push(CurveRow { alpha_sq: a2, q, d_l: hdd_closed(state, q)?, d_b: bdd_closed(state, q)? });
            }
        }
        Ok(Self { rows })
    }

    /// Rows for one initial state, in increasing `q`.
    pub fn curve(&self, alpha_sq: f64) -> Vec<CurveRow> {
        self.rows.iter().filter(|r| r.alpha_sq == alpha_sq).copied().collect()
    }

    /// Parses the CSV produced by [`write_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let rows = rdr.deserialize().collect::<std::result::Result<Vec<CurveRow>, _>>()?;
        Ok(Self { rows })
    }
}

impl Tabular for CurveTable {
    fn header(&self) -> Vec<&'static str> {
        vec!["alpha_sq", "q", "d_l", "d_b"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| vec![fmt_f64(r.alpha_sq), fmt_f64(r.q), fmt_f64(r.d_l), fmt_f64(r.d_b)]).collect()
    }
}

/// One sample of a single trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub q: f64,
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub d_t: f64,
    pub d_l: f64,
    pub d_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryTable {
    pub rows: Vec<TrajectoryRow>,
}

impl Tabular for TrajectoryTable {
    fn header(&self) -> Vec<&'static str> {
        vec!["t", "q", "gamma", "omega", "d_t", "d_l", "d_b"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    fmt_f64(r.t),
                    fmt_f64(r.q),
                    fmt_opt(r.gamma),
                    fmt_opt(r.omega),
                    fmt_f64(r.d_t),
                    fmt_f64(r.d_l),
                    fmt_f64(r.d_b),
                ]
            })
            .collect()
    }
}

/// Region map in the exported layout: cells flattened parameter-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionTable {
    pub alpha_sq: f64,
    pub cells: Vec<FlowCell>,
    pub failures: Vec<CellFailure>,
}

impl From<&RegionMap> for RegionTable {
    fn from(map: &RegionMap) -> Self {
        Self { alpha_sq: map.alpha_sq, cells: map.iter().copied().collect(), failures: map.failures.clone() }
    }
}

impl Tabular for RegionTable {
    fn header(&self) -> Vec<&'static str> {
        vec!["param", "t", "gamma_sign", "tdd", "hdd", "bdd", "category_tdd", "category_hdd", "category_bdd"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|c| {
                vec![
                    fmt_f64(c.param),
                    fmt_f64(c.t),
                    label(&c.gamma_sign),
                    label(&c.tdd),
                    label(&c.hdd),
                    label(&c.bdd),
                    label(&c.category.tdd),
                    label(&c.category.hdd),
                    label(&c.category.bdd),
                ]
            })
            .collect()
    }
}

/// Outcome of one oracle comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

impl Tabular for CheckReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["name", "samples", "max_error", "tolerance", "passed"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    c.name.clone(),
                    c.samples.to_string(),
                    fmt_f64(c.max_error),
                    fmt_f64(c.tolerance),
                    c.passed.to_string(),
                ]
            })
            .collect()
    }
}

/// Writes the `#` config line, the header and all records.
pub fn write_csv<W: Write, T: Tabular>(mut out: W, config_json: &str, table: &T) -> Result<()> {
    writeln!(out, "# {config_json}")?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(table.header())?;
    for r in table.records() {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonDoc<'a, T> {
    config: serde_json::Value,
    #[serde(flatten)]
    body: &'a T,
}

/// Writes `{"config": ..., <fields of table>}` followed by a newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, config_json: &str, table: &T) -> Result<()> {
    let config: serde_json::Value = serde_json::from_str(config_json)?;
    serde_json::to_writer_pretty(&mut out, &JsonDoc { config, body: table })?;
    writeln!(out)?;
    Ok(())
}

/// Encodes `table` in `format` to bytes.
pub fn serialize<T: Tabular + Serialize>(table: &T, format: Format, config_json: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(&mut buf, config_json, table)?,
        Format::Json => write_json(&mut buf, config_json, table)?,
    }
    Ok(buf)
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(Error::from),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
