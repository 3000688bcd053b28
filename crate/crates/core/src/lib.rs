//! Geometric quantum discord of two qubits in independent zero-temperature
//! structured reservoirs.
//!
//! The crate covers small dense complex linear algebra, the trace-distance,
//! Hellinger and Bures discords (general routes and closed forms for the
//! reservoir-evolved X state), Lorentzian and Ohmic-like reservoir kernels,
//! a memory-kernel integrator, flow/enhancement classification, and batch
//! sweeps with CSV/JSON export.
//!
//! With the default `parallel` feature, independent work items (sweep rows,
//! multi-start restarts, oracle grids) run on rayon; without it every loop
//! runs on the calling thread. Results are identical either way.

pub mod closed_form;
pub mod discord;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod optimize;
pub mod par;
pub mod quadrature;
pub mod reservoir;
pub mod sweep;
pub mod tolerances;
pub mod volterra;

pub use closed_form::{InitialState, Measure, Monotonicity};
pub use error::{Error, Result};
pub use flow::{Category, Enhancement, FlowCell, GammaSign, RegionMap, RegionSpec};
pub use linalg::{ComplexMatrix, DensityMatrix, C64};
pub use par::Exec;
pub use reservoir::{KernelFunction, SpectralModel};
pub use volterra::{EvolutionRecord, SolverConfig};
