//! Numerical thresholds shared by every module and test.

/// Entrywise Hermiticity check for density matrices.
pub const DENSITY_HERMITIAN: f64 = 1e-12;
/// Allowed deviation of a density-matrix trace from one.
pub const DENSITY_TRACE: f64 = 1e-12;
/// Eigenvalues above `-PSD_CLAMP` are treated as zero before square roots.
pub const PSD_CLAMP: f64 = 1e-10;
/// Eigenvalues below this multiple of the largest one are rounding noise
/// and are zeroed before taking square roots.
pub const SQRT_FLOOR: f64 = 8.0 * f64::EPSILON;
/// Hermiticity precondition of the eigensolver.
pub const EIGEN_HERMITIAN: f64 = 1e-10;
/// Off-diagonal magnitude at which Jacobi sweeps stop.
pub const JACOBI_OFFDIAG: f64 = 1e-15;
/// Upper bound on Jacobi sweeps; dimension 4 converges in well under ten.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Entries outside the X pattern must stay below this.
pub const X_SHAPE: f64 = 1e-10;

/// Nelder-Mead defaults for the nine-parameter trace-distance search.
pub const NM_MAX_ITER: usize = 2000;
pub const NM_FTOL: f64 = 1e-8;
/// Fresh simplices allowed per Nelder-Mead start before giving up.
pub const NM_RESTARTS: usize = 20;
pub const TDD_RESTARTS: usize = 20;
/// Default (theta, phi) grid resolution for angular searches.
pub const ANGLE_GRID: usize = 64;

/// Dead band for classifying a derivative as stationary.
pub const STATIONARY: f64 = 1e-9;
/// Below this survival probability the decay rate is undefined.
pub const Q_UNDEFINED: f64 = 1e-12;
/// Dead band on dq/dt for flow direction.
pub const FLOW_DEADBAND: f64 = 1e-9;

/// Relative width of the critical-damping window in the Lorentzian solution.
pub const CRITICAL_DAMPING: f64 = 1e-8;
/// Predictor/corrector discrepancy that aborts an integration.
pub const PREDICTOR_CORRECTOR: f64 = 1e-3;
/// Slack on |p| and q bounds in solver output.
pub const AMPLITUDE_SLACK: f64 = 1e-9;
