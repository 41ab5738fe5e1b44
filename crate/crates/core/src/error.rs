use thiserror::Error;

/// Invalid model parameters or inconsistent contact state.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` is out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("`{0}` must be finite")]
    NonFinite(&'static str),
    #[error("major semi-axis r_x = {r_x} is smaller than minor semi-axis r_y = {r_y}")]
    AxisOrder { r_x: f64, r_y: f64 },
    #[error("friction coefficients out of order: mu_k = {mu_k} > mu_s = {mu_s}")]
    FrictionOrder { mu_k: f64, mu_s: f64 },
    #[error("contact at x = {x_i} trails the beam base at {l_i}")]
    TrailingContact { x_i: f64, l_i: f64 },
}

/// Failures of the energy-cost metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("mean velocity is {0}; specific resistance is undefined for a stalled trial")]
    Stalled(f64),
    #[error("parameter `{name}` is out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("analysis window [{t_enter}, {t_exit}] contains no samples")]
    EmptyWindow { t_enter: f64, t_exit: f64 },
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Telemetry validation failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TelemetryError {
    #[error("need at least {need} records, got {got}")]
    TooFewRecords { need: usize, got: usize },
    #[error("record {index}: field `{field}` is not finite")]
    NonFinite { index: usize, field: &'static str },
    #[error("record {index}: time {t} precedes previous time {prev}")]
    Decreasing { index: usize, t: f64, prev: f64 },
}

/// Calibration fitting failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibrationError {
    #[error("degenerate excitation: design matrix has rank {rank} < {needed} ({samples} samples)")]
    DegenerateExcitation { rank: usize, needed: usize, samples: usize },
    #[error("no samples to evaluate")]
    Empty,
    #[error("invalid sensor model: {0}")]
    InvalidModel(&'static str),
}
