//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("element index ({n}, {m}) out of range for {rows}x{cols} array")]
    IndexOutOfRange { n: usize, m: usize, rows: usize, cols: usize },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid distance: {0}")]
    InvalidDistance(String),

    #[error("invalid power: {0}")]
    InvalidPower(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("singular impedance: Z = -Z0 has no reflection coefficient")]
    SingularImpedance,

    #[error("power cycle diverged at iteration {iteration} (power {power:.3e} W)")]
    Divergence { iteration: usize, power: f64 },

    #[error("trace did not converge within {0} iterations")]
    NotConverged(usize),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("invalid rectifier device: {0}")]
    InvalidDevice(String),

    #[error("beamwidth inconclusive: {0}")]
    InconclusiveBeamwidth(String),

    #[error("field of view is empty: charging power at 0 degrees is below threshold")]
    EmptyFov,

    #[error("bracket error: {0}")]
    Bracket(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("config error: {0}")]
    Config(String),
}
