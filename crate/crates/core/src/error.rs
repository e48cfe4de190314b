use thiserror::Error;

/// Errors produced by the squeezing library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not {expected}: defect {defect:e} exceeds tolerance")]
    SymmetryViolated { expected: &'static str, defect: f64 },

    #[error("direction is not a unit vector (norm {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("vector has zero norm")]
    ZeroNorm,

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid subsystem index {0}; expected 1 or 2")]
    BadSubsystem(u8),

    #[error("degenerate denominator in z-alignment solution ({which})")]
    DegenerateDenominator { which: &'static str },

    #[error("closed form has a vanishing denominator")]
    ZeroDenominator,

    #[error("mean spin vanishes; the perpendicular plane is undefined")]
    ZeroMeanSpin,

    #[error("direction has no component in the x-z plane")]
    OutsideXzGauge,

    #[error("invalid frame policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid sweep specification: {0}")]
    InvalidSweep(String),

    #[error("malformed state file: {0}")]
    StateFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
