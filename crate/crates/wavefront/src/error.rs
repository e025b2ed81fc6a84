use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n = {0} is not a power of two >= 32")]
    NotPowerOfTwo(usize),
    #[error("half-width L must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("dimension d = {0} unsupported (expected 1 or 2)")]
    BadDimension(usize),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("center outside grid")]
    OutsideGrid,
    #[error("hermite index {0} too large for grid resolution")]
    HermiteTooLarge(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("unsupported dilation: {0}")]
    UnsupportedDilation(String),
    #[error("degenerate norm (zero signal)")]
    DegenerateNorm,
    #[error("insufficient span: {usable} usable radii, need 4")]
    InsufficientSpan { usable: usize },
    #[error("cone unresolvable: every radius dropped")]
    ConeUnresolvable,
    #[error("detection radius {radius} exceeds field extent {extent}")]
    RadiusBeyondExtent { radius: f64, extent: f64 },
    #[error("window kind does not support this operation: {0}")]
    WindowKind(String),
    #[error("point ({0}, {1}) is not a lattice point")]
    OffLattice(f64, f64),
    #[error("growth certificate failed for eps = {eps}")]
    GrowthCertificate { eps: f64 },
    #[error("operator overflow guard: {0}")]
    Overflow(String),
    #[error("principal symbol vanishes identically")]
    ZeroPrincipalSymbol,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("empty epsilon list")]
    EmptyEpsList,
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unknown {what}: {name}")]
    Unknown { what: &'static str, name: String },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Usage/schema errors as opposed to numerical failures.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Schema { .. }
                | Error::Unknown { .. }
                | Error::NotPowerOfTwo(_)
                | Error::BadHalfWidth(_)
                | Error::BadDimension(_)
                | Error::InvalidParameter { .. }
                | Error::EmptyCorpus
                | Error::EmptyEpsList
        )
    }
}
