use thiserror::Error;

#[derive(Error, Debug)]
pub enum HamError {
    #[error("site {0} not found in layout")]
    SiteNotFound(u32),
    #[error("duplicate site id {0}")]
    DuplicateSite(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("block is not Hermitian: max |M - M^dag| = {0:.3e}")]
    NotHermitian(f64),
    #[error("operator is not unitary: max deviation {0:.3e}")]
    NotUnitary(f64),
    #[error("dense dimension {dim} exceeds cap {cap}")]
    DimCap { dim: usize, cap: usize },
    #[error("total Hilbert dimension overflows 64-bit index")]
    DimOverflow,
    #[error("eigensolver failed to converge after {0} iterations")]
    NoConvergence(usize),
    #[error("eigenvalue {eig} within {tol:.1e} of cut {cut}: ambiguous low-energy cut")]
    AmbiguousCut { eig: f64, cut: f64, tol: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("projectors {0} and {1} do not commute (deviation {2:.3e})")]
    NonCommuting(usize, usize, f64),
    #[error("projection lemma hypothesis violated: J = {j} <= 2||H2|| = {k2}")]
    HypothesisViolated { j: f64, k2: f64 },
    #[error("adaptive query depth {0} exceeds cap {1}")]
    DepthCap(usize, usize),
    #[error("oracle machine output disagrees across correct query strings")]
    OutputDisagreement,
    #[error("simulation builder cannot meet parameters: {0}")]
    InfeasibleReduction(String),
    #[error("lapack backend error: {0}")]
    Lapack(String),
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ndarray_linalg::error::LinalgError> for HamError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        HamError::Lapack(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HamError>;
