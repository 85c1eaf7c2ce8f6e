use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular matrix")]
    Singular,
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("character conductor {found} does not match requested {wanted}")]
    ConductorMismatch { found: u32, wanted: u32 },
    #[error("no b_chi solves the additive character equation")]
    NoSolution,
    #[error("truncation too small: need N >= {need}, have {have}")]
    TruncationTooSmall { need: usize, have: usize },
    #[error("boundary loss {0:.3e} exceeds tolerance")]
    BoundaryLoss(f64),
    #[error("quadrature did not converge: truncation levels differ by {0:.3e}")]
    NonConvergence(f64),
    #[error("grid refinement changed the operator by {0:.3e}")]
    GridResolution(f64),
    #[error("search box too large: {0} candidates")]
    BoxOverflow(u128),
    #[error("degenerate lattice basis")]
    Degenerate,
    #[error("unbounded: every term moves X in the same direction")]
    Unbounded,
    #[error("argument outside validated window: {0}")]
    OutsideWindow(String),
    #[error("no valid theta character at these parameters")]
    NoValidTheta,
    #[error("partition failure: {0}")]
    PartitionFailure(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
