//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two scalars or series from different `(p, N)` contexts were combined.
    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    /// Inversion of something that is not a unit of `Z_p` (or of the ring at hand).
    #[error("not a unit: {0}")]
    NotAUnit(String),

    /// A valuation or pivot could not be certified within the working precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// Teichmüller lift of the zero residue requested.
    #[error("zero residue has no Teichmüller lift")]
    ZeroResidue,

    /// Series composition with an inner series whose constant term is not zero.
    #[error("inner series has nonzero constant term")]
    NonzeroConstantTerm,

    /// Series reversion requires an invertible linear coefficient.
    #[error("series has no invertible linear term: {0}")]
    NonUnitLinearTerm(String),

    /// A quantity vanished to working precision, so the requested invariant
    /// cannot be certified (for L-series data this is the "possibly
    /// identically zero" unbounded-corank situation).
    #[error("zero to working precision: {0}")]
    ZeroToPrecision(String),

    /// The supplied uniformizer does not satisfy `v(π) = 1` and `π/p ≡ 1 mod p`.
    #[error("bad uniformizer: {0}")]
    BadUniformizer(String),

    /// An iterative construction failed to stabilize within its budget.
    #[error("convergence guard tripped: {0}")]
    ConvergenceGuard(String),

    /// A tower polynomial failed the Eisenstein check.
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),

    /// A ring or lattice exceeded the configured size cap.
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    /// The requested quotient module is not finite.
    #[error("quotient is not finite: {0}")]
    NotFinite(String),

    /// A growth formula was evaluated below its stabilization threshold.
    #[error("not stabilized: {0}")]
    NotStabilized(String),

    /// Malformed input data (JSON, CLI arguments, dimensions).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
