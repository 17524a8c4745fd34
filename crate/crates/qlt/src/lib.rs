//! Block-encoding circuits for discrete Laplace transforms.
//!
//! The crate compiles an `N x N` matrix with entries `exp(x_i * y_j) / N`
//! (`N = 2^n`) into an explicit gate-level circuit that block-encodes it,
//! using a truncated Taylor or Chebyshev expansion of the exponential
//! kernel. Every term of the series factors into `diagonal * uniform *
//! diagonal`, each factor is block-encoded, and the weighted sum is
//! assembled with a PREPARE/SELECT linear combination of unitaries.
//!
//! The main entry points are:
//!
//! - [`transform::QltProblem`] / [`transform::build_qlt`]: compile a
//!   coefficient pair `(x, y)` at accuracy `eps` into a certified
//!   [`blockenc::BlockEncoding`].
//! - [`circuit::simulate`] / [`circuit::extract_block`]: dense state-vector
//!   simulation and extraction of the encoded block for verification.
//! - [`transform::verify_qlt`]: check the encoded block against the exact
//!   matrix oracle in spectral norm.
//! - [`laplace`]: classical oracles plus the Z-transform and continuous
//!   Laplace transform pipelines built on top of the compiler.
//!
//! Everything is sized for desk-scale verification: dense simulation is
//! capped at 24 qubits and all certificates are checked numerically in the
//! test suite.

pub mod blockenc;
pub mod circuit;
pub mod laplace;
pub mod numerics;
pub mod transform;

pub use num_complex::Complex64;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("Chebyshev side condition violated: K+1 = {k_plus_1} < x_max*y_max = {product}")]
    SideCondition { k_plus_1: usize, product: f64 },
    #[error("accuracy target must lie in (0,1), got {0}")]
    EpsOutOfRange(f64),
    #[error("|z| = {0} exceeds the supported Bessel argument domain |z| <= 50")]
    BesselDomain(f64),
    #[error("Chebyshev argument |t| = {0} exceeds 1 beyond rounding tolerance")]
    ChebyshevDomain(f64),
    #[error("matrix contains non-finite entries")]
    NonFiniteMatrix,
    #[error("matrix dimension {0} exceeds the supported maximum {1}")]
    MatrixTooLarge(usize, usize),
    #[error("qubit index {index} out of range for {total} qubits")]
    QubitOutOfRange { index: usize, total: usize },
    #[error("gate controls and target must be distinct (qubit {0})")]
    ControlIsTarget(usize),
    #[error("gate matrix is not unitary to 1e-12")]
    NonUnitaryGate,
    #[error("copy circuit needs at least one qubit")]
    EmptyCopy,
    #[error("multi-controlled X over {controls} controls needs {needed} borrowed ancillas, got {got}")]
    InsufficientAncillas { controls: usize, needed: usize, got: usize },
    #[error("state dimension {got} does not match circuit dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("circuit spans {0} qubits which exceeds the 24-qubit simulation cap")]
    TooManyQubits(usize),
    #[error("amplitude vector is not normalized: sum of squares = {0}")]
    Unnormalized(f64),
    #[error("amplitude vector has length {got}, expected 2^{qubits} = {expected}")]
    BadAmplitudeCount { got: usize, expected: usize, qubits: usize },
    #[error("block encodings act on different system sizes: {0} vs {1} qubits")]
    SystemSizeMismatch(usize, usize),
    #[error("linear combination needs at least one term")]
    EmptyTerms,
    #[error("linear combination has zero total weight")]
    ZeroWeight,
    #[error("diagonal eigenvalue modulus {0} exceeds 1 beyond rounding tolerance")]
    EigenvalueTooLarge(f64),
    #[error("Fourier coefficients need 2^m >= 8M samples, got {samples} for M = {order}")]
    Undersampled { samples: usize, order: usize },
    #[error("Fourier truncation bound requires M >= 2, got {0}")]
    FourierOrderTooSmall(usize),
    #[error("Fourier bound {bound} at M = {order} cannot reach the target {target}")]
    FourierTargetUnreachable { bound: f64, order: usize, target: f64 },
    #[error("coefficient vectors must share a power-of-two length, got {x} and {y}")]
    BadCoefficientLength { x: usize, y: usize },
    #[error("series kind {0} is not valid for this coefficient pattern: {1}")]
    KindMismatch(&'static str, &'static str),
    #[error("Z-transform evaluation point {0} is zero")]
    ZeroZPoint(usize),
    #[error("integral truncation requires sigma_min > a, got sigma_min = {sigma_min}, a = {a}")]
    ContourBelowGrowth { sigma_min: f64, a: f64 },
    #[error("dense verification is limited to {max} system qubits, requested {got}")]
    VerificationTooLarge { got: usize, max: usize },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
