//! Error type shared by all modules.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the lattice, enumeration, encoding,
/// simulation and noise modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Move or sequence string contains a character outside its alphabet.
    InvalidCharacter { index: usize, ch: char },
    /// Walk revisits a lattice site; `bead` is the first colliding index.
    SelfIntersection { bead: usize },
    /// Sequence length does not match the structure / contact map it is paired with.
    LengthMismatch { expected: usize, got: usize },
    /// Contact pair violates `0 <= i`, `j > i + 1`, `j < n`.
    InvalidContact { i: usize, j: usize },
    /// Requested size exceeds the configured enumeration or designability limit.
    LimitExceeded { requested: usize, limit: usize },
    /// `n_h` outside `0..=n`.
    CompositionOutOfRange { n_h: usize, n: usize },
    /// A connected component of the contact graph is too large to enumerate.
    ComponentTooLarge { size: usize, limit: usize },
    /// Exhaustive state scan refused: `2^n` too large.
    TooLarge { n: usize, limit: usize },
    /// All `2^n` energies coincide; the spectral gap is undefined.
    DegenerateSpectrum,
    /// A parameter that must be positive was not.
    NonpositiveParameter { name: &'static str },
    /// XY driver requested without a target composition.
    MissingComposition,
    /// Operand dimensions disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// Conjugate-gradient solve missed the residual tolerance.
    CgNoConvergence { iterations: usize, residual: f64 },
    /// State vector of `2^n` amplitudes exceeds the simulator cap.
    StateTooLarge { n: usize, limit: usize },
    /// Ground-state probability asked for an empty ground set.
    EmptyGroundSet,
    /// Finite-difference denominator vanished; chi is undefined.
    DegenerateDifference,
    /// The step-size diagnostic needs at least three resolutions.
    InsufficientResolutions { got: usize },
    /// Solver asked to run above its size cap.
    SolverCapExceeded { n: usize, cap: usize, solver: &'static str },
    /// Degeneracy count exceeded 128-bit integer range.
    CountOverflow,
    /// Malformed input file or value.
    Parse(String),
    /// I/O failure (message preserved; source type erased to keep `Error: PartialEq`).
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidCharacter { index, ch } => {
                write!(f, "invalid character '{ch}' at position {index}")
            }
            Error::SelfIntersection { bead } => {
                write!(f, "walk self-intersects at bead {bead}")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::InvalidContact { i, j } => {
                write!(f, "invalid contact pair ({i}, {j})")
            }
            Error::LimitExceeded { requested, limit } => {
                write!(f, "size {requested} exceeds configured limit {limit}")
            }
            Error::CompositionOutOfRange { n_h, n } => {
                write!(f, "composition n_h={n_h} out of range for n={n}")
            }
            Error::ComponentTooLarge { size, limit } => {
                write!(f, "contact-graph component of {size} beads exceeds limit {limit}")
            }
            Error::TooLarge { n, limit } => {
                write!(f, "exhaustive scan refused: n={n} exceeds limit {limit}")
            }
            Error::DegenerateSpectrum => write!(f, "all states share one energy; gap undefined"),
            Error::NonpositiveParameter { name } => write!(f, "parameter {name} must be positive"),
            Error::MissingComposition => write!(f, "XY driver requires a target composition n_h"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::CgNoConvergence { iterations, residual } => {
                write!(f, "conjugate gradient stalled after {iterations} iterations (residual {residual:.3e})")
            }
            Error::StateTooLarge { n, limit } => {
                write!(f, "state vector for n={n} qubits exceeds simulator cap {limit}")
            }
            Error::EmptyGroundSet => write!(f, "ground set is empty"),
            Error::DegenerateDifference => {
                write!(f, "finite-difference denominator below 1e-14; chi undefined")
            }
            Error::InsufficientResolutions { got } => {
                write!(f, "need at least 3 step-size resolutions, got {got}")
            }
            Error::SolverCapExceeded { n, cap, solver } => {
                write!(f, "{solver} solver capped at n={cap}, asked for n={n}")
            }
            Error::CountOverflow => write!(f, "degeneracy count overflows u128"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
