use alloc::string::String;
use core::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two words (or a word and a weight system) live over different alphabets.
    AlphabetMismatch { left: u8, right: u8 },
    /// An operation that drops a letter was called on the empty word.
    EmptyWord,
    /// A letter lies outside `1..=alphabet`.
    LetterOutOfRange { letter: u8, alphabet: u8 },
    /// An antichain operation received no words.
    EmptyAntichain,
    /// Two members of a would-be antichain are comparable.
    NotAntichain,
    /// A maximal antichain was required but the input leaves gaps.
    NotMaximal,
    /// Weight or probability data violates its constraints.
    BadWeights(String),
    /// A map family contains a non-contractive member.
    NotContractive,
    /// The attractor degenerates to a single point, so no interval hull exists.
    PointAttractor,
    /// The interval fixed-point search did not stabilize.
    HullSearchFailed,
    /// The open-set conditions failed; the detail names the first failure.
    IoscRejected(String),
    /// A solver precondition rules out a unique solution.
    DegenerateSolve(String),
    /// A tree build exceeded its node budget.
    BudgetExceeded { budget: usize },
    /// No marker word certifying containment was found within the depth budget.
    MarkerNotFound { depth: usize },
    /// The moment order `r` violates an operation's constraints.
    BadOrder(String),
    /// A codebook with no points was supplied.
    EmptyCodebook,
    /// More code points were requested than samples are available.
    NotEnoughSamples { needed: usize, got: usize },
    /// A fit grid has too few points.
    GridTooSmall { got: usize },
    /// Catch-all for invalid scalar parameters.
    BadParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::AlphabetMismatch { left, right } => {
                write!(f, "alphabet mismatch: {left} vs {right}")
            }
            Error::EmptyWord => write!(f, "operation undefined for the empty word"),
            Error::LetterOutOfRange { letter, alphabet } => {
                write!(f, "letter {letter} outside alphabet 1..={alphabet}")
            }
            Error::EmptyAntichain => write!(f, "antichain must be non-empty"),
            Error::NotAntichain => write!(f, "words are not pairwise incomparable"),
            Error::NotMaximal => write!(f, "antichain is not maximal"),
            Error::BadWeights(msg) => write!(f, "invalid weights: {msg}"),
            Error::NotContractive => write!(f, "map is not a contraction"),
            Error::PointAttractor => write!(f, "attractor degenerates to a point"),
            Error::HullSearchFailed => write!(f, "attractor hull iteration did not stabilize"),
            Error::IoscRejected(msg) => write!(f, "open-set conditions rejected: {msg}"),
            Error::DegenerateSolve(msg) => write!(f, "degenerate solve: {msg}"),
            Error::BudgetExceeded { budget } => {
                write!(f, "node budget of {budget} exceeded")
            }
            Error::MarkerNotFound { depth } => {
                write!(f, "no containment certificate up to depth {depth}")
            }
            Error::BadOrder(msg) => write!(f, "invalid moment order: {msg}"),
            Error::EmptyCodebook => write!(f, "codebook must contain at least one point"),
            Error::NotEnoughSamples { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
            Error::GridTooSmall { got } => {
                write!(f, "grid needs at least 3 points, got {got}")
            }
            Error::BadParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
