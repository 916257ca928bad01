use thiserror::Error;

use crate::lipschitz::Counterwitness;
use crate::prefix::{Alphabet, Point, Word};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures reported by density oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle exhausted: no point available in [{0}]")]
    Exhausted(Word),
    #[error("oracle enumeration has no index {0}")]
    EnumerationEnded(usize),
    #[error("oracle enumeration repeats point {point} at index {index}")]
    NotInjective { index: usize, point: Point },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("letter {letter} is not in alphabet {alphabet}")]
    InvalidLetter { letter: u32, alphabet: Alphabet },
    #[error("alphabet mismatch: expected {expected}, found {found}")]
    AlphabetMismatch { expected: Alphabet, found: Alphabet },
    #[error("operation requires a finite alphabet, got {0}")]
    NotFinite(Alphabet),
    #[error("point {0} appears twice in the domain")]
    DuplicateDomainPoint(Point),
    #[error("map is not Lipschitz: {0}")]
    NotLipschitz(Box<Counterwitness>),
    #[error("word {0} is outside the homomorphism table")]
    OutOfTable(Word),
    #[error("table homomorphism cannot be evaluated on infinite points")]
    NotPointwise,
    #[error("invalid homomorphism table: {0}")]
    InvalidTable(String),
    #[error("word {0} is not a prefix of any domain point")]
    NotInClosure(Word),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("every letter at index {index} is already used by a maximally good partner")]
    NoFreshLetter { index: usize },
    #[error("point {0} is already in the domain")]
    AlreadyInDomain(Point),
    #[error("point {0} is already in the range")]
    AlreadyInRange(Point),
    #[error("extension broke the isometry invariant: {0}")]
    BrokenInvariant(Box<Counterwitness>),
    #[error("points are equal")]
    EqualPoints,
    #[error("cannot place {requested} distinct points in cell {cell}: only {available} exist")]
    CellTooSmall {
        cell: Word,
        requested: usize,
        available: u128,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
}
