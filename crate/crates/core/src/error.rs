use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity must be between 2 and 255, got {0}")]
    InvalidArity(usize),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("letter {letter} out of range 1..={m}")]
    LetterOutOfRange { letter: usize, m: usize },
    #[error("not a permutation of 1..={m}: {images:?}")]
    NotAPermutation { m: usize, images: Vec<usize> },
    #[error("vertex of length {len} exceeds depth {depth}")]
    VertexTooDeep { len: usize, depth: usize },
    #[error("requested depth {requested} exceeds available depth {available}")]
    DepthTooLarge { requested: usize, available: usize },
    #[error("malformed portrait: {0}")]
    MalformedPortrait(String),
    #[error("malformed automaton: {0}")]
    MalformedAutomaton(String),
    #[error("automaton is not invertible at {0:?}")]
    NotInvertible(Vec<(String, usize)>),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error("element cap of {cap} exceeded after {partial} elements")]
    CapExceeded { cap: usize, partial: usize },
    #[error("element does not stabilize vertex {0}")]
    DoesNotStabilize(String),
    #[error("pattern is not an element of the depth-{0} quotient")]
    PatternOutsideSlice(usize),
    #[error("portrait is not an element of A: {0}")]
    NotInShiftGroup(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("nucleus computation not certified: {0}")]
    NucleusNotCertified(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("{0}")]
    Invalid(String),
}
