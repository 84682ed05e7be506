use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid difference {0}: differences must be positive integers")]
    InvalidDifference(i64),

    #[error("2-adic valuation of 0 is undefined")]
    ZeroValuation,

    #[error("cannot parse distance set `{input}`: {reason}")]
    DistanceSetSyntax { input: String, reason: String },

    #[error("invalid distance set: {0}")]
    InvalidDistanceSet(String),

    #[error("not a permutation of [{n}]: {reason}")]
    NotAPermutation { n: usize, reason: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("value {value} is outside [1, {n}]")]
    ValueOutOfRange { value: i64, n: usize },

    #[error("position {position} is outside [{lo}, {hi}]")]
    PositionOutOfRange {
        position: usize,
        lo: usize,
        hi: usize,
    },

    #[error("repeated symbol in sequence")]
    RepeatedSymbol,

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error(
        "inadmissible n = {n} for valuation set ({p},{q}): n must equal 2^(q*t) for some t >= 1"
    )]
    InadmissibleValuationSize { n: u64, p: u32, q: u32 },

    #[error("size cap exceeded: {what} would need {needed} items, cap is {cap}")]
    CapExceeded {
        what: String,
        needed: String,
        cap: u64,
    },

    #[error("invalid coloring: block {block} contains adjacent vertices {u} and {v}")]
    InvalidColoring { block: usize, u: usize, v: usize },

    #[error("certificate is not independent: members {left:?} and {right:?} differ by {difference} at position {position}")]
    InvalidCertificate {
        left: Vec<u32>,
        right: Vec<u32>,
        position: usize,
        difference: u32,
    },

    #[error("sequence {sequence:?} does not have the required type {expected:?}")]
    WrongType {
        sequence: Vec<u32>,
        expected: Vec<usize>,
    },

    #[error("family file: {0}")]
    FamilyFormat(String),

    #[error("quotient graph: {0}")]
    QuotientGraph(String),
}
