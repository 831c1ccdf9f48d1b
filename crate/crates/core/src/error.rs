use thiserror::Error;

use crate::cantor::Point;
use crate::intervals::Violation;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),

    #[error("digit {digit} is out of range for base {base}")]
    DigitOutOfRange { digit: u32, base: u8 },

    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: u8, right: u8 },

    #[error("{0} has no interval successor")]
    NoSuccessor(Point),

    #[error("{0} has no interval predecessor")]
    NoPredecessor(Point),

    #[error("{0} is not eventually equal to b-1")]
    NotEventuallyMax(Point),

    #[error("{0} is not eventually equal to 0")]
    NotEventuallyMin(Point),

    #[error("binary image of {0} is not eventually constant")]
    NonConstantImage(Point),

    #[error("invalid boundary tuple: {0}")]
    InvalidTuple(String),

    #[error("invalid filtering: {0}")]
    InvalidFiltering(Violation),

    #[error("boundary {witness} is not a boundary of the coarser filtering within depth {cap}")]
    NotARefinement { witness: Point, cap: u32 },

    #[error("{point} is not in the max-set within depth {cap}")]
    NotInMaxSet { point: Point, cap: u32 },

    #[error("tuple contains duplicate entries")]
    DuplicateEntries,

    #[error("tuple is not strongly diagonal")]
    NotStronglyDiagonal,

    #[error("type enumeration for l = {l} exceeds the cap {cap}")]
    TypeCapExceeded { l: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid Q-copy: {0}")]
    InvalidQCopy(String),

    #[error("depth cap {cap} exhausted: {what}")]
    CapExhausted { what: String, cap: u32 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
