use thiserror::Error;

use crate::preorder::{Index, IndexSet};

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),
    #[error("field order {0} exceeds the supported bound 2^16")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("field literal {literal} is out of range for GF({q})")]
    BadFieldLiteral { literal: u64, q: u32 },

    #[error("invalid index {0}")]
    InvalidIndex(Index),
    #[error("empty index set")]
    EmptySet,
    #[error("part {0} is not convex")]
    PartNotConvex(IndexSet),
    #[error("partition parts overlap at {0}")]
    PartsOverlap(Index),
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error("invalid preorder spec: {0}")]
    InvalidSpec(String),

    #[error("window {0} is not strongly convex")]
    WindowNotStronglyConvex(IndexSet),
    #[error("core matrix on {0} is singular")]
    SingularCore(IndexSet),
    #[error("scalar must be nonzero")]
    ZeroScalar,
    #[error("core is {rows}x{cols} but the window has {window} indices")]
    ShapeMismatch { rows: usize, cols: usize, window: usize },
    #[error("operands have different field or preorder")]
    ContextMismatch,
    #[error("element is not upper triangular")]
    NotUpperTriangular,
    #[error("diagonal block on class {0} is singular")]
    SingularDiagonalBlock(IndexSet),
    #[error("region {0} is not convex")]
    RegionNotConvex(IndexSet),
    #[error("matrix is singular")]
    SingularInput,

    #[error("group order exceeds the budget {0}")]
    OrderBudgetExceeded(u128),
    #[error("inner region is not contained in the outer region")]
    RegionNotNested,
    #[error("order computation overflowed")]
    OrderOverflow,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("unsupported spec: {0}")]
    UnsupportedSpec(String),
    #[error("outer region is too small: {0}")]
    RegionTooSmall(String),
    #[error("suite requires base shape {0}")]
    WrongBaseShape(&'static str),

    #[error("parse error at line {line}, token `{token}`: {msg}")]
    Parse {
        line: usize,
        token: String,
        msg: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
