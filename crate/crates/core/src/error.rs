use thiserror::Error;

use crate::tiles::TileShape;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid hex literal {text:?}: {reason}")]
    Parse { text: String, reason: &'static str },

    #[error("value needs {needed} bits but declared width is {width}")]
    Overflow { width: usize, needed: usize },

    #[error("width must be at least 1 bit")]
    ZeroWidth,

    #[error("slice [{low}, {low}+{len}) out of range for width {width}")]
    Bounds { low: usize, len: usize, width: usize },

    #[error("{a_width}x{b_width} operands do not fit a {shape} tile in either orientation")]
    TileOverflow {
        shape: TileShape,
        a_width: usize,
        b_width: usize,
    },

    #[error("tile invocation on {shape} carries no significant bits ({a_bits}x{b_bits})")]
    DegenerateInvocation {
        shape: TileShape,
        a_bits: usize,
        b_bits: usize,
    },

    #[error("invalid tile shape {w}x{h}")]
    InvalidShape { w: usize, h: usize },

    #[error("planning infeasible: {0}")]
    PlanningInfeasible(String),

    #[error("malformed plan: {0}")]
    MalformedPlan(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("exponent {exponent} not encodable in {format}")]
    Range { format: &'static str, exponent: i64 },

    #[error("padding-derived product bits above {width} are nonzero")]
    PadBitsNonZero { width: usize },
}
