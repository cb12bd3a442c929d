use alloc::string::String;

use thiserror::Error;

use crate::model::Charge;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level k = {0} is not supported (need k >= 2)")]
    InvalidLevel(u32),

    #[error("charge {charge} is outside the SU(2)_{level} label set")]
    ChargeOutOfRange { charge: Charge, level: u32 },

    #[error("{total} is not a fusion channel of {a} x {b}")]
    InadmissibleChannel { a: Charge, b: Charge, total: Charge },

    #[error("F-symbol F^{{{a} {b} {c}}}_{d} has no admissible channel")]
    EmptyFBlock { a: Charge, b: Charge, c: Charge, d: Charge },

    #[error("braid position {position} is out of range for {strands} strands")]
    PositionOutOfRange { position: usize, strands: usize },

    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("invalid synthesis target: {0}")]
    Target(String),

    #[error("invalid search configuration: {0}")]
    Config(String),

    #[error("gate assembly error: {0}")]
    Assembly(String),
}
