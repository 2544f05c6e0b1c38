//! Latin squares, partial Latin squares and the constructions that turn
//! an integer amalgam into one.

mod amalgam;
mod complete;
mod detach;
mod loops;
pub mod oracle;
mod square;

use thiserror::Error;

pub use amalgam::{round_to_amalgam, IntegerAmalgam, RoundingMode};
pub use complete::complete_partial;
pub use detach::{detach, equitable_coloring, euler_halve, realize_amalgamation, realize_partial, slack_size, Multigraph};
pub use loops::{loop_isotopy, loopify, LoopIsotopy};
pub use oracle::{brute_force_realize, isotopic};
pub use square::{amalgamation, gqq_of, Gqq, GroupedPartition, LatinSquare, PartialLatinSquare, SquareTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatinError {
    #[error("invalid square: {0}")]
    InvalidSquare(String),
    #[error("invalid groups: {0}")]
    InvalidGroups(String),
    #[error("invalid amalgam: {0}")]
    InvalidAmalgam(String),
    #[error("index {0} out of range")]
    InvalidIndex(usize),
    #[error("rounding infeasible at t = {t}: {detail}")]
    RoundingInfeasible { t: i64, detail: String },
    #[error("realization failed: {0}")]
    RealizationFailed(String),
    #[error("padding infeasible: {0}")]
    PaddingInfeasible(String),
    #[error("completion failed: {0}")]
    CompletionFailed(String),
}
