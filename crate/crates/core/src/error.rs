//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be between 2 and 65536")]
    InvalidModulus(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("empty pitch-class segment")]
    EmptySegment,
    #[error("arity mismatch: permutation on {perm} positions applied to segment of length {len}")]
    ArityMismatch { perm: usize, len: usize },
    #[error("invalid cycle notation: {0}")]
    BadCycles(String),
    #[error("{0} is not a bijection of the carrier")]
    NotABijection(String),
    #[error("carrier mismatch")]
    CarrierMismatch,
    #[error("{0} is not in the carrier")]
    NotInCarrier(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("degenerate symmetry: {0} is both a T-form and an I-form")]
    DegenerateSymmetry(String),
    #[error("action is not simply transitive: {0}")]
    NotSimplyTransitive(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("groups are not dual: {0}")]
    NotDual(String),
    #[error("set of maps is not a group: {0}")]
    NotAGroup(String),
    #[error("morphism condition fails at ({s}, {t}): lhs {lhs}, rhs {rhs}")]
    MorphismViolation {
        s: String,
        t: String,
        lhs: String,
        rhs: String,
    },
    #[error("invalid group data: {0}")]
    BadGroup(String),
    #[error("invalid homomorphism: {0}")]
    BadHomomorphism(String),
    #[error("parse error at {locus}: {msg}")]
    Parse { locus: String, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(locus: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            locus: locus.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
