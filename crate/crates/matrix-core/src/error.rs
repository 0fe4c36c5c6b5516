//! Error type for the contract state machine.

use thiserror::Error;

use crate::types::{Address, Level, MatrixKind};
use crate::wei::Wei;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("transaction value {got} wei does not match required {want} wei")]
    BadValue { want: Wei, got: Wei },

    #[error("address {0} is already registered")]
    DuplicateRegistration(Address),

    #[error("referrer {0} is not registered")]
    UnknownReferrer(Address),

    #[error("address {0} cannot use itself as referrer")]
    SelfReferral(Address),

    #[error("address {0} is not registered")]
    NotRegistered(Address),

    #[error("{matrix} level {level} already active for {user}")]
    LevelAlreadyActive {
        user: Address,
        matrix: MatrixKind,
        level: Level,
    },

    #[error("{matrix} level {level} requires the previous level to be active for {user}")]
    PreviousLevelInactive {
        user: Address,
        matrix: MatrixKind,
        level: Level,
    },

    #[error("level {0} is outside 1..=12")]
    BadLevel(u8),

    #[error("unknown matrix {0:?} (expected x3 or x4)")]
    BadMatrix(String),

    #[error("invalid address token {0:?}")]
    BadAddress(String),

    #[error("routing reached inactive {matrix} level {level} slot of {user}")]
    InactiveSlot {
        user: Address,
        matrix: MatrixKind,
        level: Level,
    },

    #[error("transaction record is malformed: {0}")]
    MalformedTx(String),

    #[error("internal routing invariant violated: {0}")]
    InternalRouting(String),
}

impl Error {
    /// Stable machine-readable code, one per variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::BadValue { .. } => "bad-value",
            Error::DuplicateRegistration(_) => "duplicate-registration",
            Error::UnknownReferrer(_) => "unknown-referrer",
            Error::SelfReferral(_) => "self-referral",
            Error::NotRegistered(_) => "not-registered",
            Error::LevelAlreadyActive { .. } => "level-already-active",
            Error::PreviousLevelInactive { .. } => "previous-level-inactive",
            Error::BadLevel(_) => "bad-level",
            Error::BadMatrix(_) => "bad-matrix",
            Error::BadAddress(_) => "bad-address",
            Error::InactiveSlot { .. } => "inactive-slot",
            Error::MalformedTx(_) => "malformed-tx",
            Error::InternalRouting(_) => "internal-routing",
        }
    }
}
