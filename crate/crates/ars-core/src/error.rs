use thiserror::Error;

/// Errors surfaced by the protocol library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A scalar or set element is out of range for the backend, or fails
    /// the backend membership test where one is required.
    #[error("invalid element: {0}")]
    InvalidElement(&'static str),

    /// A challenge value outside the protocol's challenge space.
    #[error("invalid challenge value {0}")]
    InvalidChallenge(u8),

    /// The supplied witness matches no statement in the ring.
    #[error("witness matches no ring statement")]
    WitnessNotInRing,

    /// The ring contains a repeated statement.
    #[error("ring statements are not pairwise distinct")]
    DuplicateStatement,

    /// A statement (public key) expected to be a ring member is not.
    #[error("statement not found in ring")]
    StatementNotInRing,

    /// Two sequences that must have equal length do not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// The extractor found no session index consistent with its inputs;
    /// signals that a verify precondition was violated.
    #[error("no session matches the extractor scan")]
    NoMatchingSession,

    /// The operation requires an exhaustively enumerable backend.
    #[error("operation unsupported on this backend: {0}")]
    BackendUnsupported(&'static str),

    /// An oracle programming slot was already fixed by a previous query.
    #[error("random-oracle slot already occupied")]
    OracleCollision,

    /// An adversary callback stepped outside the game's interface contract.
    #[error("protocol violation: {0}")]
    ProtocolViolation(&'static str),

    /// The forking rewinder used up its rewind budget.
    #[error("fork budget exhausted after {rewinds} rewinds")]
    ForkBudgetExhausted { rewinds: usize },

    /// Four accepting signatures were collected but no parallel session
    /// carried four distinct challenges.
    #[error("no good session among {collected} accepting forks")]
    NoGoodSession { collected: usize },

    /// A byte string does not decode as the expected object.
    #[error("decode error: {0}")]
    Decode(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
