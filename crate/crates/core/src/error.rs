use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid subsystem label {0:?}: labels must be nonempty and contain no whitespace")]
    InvalidLabel(String),

    #[error("duplicate subsystem label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown subsystem label {0:?}")]
    UnknownLabel(String),

    #[error("gate operands must be distinct, got {0:?} twice")]
    SameOperand(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("amplitude vector has zero norm")]
    ZeroVector,

    #[error("amplitudes must be finite")]
    NonFinite,

    #[error("at least one subsystem label is required")]
    EmptyLabels,

    #[error("registers differ: {0}")]
    RegisterMismatch(String),

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("environment {labels:?} is not in GHZ form")]
    NotGhz { labels: Vec<String> },

    #[error("environment needs at least 2 subsystems, got {0}")]
    EnvironmentTooSmall(usize),

    #[error("observer {label:?} is not in the ready state of the {basis} basis (deviation {deviation:e})")]
    ObserverNotReady {
        label: String,
        basis: char,
        deviation: f64,
    },

    #[error("state is not in cluster normal form; residual subsystems {0:?}")]
    ResidualNonEmpty(Vec<String>),

    #[error("record count must be at least 1")]
    NoRecords,

    #[error("dense oracle is capped at {cap} qubits, register has {qubits}")]
    OracleTooLarge { qubits: usize, cap: usize },
}
