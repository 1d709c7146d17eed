use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("size cap exceeded: {what} = {size} > cap {cap}")]
    SizeCap {
        what: String,
        size: usize,
        cap: usize,
    },

    #[error("symbol `{0}` already exists in the signature")]
    NameCollision(String),

    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),

    #[error("atom {symbol} expects {expected} arguments, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },

    #[error("variable `{0}` is not declared")]
    UndeclaredVariable(String),

    #[error("assignment has no value for variable `{0}`")]
    MissingVariable(String),

    #[error("element {element} is outside the universe 0..{size}")]
    ElementOutOfRange { element: usize, size: usize },

    #[error("variable `{0}` uses the reserved prefix `__g_`")]
    ReservedName(String),

    #[error("universe has size 1; decide the instance directly instead of reducing")]
    SingletonUniverse,

    #[error("universe of size {0} is too large for bitset domains (max 64)")]
    UniverseTooLarge(usize),

    #[error("{0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
