use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("word of length {got} is shorter than the required {need}")]
    WordTooShort { need: usize, got: usize },

    #[error("window map is not progressive")]
    NotProgressive,

    #[error("window length {window} exceeds the configured limit {limit}")]
    WindowTooLarge { window: usize, limit: usize },

    #[error("maps do not commute at carrier point {point}")]
    NonCommutingMaps { point: usize },

    #[error("*-commutation criteria disagree: {0}")]
    CriteriaDisagreement(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("frame fails the reconstruction identity on basis word {word}")]
    NotAFrame { word: String },

    #[error("level {level} is too small; at least {need} is required")]
    LevelTooSmall { level: usize, need: usize },

    #[error("operator levels do not match: expected {expected}, got {got}")]
    LevelMismatch { expected: usize, got: usize },

    #[error("no separating cylinder found within {horizon} coordinates")]
    NoSeparation { horizon: usize },

    #[error("value {0} cannot be represented as a dyadic element of Z[1/2, sqrt 2]")]
    NotDyadic(String),

    #[error("parse error: {0}")]
    Parse(String),
}
