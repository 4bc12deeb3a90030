use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("attribute `{attribute}`: value `{value}` does not fall in any bucket")]
    Unbucketed { attribute: String, value: String },

    #[error("attribute `{attribute}`: value `{value}` is not in the declared dictionary")]
    UnknownValue { attribute: String, value: String },

    #[error("attribute `{attribute}` has {found} distinct values but cardinality {declared} was declared")]
    CardinalityExceeded {
        attribute: String,
        declared: usize,
        found: usize,
    },

    #[error("attribute `{0}` needs a cardinality of at least 2; declare `values` or `cardinality` in the config")]
    DegenerateAttribute(String),

    #[error("row {row}: missing value for attribute `{attribute}`")]
    MissingValue { row: usize, attribute: String },

    #[error("dataset is empty: at least one row is required")]
    EmptyDataset,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("pattern `{text}`: {reason}")]
    PatternParse { text: String, reason: String },

    #[error("pattern has {found} elements but the schema has {expected} attributes")]
    Arity { expected: usize, found: usize },

    #[error("value {value} out of range for attribute {attribute} (cardinality {cardinality})")]
    ValueOutOfRange {
        attribute: usize,
        value: u32,
        cardinality: u32,
    },

    #[error("pattern graph too large ({what}); use level-limited discovery (max_level)")]
    GraphTooLarge { what: String },

    #[error("level {level} out of range 1..={d}")]
    LevelOutOfRange { level: usize, d: usize },

    #[error("MUP set is incomplete below level {0}; rerun discovery to completion first")]
    IncompleteMups(usize),

    #[error("invalid threshold: {0}")]
    Threshold(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
