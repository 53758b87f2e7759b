use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{quantity} = {value} outside tabulated range [{min}, {max}]")]
    OutOfDomain { quantity: &'static str, value: f64, min: f64, max: f64 },

    #[error("unknown material `{name}` (known materials: {})", known.join(", "))]
    UnknownMaterial { name: String, known: Vec<String> },

    #[error("unknown particle species `{0}`")]
    UnknownSpecies(String),

    #[error("{operation} does not handle species {species}")]
    UnsupportedSpecies { species: &'static str, operation: &'static str },

    #[error("malformed table {source_name}: {message}")]
    Table { source_name: String, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("spectra have mismatched binning")]
    BinningMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn table(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Table { source_name: source_name.into(), message: message.into() }
    }
}
