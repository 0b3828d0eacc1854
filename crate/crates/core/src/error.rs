use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A topology with a zero-sized layer or no hidden layer.
    InvalidTopology(String),
    /// Two lengths that must agree do not.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// An operation that needs at least one sample got none.
    EmptyDataset,
    /// A configuration value outside its allowed range.
    InvalidConfig(String),
    /// A subset operation received no features.
    EmptySubset,
    /// Feature selection found nothing correlated with the class.
    NoSelection,
    /// A column with no present values cannot be imputed.
    FullyMissingColumn(usize),
    /// A class has no samples where at least one is required.
    EmptyClass(u8),
    /// Too few samples for the requested operation.
    TooFewSamples { needed: usize, found: usize },
    /// A named feature is absent from the schema.
    UnknownFeature(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidTopology(msg) => write!(f, "invalid topology: {msg}"),
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Error::EmptyDataset => f.write_str("dataset has no samples"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::EmptySubset => f.write_str("feature subset is empty"),
            Error::NoSelection => f.write_str("no feature carries any correlation with the class"),
            Error::FullyMissingColumn(c) => {
                write!(f, "column {c} has no present values to impute from")
            }
            Error::EmptyClass(k) => write!(f, "class {k} has no samples"),
            Error::TooFewSamples { needed, found } => {
                write!(f, "need at least {needed} samples, found {found}")
            }
            Error::UnknownFeature(name) => write!(f, "feature `{name}` is not in the schema"),
        }
    }
}

impl core::error::Error for Error {}
