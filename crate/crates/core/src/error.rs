use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure classes shared by every module. Each maps onto one CLI exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed request: mismatched fields, unsupported parameters, bad syntax.
    #[error("usage error: {0}")]
    Usage(String),
    /// Mathematically invalid input (zero polynomial norm, non-coprime bases, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A table, integer width or enumeration budget would be exceeded.
    #[error("resource error: {0}")]
    Resource(String),
    /// A computed object failed an internal consistency check.
    #[error("integrity error: {0}")]
    Integrity(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 64,
            Error::Domain(_) => 1,
            Error::Resource(_) => 2,
            Error::Integrity(_) => 3,
        }
    }
}

macro_rules! usage {
    ($($arg:tt)*) => { $crate::error::Error::Usage(format!($($arg)*)) };
}
macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
macro_rules! resource {
    ($($arg:tt)*) => { $crate::error::Error::Resource(format!($($arg)*)) };
}
macro_rules! integrity {
    ($($arg:tt)*) => { $crate::error::Error::Integrity(format!($($arg)*)) };
}
pub(crate) use {domain, integrity, resource, usage};
