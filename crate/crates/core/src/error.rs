use alloc::string::String;

/// Errors raised by the core routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A requested combinatorial object exceeds the configured size cap.
    #[error("size limit exceeded: {what} = {value} (max {max})")]
    SizeLimit {
        what: &'static str,
        value: u64,
        max: u64,
    },
    /// An argument violates a precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed or drifted past its tolerance.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The initial eigenstate lies outside the converged part of a truncated spectrum.
    #[error("initial state {n0} is not converged under the truncation")]
    Unconverged { n0: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(alloc::format!($($arg)*))
    };
}

macro_rules! numeric {
    ($($arg:tt)*) => {
        $crate::error::Error::Numeric(alloc::format!($($arg)*))
    };
}

pub(crate) use domain;
pub(crate) use numeric;
