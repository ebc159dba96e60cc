use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("enumeration infeasible: {what} needs {size} items (limit {limit})")]
    Infeasible { what: String, size: u128, limit: u128 },
    #[error("undefined bound: {0}")]
    UndefinedBound(String),
    #[error("certification failure: {0}")]
    Certification(String),
    #[error("linear program: {0}")]
    Lp(String),
    #[error("exact arithmetic overflow in {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

pub(crate) fn infeasible(what: impl Into<String>, size: u128, limit: u128) -> Error {
    Error::Infeasible { what: what.into(), size, limit }
}
