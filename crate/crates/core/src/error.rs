use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{g} is not a primitive root mod {r}")]
    NotPrimitiveRoot { g: u64, r: u64 },

    #[error("{what} is undefined at {arg}")]
    Undefined { what: &'static str, arg: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The certified enclosure of a real quantity is too wide to decide
    /// a floor, a comparison, or the next partial quotient.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("cannot parse theta spec {0:?} (expected sqrt:D, quad:P,D,Q, const:pi, const:e or rat:a/q)")]
    ThetaSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
