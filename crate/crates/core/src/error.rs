use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in Q(zeta_N)")]
    DivisionByZero,
    #[error("incompatible cyclotomic moduli: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of order {order} at the evaluation point")]
    Pole { order: usize },
    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("identity violation: {name} (witness: {witness})")]
    IdentityViolation { name: String, witness: String },
}
