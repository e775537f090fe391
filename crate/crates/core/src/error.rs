use thiserror::Error;

use crate::group::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("generators are rank deficient (rank {rank} < {dim})")]
    RankDeficient { rank: usize, dim: usize },

    #[error("lattice is not contained in the reference lattice")]
    NotContained,

    #[error("lattices live over different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),

    #[error("matrix is singular")]
    Singular,

    #[error("invalid endomorphism: {}", format_violations(.0))]
    InvalidEndomorphism(Vec<Violation>),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("no stabilization within cap {cap} (window {window})")]
    NoStabilization { window: usize, cap: usize },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::NotPrime(_) => 2,
            Error::NoStabilization { .. } => 4,
            _ => 3,
        }
    }
}
