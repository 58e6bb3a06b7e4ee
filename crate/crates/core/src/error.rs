use std::fmt;

use thiserror::Error;

/// Errors produced by the polydist numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("leading coefficient is numerically singular (s_min = {s_min:e}, norm = {norm:e})")]
    SingularLeading { s_min: f64, norm: f64 },

    #[error("construction infeasible: {0}")]
    Infeasible(Infeasibility),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// The hypothesis of the perturbation construction that failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    /// `rank(V(gamma)) < k`.
    RankDeficient { rank: usize, k: usize },
    /// Some `beta_s` is (numerically) zero.
    ZeroBeta { index: usize, modulus: f64 },
    /// The smallest right singular vectors of `P(mu_i)` are linearly dependent (gamma = 0 branch).
    DependentVectors { rank: usize, k: usize },
    /// A target is not an eigenvalue of the polynomial (null-vector construction).
    NotAnEigenvalue { index: usize, smallest_singular_value: f64 },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::RankDeficient { rank, k } => {
                write!(f, "rank(V(gamma)) = {rank} < k = {k}")
            }
            Infeasibility::ZeroBeta { index, modulus } => {
                write!(f, "beta_{} is numerically zero (|beta| = {modulus:e})", index + 1)
            }
            Infeasibility::DependentVectors { rank, k } => write!(
                f,
                "right singular vectors of P(mu_i) are linearly dependent (rank {rank} < k = {k})"
            ),
            Infeasibility::NotAnEigenvalue { index, smallest_singular_value } => write!(
                f,
                "target {} is not an eigenvalue (s_n = {smallest_singular_value:e})",
                index + 1
            ),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
