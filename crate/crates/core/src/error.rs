use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Logarithm requested outside the exponential-coordinate domain.
    #[error("logarithm undefined: {0}")]
    Domain(String),

    #[error("Jacobian is singular (|det| = {det:e})")]
    SingularJacobian { det: f64 },

    /// A parametric sample path left the exponential-coordinate domain.
    #[error("path left the coordinate domain at step {step} (|x| = {norm})")]
    DomainExit { step: usize, norm: f64 },

    #[error("covariance is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("{rejected} of {drawn} draws fell outside the coordinate domain")]
    RejectionOverflow { rejected: usize, drawn: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("distribution is not concentrated: |m| = {mean_norm}, |Σ|₂ = {cov_norm}")]
    NonConcentrated { mean_norm: f64, cov_norm: f64 },

    #[error("innovation covariance is singular (condition number {condition:e})")]
    InnovationSingular { condition: f64 },

    #[error("propagation step at t = {t} lost positive semidefiniteness (min eigenvalue {min_eigenvalue:e})")]
    StepRejected { t: f64, min_eigenvalue: f64 },

    /// Too many samples of an experiment had to be dropped.
    #[error("{excluded} of {total} samples excluded (bound {bound})")]
    ExclusionBound { excluded: usize, total: usize, bound: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
