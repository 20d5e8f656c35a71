use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested count or index exceeds what is available.
    #[error("range error: {0}")]
    Range(String),

    /// The Jacobi iteration hit its sweep cap.
    #[error("Jacobi diagonalization did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e}, matrix norm {norm:e})")]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        norm: f64,
    },

    /// Every overlap direction fell below the cutoff.
    #[error("degenerate basis: all {dim} overlap directions dropped at cutoff {cutoff:e}")]
    DegenerateBasis { dim: usize, cutoff: f64 },

    /// A root search left its bracket or failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The energy difference does not change sign over the bracket.
    #[error("no sign change of {what} over [{lo}, {hi}]")]
    Bracket { what: String, lo: f64, hi: f64 },

    /// A sweep aborted at one grid point.
    #[error("sweep failed at {parameter} = {value}: {source}")]
    Sweep {
        parameter: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}
