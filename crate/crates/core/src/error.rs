use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid excitation sector n = {0} (must be >= -1)")]
    InvalidSector(i64),

    #[error("parameter `{name}` is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },

    #[error("closed-form spectrum is ill-conditioned: {0}")]
    Conditioning(String),

    #[error("closed-form eigenvector is degenerate: {0}")]
    Degenerate(String),

    #[error("iterative eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("not a valid density matrix: {0}")]
    NotAState(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid initial state: {0}")]
    InvalidState(String),

    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { name, value })
    }
}
