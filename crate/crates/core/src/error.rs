use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },

    #[error("singular condensate factor: gamma_sm / (4 omega_r) = 1")]
    SingularDamping,

    #[error("degenerate polynomial: all coefficients vanish")]
    DegeneratePolynomial,

    #[error("root polish did not converge: best iterate {best}, residual {residual:e}")]
    Convergence { best: f64, residual: f64 },

    #[error("integration diverged at omega_m t = {t}; last finite state {last_finite:?}")]
    Divergence { t: f64, last_finite: Vec<f64> },

    #[error("adaptive step underflow at omega_m t = {t} (h = {h:e})")]
    Stiffness { t: f64, h: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegeneratePolynomial
                | Error::Convergence { .. }
                | Error::Divergence { .. }
                | Error::Stiffness { .. }
                | Error::Quadrature { .. }
        )
    }
}
