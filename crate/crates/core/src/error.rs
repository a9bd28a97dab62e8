use thiserror::Error;

/// Errors raised by the numerical and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} did not converge within {budget} terms")]
    NonConvergence { what: &'static str, budget: usize },

    #[error("{what} overflowed the floating-point range")]
    Overflow { what: &'static str },

    #[error("laplace inversion failed at t={t}: talbot={talbot}, euler={euler}")]
    InversionDisagreement { t: f64, talbot: f64, euler: f64 },

    #[error("evaluation point is a pole of the transform (s={s})")]
    Pole { s: String },

    #[error("event cap of {cap} exceeded in replication {replication}")]
    EventCapExceeded { cap: usize, replication: u64 },

    #[error("replication {replication} failed: {source}")]
    Replication {
        replication: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Unsupported(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// `self` tagged with where it happened.
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// The innermost error, past context and replication wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } | Error::Replication { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
