use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (bad signature, wrong arity, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured size cap would be exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// A numerical procedure did not reach its tolerance.
    #[error("numerical failure: {message} (achieved {achieved:e})")]
    Numerical { message: String, achieved: f64 },
    /// A geometric construction is infeasible for the given parameters.
    #[error("geometric infeasibility: {0}")]
    Geometry(String),
    /// A checked mathematical property failed.
    #[error("verification failure: {0}")]
    Verification(String),
    #[error("cache format error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn numerical(msg: impl Into<String>, achieved: f64) -> Self {
        Error::Numerical {
            message: msg.into(),
            achieved,
        }
    }

    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Resource(_) => "resource",
            Error::Numerical { .. } => "numerical",
            Error::Geometry(_) => "geometry",
            Error::Verification(_) => "verification",
            Error::Cache(_) => "cache",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
