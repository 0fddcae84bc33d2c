use thiserror::Error;

/// Errors surfaced by the meshing pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("not watertight: {0}")]
    NotWatertight(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate triplet")]
    DegenerateTriplet,

    #[error("degenerate cell")]
    DegenerateCell,

    #[error("not half-covered")]
    NotHalfCovered,

    #[error("refinement not converging: {0}")]
    RefinementDiverged(String),

    #[error("sliver elimination diverged")]
    SliverDiverged,

    #[error("sliver escaped elimination")]
    SliverEscaped,

    #[error("duplicate seeds")]
    DuplicateSeeds,

    #[error("unbounded interior")]
    UnboundedInterior,
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
