use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The request is valid but beyond what the configured engine can do.
    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("routing failed: {0}")]
    Routing(String),

    #[error("backend failure at evaluation {index}: {source}")]
    Evaluation {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("backend error: {0}")]
    Backend(String),

    #[error("plugin protocol error: {0}")]
    Protocol(#[from] crate::plugin::PluginFault),

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
