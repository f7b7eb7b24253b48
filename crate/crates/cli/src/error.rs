use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown module `{0}` (expected S_<name>, M_<vertex> or P_<vertex>)")]
    UnknownModule(String),
    #[error(transparent)]
    Core(#[from] stratkit_core::Error),
}

macro_rules! core_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}

core_from!(
    stratkit_core::error::ParseError,
    stratkit_core::error::RewriteError,
    stratkit_core::error::AlgebraError,
    stratkit_core::error::StratError,
    stratkit_core::error::HomologicalError
);
