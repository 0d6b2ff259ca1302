use crate::linops::LinopError;
use crate::prox::ProxError;

/// Errors surfaced by the relaxed problem and the outer solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Linop(#[from] LinopError),
    #[error(transparent)]
    Prox(#[from] ProxError),
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension { what: &'static str, expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("iteration {iter}: {source}")]
    AtIteration {
        iter: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{0}")]
    NotSupported(String),
}

impl Error {
    pub(crate) fn at(iter: usize) -> impl FnOnce(Error) -> Error {
        move |e| Error::AtIteration { iter, source: Box::new(e) }
    }
}

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<(), Error> {
    if expected != found {
        return Err(Error::Dimension { what, expected, found });
    }
    Ok(())
}
