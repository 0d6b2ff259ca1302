//! Experiment drivers built on [`rsplit`]: least absolute deviations, real
//! phase retrieval (plain and trimmed), semi-supervised logistic regression,
//! stochastic shortest path, convex and truncated clustering, and exact
//! robust PCA.
//!
//! Generators are deterministic given their seed.

pub mod clustering;
pub mod lad;
pub mod phase;
pub mod rpca;
pub mod sslr;
pub mod ssp;
pub mod store;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Solver(#[from] rsplit::Error),
    #[error(transparent)]
    Prox(#[from] rsplit::prox::ProxError),
    #[error(transparent)]
    Linop(#[from] rsplit::linops::LinopError),
    #[error(transparent)]
    Io(#[from] rsplit::io::IoError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{what} did not converge within {iters} iterations")]
    NoConvergence { what: &'static str, iters: usize },
}

pub type Result<T> = std::result::Result<T, AppError>;

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
