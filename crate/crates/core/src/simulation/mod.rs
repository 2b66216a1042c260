//! Sample-path ensembles: Volterra discretization, covariance factorization
//! and Karhunen-Loève expansions.

mod covariance;
mod ensemble;
mod increments;
mod io;
mod kl;
mod volterra;

pub use covariance::{
    cholesky_simulate, conditional_variance, covariance_from_fn, CovarianceFactor,
};
pub use ensemble::{
    empirical_delta, empirical_delta_on, simulate, verify_commensurability, Commensurability,
    Method, PathEnsemble, PathSampler, SimulationGrid,
};
pub use increments::{IncrementModel, IncrementWindow};
pub use kl::{kl_decompose, kl_split_simulate, KlBasis, KlSampler};
pub use volterra::{volterra_covariance, volterra_simulate, VolterraSampler};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for one `(seed, stream)` pair. Streams are independent, so the
/// output for a path never depends on which worker produced it.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
