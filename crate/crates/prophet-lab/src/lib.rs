//! Prophet-inequality toolkit for gamblers armed with a quantile oracle.
//!
//! A sequence of `n` i.i.d. values from an unknown distribution is revealed
//! one at a time; the gambler must accept exactly one, irrevocably, and is
//! judged against a prophet who always takes the maximum. The gambler's only
//! access to the distribution is a quantile oracle `v(q) = F⁻¹(q)`, queried a
//! fixed number of times before the game starts.
//!
//! The crate has three layers:
//!
//! * **Play** — [`dist`] models the value distributions (finite mixtures of
//!   uniform intervals, so every quantity is in closed form), [`policy`]
//!   implements the decision rules (secretary, single/k-threshold,
//!   observe-and-accept), and [`sim`] estimates their performance by
//!   deterministic, thread-count-independent Monte Carlo.
//! * **Certify** — [`lp`] is a dense deterministic simplex solver, and [`frlp`]
//!   builds the factor-revealing linear programs whose optima are competitive-
//!   ratio lower bounds for the threshold policies.
//! * **Probe** — [`bounds`] evaluates closed-form upper bounds from explicit
//!   hard instances and maximizes them over parameters; [`tune`] searches
//!   policy parameters against the LP objective and sweeps quantile rates.
//!
//! With the default `parallel` feature the heavy loops (simulation batches,
//! grid maximization, rate sweeps) run on rayon; results are bit-identical to
//! the sequential fallback (see [`exec`]).

pub mod bounds;
pub mod dist;
pub mod exec;
pub mod fmt;
pub mod frlp;
pub mod lp;
mod num;
pub mod policy;
pub mod sim;
pub mod tune;

/// Errors surfaced by the fallible operations in this crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of the operation
    /// (quantile outside `[0,1]`, non-increasing thresholds, empty phase, …).
    #[error("domain error: {0}")]
    Domain(String),
    /// A model is structurally broken (dimension mismatch, non-finite
    /// coefficient, …) or a solver lost numerical control of it.
    #[error("model error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }
}
