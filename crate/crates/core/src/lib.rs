//! Rank-based independence testing for bivariate censored data.
//!
//! Censored observations only pin each latent value to an interval, so the
//! ranks of the complete data are known only up to a *restricted permutation
//! space*: every permutation whose i-th coordinate falls in an admissible rank
//! range. The test statistic is Kendall's tau averaged over the product of the
//! two marginal spaces, estimated with uniform samples drawn by a
//! Metropolis-coupled pair of random walks on the transposition graph of each
//! space. Its null distribution comes from relabelling one margin.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and the
//! thread-parallel drivers live in the `rankperm` companion crate.
//!
//! Module map:
//!
//! * [`censoring`]: observations and their admissible rank bounds.
//! * [`permspace`]: the restricted space, its members and transposition graph.
//! * [`mcmc`]: target, degree-biased and coupled walks plus exact transition
//!   matrices.
//! * [`stats`]: Kendall's tau, the averaged statistic, Oakes's tau, the
//!   permutation null and p-values.
//! * [`simgen`]: copula data generators, censoring schemes and the size/power
//!   experiment runner.
//! * [`diagnostics`]: mixing study of the walks on benchmark graphs.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod censoring;
pub mod diagnostics;
pub mod error;
pub mod mcmc;
pub mod permspace;
pub mod rng;
pub mod simgen;
pub mod stats;

pub use censoring::{IntervalKind, IntervalObs, RankBounds, RightObs};
pub use error::{Error, Result};
pub use mcmc::{ChainPair, SamplerConfig, TransitionMatrix};
pub use permspace::{RankVector, RestrictedSpace};
pub use stats::{Dataset, Estimator, TauSamples, TestConfig, TestReport};
