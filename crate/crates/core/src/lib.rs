//! Randomized and deterministic uniform approximation of functions from
//! unweighted tensor-product Hilbert spaces on the d-torus.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: frequency weights, the orthonormal basis and sparse functions,
//! - [`kernel`]: reproducing kernels, metrics and decay profiles,
//! - [`gaussfield`]: the associated Gaussian field and entropy bounds,
//! - [`mcapprox`]: the Gaussian-functional Monte Carlo method,
//! - [`detapprox`]: optimal deterministic projections and lower bounds,
//! - [`seqspace`]: the finite-dimensional sequence-space model,
//! - [`harness`]: configuration, experiments and data files for the CLI.
//!
//! ```
//! use ranapprox::detapprox::det_lower_bound;
//! use ranapprox::gaussfield::dudley_bound;
//! use ranapprox::kernel::decay_profile_korobov;
//! use ranapprox::mcapprox::mc_complexity_bound;
//! use ranapprox::model::LambdaSequence;
//!
//! let lambda = LambdaSequence::normalize_korobov(1.25, 0.4)?;
//! let det = det_lower_bound(&lambda, 3, 100)?;
//! let sup = dudley_bound(&decay_profile_korobov(&lambda)?, 3)?;
//! let n = mc_complexity_bound(sup, 0.5)?;
//! assert!(det > 0.0 && n > 0);
//! # Ok::<(), ranapprox::error::Error>(())
//! ```

pub mod detapprox;
pub mod error;
pub mod gaussfield;
pub mod grid;
pub mod harness;
pub mod kernel;
pub mod mcapprox;
pub mod model;
pub mod quad;
pub mod rng;
pub mod seqspace;
pub mod special;

pub use error::{Error, Result};
