//! Scaling-law analysis for multilingual language-model training runs.
//!
//! The crate is organized around one parametric family,
//!
//! ```text
//! L(n, d) = A · n^(-alpha_n) + B · d^(-alpha_d) + l_inf
//! ```
//!
//! and everything a practitioner does with it:
//!
//! - [`model`] — domain types and pure evaluation of the law;
//! - [`ingest`] — CSV/JSONL parsing and validation of run logs;
//! - [`fitting`] — robust multi-start estimation of the five parameters;
//! - [`synergy`] — pairwise-mixture gain matrices and transfer coefficients;
//! - [`mixture`] — the proportion-dependent multilingual law;
//! - [`allocate`] — token allocation on the simplex and compute-optimal
//!   model/data splits;
//! - [`oracle`] — synthetic surfaces and brute-force reference searches used
//!   to validate the optimizers;
//! - [`fixtures`] — pinned published constants shipped as reference data.
//!
//! Numeric conventions: `n_params` and `d_tokens` are opaque positive reals.
//! The bundled reference constants and the built-in generation grid are
//! expressed in units of 1e9 parameters/tokens, while the per-direction
//! constants table is calibrated for raw counts; nothing in the code depends
//! on the choice as long as a dataset and its fitted constants agree.

pub mod allocate;
pub mod error;
pub mod fitting;
pub mod fixtures;
pub mod ingest;
pub mod mixture;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod synergy;

pub use error::{Error, Result};
