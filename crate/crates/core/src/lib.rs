//! Exact computation with groups acting on the d-adic rooted tree.
//!
//! The crate is organized in five layers:
//!
//! - [`tree`]: portraits (finite-depth tree automorphisms), their algebra and
//!   text codec;
//! - [`engine`]: exact enumeration of congruence quotients, stabilizers,
//!   orbits, coset decompositions and exactly-uniform samplers;
//! - [`constructions`]: builders for pattern groups of finite type, the
//!   intermediate-group construction, diagonal tower groups and the affine
//!   monodromy model;
//! - [`spectra`]: fixed-point proportions, fixed-point processes, bad-coset
//!   analysis, Euler closed forms and Hausdorff-dimension ratio sequences;
//! - [`report`]: deterministic CSV/JSON report records.
//!
//! All proportions, indices and expectations are exact rationals; floating
//! point appears only in dimension-ratio output and confidence intervals.

pub mod constructions;
pub mod engine;
pub mod error;
pub mod report;
pub mod spectra;
pub mod tree;

pub use error::{Error, Result};

/// Crate version embedded in every report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
