//! Journal citation-environment mapping.
//!
//! Builds an ego journal's citation environment from aggregated
//! journal-to-journal counts, factor-analyzes the members' citation profiles
//! with varimax rotation, embeds them in a two-dimensional map by nonmetric
//! multidimensional scaling, and tracks pairwise citation traffic with
//! moving averages. A cumulative-advantage simulator and a two-community
//! fixture generator provide synthetic data with known structure.
//!
//! The data-parallel loops (MDS restarts, seeded replications) use rayon
//! when the default `parallel` feature is enabled and run sequentially
//! otherwise; results are identical either way.

pub mod ego;
pub mod error;
pub mod exec;
pub mod export;
pub mod factors;
pub mod genmodel;
pub mod ingest;
pub mod linalg;
pub mod mds;
pub mod pipeline;
pub mod rng;
pub mod trends;

pub use error::{Error, Result};
