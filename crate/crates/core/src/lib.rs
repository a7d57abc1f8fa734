//! Algebraic and combinatorial tools for linear structural equation models
//! given by mixed graphs `G = (V, D, B)`.
//!
//! The crate covers the covariance parametrization
//! `(Λ, Ω) ↦ (I − Λ)^{-T} Ω (I − Λ)^{-1}` in numeric and exact symbolic form,
//! the trek rule, d-separation and trek separation, the mixed-component
//! decomposition of a graph, identifiability checks (global injectivity, the
//! half-trek criterion and numerical fiber counting) and the discovery and
//! certification of polynomial relations among covariances.

pub mod algebra;
pub mod config;
pub mod constraints;
pub mod decomposition;
mod error;
pub mod flow;
pub mod graph;
pub mod identifiability;
pub mod numerics;
pub mod parametrization;
pub mod separation;

pub use error::{Error, Result};
pub use graph::{GraphProperties, MixedGraph, NodeSet};

/// Version tag written into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;
