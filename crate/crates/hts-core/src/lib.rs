//! Modeling language and analysis engine for hazard-target systems.
//!
//! A model declares hazard and target (sub)systems, their interactions,
//! three tiers of safety constraints with the adverse events that violate
//! them, risks, cause edges with AND/OR gates, and the controllers and
//! control loops that enforce the constraints. On top of a validated
//! model the engine builds a level-stratified event-flow DAG, answers
//! causal queries (direct causes, contributors, root causes, paths,
//! gated propagation, cross-level maps), classifies the system's risk
//! state from a set of violated constraints, and emits DOT diagrams,
//! JSON exports, and markdown reports.
//!
//! Everything is deterministic: identical inputs produce byte-identical
//! outputs, with all listings in natural id order (`E1.2` before
//! `E1.10`).

pub mod diag;
pub mod dsl;
pub mod flowgraph;
pub mod ident;
pub mod model;
pub mod report;
pub mod validate;

pub use diag::{Diagnostic, SourceSpan};
pub use ident::Ident;
pub use model::{Model, ModelParts};
