//! Scale-free random graph models with degree distributions restricted to a
//! growing set of selected vertices.
//!
//! The crate simulates the generalized plane-oriented recursive tree, the
//! independent-edges model (and a variant whose degree-1 vertices never grow)
//! and random multitrees; tracks `X[n, d]` and the restricted histogram
//! `X*[n, d]`; computes the limiting restricted distribution `x_d` together with
//! the exponent `gamma* = alpha (gamma - 1) + 1`; and compares both in a
//! reproducible multi-replica harness.

pub mod error;
pub mod estimators;
pub mod graph;
pub mod harness;
pub mod models;
pub mod rng;
pub mod selection;
pub mod sim;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{Checkpoint, GraphState, StepOutcome, VertexId};
pub use models::{ModelParams, ModelState};
pub use selection::{SelectionRule, SelectionState};
pub use sim::Simulation;
