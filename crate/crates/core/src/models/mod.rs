//! One evolution step for each model family.
//!
//! A step is split in two: `propose` draws the new vertex's neighbours from
//! `G_{n-1}` without touching any state, and `commit` updates the model's
//! auxiliary structures after the outcome has been applied to the graph.

mod indep;
mod multitree;
mod port;

use serde::{Deserialize, Serialize};

pub use indep::{indep_step, IndepAux};
pub use multitree::{multitree_step, MultitreeAux};
pub use port::{port_step, PortAux};

use crate::error::{Error, Result};
use crate::graph::{GraphState, StepOutcome, VertexId};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelParams {
    /// Plane-oriented recursive tree, attachment weight `deg + beta`.
    Port { beta: f64 },
    /// Every old vertex joins independently with probability `lambda * deg / T`.
    Indep { lambda: f64 },
    /// Random `M`-multitree: the new center attaches to a uniform base.
    Multitree { m: usize },
    /// Independent edges where degree 0 and 1 vertices never gain edges.
    #[serde(rename = "frozen")]
    DegreeOneFrozen { lambda: f64 },
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelParams::Port { beta } => {
                if !(beta > -1.0) || !beta.is_finite() {
                    return Err(Error::config(format!("PORT requires beta > -1, got {beta}")));
                }
            }
            ModelParams::Indep { lambda } | ModelParams::DegreeOneFrozen { lambda } => {
                if !(lambda > 0.0 && lambda < 2.0) {
                    return Err(Error::config(format!(
                        "independent edges require 0 < lambda < 2, got {lambda}"
                    )));
                }
            }
            ModelParams::Multitree { m } => {
                if m < 2 {
                    return Err(Error::config(format!("multitree requires M >= 2, got {m}")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelParams::Port { .. } => "port",
            ModelParams::Indep { .. } => "indep",
            ModelParams::Multitree { .. } => "multitree",
            ModelParams::DegreeOneFrozen { .. } => "frozen",
        }
    }

    /// Minimal initial degree `m` of a new vertex.
    pub fn minimal_degree(&self) -> usize {
        match *self {
            ModelParams::Port { .. } => 1,
            ModelParams::Indep { .. } | ModelParams::DegreeOneFrozen { .. } => 0,
            ModelParams::Multitree { m } => m,
        }
    }

    /// Vertex count and edge list of `G_0`.
    pub fn initial_graph(&self) -> (usize, Vec<(usize, usize)>) {
        match *self {
            ModelParams::Port { .. } | ModelParams::Indep { .. } => (2, vec![(0, 1)]),
            ModelParams::Multitree { m } => (m, complete_graph(m)),
            // A triangle: the normalizer excludes degree-1 vertices, so the
            // single-edge start would have nothing to attach to.
            ModelParams::DegreeOneFrozen { .. } => (3, complete_graph(3)),
        }
    }
}

fn complete_graph(k: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            edges.push((a, b));
        }
    }
    edges
}

/// Model-specific auxiliary state.
#[derive(Debug, Clone)]
pub enum ModelState {
    Port(PortAux),
    Indep(IndepAux),
    Multitree(MultitreeAux),
}

/// Canonical `G_0` of the model with `n = 0`.
pub fn init_state(params: &ModelParams) -> Result<(GraphState, ModelState)> {
    params.validate()?;
    let (count, edges) = params.initial_graph();
    let graph = GraphState::from_edges(count, &edges)?;
    let aux = match *params {
        ModelParams::Port { beta } => ModelState::Port(PortAux::new(beta, &graph)),
        ModelParams::Indep { lambda } => ModelState::Indep(IndepAux::new(lambda, 1, &graph)),
        ModelParams::DegreeOneFrozen { lambda } => {
            ModelState::Indep(IndepAux::new(lambda, 2, &graph))
        }
        ModelParams::Multitree { m } => ModelState::Multitree(MultitreeAux::new(m)),
    };
    Ok((graph, aux))
}

impl ModelState {
    pub fn propose(&mut self, graph: &GraphState, rng: &mut SimRng) -> StepOutcome {
        match self {
            ModelState::Port(aux) => port_step(graph, aux, rng),
            ModelState::Indep(aux) => indep_step(graph, aux, rng),
            ModelState::Multitree(aux) => multitree_step(graph, aux, rng),
        }
    }

    /// Updates auxiliary state once `outcome` has been applied to `graph`.
    pub fn commit(&mut self, graph: &GraphState, outcome: &StepOutcome) {
        match self {
            ModelState::Port(aux) => aux.commit(outcome),
            ModelState::Indep(aux) => aux.commit(graph, outcome),
            ModelState::Multitree(aux) => aux.commit(outcome),
        }
    }

    /// Depth or distance label of `v`, for models that track one.
    pub fn label(&self, v: VertexId) -> Option<u32> {
        match self {
            ModelState::Port(aux) => aux.depth.get(v.index()).copied(),
            ModelState::Multitree(aux) => aux.dist.get(v.index()).copied(),
            ModelState::Indep(_) => None,
        }
    }

    /// Number of times an attachment probability had to be clamped to 1.
    pub fn clamp_events(&self) -> u64 {
        match self {
            ModelState::Indep(aux) => aux.clamp_events,
            _ => 0,
        }
    }
}
