use rand::Rng;

use crate::graph::{GraphState, StepOutcome, VertexId};
use crate::rng::SimRng;

/// Bases of the `M`-multitree, stored flat with stride `M`, plus each
/// vertex's distance from the initial configuration.
#[derive(Debug, Clone)]
pub struct MultitreeAux {
    arity: usize,
    bases: Vec<VertexId>,
    pub dist: Vec<u32>,
}

impl MultitreeAux {
    pub(crate) fn new(arity: usize) -> Self {
        MultitreeAux {
            arity,
            bases: (0..arity).map(VertexId::from).collect(),
            dist: vec![0; arity],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn base_count(&self) -> usize {
        self.bases.len() / self.arity
    }

    pub fn base(&self, i: usize) -> &[VertexId] {
        &self.bases[i * self.arity..(i + 1) * self.arity]
    }

    /// Appends the `M` bases obtained by swapping each member of the chosen
    /// base for the new center. The chosen base itself stays.
    pub(crate) fn commit(&mut self, outcome: &StepOutcome) {
        let members = &outcome.endpoints;
        debug_assert_eq!(members.len(), self.arity);
        self.bases.reserve(self.arity * self.arity);
        for replaced in 0..self.arity {
            for (i, &v) in members.iter().enumerate() {
                self.bases.push(if i == replaced { outcome.new_vertex } else { v });
            }
        }
        let d = members.iter().map(|v| self.dist[v.index()]).min().unwrap_or(0) + 1;
        self.dist.push(d);
    }
}

/// Attaches the new center to every member of a uniformly chosen base.
pub fn multitree_step(graph: &GraphState, aux: &MultitreeAux, rng: &mut SimRng) -> StepOutcome {
    let chosen = rng.random_range(0..aux.base_count());
    let endpoints = aux.base(chosen).to_vec();
    let label = endpoints.iter().map(|v| aux.dist[v.index()]).min().unwrap_or(0) + 1;
    StepOutcome {
        new_vertex: graph.next_vertex(),
        endpoints,
        label: Some(label),
    }
}
