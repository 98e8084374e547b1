//! A single replica: graph, model state, selection and RNG stepped together.

use crate::error::Result;
use crate::graph::{bump, Checkpoint, GraphState, StepOutcome};
use crate::models::{init_state, ModelParams, ModelState};
use crate::rng::{rng_from_seed, SimRng};
use crate::selection::{snapshot, SelectionRule, SelectionState};

#[derive(Debug, Clone)]
pub struct Simulation {
    model: ModelParams,
    rule: SelectionRule,
    graph: GraphState,
    aux: ModelState,
    selection: SelectionState,
    rng: SimRng,
    /// Degree-at-birth counts of all new vertices, `sum_i I[i, d]`.
    born: Vec<u64>,
}

impl Simulation {
    pub fn new(model: ModelParams, rule: SelectionRule, seed: u64) -> Result<Self> {
        let (graph, aux) = init_state(&model)?;
        let selection = SelectionState::init(&rule, &model, &graph, &aux)?;
        Ok(Simulation {
            model,
            rule,
            graph,
            aux,
            selection,
            rng: rng_from_seed(seed),
            born: Vec::new(),
        })
    }

    /// One step: propose, classify, update `X*`, apply to the graph, commit.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let outcome = self.aux.propose(&self.graph, &mut self.rng);
        self.graph.validate(&outcome)?;
        let selected = self.rule.classify(&outcome);
        self.selection.update(&self.graph, &outcome, selected)?;
        self.graph.apply_outcome(&outcome)?;
        self.aux.commit(&self.graph, &outcome);
        bump(&mut self.born, outcome.new_degree());
        Ok(outcome)
    }

    pub fn run_until(&mut self, n: u64) -> Result<()> {
        while self.graph.n() < n {
            self.step()?;
        }
        Ok(())
    }

    pub fn checkpoint(&self) -> Checkpoint {
        snapshot(&self.graph, &self.selection)
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn rule(&self) -> &SelectionRule {
        &self.rule
    }

    pub fn graph(&self) -> &GraphState {
        &self.graph
    }

    pub fn model_state(&self) -> &ModelState {
        &self.aux
    }

    pub fn selection(&self) -> &SelectionState {
        &self.selection
    }

    pub fn born(&self) -> &[u64] {
        &self.born
    }

    pub fn clamp_events(&self) -> u64 {
        self.aux.clamp_events()
    }
}
