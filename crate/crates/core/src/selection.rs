//! Selected-vertex sets `S_n` and the restricted histogram `X*[n, .]`.
//!
//! Every rule decides membership of a new vertex from its own edges only, at
//! creation time, and membership is never revoked.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bump, Checkpoint, GraphState, StepOutcome, VertexId};
use crate::models::{ModelParams, ModelState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectionRule {
    /// Vertices at depth `j` (trees) or distance `j` from `G_0` (multitrees).
    LevelJ { j: u32 },
    /// Neighbours of a fixed initial vertex.
    NeighborsOf { target: VertexId },
    /// Vertices adjacent to every vertex of a fixed set of initial vertices.
    ConnectedToAll { fixed: Vec<VertexId> },
    /// Vertices born with degree exactly 1 (frozen model only).
    DegreeOne,
    All,
}

impl SelectionRule {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionRule::LevelJ { .. } => "level_j",
            SelectionRule::NeighborsOf { .. } => "neighbors_of",
            SelectionRule::ConnectedToAll { .. } => "connected_to_all",
            SelectionRule::DegreeOne => "degree_one",
            SelectionRule::All => "all",
        }
    }

    /// Rejects rule/model pairings that do not make sense.
    pub fn validate_for(&self, model: &ModelParams) -> Result<()> {
        let (v0, _) = model.initial_graph();
        match self {
            SelectionRule::LevelJ { j } => {
                if !matches!(model, ModelParams::Port { .. } | ModelParams::Multitree { .. }) {
                    return Err(Error::config(format!(
                        "level_j needs a tree or multitree model, got {}",
                        model.name()
                    )));
                }
                if *j < 1 {
                    return Err(Error::config("level_j requires j >= 1"));
                }
            }
            SelectionRule::NeighborsOf { target } => {
                if target.index() >= v0 {
                    return Err(Error::config(format!(
                        "neighbors_of target {} is not an initial vertex (|V0| = {v0})",
                        target.0
                    )));
                }
            }
            SelectionRule::ConnectedToAll { fixed } => {
                let ModelParams::Multitree { m } = *model else {
                    return Err(Error::config("connected_to_all needs the multitree model"));
                };
                if fixed.is_empty() || fixed.len() >= m {
                    return Err(Error::config(format!(
                        "connected_to_all needs 1 <= k < M = {m}, got k = {}",
                        fixed.len()
                    )));
                }
                for (i, v) in fixed.iter().enumerate() {
                    if v.index() >= v0 {
                        return Err(Error::config(format!("fixed vertex {} is not initial", v.0)));
                    }
                    if fixed[..i].contains(v) {
                        return Err(Error::config(format!("fixed vertex {} repeated", v.0)));
                    }
                }
            }
            SelectionRule::DegreeOne => {
                if !matches!(model, ModelParams::DegreeOneFrozen { .. }) {
                    return Err(Error::config("degree_one needs the frozen model"));
                }
            }
            SelectionRule::All => {}
        }
        Ok(())
    }

    /// Membership of the new vertex, decided from its edges alone.
    pub fn classify(&self, outcome: &StepOutcome) -> bool {
        match self {
            SelectionRule::LevelJ { j } => outcome.label == Some(*j),
            SelectionRule::NeighborsOf { target } => outcome.endpoints.contains(target),
            SelectionRule::ConnectedToAll { fixed } => {
                fixed.iter().all(|f| outcome.endpoints.contains(f))
            }
            SelectionRule::DegreeOne => outcome.endpoints.len() == 1,
            SelectionRule::All => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionState {
    member: Vec<bool>,
    restricted: Vec<u64>,
    s_size: u64,
    /// Degree-at-birth counts of vertices selected after `G_0`.
    born_selected: Vec<u64>,
}

impl SelectionState {
    /// Fixes `S_0`. ConnectedToAll starts from `V0 \ F`: the initial graph is
    /// complete, so every other initial vertex is adjacent to all of `F`.
    pub fn init(
        rule: &SelectionRule,
        model: &ModelParams,
        graph: &GraphState,
        aux: &ModelState,
    ) -> Result<Self> {
        rule.validate_for(model)?;
        let (v0, edges) = model.initial_graph();
        let member: Vec<bool> = (0..v0)
            .map(|i| {
                let v = VertexId::from(i);
                match rule {
                    SelectionRule::LevelJ { j } => aux.label(v) == Some(*j),
                    SelectionRule::NeighborsOf { target } => edges.iter().any(|&(a, b)| {
                        (a == target.index() && b == i) || (b == target.index() && a == i)
                    }),
                    SelectionRule::ConnectedToAll { fixed } => !fixed.contains(&v),
                    SelectionRule::DegreeOne => graph.degree(v) == 1,
                    SelectionRule::All => true,
                }
            })
            .collect();
        let mut restricted = Vec::new();
        let mut s_size = 0;
        for (i, &m) in member.iter().enumerate() {
            if m {
                bump(&mut restricted, graph.degrees()[i] as usize);
                s_size += 1;
            }
        }
        Ok(SelectionState {
            member,
            restricted,
            s_size,
            born_selected: Vec::new(),
        })
    }

    pub fn s_size(&self) -> u64 {
        self.s_size
    }

    pub fn restricted(&self) -> &[u64] {
        &self.restricted
    }

    pub fn born_selected(&self) -> &[u64] {
        &self.born_selected
    }

    pub fn is_member(&self, v: VertexId) -> bool {
        self.member.get(v.index()).copied().unwrap_or(false)
    }

    pub fn members(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| VertexId::from(i))
    }

    /// Applies one step. Must run before the outcome is applied to `graph`,
    /// so that `graph` still holds the pre-step degrees.
    pub fn update(&mut self, graph: &GraphState, outcome: &StepOutcome, selected: bool) -> Result<()> {
        for &e in &outcome.endpoints {
            if !self.is_member(e) {
                continue;
            }
            let d = graph.degree(e) as usize;
            match self.restricted.get_mut(d) {
                Some(c) if *c > 0 => *c -= 1,
                _ => {
                    return Err(Error::invariant(format!(
                        "restricted histogram underflow at degree {d}"
                    )))
                }
            }
            bump(&mut self.restricted, d + 1);
        }
        self.member.push(selected);
        if selected {
            let k = outcome.endpoints.len();
            bump(&mut self.restricted, k);
            bump(&mut self.born_selected, k);
            self.s_size += 1;
        }
        Ok(())
    }

    /// `X*` rebuilt from member degrees.
    pub fn recount(&self, graph: &GraphState) -> Vec<u64> {
        let mut h = Vec::new();
        for v in self.members() {
            bump(&mut h, graph.degree(v) as usize);
        }
        h
    }
}

/// Deep copy of both histograms at the current step.
pub fn snapshot(graph: &GraphState, selection: &SelectionState) -> Checkpoint {
    Checkpoint {
        n: graph.n(),
        histogram: graph.histogram().to_vec(),
        restricted: selection.restricted().to_vec(),
        s_size: selection.s_size(),
    }
}
