//! Evolving graph state and exact degree accounting.
//!
//! Only degrees are stored. Models that need structure (parent links, bases)
//! keep it in their own auxiliary state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Creation-ordered vertex index. Initial vertices occupy `0..|V0|`, the
/// vertex added at step `n` has index `|V0| + n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i as u32)
    }
}

/// Result of one model step, before it is applied to the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub new_vertex: VertexId,
    /// Existing vertices joined to the new vertex.
    pub endpoints: Vec<VertexId>,
    /// Depth (trees) or distance from the initial configuration (multitrees)
    /// of the new vertex, when the model tracks one.
    pub label: Option<u32>,
}

impl StepOutcome {
    pub fn new_degree(&self) -> usize {
        self.endpoints.len()
    }
}

/// Degrees, degree histogram `X[n, d]`, and edge count of `G_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphState {
    n: u64,
    initial_vertices: usize,
    degrees: Vec<u32>,
    histogram: Vec<u64>,
    edge_count: u64,
}

impl GraphState {
    /// Builds `G_0` from an edge list over `vertex_count` vertices.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut degrees = vec![0u32; vertex_count];
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in edges {
            if a == b || a >= vertex_count || b >= vertex_count {
                return Err(Error::config(format!("invalid initial edge ({a}, {b})")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::config(format!("duplicate initial edge ({a}, {b})")));
            }
            degrees[a] += 1;
            degrees[b] += 1;
        }
        let mut histogram = Vec::new();
        for &d in &degrees {
            bump(&mut histogram, d as usize);
        }
        Ok(GraphState {
            n: 0,
            initial_vertices: vertex_count,
            degrees,
            histogram,
            edge_count: edges.len() as u64,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn initial_vertices(&self) -> usize {
        self.initial_vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> u32 {
        self.degrees[v.index()]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// `X[n, d]` indexed by `d`; entries past the end are zero.
    pub fn histogram(&self) -> &[u64] {
        &self.histogram
    }

    pub fn count_with_degree(&self, d: usize) -> u64 {
        self.histogram.get(d).copied().unwrap_or(0)
    }

    pub fn next_vertex(&self) -> VertexId {
        VertexId::from(self.degrees.len())
    }

    /// Checks that an outcome can be applied: the new vertex is the next
    /// index and endpoints are distinct existing vertices.
    pub fn validate(&self, outcome: &StepOutcome) -> Result<()> {
        if outcome.new_vertex != self.next_vertex() {
            return Err(Error::invariant(format!(
                "new vertex {} does not follow {} existing vertices",
                outcome.new_vertex.0,
                self.degrees.len()
            )));
        }
        for (i, e) in outcome.endpoints.iter().enumerate() {
            if e.index() >= self.degrees.len() {
                return Err(Error::invariant(format!("endpoint {} out of range", e.0)));
            }
            if outcome.endpoints[..i].contains(e) {
                return Err(Error::invariant(format!("duplicate endpoint {}", e.0)));
            }
        }
        Ok(())
    }

    /// Adds the new vertex and its edges, shifting the histogram.
    pub fn apply_outcome(&mut self, outcome: &StepOutcome) -> Result<()> {
        self.validate(outcome)?;
        for e in &outcome.endpoints {
            let d = self.degrees[e.index()] as usize;
            self.histogram[d] -= 1;
            bump(&mut self.histogram, d + 1);
            self.degrees[e.index()] += 1;
        }
        let k = outcome.endpoints.len();
        self.degrees.push(k as u32);
        bump(&mut self.histogram, k);
        self.edge_count += k as u64;
        self.n += 1;
        Ok(())
    }

    /// Histogram rebuilt from the degree sequence.
    pub fn recount(&self) -> Vec<u64> {
        let mut h = Vec::new();
        for &d in &self.degrees {
            bump(&mut h, d as usize);
        }
        h
    }

    /// Full consistency check, O(|V|).
    pub fn check_invariants(&self) -> Result<()> {
        let total: u64 = self.histogram.iter().sum();
        if total != self.initial_vertices as u64 + self.n {
            return Err(Error::invariant(format!(
                "histogram mass {total} != |V0| + n = {}",
                self.initial_vertices as u64 + self.n
            )));
        }
        let degree_sum: u64 = self.degrees.iter().map(|&d| d as u64).sum();
        if degree_sum != 2 * self.edge_count {
            return Err(Error::invariant(format!(
                "degree sum {degree_sum} != 2 * edges {}",
                self.edge_count
            )));
        }
        if !same_histogram(&self.recount(), &self.histogram) {
            return Err(Error::invariant("histogram disagrees with recount"));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn bump(h: &mut Vec<u64>, d: usize) {
    if d >= h.len() {
        h.resize(d + 1, 0);
    }
    h[d] += 1;
}

/// Histogram equality ignoring trailing zeros.
pub fn same_histogram(a: &[u64], b: &[u64]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|d| a.get(d).copied().unwrap_or(0) == b.get(d).copied().unwrap_or(0))
}

/// Immutable snapshot of `(n, X[n, .], X*[n, .], |S_n|)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub histogram: Vec<u64>,
    pub restricted: Vec<u64>,
    pub s_size: u64,
}

impl Checkpoint {
    pub fn check(&self) -> Result<()> {
        let sum: u64 = self.restricted.iter().sum();
        if sum != self.s_size {
            return Err(Error::invariant(format!(
                "restricted mass {sum} != s_size {}",
                self.s_size
            )));
        }
        for (d, &xs) in self.restricted.iter().enumerate() {
            let x = self.histogram.get(d).copied().unwrap_or(0);
            if xs > x {
                return Err(Error::invariant(format!("X*[{d}] = {xs} > X[{d}] = {x}")));
            }
        }
        Ok(())
    }
}
