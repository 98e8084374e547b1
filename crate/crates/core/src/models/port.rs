use rand::Rng;

use crate::graph::{GraphState, StepOutcome, VertexId};
use crate::rng::SimRng;

/// Auxiliary state of the plane-oriented recursive tree.
///
/// Attachment weight `deg + beta` is split as `(deg - 1) + (1 + beta)`: the
/// first part is sampled from `extra`, which holds one entry per edge a vertex
/// received after its creation, the second part uniformly over vertices. Both
/// parts are non-negative for every `beta > -1` because tree degrees are >= 1.
#[derive(Debug, Clone)]
pub struct PortAux {
    beta: f64,
    extra: Vec<VertexId>,
    /// Parent of each non-initial vertex, `parent[i]` for vertex `|V0| + i`.
    pub parent: Vec<VertexId>,
    /// Distance from `u_1` (vertex 0).
    pub depth: Vec<u32>,
}

impl PortAux {
    pub(crate) fn new(beta: f64, graph: &GraphState) -> Self {
        debug_assert_eq!(graph.vertex_count(), 2);
        PortAux {
            beta,
            extra: Vec::new(),
            parent: Vec::new(),
            depth: vec![0, 1],
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub(crate) fn commit(&mut self, outcome: &StepOutcome) {
        let parent = outcome.endpoints[0];
        self.extra.push(parent);
        self.parent.push(parent);
        self.depth.push(self.depth[parent.index()] + 1);
    }
}

/// Chooses one existing vertex with probability `(deg + beta) / sum(deg + beta)`.
pub fn port_step(graph: &GraphState, aux: &PortAux, rng: &mut SimRng) -> StepOutcome {
    let vertices = graph.vertex_count();
    let uniform_mass = (1.0 + aux.beta) * vertices as f64;
    let total = uniform_mass + aux.extra.len() as f64;
    let target = if rng.random::<f64>() * total < uniform_mass || aux.extra.is_empty() {
        VertexId::from(rng.random_range(0..vertices))
    } else {
        aux.extra[rng.random_range(0..aux.extra.len())]
    };
    StepOutcome {
        new_vertex: graph.next_vertex(),
        endpoints: vec![target],
        label: Some(aux.depth[target.index()] + 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{init_state, ModelParams, ModelState};
    use crate::rng::rng_from_seed;

    fn grow(beta: f64, steps: usize, seed: u64) -> (GraphState, PortAux) {
        let (mut g, aux) = init_state(&ModelParams::Port { beta }).unwrap();
        let ModelState::Port(mut aux) = aux else { unreachable!() };
        let mut rng = rng_from_seed(seed);
        for _ in 0..steps {
            let out = port_step(&g, &aux, &mut rng);
            g.apply_outcome(&out).unwrap();
            aux.commit(&out);
        }
        (g, aux)
    }

    /// Exact multinomial oracle: frequencies of a single step from a fixed
    /// tree against `(d + beta) / sum(d + beta)`, 3 sigma per vertex.
    fn check_single_step_frequencies(beta: f64) {
        let (g, aux) = grow(beta, 8, 11);
        assert_eq!(g.vertex_count(), 10);
        let weights: Vec<f64> = g.degrees().iter().map(|&d| d as f64 + beta).collect();
        let total: f64 = weights.iter().sum();
        let trials = 100_000;
        let mut counts = vec![0u64; 10];
        let mut rng = rng_from_seed(99);
        for _ in 0..trials {
            let out = port_step(&g, &aux, &mut rng);
            counts[out.endpoints[0].index()] += 1;
        }
        for v in 0..10 {
            let p = weights[v] / total;
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            let dev = (counts[v] as f64 - trials as f64 * p).abs();
            assert!(dev <= 3.0 * sigma, "beta {beta} vertex {v}: dev {dev} > 3 sigma {sigma}");
        }
    }

    #[test]
    fn single_step_matches_weights_ab() {
        check_single_step_frequencies(0.0);
    }

    #[test]
    fn single_step_matches_weights_negative_beta() {
        check_single_step_frequencies(-0.5);
    }

    #[test]
    fn single_step_matches_weights_positive_beta() {
        check_single_step_frequencies(2.0);
    }

    #[test]
    fn initial_step_is_fair_coin() {
        let (g, aux) = grow(0.7, 0, 0);
        let mut rng = rng_from_seed(5);
        let trials = 40_000;
        let zeros = (0..trials)
            .filter(|_| port_step(&g, &aux, &mut rng).endpoints[0] == VertexId(0))
            .count();
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((zeros as f64 - trials as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn tree_shape_and_depths() {
        let (g, aux) = grow(0.0, 2000, 3);
        assert_eq!(g.edge_count() as usize, g.vertex_count() - 1);
        g.check_invariants().unwrap();
        for (i, &p) in aux.parent.iter().enumerate() {
            let v = i + 2;
            assert!(p.index() < v);
            assert_eq!(aux.depth[v], aux.depth[p.index()] + 1);
        }
        // degree = 1 + number of children for non-root vertices
        let mut children = vec![0u32; g.vertex_count()];
        for p in &aux.parent {
            children[p.index()] += 1;
        }
        for v in 0..g.vertex_count() {
            assert_eq!(g.degrees()[v], children[v] + 1);
        }
    }
}
