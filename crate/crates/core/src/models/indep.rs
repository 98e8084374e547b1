use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::graph::{GraphState, StepOutcome, VertexId};
use crate::rng::SimRng;

const NO_SLOT: u32 = u32::MAX;

/// Auxiliary state of the independent-edges model and its frozen variant.
///
/// Vertices of positive degree live in dyadic pools: pool `b` holds degrees in
/// `[2^b, 2^(b+1))`. A step draws `Binomial(|pool|, lambda * hi / T)` candidates
/// per pool, with `hi = 2^(b+1) - 1`, picks them uniformly without replacement,
/// and keeps each with probability `w(deg) / hi`. Every vertex therefore joins
/// independently with probability exactly `lambda * w(deg) / T`, at a cost of
/// one binomial draw per pool plus O(lambda) expected candidates.
///
/// `w(d) = d` for `d >= min_degree` and 0 otherwise; `T` is the sum of `w`.
#[derive(Debug, Clone)]
pub struct IndepAux {
    lambda: f64,
    min_degree: u32,
    pools: Vec<Vec<VertexId>>,
    slot: Vec<u32>,
    weight_total: u64,
    pub clamp_events: u64,
}

#[inline]
fn pool_of(d: u32) -> usize {
    debug_assert!(d > 0);
    (31 - d.leading_zeros()) as usize
}

impl IndepAux {
    /// `min_degree` is 1 for the plain model and 2 for the frozen variant.
    pub(crate) fn new(lambda: f64, min_degree: u32, graph: &GraphState) -> Self {
        let mut aux = IndepAux {
            lambda,
            min_degree,
            pools: Vec::new(),
            slot: Vec::with_capacity(graph.vertex_count()),
            weight_total: 0,
            clamp_events: 0,
        };
        for (i, &d) in graph.degrees().iter().enumerate() {
            aux.slot.push(NO_SLOT);
            aux.insert(VertexId::from(i), d);
            aux.weight_total += aux.weight(d);
        }
        aux
    }

    #[inline]
    fn weight(&self, d: u32) -> u64 {
        if d >= self.min_degree {
            d as u64
        } else {
            0
        }
    }

    /// Normalizer `T` of the attachment probabilities.
    pub fn weight_total(&self) -> u64 {
        self.weight_total
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn min_degree(&self) -> u32 {
        self.min_degree
    }

    fn insert(&mut self, v: VertexId, d: u32) {
        if d == 0 {
            return;
        }
        let b = pool_of(d);
        if b >= self.pools.len() {
            self.pools.resize_with(b + 1, Vec::new);
        }
        self.slot[v.index()] = self.pools[b].len() as u32;
        self.pools[b].push(v);
    }

    fn remove(&mut self, v: VertexId, d: u32) {
        if d == 0 {
            return;
        }
        let pool = &mut self.pools[pool_of(d)];
        let at = self.slot[v.index()] as usize;
        pool.swap_remove(at);
        if let Some(&moved) = pool.get(at) {
            self.slot[moved.index()] = at as u32;
        }
        self.slot[v.index()] = NO_SLOT;
    }

    pub(crate) fn commit(&mut self, graph: &GraphState, outcome: &StepOutcome) {
        for &e in &outcome.endpoints {
            let d = graph.degree(e);
            let old = d - 1;
            self.weight_total = self.weight_total + self.weight(d) - self.weight(old);
            if old == 0 || pool_of(old) != pool_of(d) {
                self.remove(e, old);
                self.insert(e, d);
            }
        }
        let k = outcome.endpoints.len() as u32;
        self.slot.push(NO_SLOT);
        self.insert(outcome.new_vertex, k);
        self.weight_total += self.weight(k);
    }

    /// Attachment probability of a vertex of degree `d`, before clamping.
    pub fn attach_probability(&self, d: u32) -> f64 {
        if self.weight_total == 0 {
            return 0.0;
        }
        self.lambda * self.weight(d) as f64 / self.weight_total as f64
    }
}

/// Each old vertex joins the new one independently with probability
/// `lambda * w(deg) / T`. Probabilities above 1 are clamped and counted.
pub fn indep_step(graph: &GraphState, aux: &mut IndepAux, rng: &mut SimRng) -> StepOutcome {
    let mut endpoints = Vec::new();
    let t = aux.weight_total as f64;
    if aux.weight_total > 0 {
        for b in 0..aux.pools.len() {
            let pool = &aux.pools[b];
            if pool.is_empty() {
                continue;
            }
            let hi = (1u64 << (b + 1)) - 1;
            if hi < aux.min_degree as u64 {
                continue;
            }
            let p_hi = aux.lambda * hi as f64 / t;
            if p_hi >= 1.0 {
                for &v in pool {
                    let mut p = aux.lambda * aux.weight(graph.degree(v)) as f64 / t;
                    if p > 1.0 {
                        aux.clamp_events += 1;
                        p = 1.0;
                    }
                    if rng.random::<f64>() < p {
                        endpoints.push(v);
                    }
                }
                continue;
            }
            let k = Binomial::new(pool.len() as u64, p_hi)
                .expect("probability in [0, 1)")
                .sample(rng) as usize;
            if k == 0 {
                continue;
            }
            for i in index::sample(rng, pool.len(), k) {
                let v = pool[i];
                let w = aux.weight(graph.degree(v));
                if rng.random::<f64>() * (hi as f64) < w as f64 {
                    endpoints.push(v);
                }
            }
        }
    }
    StepOutcome {
        new_vertex: graph.next_vertex(),
        endpoints,
        label: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{init_state, ModelParams, ModelState};
    use crate::rng::rng_from_seed;

    fn grow(params: ModelParams, steps: usize, seed: u64) -> (GraphState, IndepAux) {
        let (mut g, aux) = init_state(&params).unwrap();
        let ModelState::Indep(mut aux) = aux else { unreachable!() };
        let mut rng = rng_from_seed(seed);
        for _ in 0..steps {
            let out = indep_step(&g, &mut aux, &mut rng);
            g.apply_outcome(&out).unwrap();
            aux.commit(&g, &out);
        }
        (g, aux)
    }

    fn check_pools(g: &GraphState, aux: &IndepAux) {
        let mut in_pools = 0;
        for (b, pool) in aux.pools.iter().enumerate() {
            for (i, &v) in pool.iter().enumerate() {
                let d = g.degree(v);
                assert_eq!(pool_of(d), b);
                assert_eq!(aux.slot[v.index()] as usize, i);
                in_pools += 1;
            }
        }
        let positive = g.degrees().iter().filter(|&&d| d > 0).count();
        assert_eq!(in_pools, positive);
        let t: u64 = g.degrees().iter().map(|&d| aux.weight(d)).sum();
        assert_eq!(t, aux.weight_total);
    }

    #[test]
    fn initial_step_distribution() {
        // lambda = 1, T = 2: each endpoint w.p. 1/2, empty w.p. 1/4
        let (g, mut aux) = grow(ModelParams::Indep { lambda: 1.0 }, 0, 0);
        let mut rng = rng_from_seed(1);
        let trials = 40_000;
        let mut empty = 0;
        let mut hits = [0usize; 2];
        for _ in 0..trials {
            let out = indep_step(&g, &mut aux, &mut rng);
            if out.endpoints.is_empty() {
                empty += 1;
            }
            for e in out.endpoints {
                hits[e.index()] += 1;
            }
        }
        let sd = |p: f64| (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((empty as f64 - trials as f64 * 0.25).abs() < 3.0 * sd(0.25));
        for h in hits {
            assert!((h as f64 - trials as f64 * 0.5).abs() < 3.0 * sd(0.5));
        }
    }

    #[test]
    fn bookkeeping_stays_consistent() {
        let (g, aux) = grow(ModelParams::Indep { lambda: 1.5 }, 3000, 4);
        g.check_invariants().unwrap();
        check_pools(&g, &aux);
        assert_eq!(aux.weight_total, 2 * g.edge_count());
        assert_eq!(aux.clamp_events, 0);
    }

    #[test]
    fn degree_zero_never_attaches() {
        let (g, aux) = grow(ModelParams::Indep { lambda: 1.0 }, 500, 8);
        assert_eq!(aux.attach_probability(0), 0.0);
        assert!(g.count_with_degree(0) > 0);
    }

    #[test]
    fn frozen_degree_one_never_attaches() {
        let (g0, aux0) = grow(ModelParams::DegreeOneFrozen { lambda: 1.0 }, 0, 0);
        assert_eq!(aux0.weight_total, 6);
        assert_eq!(aux0.attach_probability(1), 0.0);
        assert_eq!(aux0.attach_probability(2), 1.0 / 3.0);
        drop(g0);

        let (mut g, aux) = grow(ModelParams::DegreeOneFrozen { lambda: 1.0 }, 0, 0);
        let mut aux = aux;
        let mut rng = rng_from_seed(21);
        let mut low: Vec<(usize, u32)> = Vec::new();
        for _ in 0..3000 {
            let out = indep_step(&g, &mut aux, &mut rng);
            for e in &out.endpoints {
                assert!(g.degree(*e) >= 2, "frozen vertex received an edge");
            }
            g.apply_outcome(&out).unwrap();
            aux.commit(&g, &out);
            if out.new_degree() <= 1 {
                low.push((out.new_vertex.index(), out.new_degree() as u32));
            }
        }
        for (v, d) in low {
            assert_eq!(g.degrees()[v], d);
        }
        check_pools(&g, &aux);
    }

    #[test]
    fn frozen_probability_on_a_path() {
        // degrees 1, 2, 2, 1: T' = 4
        let g = GraphState::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let aux = IndepAux::new(1.0, 2, &g);
        assert_eq!(aux.weight_total(), 4);
        assert_eq!(aux.attach_probability(2), 0.5);
        assert_eq!(aux.attach_probability(1), 0.0);
    }

    #[test]
    fn pool_indices() {
        assert_eq!(pool_of(1), 0);
        assert_eq!(pool_of(2), 1);
        assert_eq!(pool_of(3), 1);
        assert_eq!(pool_of(4), 2);
        assert_eq!(pool_of(1023), 9);
    }
}
