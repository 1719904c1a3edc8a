//! Independent Cascade Model.
//!
//! Rounds are synchronous: every node activated in round `t - 1` gets one
//! coin per neighbour that was still inactive at the start of round `t`.
//! All coins of a round are flipped before any activation is committed, so
//! a node can collect several parents in the round it activates.
//!
//! The coin for `i -> j` is a pure function of the run seed and the labels
//! of `i` and `j`. Since a node only ever acts in one round, that makes each
//! run a live-edge sample: the result does not depend on evaluation order,
//! and two graphs sharing labels (an oracle and its partial network) see the
//! same coins on the edges they share.

mod exact;
mod probabilities;

pub use exact::{enumerate_worlds, exact_icm_expectations, ExactExpectations, ENUMERATION_EDGE_LIMIT};
pub use probabilities::{read_edge_weights, EdgeProbabilities, EdgeWeights};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::random::edge_uniform;

/// Transmission probability used when none is given.
pub const DEFAULT_TRANSMISSION: f64 = 0.01;

/// One ICM run: activated nodes grouped by round, with their parents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffusionTrace {
    nodes: Vec<NodeId>,
    level_offsets: Vec<usize>,
    parent_offsets: Vec<usize>,
    parents: Vec<u32>,
    graph_nodes: usize,
}

impl DiffusionTrace {
    /// Activated nodes in activation order; each round is sorted by id.
    pub fn activated(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Last round with any activation.
    pub fn horizon(&self) -> usize {
        self.level_count() - 1
    }

    pub fn level_count(&self) -> usize {
        self.level_offsets.len() - 1
    }

    /// Positions (into [`DiffusionTrace::activated`]) of round `t`.
    pub fn level_range(&self, t: usize) -> std::ops::Range<usize> {
        self.level_offsets[t]..self.level_offsets[t + 1]
    }

    pub fn level(&self, t: usize) -> &[NodeId] {
        &self.nodes[self.level_range(t)]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        (0..self.level_count()).map(|t| self.level_range(t).len()).collect()
    }

    pub fn seeds(&self) -> &[NodeId] {
        self.level(0)
    }

    /// Positions of the parents of the node at `position`.
    pub fn parent_positions(&self, position: usize) -> &[u32] {
        &self.parents[self.parent_offsets[position]..self.parent_offsets[position + 1]]
    }

    pub fn parents_of(&self, position: usize) -> impl Iterator<Item = NodeId> + '_ {
        self.parent_positions(position)
            .iter()
            .map(|&p| self.nodes[p as usize])
    }

    /// Node count of the graph the run was made on.
    pub fn graph_node_count(&self) -> usize {
        self.graph_nodes
    }

    /// Dense activation round per node.
    pub fn activation_times(&self) -> Vec<Option<u32>> {
        let mut times = vec![None; self.graph_nodes];
        for t in 0..self.level_count() {
            for &u in self.level(t) {
                times[u as usize] = Some(t as u32);
            }
        }
        times
    }
}

/// Reusable ICM runner; scratch memory is proportional to the graph and is
/// only reset lazily between runs.
pub struct IcmSimulator<'g> {
    graph: &'g Graph,
    probs: &'g EdgeProbabilities,
    stamp: Vec<u32>,
    epoch: u32,
    hits: Vec<(NodeId, u32)>,
}

impl<'g> IcmSimulator<'g> {
    pub fn new(graph: &'g Graph, probs: &'g EdgeProbabilities) -> Result<Self> {
        probs.check_graph(graph)?;
        Ok(IcmSimulator {
            graph,
            probs,
            stamp: vec![0; graph.node_count()],
            epoch: 0,
            hits: Vec::new(),
        })
    }

    pub fn run(&mut self, seeds: &[NodeId], rng_seed: u64) -> Result<DiffusionTrace> {
        let g = self.graph;
        for &s in seeds {
            if s as usize >= g.node_count() {
                return Err(Error::NodeOutOfRange {
                    node: s,
                    node_count: g.node_count(),
                });
            }
        }
        if self.epoch == u32::MAX {
            self.stamp.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        let epoch = self.epoch;

        let mut nodes: Vec<NodeId> = seeds.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        for &s in &nodes {
            self.stamp[s as usize] = epoch;
        }
        let mut level_offsets = vec![0, nodes.len()];
        let mut parent_offsets = vec![0; nodes.len() + 1];
        let mut parents = Vec::new();

        loop {
            let start = level_offsets[level_offsets.len() - 2];
            let end = level_offsets[level_offsets.len() - 1];
            self.hits.clear();
            for pos in start..end {
                let i = nodes[pos];
                let from = g.label(i);
                for (slot, &j) in g.slot_range(i).zip(g.neighbors(i)) {
                    if self.stamp[j as usize] == epoch {
                        continue;
                    }
                    let p = self.probs.at_slot(slot);
                    if p >= 1.0 || (p > 0.0 && edge_uniform(rng_seed, from, g.label(j)) < p) {
                        self.hits.push((j, pos as u32));
                    }
                }
            }
            if self.hits.is_empty() {
                break;
            }
            self.hits.sort_unstable();
            let mut k = 0;
            while k < self.hits.len() {
                let j = self.hits[k].0;
                self.stamp[j as usize] = epoch;
                nodes.push(j);
                while k < self.hits.len() && self.hits[k].0 == j {
                    parents.push(self.hits[k].1);
                    k += 1;
                }
                parent_offsets.push(parents.len());
            }
            level_offsets.push(nodes.len());
        }

        Ok(DiffusionTrace {
            nodes,
            level_offsets,
            parent_offsets,
            parents,
            graph_nodes: g.node_count(),
        })
    }
}

/// Single ICM run from `seeds` (ids of `g`).
pub fn run_icm(
    g: &Graph,
    seeds: &[NodeId],
    probs: &EdgeProbabilities,
    rng_seed: u64,
) -> Result<DiffusionTrace> {
    IcmSimulator::new(g, probs)?.run(seeds, rng_seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use proptest::prelude::*;
    use std::collections::VecDeque;

    fn uniform(p: f64) -> EdgeProbabilities {
        EdgeProbabilities::uniform(p).unwrap()
    }

    fn bfs_levels(g: &Graph, seeds: &[NodeId]) -> Vec<Option<u32>> {
        let mut dist = vec![None; g.node_count()];
        let mut q = VecDeque::new();
        for &s in seeds {
            dist[s as usize] = Some(0);
            q.push_back(s);
        }
        while let Some(u) = q.pop_front() {
            for &v in g.neighbors(u) {
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(dist[u as usize].unwrap() + 1);
                    q.push_back(v);
                }
            }
        }
        dist
    }

    #[test]
    fn zero_probability_keeps_seeds() {
        let g = complete(6);
        let t = run_icm(&g, &[3, 1], &uniform(0.0), 5).unwrap();
        assert_eq!(t.activated(), &[1, 3]);
        assert_eq!(t.horizon(), 0);
    }

    #[test]
    fn flood_matches_bfs_and_collects_all_parents() {
        // 2x3 grid: 0-1-2 / 3-4-5 with verticals
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]).unwrap();
        let t = run_icm(&g, &[0], &uniform(1.0), 1).unwrap();
        assert_eq!(t.activation_times(), bfs_levels(&g, &[0]));
        assert_eq!(t.level_sizes(), vec![1, 2, 2, 1]);
        let times = t.activation_times();
        for pos in 0..t.size() {
            let u = t.activated()[pos];
            let mut expected: Vec<NodeId> = g
                .neighbors(u)
                .iter()
                .copied()
                .filter(|&v| times[u as usize].unwrap() > 0 && times[v as usize] == Some(times[u as usize].unwrap() - 1))
                .collect();
            expected.sort_unstable();
            let got: Vec<NodeId> = t.parents_of(pos).collect();
            assert_eq!(got, expected, "parents of {u}");
        }
        // node 4 is reached from both 1 and 3
        let pos4 = t.activated().iter().position(|&u| u == 4).unwrap();
        assert_eq!(t.parents_of(pos4).count(), 2);
    }

    #[test]
    fn path_expectation() {
        // s-a-b with p = 0.5: E(sigma) = 1 + 0.5 + 0.25 = 1.75
        let g = path(3);
        let probs = uniform(0.5);
        let mut sim = IcmSimulator::new(&g, &probs).unwrap();
        let runs = 100_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for r in 0..runs {
            let s = sim.run(&[0], r).unwrap().size() as f64;
            sum += s;
            sum_sq += s * s;
        }
        let mean = sum / runs as f64;
        let var = sum_sq / runs as f64 - mean * mean;
        let se = (var / runs as f64).sqrt();
        assert!((mean - 1.75).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn rejects_unknown_seed() {
        let g = path(3);
        assert!(matches!(
            run_icm(&g, &[3], &uniform(0.5), 0),
            Err(Error::NodeOutOfRange { node: 3, .. })
        ));
    }

    #[test]
    fn simulator_reuse_matches_fresh_runs() {
        let g = complete(12);
        let probs = uniform(0.2);
        let mut sim = IcmSimulator::new(&g, &probs).unwrap();
        for r in 0..50 {
            assert_eq!(sim.run(&[0, 5], r).unwrap(), run_icm(&g, &[5, 0], &probs, r).unwrap());
        }
    }

    #[test]
    fn weighted_edges_override_global_probability() {
        let g = path(3);
        let mut w = EdgeWeights::default();
        w.insert(0, 1, 1.0);
        w.insert(1, 2, 0.0);
        let probs = EdgeProbabilities::weighted(&g, &w, 0.5).unwrap();
        for r in 0..20 {
            assert_eq!(run_icm(&g, &[0], &probs, r).unwrap().activated(), &[0, 1]);
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..30).prop_flat_map(|n| {
            proptest::collection::vec((0..n as NodeId, 0..n as NodeId), 0..90)
                .prop_map(move |e| Graph::from_edges(n, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn trace_invariants(g in arb_graph(), p in 0.0f64..1.0, seed in any::<u64>()) {
            let seeds = [0, (g.node_count() / 2) as NodeId];
            let t = run_icm(&g, &seeds, &uniform(p), seed).unwrap();
            let times = t.activation_times();
            let mut seen = std::collections::HashSet::new();
            for (pos, &u) in t.activated().iter().enumerate() {
                prop_assert!(seen.insert(u));
                let tu = times[u as usize].unwrap();
                if tu == 0 {
                    prop_assert!(seeds.contains(&u));
                    prop_assert_eq!(t.parent_positions(pos).len(), 0);
                } else {
                    prop_assert!(t.parent_positions(pos).len() >= 1);
                    for par in t.parents_of(pos) {
                        prop_assert_eq!(times[par as usize], Some(tu - 1));
                        prop_assert!(g.has_edge(par, u));
                    }
                }
            }
            for &s in &seeds {
                prop_assert_eq!(times[s as usize], Some(0));
            }
        }

        #[test]
        fn raising_p_never_shrinks(g in arb_graph(), lo in 0.0f64..1.0, hi in 0.0f64..1.0, seed in any::<u64>()) {
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            let a = run_icm(&g, &[0], &uniform(lo), seed).unwrap();
            let b = run_icm(&g, &[0], &uniform(hi), seed).unwrap();
            let bt = b.activation_times();
            for &u in a.activated() {
                prop_assert!(bt[u as usize].is_some());
            }
        }
    }
}
