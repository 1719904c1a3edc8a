//! Exact ICM expectations by enumerating every coin outcome on small
//! graphs. Used as a test oracle for the Monte Carlo engine.
//!
//! The enumeration follows the same round semantics as the simulator but
//! branches on each coin instead of sampling it. Every undirected edge is
//! tried at most once per world (from whichever endpoint activates first),
//! so there are at most `2^|E|` worlds.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::partial::{partial_graph, PartialView};

use super::EdgeProbabilities;

pub const ENUMERATION_EDGE_LIMIT: usize = 25;

/// Expected cascade sizes in the oracle and partial scenarios.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExactExpectations {
    pub sigma: f64,
    pub sigma_o: f64,
    pub sigma_ph: f64,
    pub sigma_h: f64,
    pub sigma_p: f64,
}

struct Enumerator<'a, F> {
    g: &'a Graph,
    probs: &'a EdgeProbabilities,
    times: Vec<Option<u32>>,
    parents: Vec<Vec<NodeId>>,
    visit: F,
}

impl<F> Enumerator<'_, F>
where
    F: FnMut(f64, &[Option<u32>], &[Vec<NodeId>]),
{
    fn round(&mut self, frontier: &[NodeId], t: u32, weight: f64) {
        let mut coins = Vec::new();
        for &i in frontier {
            for &j in self.g.neighbors(i) {
                if self.times[j as usize].is_none() {
                    let p = self.probs.between(self.g, i, j).expect("edge exists");
                    coins.push((i, j, p));
                }
            }
        }
        let mut successes = Vec::new();
        self.branch(&coins, 0, &mut successes, t, weight);
    }

    fn branch(
        &mut self,
        coins: &[(NodeId, NodeId, f64)],
        idx: usize,
        successes: &mut Vec<(NodeId, NodeId)>,
        t: u32,
        weight: f64,
    ) {
        if idx == coins.len() {
            if successes.is_empty() {
                (self.visit)(weight, &self.times, &self.parents);
                return;
            }
            let mut hits = successes.clone();
            hits.sort_unstable();
            let mut fresh: Vec<NodeId> = hits.iter().map(|&(j, _)| j).collect();
            fresh.dedup();
            for &(j, i) in &hits {
                self.parents[j as usize].push(i);
            }
            for &j in &fresh {
                self.times[j as usize] = Some(t);
            }
            self.round(&fresh, t + 1, weight);
            for &j in &fresh {
                self.times[j as usize] = None;
                self.parents[j as usize].clear();
            }
            return;
        }
        let (i, j, p) = coins[idx];
        if p > 0.0 {
            successes.push((j, i));
            self.branch(coins, idx + 1, successes, t, weight * p);
            successes.pop();
        }
        if p < 1.0 {
            self.branch(coins, idx + 1, successes, t, weight * (1.0 - p));
        }
    }
}

/// Calls `visit(probability, activation_times, parents)` once per distinct
/// outcome of an ICM run from `seeds`.
pub fn enumerate_worlds<F>(g: &Graph, seeds: &[NodeId], probs: &EdgeProbabilities, visit: F) -> Result<()>
where
    F: FnMut(f64, &[Option<u32>], &[Vec<NodeId>]),
{
    if g.edge_count() > ENUMERATION_EDGE_LIMIT {
        return Err(Error::TooLargeForEnumeration {
            edges: g.edge_count(),
            limit: ENUMERATION_EDGE_LIMIT,
        });
    }
    probs.check_graph(g)?;
    let mut times = vec![None; g.node_count()];
    let mut start: Vec<NodeId> = seeds.to_vec();
    start.sort_unstable();
    start.dedup();
    for &s in &start {
        if s as usize >= g.node_count() {
            return Err(Error::NodeOutOfRange {
                node: s,
                node_count: g.node_count(),
            });
        }
        times[s as usize] = Some(0);
    }
    let mut e = Enumerator {
        g,
        probs,
        times,
        parents: vec![Vec::new(); g.node_count()],
        visit,
    };
    e.round(&start, 1, 1.0);
    Ok(())
}

/// Exact expected decomposition for seeds given in oracle ids.
///
/// Seeds that are hidden still start the oracle diffusion but are absent
/// from the partial one.
pub fn exact_icm_expectations(
    g: &Graph,
    seeds: &[NodeId],
    probs: &EdgeProbabilities,
    view: &PartialView,
) -> Result<ExactExpectations> {
    let partial = partial_graph(g, view)?;
    if g.edge_count() > ENUMERATION_EDGE_LIMIT {
        return Err(Error::TooLargeForEnumeration {
            edges: g.edge_count(),
            limit: ENUMERATION_EDGE_LIMIT,
        });
    }

    let mut out = ExactExpectations::default();
    let mut observed = vec![0.0; g.node_count()];
    enumerate_worlds(g, seeds, probs, |w, times, parents| {
        let mut order: Vec<(u32, NodeId)> = times
            .iter()
            .enumerate()
            .filter_map(|(u, t)| t.map(|t| (t, u as NodeId)))
            .collect();
        order.sort_unstable();
        for &(t, u) in &order {
            let ui = u as usize;
            observed[ui] = if view.is_hidden(u) {
                0.0
            } else if t == 0 {
                1.0
            } else {
                let ps = &parents[ui];
                ps.iter().map(|&q| observed[q as usize]).sum::<f64>() / ps.len() as f64
            };
            out.sigma += w;
            if view.is_hidden(u) {
                out.sigma_h += w;
            } else {
                out.sigma_o += w * observed[ui];
                out.sigma_ph += w * (1.0 - observed[ui]);
            }
        }
    })?;

    let partial_seeds: Vec<NodeId> = seeds.iter().filter_map(|&s| partial.from_oracle(s)).collect();
    let partial_probs = probs.restricted(g, &partial);
    enumerate_worlds(&partial.graph, &partial_seeds, &partial_probs, |w, times, _| {
        out.sigma_p += w * times.iter().filter(|t| t.is_some()).count() as f64;
    })?;
    Ok(out)
}
