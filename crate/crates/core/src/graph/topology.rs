use std::collections::VecDeque;

use rand::seq::index;
use rayon::prelude::*;

use super::{Graph, NodeId};
use crate::error::{Error, Result};
use crate::random::rng_from;

/// Summary statistics of a graph's topology.
///
/// Diameter and radius are taken over the largest connected component
/// (`component_size` nodes). With `estimated == true` they come from BFS
/// eccentricities of a uniform sample of sources, so the diameter is a lower
/// bound and the radius an upper bound of the exact values.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologyReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub avg_degree: f64,
    pub avg_clustering: f64,
    pub diameter: usize,
    pub radius: usize,
    pub assortativity: f64,
    pub component_size: usize,
    pub estimated: bool,
}

pub fn topology_report(
    g: &Graph,
    diameter_sample: Option<usize>,
    rng_seed: u64,
) -> Result<TopologyReport> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if diameter_sample == Some(0) {
        return Err(Error::invalid("diameter sample must be positive"));
    }

    let clustering_sum: f64 = (0..g.node_count() as NodeId)
        .into_par_iter()
        .map(|u| g.local_clustering(u))
        .collect::<Vec<_>>()
        .iter()
        .sum();

    let lcc_mask = g.largest_component_mask();
    let lcc: Vec<NodeId> = g.nodes().filter(|&u| lcc_mask[u as usize]).collect();
    let (sources, estimated) = match diameter_sample {
        Some(k) if k < lcc.len() => {
            let mut rng = rng_from(rng_seed);
            let mut picked: Vec<NodeId> = index::sample(&mut rng, lcc.len(), k)
                .into_iter()
                .map(|i| lcc[i])
                .collect();
            picked.sort_unstable();
            (picked, true)
        }
        _ => (lcc.clone(), false),
    };
    let eccentricities: Vec<usize> = sources
        .par_iter()
        .map_init(
            || (vec![u32::MAX; g.node_count()], VecDeque::new()),
            |(dist, queue), &s| eccentricity(g, s, dist, queue),
        )
        .collect();

    Ok(TopologyReport {
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        avg_degree: g.average_degree(),
        avg_clustering: clustering_sum / g.node_count() as f64,
        diameter: eccentricities.iter().copied().max().unwrap_or(0),
        radius: eccentricities.iter().copied().min().unwrap_or(0),
        assortativity: degree_assortativity(g),
        component_size: lcc.len(),
        estimated,
    })
}

fn eccentricity(g: &Graph, source: NodeId, dist: &mut [u32], queue: &mut VecDeque<NodeId>) -> usize {
    let mut visited = vec![source];
    dist[source as usize] = 0;
    queue.push_back(source);
    let mut far = 0;
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        far = far.max(du);
        for &v in g.neighbors(u) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = du + 1;
                visited.push(v);
                queue.push_back(v);
            }
        }
    }
    for v in visited {
        dist[v as usize] = u32::MAX;
    }
    far as usize
}

/// Pearson correlation of the degrees at either end of every edge, each
/// edge counted in both orientations. Zero when the degree variance over
/// edge ends vanishes (regular graphs, edgeless graphs).
fn degree_assortativity(g: &Graph) -> f64 {
    let m = g.edge_count();
    if m == 0 {
        return 0.0;
    }
    let (mut sum_xy, mut sum_half, mut sum_sq_half) = (0.0, 0.0, 0.0);
    for (u, v) in g.edges() {
        let x = g.degree(u) as f64;
        let y = g.degree(v) as f64;
        sum_xy += x * y;
        sum_half += 0.5 * (x + y);
        sum_sq_half += 0.5 * (x * x + y * y);
    }
    let m = m as f64;
    let mean = sum_half / m;
    let numerator = sum_xy / m - mean * mean;
    let denominator = sum_sq_half / m - mean * mean;
    if denominator.abs() <= 1e-12 * (sum_sq_half / m).max(1.0) {
        0.0
    } else {
        numerator / denominator
    }
}
