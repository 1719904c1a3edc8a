//! Seed selection on the partial network.
//!
//! Seeds are chosen among visible nodes and reported in oracle ids, so the
//! same set can start a diffusion on either network.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::partial::PartialGraph;
use crate::random::rng_from;

#[derive(Clone, Debug, PartialEq)]
pub struct SeedSet {
    /// Oracle node ids in selection order.
    pub seeds: Vec<NodeId>,
    /// Seed fraction of the visible node count, when the size came from one.
    pub gamma: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedStrategy {
    DegreeDiscount,
    Random,
}

impl std::str::FromStr for SeedStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree-discount" => Ok(SeedStrategy::DegreeDiscount),
            "random" => Ok(SeedStrategy::Random),
            other => Err(Error::invalid(format!("unknown seed strategy {other:?}"))),
        }
    }
}

impl std::fmt::Display for SeedStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SeedStrategy::DegreeDiscount => "degree-discount",
            SeedStrategy::Random => "random",
        })
    }
}

/// `max(1, round-half-up(gamma * visible))`.
pub fn seed_count(gamma: f64, visible: usize) -> usize {
    ((gamma * visible as f64 + 0.5 + 1e-9).floor() as usize).max(1)
}

fn check_k(k: usize, available: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("a seed set needs at least one node"));
    }
    if k > available {
        return Err(Error::NotEnoughNodes {
            requested: k,
            available,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Candidate {
    score: f64,
    node: NodeId,
    version: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // max score first, then lower id
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy degree-discount selection over `g`, in `g`'s own ids.
///
/// Returns the selected nodes and the number of score updates performed.
/// Updates only touch unselected neighbours of each newly selected node;
/// stale heap entries are skipped via per-node versions.
pub(crate) fn degree_discount_raw(g: &Graph, k: usize, p: f64) -> Result<(Vec<NodeId>, usize)> {
    check_k(k, g.node_count())?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} not in [0, 1]")));
    }
    let n = g.node_count();
    let mut selected_neighbors = vec![0u32; n];
    let mut version = vec![0u32; n];
    let mut chosen = vec![false; n];
    let mut heap: BinaryHeap<Candidate> = g
        .nodes()
        .map(|u| Candidate {
            score: g.degree(u) as f64,
            node: u,
            version: 0,
        })
        .collect();

    let mut picked = Vec::with_capacity(k);
    let mut updates = 0;
    while picked.len() < k {
        let top = heap.pop().expect("k <= node count");
        if chosen[top.node as usize] || top.version != version[top.node as usize] {
            continue;
        }
        chosen[top.node as usize] = true;
        picked.push(top.node);
        for &v in g.neighbors(top.node) {
            let vi = v as usize;
            if chosen[vi] {
                continue;
            }
            selected_neighbors[vi] += 1;
            version[vi] += 1;
            updates += 1;
            heap.push(Candidate {
                score: discounted_degree(g.degree(v), selected_neighbors[vi], p),
                node: v,
                version: version[vi],
            });
        }
    }
    Ok((picked, updates))
}

/// `d - 2t - (d - t) * t * p`.
#[inline]
fn discounted_degree(degree: usize, selected_neighbors: u32, p: f64) -> f64 {
    let d = degree as f64;
    let t = selected_neighbors as f64;
    d - 2.0 * t - (d - t) * t * p
}

/// Degree-discount seeds selected on the partial network.
pub fn degree_discount_seeds(partial: &PartialGraph, k: usize, p: f64) -> Result<SeedSet> {
    let (picked, _) = degree_discount_raw(&partial.graph, k, p)?;
    Ok(SeedSet {
        seeds: picked.into_iter().map(|u| partial.to_oracle(u)).collect(),
        gamma: None,
    })
}

/// `k` visible nodes chosen uniformly without replacement.
pub fn random_seeds(partial: &PartialGraph, k: usize, rng_seed: u64) -> Result<SeedSet> {
    check_k(k, partial.graph.node_count())?;
    let mut rng = rng_from(rng_seed);
    let seeds = index::sample(&mut rng, partial.graph.node_count(), k)
        .into_iter()
        .map(|i| partial.to_oracle(i as NodeId))
        .collect();
    Ok(SeedSet { seeds, gamma: None })
}

/// Selects `seed_count(gamma, |V_p|)` seeds with `strategy`.
pub fn select_seeds(
    partial: &PartialGraph,
    strategy: SeedStrategy,
    gamma: f64,
    p: f64,
    rng_seed: u64,
) -> Result<SeedSet> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("seed fraction {gamma} not in (0, 1]")));
    }
    let k = seed_count(gamma, partial.graph.node_count());
    let set = match strategy {
        SeedStrategy::DegreeDiscount => degree_discount_seeds(partial, k, p)?,
        SeedStrategy::Random => random_seeds(partial, k, rng_seed)?,
    };
    Ok(SeedSet {
        gamma: Some(gamma),
        ..set
    })
}

impl SeedSet {
    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// Seed ids translated into the partial network; hidden seeds are dropped.
    pub fn in_partial(&self, partial: &PartialGraph) -> Vec<NodeId> {
        self.seeds
            .iter()
            .filter_map(|&s| partial.from_oracle(s))
            .collect()
    }

    /// One oracle label per line, preceded by a metadata comment.
    pub fn write(&self, oracle: &Graph, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| Error::io(path, e);
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        if let Some(gamma) = self.gamma {
            writeln!(out, "# gamma={gamma} rounding=round-half-up").map_err(io)?;
        }
        for &s in &self.seeds {
            if s as usize >= oracle.node_count() {
                return Err(Error::NodeOutOfRange {
                    node: s,
                    node_count: oracle.node_count(),
                });
            }
            writeln!(out, "{}", oracle.label(s)).map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn read(oracle: &Graph, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut seeds = Vec::new();
        let mut gamma = None;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let t = line.trim();
            if let Some(comment) = t.strip_prefix('#') {
                gamma = comment
                    .split_whitespace()
                    .find_map(|kv| kv.strip_prefix("gamma="))
                    .and_then(|g| g.parse().ok())
                    .or(gamma);
                continue;
            }
            if t.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let label: u64 = t.parse().map_err(|_| err(format!("invalid node id {t:?}")))?;
            let id = oracle
                .node_with_label(label)
                .ok_or_else(|| err(format!("node {label} not in graph")))?;
            seeds.push(id);
        }
        if seeds.is_empty() {
            return Err(Error::invalid(format!("{} holds no seeds", path.display())));
        }
        Ok(SeedSet { seeds, gamma })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::partial::{partial_graph, PartialView};

    fn whole(g: &Graph) -> PartialGraph {
        PartialGraph::identity(g)
    }

    #[test]
    fn star_center_first() {
        let g = star(5);
        let s = degree_discount_seeds(&whole(&g), 1, 0.01).unwrap();
        assert_eq!(s.seeds, vec![0]);
    }

    #[test]
    fn discount_moves_to_disjoint_edge() {
        // star center 0 with leaves 1..=5, plus edge 6-7
        let mut edges: Vec<_> = (1..=5).map(|v| (0, v)).collect();
        edges.push((6, 7));
        let g = Graph::from_edges(8, edges).unwrap();
        assert_eq!(discounted_degree(1, 1, 0.01), -1.0);
        let s = degree_discount_seeds(&whole(&g), 2, 0.01).unwrap();
        assert_eq!(s.seeds, vec![0, 6]);
    }

    #[test]
    fn exhaustion_selects_everything() {
        let g = path(6);
        let s = degree_discount_seeds(&whole(&g), 6, 0.01).unwrap();
        let mut sorted = s.seeds.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        // interior nodes of degree 2 beat the endpoints
        assert!(g.degree(s.seeds[0]) == 2);
    }

    #[test]
    fn plain_degree_when_no_adjacent_picks() {
        // p = 0 on a graph whose top nodes are non-adjacent: two stars
        let mut edges: Vec<_> = (1..=4).map(|v| (0, v)).collect();
        edges.extend((6..=8).map(|v| (5, v)));
        let g = Graph::from_edges(9, edges).unwrap();
        let s = degree_discount_seeds(&whole(&g), 2, 0.0).unwrap();
        assert_eq!(s.seeds, vec![0, 5]);
    }

    #[test]
    fn updates_touch_only_neighbors() {
        let g = complete(5);
        let (picked, updates) = degree_discount_raw(&g, 3, 0.1).unwrap();
        assert_eq!(picked.len(), 3);
        // first pick updates 4 neighbours, second 3, third 2
        assert_eq!(updates, 4 + 3 + 2);
    }

    #[test]
    fn k_bounds() {
        let g = path(3);
        assert!(matches!(
            degree_discount_seeds(&whole(&g), 4, 0.01),
            Err(Error::NotEnoughNodes { requested: 4, available: 3 })
        ));
        assert!(degree_discount_seeds(&whole(&g), 0, 0.01).is_err());
        assert!(random_seeds(&whole(&g), 0, 1).is_err());
        assert!(random_seeds(&whole(&g), 4, 1).is_err());
    }

    #[test]
    fn random_seeds_are_visible_and_deterministic() {
        let g = path(20);
        let view = PartialView::from_hidden(20, &[0, 3, 5, 7, 11], 0.25).unwrap();
        let p = partial_graph(&g, &view).unwrap();
        let a = random_seeds(&p, 6, 42).unwrap();
        assert_eq!(a, random_seeds(&p, 6, 42).unwrap());
        assert!(a.seeds.iter().all(|&s| !view.is_hidden(s)));
        let mut d = a.seeds.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 6);

        let all = random_seeds(&p, 15, 1).unwrap();
        assert_eq!(all.len(), 15);
    }

    #[test]
    fn seeds_map_back_to_oracle() {
        let g = star(5);
        let view = PartialView::from_hidden(6, &[0], 0.2).unwrap();
        let p = partial_graph(&g, &view).unwrap();
        let s = degree_discount_seeds(&p, 1, 0.01).unwrap();
        // every leaf has degree 0 now; lowest visible oracle id wins
        assert_eq!(s.seeds, vec![1]);
        assert_eq!(s.in_partial(&p), vec![0]);
    }

    #[test]
    fn gamma_conversion() {
        assert_eq!(seed_count(0.0001, 9000), 1);
        assert_eq!(seed_count(0.0001, 15000), 2);
        assert_eq!(seed_count(0.0001, 14999), 1);
        assert_eq!(seed_count(0.01, 5000), 50);
        let g = path(10);
        let s = select_seeds(&whole(&g), SeedStrategy::DegreeDiscount, 0.25, 0.01, 0).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.gamma, Some(0.25));
        assert!(select_seeds(&whole(&g), SeedStrategy::Random, 0.0, 0.01, 0).is_err());
    }

    #[test]
    fn seed_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path_ = dir.path().join("s.seeds");
        let g = Graph::from_labelled_edges(vec![3, 8, 13], [(0, 1), (1, 2)]).unwrap();
        let set = SeedSet {
            seeds: vec![1, 2],
            gamma: Some(0.5),
        };
        set.write(&g, &path_).unwrap();
        let text = std::fs::read_to_string(&path_).unwrap();
        assert!(text.ends_with("8\n13\n"));
        assert_eq!(SeedSet::read(&g, &path_).unwrap(), set);
    }
}
