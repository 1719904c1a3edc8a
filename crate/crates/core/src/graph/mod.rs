//! Undirected simple graphs in compressed adjacency form.
//!
//! Nodes are dense `0..node_count` ids. Every graph also carries a label per
//! node: the id the node had in its source (edge-list file, generator or
//! oracle network). Labels are what appear in files and what the diffusion
//! engine keys its coin flips on, so the same node keeps the same identity
//! across a graph and any induced subgraph of it.

mod io;
mod topology;

pub use io::{load_edge_list, parse_edge_list, write_edge_list};
pub use topology::{topology_report, TopologyReport};

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Vec<u64>,
}

impl Graph {
    /// Builds a simple graph on `node_count` nodes labelled `0..node_count`.
    /// Self-loops and repeated edges (in either orientation) are dropped.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let labels = (0..node_count as u64).collect();
        Self::from_labelled_edges(labels, edges)
    }

    /// Same as [`Graph::from_edges`] with explicit per-node labels.
    pub fn from_labelled_edges<I>(labels: Vec<u64>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = labels.len();
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node as usize >= n {
                    return Err(Error::NodeOutOfRange {
                        node,
                        node_count: n,
                    });
                }
            }
            if u != v {
                pairs.push((u, v));
                pairs.push((v, u));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        Ok(Graph {
            offsets,
            targets,
            labels,
        })
    }

    /// Builds a graph from per-node neighbour lists, normalising them.
    pub fn from_adjacency(adjacency: Vec<Vec<NodeId>>) -> Result<Self> {
        let n = adjacency.len();
        let edges = adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().map(move |&v| (u as NodeId, v)));
        Self::from_edges(n, edges.collect::<Vec<_>>())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Sorted neighbour ids of `u`.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        let u = u as usize;
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Range of `u`'s neighbours inside the flat adjacency array.
    #[inline]
    pub(crate) fn slot_range(&self, u: NodeId) -> std::ops::Range<usize> {
        self.offsets[u as usize]..self.offsets[u as usize + 1]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u as usize + 1] - self.offsets[u as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        0..self.node_count() as NodeId
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v))
        })
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, u: NodeId) -> u64 {
        self.labels[u as usize]
    }

    /// Dense id of the node carrying `label`, if any.
    pub fn node_with_label(&self, label: u64) -> Option<NodeId> {
        // labels are strictly increasing for every graph this crate builds
        // from files, generators or induced subgraphs
        if self.labels.windows(2).all(|w| w[0] < w[1]) {
            self.labels.binary_search(&label).ok().map(|i| i as NodeId)
        } else {
            self.labels
                .iter()
                .position(|&l| l == label)
                .map(|i| i as NodeId)
        }
    }

    pub fn average_degree(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / self.node_count() as f64
        }
    }

    /// Number of edges among the neighbours of `u`.
    pub fn triangles_at(&self, u: NodeId) -> usize {
        let nbrs = self.neighbors(u);
        let mut count = 0;
        for (i, &v) in nbrs.iter().enumerate() {
            count += sorted_intersection_count(&nbrs[i + 1..], self.neighbors(v));
        }
        count
    }

    /// Local clustering coefficient; nodes of degree below two get zero.
    pub fn local_clustering(&self, u: NodeId) -> f64 {
        let d = self.degree(u);
        if d < 2 {
            return 0.0;
        }
        let possible = d * (d - 1) / 2;
        self.triangles_at(u) as f64 / possible as f64
    }

    /// Checks symmetry, simplicity and sortedness of the adjacency.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for u in self.nodes() {
            let nbrs = self.neighbors(u);
            if !nbrs.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("adjacency of {u} is not strictly sorted"));
            }
            for &v in nbrs {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if !self.has_edge(v, u) {
                    return Err(format!("edge {u}-{v} has no reverse"));
                }
            }
        }
        if self.targets.len() % 2 != 0 {
            return Err("odd adjacency total".into());
        }
        Ok(())
    }

    /// Subgraph induced by the nodes with `keep[u] == true`. Nodes keep
    /// their relative order and labels; the second value maps new ids to
    /// ids in `self`.
    pub fn induced_subgraph(&self, keep: &[bool]) -> Result<(Graph, Vec<NodeId>)> {
        if keep.len() != self.node_count() {
            return Err(Error::ViewMismatch {
                view_nodes: keep.len(),
                graph_nodes: self.node_count(),
            });
        }
        let to_parent: Vec<NodeId> = self.nodes().filter(|&u| keep[u as usize]).collect();
        let mut to_child = vec![NodeId::MAX; self.node_count()];
        for (i, &u) in to_parent.iter().enumerate() {
            to_child[u as usize] = i as NodeId;
        }

        let mut offsets = Vec::with_capacity(to_parent.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &u in &to_parent {
            // parent adjacency is sorted and the id map is monotone, so the
            // filtered list stays sorted
            targets.extend(
                self.neighbors(u)
                    .iter()
                    .map(|&v| to_child[v as usize])
                    .filter(|&v| v != NodeId::MAX),
            );
            offsets.push(targets.len());
        }
        let labels = to_parent.iter().map(|&u| self.label(u)).collect();
        Ok((
            Graph {
                offsets,
                targets,
                labels,
            },
            to_parent,
        ))
    }

    /// Component id per node and the size of every component.
    pub fn connected_components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in self.nodes() {
            if comp[start as usize] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            comp[start as usize] = id;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in self.neighbors(u) {
                    if comp[v as usize] == usize::MAX {
                        comp[v as usize] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        (comp, sizes)
    }

    /// Membership mask of the largest connected component (lowest component
    /// id wins ties).
    pub fn largest_component_mask(&self) -> Vec<bool> {
        let (comp, sizes) = self.connected_components();
        let Some(best) = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
        else {
            return Vec::new();
        };
        comp.iter().map(|&c| c == best).collect()
    }

    pub fn largest_component(&self) -> Graph {
        let mask = self.largest_component_mask();
        self.induced_subgraph(&mask)
            .expect("mask built from this graph")
            .0
    }
}

fn sorted_intersection_count(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn collapses_duplicates_and_loops() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (1, 1), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(Error::NodeOutOfRange { node: 2, .. })
        ));
    }

    #[test]
    fn induced_subgraph_keeps_labels() {
        let g = complete(3);
        let (sub, map) = g.induced_subgraph(&[true, true, false]).unwrap();
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(map, vec![0, 1]);

        let (sub, map) = path(3).induced_subgraph(&[true, false, true]).unwrap();
        assert_eq!(sub.edge_count(), 0);
        assert_eq!(map, vec![0, 2]);
        assert_eq!(sub.labels(), &[0, 2]);
        assert_eq!(sub.node_with_label(2), Some(1));
    }

    #[test]
    fn clustering_of_small_graphs() {
        let g = complete(4);
        for u in g.nodes() {
            assert_eq!(g.local_clustering(u), 1.0);
        }
        let p = path(4);
        assert_eq!(p.local_clustering(1), 0.0);
        assert_eq!(p.local_clustering(0), 0.0);
    }

    #[test]
    fn largest_component() {
        let g = Graph::from_edges(6, [(0, 1), (2, 3), (3, 4)]).unwrap();
        let lcc = g.largest_component();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(lcc.labels(), &[2, 3, 4]);
    }
}
