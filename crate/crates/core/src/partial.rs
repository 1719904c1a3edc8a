//! Hidden-node samples and the visible (partial) network they induce.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::random::rng_from;

/// A set of hidden oracle nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialView {
    hidden: Vec<bool>,
    hidden_count: usize,
    rho: f64,
    sample_id: usize,
}

/// `round-half-up(rho * n)`.
pub fn hidden_count(node_count: usize, rho: f64) -> usize {
    // the epsilon absorbs products like 0.7 * 5 = 3.4999999999999996
    (rho * node_count as f64 + 0.5 + 1e-9).floor() as usize
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::invalid(format!(
            "hidden fraction {rho} must lie in [0, 1)"
        )));
    }
    Ok(())
}

/// Hides exactly `round-half-up(rho * |V|)` nodes chosen uniformly without
/// replacement.
pub fn sample_hidden(g: &Graph, rho: f64, rng_seed: u64) -> Result<PartialView> {
    check_rho(rho)?;
    let n = g.node_count();
    let count = hidden_count(n, rho).min(n);
    let mut hidden = vec![false; n];
    let mut rng = rng_from(rng_seed);
    for i in index::sample(&mut rng, n, count) {
        hidden[i] = true;
    }
    Ok(PartialView {
        hidden,
        hidden_count: count,
        rho,
        sample_id: 0,
    })
}

impl PartialView {
    /// A view with no hidden nodes.
    pub fn empty(node_count: usize) -> Self {
        PartialView {
            hidden: vec![false; node_count],
            hidden_count: 0,
            rho: 0.0,
            sample_id: 0,
        }
    }

    /// Builds a view from explicit hidden ids. `rho` is recorded as given.
    pub fn from_hidden(node_count: usize, hidden_ids: &[NodeId], rho: f64) -> Result<Self> {
        check_rho(rho)?;
        let mut hidden = vec![false; node_count];
        for &h in hidden_ids {
            let slot = hidden.get_mut(h as usize).ok_or(Error::NodeOutOfRange {
                node: h,
                node_count,
            })?;
            *slot = true;
        }
        let hidden_count = hidden.iter().filter(|&&h| h).count();
        Ok(PartialView {
            hidden,
            hidden_count,
            rho,
            sample_id: 0,
        })
    }

    pub fn with_sample_id(mut self, sample_id: usize) -> Self {
        self.sample_id = sample_id;
        self
    }

    #[inline]
    pub fn is_hidden(&self, u: NodeId) -> bool {
        self.hidden[u as usize]
    }

    pub fn mask(&self) -> &[bool] {
        &self.hidden
    }

    pub fn hidden_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.hidden
            .iter()
            .enumerate()
            .filter(|(_, &h)| h)
            .map(|(i, _)| i as NodeId)
    }

    pub fn hidden_count(&self) -> usize {
        self.hidden_count
    }

    pub fn visible_count(&self) -> usize {
        self.hidden.len() - self.hidden_count
    }

    pub fn node_count(&self) -> usize {
        self.hidden.len()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sample_id(&self) -> usize {
        self.sample_id
    }

    /// Writes `rho sample_id` then one hidden node label per line.
    pub fn write(&self, g: &Graph, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.check_graph(g)?;
        let io = |e| Error::io(path, e);
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        writeln!(out, "{} {}", self.rho, self.sample_id).map_err(io)?;
        for h in self.hidden_ids() {
            writeln!(out, "{}", g.label(h)).map_err(io)?;
        }
        out.flush().map_err(io)
    }

    /// Reads a file written by [`PartialView::write`] against graph `g`.
    pub fn read(g: &Graph, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = BufReader::new(file).lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((i, line)) => {
                    let line = line.map_err(|e| Error::io(path, e))?;
                    let t = line.trim().to_string();
                    if !t.is_empty() && !t.starts_with('#') {
                        break (i + 1, t);
                    }
                }
                None => return Err(parse_err(1, "missing `rho sample_id` header".into())),
            }
        };
        let fields: Vec<&str> = header.1.split_whitespace().collect();
        let (rho, sample_id) = match fields.as_slice() {
            [r, s] => (
                r.parse::<f64>()
                    .map_err(|_| parse_err(header.0, format!("invalid rho {r:?}")))?,
                s.parse::<usize>()
                    .map_err(|_| parse_err(header.0, format!("invalid sample id {s:?}")))?,
            ),
            _ => return Err(parse_err(header.0, "expected `rho sample_id`".into())),
        };

        let mut ids = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let label: u64 = t
                .parse()
                .map_err(|_| parse_err(i + 1, format!("invalid node id {t:?}")))?;
            let id = g
                .node_with_label(label)
                .ok_or_else(|| parse_err(i + 1, format!("node {label} not in graph")))?;
            ids.push(id);
        }
        Ok(PartialView::from_hidden(g.node_count(), &ids, rho)?.with_sample_id(sample_id))
    }

    fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.hidden.len() != g.node_count() {
            return Err(Error::ViewMismatch {
                view_nodes: self.hidden.len(),
                graph_nodes: g.node_count(),
            });
        }
        Ok(())
    }
}

/// The visible part of an oracle network.
///
/// Node `i` of `graph` is oracle node `to_oracle[i]`; ids keep the oracle's
/// relative order and labels.
#[derive(Clone, Debug)]
pub struct PartialGraph {
    pub graph: Graph,
    to_oracle: Vec<NodeId>,
    from_oracle: Vec<NodeId>,
}

impl PartialGraph {
    /// The whole oracle seen as its own partial network.
    pub fn identity(g: &Graph) -> Self {
        let ids: Vec<NodeId> = g.nodes().collect();
        PartialGraph {
            graph: g.clone(),
            to_oracle: ids.clone(),
            from_oracle: ids,
        }
    }

    #[inline]
    pub fn to_oracle(&self, u: NodeId) -> NodeId {
        self.to_oracle[u as usize]
    }

    /// Partial id of an oracle node, `None` when it is hidden.
    #[inline]
    pub fn from_oracle(&self, u: NodeId) -> Option<NodeId> {
        match self.from_oracle[u as usize] {
            NodeId::MAX => None,
            id => Some(id),
        }
    }

    pub fn oracle_ids(&self) -> &[NodeId] {
        &self.to_oracle
    }
}

/// Induced subgraph on the visible nodes.
pub fn partial_graph(g: &Graph, view: &PartialView) -> Result<PartialGraph> {
    view.check_graph(g)?;
    let keep: Vec<bool> = view.hidden.iter().map(|&h| !h).collect();
    let (graph, to_oracle) = g.induced_subgraph(&keep)?;
    let mut from_oracle = vec![NodeId::MAX; g.node_count()];
    for (i, &u) in to_oracle.iter().enumerate() {
        from_oracle[u as usize] = i as NodeId;
    }
    Ok(PartialGraph {
        graph,
        to_oracle,
        from_oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use proptest::prelude::*;

    #[test]
    fn hidden_counts() {
        assert_eq!(hidden_count(10, 0.3), 3);
        assert_eq!(hidden_count(16619, 0.5), 8310);
        assert_eq!(hidden_count(5, 0.7), 4);
        assert_eq!(hidden_count(5, 0.1), 1);
        assert_eq!(hidden_count(100, 0.0), 0);
    }

    #[test]
    fn rho_zero_is_identity() {
        let g = complete(5);
        let view = sample_hidden(&g, 0.0, 1).unwrap();
        assert_eq!(view.hidden_count(), 0);
        let p = partial_graph(&g, &view).unwrap();
        assert_eq!(p.graph, g);
    }

    #[test]
    fn exact_hidden_count() {
        let g = path(10);
        let view = sample_hidden(&g, 0.3, 99).unwrap();
        assert_eq!(view.hidden_ids().count(), 3);
        assert_eq!(view.visible_count(), 7);
    }

    #[test]
    fn rejects_full_hiding() {
        assert!(sample_hidden(&path(3), 1.0, 0).is_err());
        assert!(sample_hidden(&path(3), -0.1, 0).is_err());
    }

    #[test]
    fn induced_examples() {
        let tri = complete(3);
        let view = PartialView::from_hidden(3, &[2], 0.3).unwrap();
        let p = partial_graph(&tri, &view).unwrap();
        assert_eq!(p.graph.node_count(), 2);
        assert_eq!(p.graph.edge_count(), 1);
        assert_eq!(p.from_oracle(2), None);

        let view = PartialView::from_hidden(3, &[1], 0.3).unwrap();
        let p = partial_graph(&path(3), &view).unwrap();
        assert_eq!(p.graph.edge_count(), 0);
        assert_eq!(p.oracle_ids(), &[0, 2]);
        assert_eq!(p.from_oracle(2), Some(1));
        assert_eq!(p.to_oracle(1), 2);
    }

    #[test]
    fn size_mismatch() {
        let view = PartialView::empty(4);
        assert!(matches!(
            partial_graph(&path(3), &view),
            Err(Error::ViewMismatch { .. })
        ));
    }

    #[test]
    fn view_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path_ = dir.path().join("v.view");
        let g = Graph::from_labelled_edges(vec![10, 20, 30, 40], [(0, 1), (1, 2), (2, 3)]).unwrap();
        let view = sample_hidden(&g, 0.5, 4).unwrap().with_sample_id(7);
        view.write(&g, &path_).unwrap();
        let text = std::fs::read_to_string(&path_).unwrap();
        assert!(text.starts_with("0.5 7\n"));
        assert_eq!(PartialView::read(&g, &path_).unwrap(), view);
    }

    #[test]
    fn hidden_frequency_is_uniform() {
        // chi-square over node hit counts; 19 dof, 0.999 quantile ~43.8
        let g = path(20);
        let trials = 4000;
        let mut hits = vec![0usize; 20];
        for s in 0..trials {
            for h in sample_hidden(&g, 0.3, s).unwrap().hidden_ids() {
                hits[h as usize] += 1;
            }
        }
        let expected = trials as f64 * 0.3;
        let chi: f64 = hits
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi < 43.8, "chi-square {chi}");
    }

    proptest! {
        #[test]
        fn partial_edges_avoid_hidden(
            n in 2usize..40,
            raw in proptest::collection::vec((0u32..40, 0u32..40), 0..120),
            rho in 0.0f64..0.95,
            seed in any::<u64>(),
        ) {
            let edges: Vec<_> = raw.into_iter()
                .map(|(a, b)| (a % n as u32, b % n as u32))
                .collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let view = sample_hidden(&g, rho, seed).unwrap();
            let p = partial_graph(&g, &view).unwrap();
            prop_assert_eq!(p.graph.node_count() + view.hidden_count(), n);
            prop_assert_eq!(view.hidden_count(), hidden_count(n, rho));
            for (u, v) in p.graph.edges() {
                let (ou, ov) = (p.to_oracle(u), p.to_oracle(v));
                prop_assert!(g.has_edge(ou, ov));
                prop_assert!(!view.is_hidden(ou) && !view.is_hidden(ov));
            }
            let visible_edges = g.edges()
                .filter(|&(u, v)| !view.is_hidden(u) && !view.is_hidden(v))
                .count();
            prop_assert_eq!(p.graph.edge_count(), visible_edges);
        }
    }
}
