use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partial::PartialGraph;

/// Transmission probability per edge.
#[derive(Clone, Debug, PartialEq)]
pub enum EdgeProbabilities {
    Uniform(f64),
    /// One value per adjacency slot of a specific graph; symmetric.
    PerEdge(Vec<f64>),
}

/// Per-edge weights keyed by unordered pairs of node labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeWeights(HashMap<(u64, u64), f64>);

impl EdgeWeights {
    pub fn insert(&mut self, a: u64, b: u64, w: f64) {
        self.0.insert((a.min(b), a.max(b)), w);
    }

    pub fn get(&self, a: u64, b: u64) -> Option<f64> {
        self.0.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} not in [0, 1]")));
    }
    Ok(())
}

/// Reads `u v w` lines (labels and a weight in `[0, 1]`).
pub fn read_edge_weights(path: impl AsRef<Path>) -> Result<EdgeWeights> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut weights = EdgeWeights::default();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = t.split_whitespace().collect();
        let [a, b, w] = fields.as_slice() else {
            return Err(err(format!("expected `u v weight`, found {t:?}")));
        };
        let a: u64 = a.parse().map_err(|_| err(format!("invalid node id {a:?}")))?;
        let b: u64 = b.parse().map_err(|_| err(format!("invalid node id {b:?}")))?;
        let w: f64 = w.parse().map_err(|_| err(format!("invalid weight {w:?}")))?;
        if !(0.0..=1.0).contains(&w) {
            return Err(err(format!("weight {w} not in [0, 1]")));
        }
        weights.insert(a, b, w);
    }
    Ok(weights)
}

impl EdgeProbabilities {
    pub fn uniform(p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(EdgeProbabilities::Uniform(p))
    }

    /// Weights for the edges of `g` that have one, `default` elsewhere.
    pub fn weighted(g: &Graph, weights: &EdgeWeights, default: f64) -> Result<Self> {
        check_probability(default)?;
        let mut slots = Vec::with_capacity(2 * g.edge_count());
        for u in g.nodes() {
            for &v in g.neighbors(u) {
                let w = weights.get(g.label(u), g.label(v)).unwrap_or(default);
                check_probability(w)?;
                slots.push(w);
            }
        }
        Ok(EdgeProbabilities::PerEdge(slots))
    }

    #[inline]
    pub(crate) fn at_slot(&self, slot: usize) -> f64 {
        match self {
            EdgeProbabilities::Uniform(p) => *p,
            EdgeProbabilities::PerEdge(slots) => slots[slot],
        }
    }

    /// Probability on edge `u - v` of `g`.
    pub fn between(&self, g: &Graph, u: u32, v: u32) -> Option<f64> {
        let idx = g.neighbors(u).binary_search(&v).ok()?;
        Some(self.at_slot(g.slot_range(u).start + idx))
    }

    /// The same probabilities seen from the partial network of `oracle`.
    pub fn restricted(&self, oracle: &Graph, partial: &PartialGraph) -> Self {
        match self {
            EdgeProbabilities::Uniform(p) => EdgeProbabilities::Uniform(*p),
            EdgeProbabilities::PerEdge(_) => {
                let g = &partial.graph;
                let mut slots = Vec::with_capacity(2 * g.edge_count());
                for u in g.nodes() {
                    for &v in g.neighbors(u) {
                        let p = self
                            .between(oracle, partial.to_oracle(u), partial.to_oracle(v))
                            .expect("partial edges exist in the oracle");
                        slots.push(p);
                    }
                }
                EdgeProbabilities::PerEdge(slots)
            }
        }
    }

    pub(crate) fn check_graph(&self, g: &Graph) -> Result<()> {
        match self {
            EdgeProbabilities::Uniform(p) => check_probability(*p),
            EdgeProbabilities::PerEdge(slots) if slots.len() == 2 * g.edge_count() => Ok(()),
            EdgeProbabilities::PerEdge(slots) => Err(Error::invalid(format!(
                "{} edge probabilities for a graph with {} adjacency slots",
                slots.len(),
                2 * g.edge_count()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::path;
    use crate::partial::{partial_graph, PartialView};

    #[test]
    fn weights_are_symmetric() {
        let g = path(4);
        let mut w = EdgeWeights::default();
        w.insert(2, 1, 0.7);
        let probs = EdgeProbabilities::weighted(&g, &w, 0.1).unwrap();
        assert_eq!(probs.between(&g, 1, 2), Some(0.7));
        assert_eq!(probs.between(&g, 2, 1), Some(0.7));
        assert_eq!(probs.between(&g, 0, 1), Some(0.1));
        assert_eq!(probs.between(&g, 0, 2), None);
    }

    #[test]
    fn restriction_follows_labels() {
        let g = path(4);
        let mut w = EdgeWeights::default();
        w.insert(2, 3, 0.9);
        let probs = EdgeProbabilities::weighted(&g, &w, 0.1).unwrap();
        let view = PartialView::from_hidden(4, &[0], 0.25).unwrap();
        let p = partial_graph(&g, &view).unwrap();
        let r = probs.restricted(&g, &p);
        r.check_graph(&p.graph).unwrap();
        assert_eq!(r.between(&p.graph, 1, 2), Some(0.9));
        assert_eq!(r.between(&p.graph, 0, 1), Some(0.1));
    }

    #[test]
    fn invalid_probabilities() {
        assert!(EdgeProbabilities::uniform(1.1).is_err());
        let g = path(3);
        let mut w = EdgeWeights::default();
        w.insert(0, 1, -0.5);
        assert!(EdgeProbabilities::weighted(&g, &w, 0.1).is_err());
        assert!(EdgeProbabilities::PerEdge(vec![0.1]).check_graph(&g).is_err());
    }

    #[test]
    fn weight_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.txt");
        std::fs::write(&p, "# u v w\n0 1 0.25\n2 1 1\n").unwrap();
        let w = read_edge_weights(&p).unwrap();
        assert_eq!(w.get(1, 0), Some(0.25));
        assert_eq!(w.get(1, 2), Some(1.0));
        std::fs::write(&p, "0 1 2.0\n").unwrap();
        assert!(matches!(read_edge_weights(&p), Err(Error::Parse { line: 1, .. })));
    }
}
