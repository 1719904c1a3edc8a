//! Synthetic oracle networks.

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::random::rng_from;

/// G(n, p) with geometric skips between present pairs, so the cost is
/// proportional to `n + |E|` rather than `n^2`.
pub fn erdos_renyi(n: usize, p_edge: f64, rng_seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("erdos_renyi needs at least one node"));
    }
    if !(0.0..=1.0).contains(&p_edge) {
        return Err(Error::invalid(format!("edge probability {p_edge} not in [0, 1]")));
    }
    if n > NodeId::MAX as usize {
        return Err(Error::invalid("too many nodes for 32-bit ids"));
    }
    if p_edge == 0.0 {
        return Graph::from_edges(n, []);
    }

    let mut rng = rng_from(rng_seed);
    let skip = Geometric::new(p_edge).map_err(|e| Error::invalid(e.to_string()))?;
    let expected = (n as f64) * (n as f64 - 1.0) / 2.0 * p_edge;
    let mut edges = Vec::with_capacity((expected * 1.05) as usize + 16);

    // walk the lower triangle (v, w) with w < v in row-major order
    let n = n as i128;
    let mut v: i128 = 1;
    let mut w: i128 = -1;
    loop {
        w += 1 + skip.sample(&mut rng) as i128;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v >= n {
            break;
        }
        edges.push((v as NodeId, w as NodeId));
    }
    Graph::from_edges(n as usize, edges)
}

/// Parameters of the social-network growth model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToshkParams {
    /// Final node count.
    pub n: usize,
    /// Probability of linking to each neighbour of an initial contact.
    pub p_neighbor: f64,
    /// Average degree the growth is steered towards.
    pub k_target: f64,
}

impl ToshkParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!("toshk needs n >= 2, got {}", self.n)));
        }
        if self.n > NodeId::MAX as usize {
            return Err(Error::invalid("too many nodes for 32-bit ids"));
        }
        if !(0.0..=1.0).contains(&self.p_neighbor) {
            return Err(Error::invalid(format!(
                "p_neighbor {} not in [0, 1]",
                self.p_neighbor
            )));
        }
        if !(self.k_target > 0.0) {
            return Err(Error::invalid("k_target must be positive"));
        }
        if self.k_target >= self.n as f64 {
            return Err(Error::invalid(format!(
                "average degree {} unreachable with {} nodes",
                self.k_target, self.n
            )));
        }
        Ok(())
    }

    /// Size of the initial clique.
    pub fn seed_clique_size(&self) -> usize {
        ((self.k_target / 2.0).ceil() as usize + 1).min(self.n)
    }

    /// Probability that an arrival draws one initial contact rather than two.
    ///
    /// An arrival with `m` contacts expects `m * (1 + p_neighbor * k)` links
    /// before capping; `q` is the smallest single-contact share for which
    /// that reaches the per-arrival budget of `k / 2` links.
    pub fn single_contact_probability(&self) -> f64 {
        let per_contact = 1.0 + self.p_neighbor * self.k_target;
        (2.0 - (self.k_target / 2.0) / per_contact).clamp(0.0, 1.0)
    }
}

/// Grows a network node by node.
///
/// Starting from a clique, each arrival picks one or two uniformly random
/// initial contacts, then walks the union of their neighbourhoods in random
/// order, linking to each candidate with probability `p_neighbor`. The total
/// number of links per arrival is capped by a budget whose mean is
/// `k_target / 2`, which keeps the average degree near `k_target`. Triadic
/// closure through the contacts gives high clustering.
pub fn toshk(params: ToshkParams, rng_seed: u64) -> Result<Graph> {
    params.validate()?;
    let mut rng = rng_from(rng_seed);
    let n = params.n;
    let q = params.single_contact_probability();
    let half = params.k_target / 2.0;
    let (base_budget, extra_budget) = (half.floor() as usize, half.fract());

    let mut adjacency: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    let clique = params.seed_clique_size();
    for u in 0..clique {
        adjacency.push((0..clique as NodeId).filter(|&v| v as usize != u).collect());
    }

    let mut seen = vec![false; n];
    let mut candidates: Vec<NodeId> = Vec::new();
    for new in clique..n {
        let new_id = new as NodeId;
        let wanted = if rng.random_bool(q) { 1 } else { 2 };
        let contact_count = wanted.min(new);
        let contacts: Vec<NodeId> = index::sample(&mut rng, new, contact_count)
            .into_iter()
            .map(|i| i as NodeId)
            .collect();
        let budget = base_budget + usize::from(rng.random_bool(extra_budget));

        for &c in &contacts {
            seen[c as usize] = true;
        }
        candidates.clear();
        for &c in &contacts {
            for &nb in &adjacency[c as usize] {
                if !seen[nb as usize] {
                    seen[nb as usize] = true;
                    candidates.push(nb);
                }
            }
        }
        for &c in contacts.iter().chain(candidates.iter()) {
            seen[c as usize] = false;
        }
        candidates.sort_unstable();
        candidates.shuffle(&mut rng);

        let mut links = contacts.clone();
        let secondary_cap = budget.saturating_sub(links.len());
        let mut secondary = 0;
        for &cand in &candidates {
            if secondary >= secondary_cap {
                break;
            }
            if rng.random_bool(params.p_neighbor) {
                links.push(cand);
                secondary += 1;
            }
        }

        for &v in &links {
            adjacency[v as usize].push(new_id);
        }
        adjacency.push(links);
    }
    Graph::from_adjacency(adjacency)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::topology_report;

    #[test]
    fn er_extremes() {
        let g = erdos_renyi(3, 1.0, 9).unwrap();
        assert_eq!(g.edge_count(), 3);
        let g = erdos_renyi(5, 0.0, 9).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (5, 0));
        let g = erdos_renyi(40, 1.0, 1).unwrap();
        assert_eq!(g.edge_count(), 40 * 39 / 2);
        g.check_invariants().unwrap();
    }

    #[test]
    fn er_rejects_bad_input() {
        assert!(erdos_renyi(0, 0.5, 0).is_err());
        assert!(erdos_renyi(10, 1.5, 0).is_err());
        assert!(erdos_renyi(10, -0.1, 0).is_err());
    }

    #[test]
    fn er_edge_count_matches_binomial_mean() {
        // n = 2000, p = 0.003: mean 5997.0, sd ~77.3
        let (n, p) = (2000usize, 0.003);
        let pairs = (n * (n - 1) / 2) as f64;
        let (mean, sd) = (pairs * p, (pairs * p * (1.0 - p)).sqrt());
        let seeds = 20;
        let total: usize = (0..seeds)
            .map(|s| erdos_renyi(n, p, s).unwrap().edge_count())
            .sum();
        let avg = total as f64 / seeds as f64;
        assert!((avg - mean).abs() < 4.0 * sd / (seeds as f64).sqrt(), "avg {avg}");
    }

    #[test]
    fn er_pairs_are_uniform() {
        // every pair of a 6-node graph should appear with frequency p
        let (n, p, trials) = (6usize, 0.3, 4000u64);
        let mut counts = vec![0usize; n * n];
        for s in 0..trials {
            for (u, v) in erdos_renyi(n, p, s).unwrap().edges() {
                counts[u as usize * n + v as usize] += 1;
            }
        }
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        for u in 0..n {
            for v in u + 1..n {
                let c = counts[u * n + v] as f64;
                assert!((c - trials as f64 * p).abs() < 4.5 * sd, "pair {u}-{v}: {c}");
            }
        }
    }

    #[test]
    fn toshk_tree_when_no_secondary_links() {
        let params = ToshkParams {
            n: 4,
            p_neighbor: 0.0,
            k_target: 2.0,
        };
        assert_eq!(params.single_contact_probability(), 1.0);
        for seed in 0..20 {
            let g = toshk(params, seed).unwrap();
            assert_eq!(g.node_count(), 4);
            assert_eq!(g.edge_count(), 3);
            let (_, sizes) = g.connected_components();
            assert_eq!(sizes, vec![4]);
        }
    }

    #[test]
    fn toshk_validation() {
        let ok = ToshkParams {
            n: 10,
            p_neighbor: 0.5,
            k_target: 4.0,
        };
        assert!(toshk(ToshkParams { n: 1, ..ok }, 0).is_err());
        assert!(toshk(ToshkParams { k_target: 10.0, ..ok }, 0).is_err());
        assert!(toshk(ToshkParams { p_neighbor: 1.2, ..ok }, 0).is_err());
        assert!(toshk(ToshkParams { k_target: 0.0, ..ok }, 0).is_err());
    }

    #[test]
    fn toshk_is_deterministic_and_simple() {
        let params = ToshkParams {
            n: 500,
            p_neighbor: 0.9,
            k_target: 10.0,
        };
        let a = toshk(params, 5).unwrap();
        assert_eq!(a, toshk(params, 5).unwrap());
        assert_ne!(a, toshk(params, 6).unwrap());
        a.check_invariants().unwrap();
    }

    #[test]
    fn toshk_reaches_target_regime() {
        let params = ToshkParams {
            n: 10_000,
            p_neighbor: 0.9,
            k_target: 22.0,
        };
        for seed in 0..5 {
            let g = toshk(params, seed).unwrap();
            let r = topology_report(&g, Some(50), seed).unwrap();
            assert!(r.avg_clustering > 0.3, "clustering {}", r.avg_clustering);
            assert!(
                (r.avg_degree - 22.0).abs() < 0.2 * 22.0,
                "degree {}",
                r.avg_degree
            );
        }
    }
}
