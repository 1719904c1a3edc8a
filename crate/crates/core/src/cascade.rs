//! Decomposition of oracle cascades into observed, phantom and hidden parts,
//! plus shape and per-depth statistics.

use crate::diffusion::DiffusionTrace;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partial::PartialView;

/// How a visible node with several parents inherits observedness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Attribution {
    /// Mean of the parents' observed fractions; hidden parents count as 0.
    #[default]
    Fractional,
    /// Observed only if every parent is fully observed.
    AnyHiddenAncestor,
}

impl std::str::FromStr for Attribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fractional" => Ok(Attribution::Fractional),
            "any-hidden" => Ok(Attribution::AnyHiddenAncestor),
            other => Err(Error::invalid(format!("unknown attribution rule {other:?}"))),
        }
    }
}

impl std::fmt::Display for Attribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Attribution::Fractional => "fractional",
            Attribution::AnyHiddenAncestor => "any-hidden",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub new_activations: usize,
    /// Observed mass among this step's activations over their count.
    pub observed_fraction_new: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CascadeDecomposition {
    pub sigma: f64,
    pub sigma_o: f64,
    pub sigma_ph: f64,
    pub sigma_h: f64,
    pub per_step: Vec<StepRecord>,
    /// Observed mass activated at steps 0 and 1 over `sigma`.
    pub first_hop_observed_fraction: f64,
}

fn check(trace: &DiffusionTrace, view: &PartialView) -> Result<()> {
    if trace.graph_node_count() != view.node_count() {
        return Err(Error::TraceMismatch(format!(
            "trace from a {}-node graph, view over {} nodes",
            trace.graph_node_count(),
            view.node_count()
        )));
    }
    Ok(())
}

/// Observed fraction `f_o` of every activated node, indexed like
/// [`DiffusionTrace::activated`].
pub fn observed_fractions(
    trace: &DiffusionTrace,
    view: &PartialView,
    rule: Attribution,
) -> Result<Vec<f64>> {
    check(trace, view)?;
    let nodes = trace.activated();
    let mut f = Vec::with_capacity(nodes.len());
    for t in 0..trace.level_count() {
        for pos in trace.level_range(t) {
            let value = if view.is_hidden(nodes[pos]) {
                0.0
            } else if t == 0 {
                1.0
            } else {
                let parents = trace.parent_positions(pos);
                match rule {
                    Attribution::Fractional => {
                        parents.iter().map(|&q| f[q as usize]).sum::<f64>() / parents.len() as f64
                    }
                    Attribution::AnyHiddenAncestor => {
                        if parents.iter().all(|&q| f[q as usize] == 1.0) {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            };
            f.push(value);
        }
    }
    Ok(f)
}

/// Splits an oracle trace into observed, phantom and hidden mass.
pub fn decompose(trace: &DiffusionTrace, view: &PartialView) -> Result<CascadeDecomposition> {
    decompose_with(trace, view, Attribution::Fractional)
}

pub fn decompose_with(
    trace: &DiffusionTrace,
    view: &PartialView,
    rule: Attribution,
) -> Result<CascadeDecomposition> {
    let f = observed_fractions(trace, view, rule)?;
    let nodes = trace.activated();
    let (mut sigma_o, mut sigma_ph, mut sigma_h) = (0.0, 0.0, 0.0);
    let mut per_step = Vec::with_capacity(trace.level_count());
    let mut first_hop = 0.0;
    for t in 0..trace.level_count() {
        let range = trace.level_range(t);
        let mut observed = 0.0;
        for pos in range.clone() {
            if view.is_hidden(nodes[pos]) {
                sigma_h += 1.0;
            } else {
                observed += f[pos];
                sigma_ph += 1.0 - f[pos];
            }
        }
        sigma_o += observed;
        if t <= 1 {
            first_hop += observed;
        }
        if !range.is_empty() {
            per_step.push(StepRecord {
                step: t,
                new_activations: range.len(),
                observed_fraction_new: observed / range.len() as f64,
            });
        }
    }
    let sigma = nodes.len() as f64;
    Ok(CascadeDecomposition {
        sigma,
        sigma_o,
        sigma_ph,
        sigma_h,
        per_step,
        first_hop_observed_fraction: if sigma > 0.0 { first_hop / sigma } else { 0.0 },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapePoint {
    pub step: usize,
    pub mean_new_activations: f64,
    /// Traces that reached this step.
    pub trace_count: usize,
}

/// Running per-step mean of new activations. A trace contributes to step
/// `t` only if its horizon reaches `t`.
#[derive(Clone, Debug, Default)]
pub struct ShapeAccumulator {
    sums: Vec<u64>,
    counts: Vec<usize>,
}

impl ShapeAccumulator {
    pub fn add(&mut self, level_sizes: &[usize]) {
        if self.sums.len() < level_sizes.len() {
            self.sums.resize(level_sizes.len(), 0);
            self.counts.resize(level_sizes.len(), 0);
        }
        for (t, &s) in level_sizes.iter().enumerate() {
            self.sums[t] += s as u64;
            self.counts[t] += 1;
        }
    }

    pub fn merge(&mut self, other: &ShapeAccumulator) {
        if self.sums.len() < other.sums.len() {
            self.sums.resize(other.sums.len(), 0);
            self.counts.resize(other.sums.len(), 0);
        }
        for t in 0..other.sums.len() {
            self.sums[t] += other.sums[t];
            self.counts[t] += other.counts[t];
        }
    }

    pub fn finish(&self) -> Vec<ShapePoint> {
        self.sums
            .iter()
            .zip(&self.counts)
            .enumerate()
            .map(|(step, (&s, &c))| ShapePoint {
                step,
                mean_new_activations: s as f64 / c as f64,
                trace_count: c,
            })
            .collect()
    }
}

pub fn shape_histogram(traces: &[DiffusionTrace]) -> Result<Vec<ShapePoint>> {
    if traces.is_empty() {
        return Err(Error::invalid("shape histogram needs at least one trace"));
    }
    let mut acc = ShapeAccumulator::default();
    for t in traces {
        acc.add(&t.level_sizes());
    }
    Ok(acc.finish())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelPoint {
    pub step: usize,
    pub mean_clustering: f64,
    pub mean_degree: f64,
    pub count: usize,
}

/// Pooled clustering and degree of newly activated nodes per step.
#[derive(Clone, Debug, Default)]
pub struct LevelAccumulator {
    clustering: Vec<f64>,
    degree: Vec<u64>,
    count: Vec<usize>,
}

impl LevelAccumulator {
    /// `clustering[u]` must be the local clustering of node `u` in `g`.
    pub fn add(&mut self, trace: &DiffusionTrace, g: &Graph, clustering: &[f64]) {
        let levels = trace.level_count();
        if self.count.len() < levels {
            self.clustering.resize(levels, 0.0);
            self.degree.resize(levels, 0);
            self.count.resize(levels, 0);
        }
        for t in 0..levels {
            for &u in trace.level(t) {
                self.clustering[t] += clustering[u as usize];
                self.degree[t] += g.degree(u) as u64;
                self.count[t] += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &LevelAccumulator) {
        let n = other.count.len();
        if self.count.len() < n {
            self.clustering.resize(n, 0.0);
            self.degree.resize(n, 0);
            self.count.resize(n, 0);
        }
        for t in 0..n {
            self.clustering[t] += other.clustering[t];
            self.degree[t] += other.degree[t];
            self.count[t] += other.count[t];
        }
    }

    pub fn finish(&self) -> Vec<LevelPoint> {
        (0..self.count.len())
            .filter(|&t| self.count[t] > 0)
            .map(|t| LevelPoint {
                step: t,
                mean_clustering: self.clustering[t] / self.count[t] as f64,
                mean_degree: self.degree[t] as f64 / self.count[t] as f64,
                count: self.count[t],
            })
            .collect()
    }
}

/// Per-step mean clustering and degree (in `g`) of a single trace.
pub fn level_stats(trace: &DiffusionTrace, g: &Graph) -> Vec<LevelPoint> {
    let mut clustering = vec![0.0; g.node_count()];
    for &u in trace.activated() {
        clustering[u as usize] = g.local_clustering(u);
    }
    let mut acc = LevelAccumulator::default();
    acc.add(trace, g, &clustering);
    acc.finish()
}
