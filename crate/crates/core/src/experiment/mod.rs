//! The two-scenario protocol: for every `(rho, gamma)` pair, draw `v`
//! hidden-node samples; on each, pick seeds on the partial network and run
//! `r` diffusions on the oracle and `r` on the partial network from the same
//! seeds.
//!
//! Every random stream is derived from the master seed and the position of
//! the unit it feeds, and all parallel results are gathered in a fixed order
//! before any floating-point reduction, so outputs do not depend on the
//! number of workers.
//!
//! Oracle and partial runs with the same run id share one coin seed. The
//! coins are keyed by node labels, so the partial run sees exactly the coins
//! of the oracle run restricted to visible edges.

mod config;
mod output;

pub use config::{ExperimentConfig, GraphSource};
pub use output::{export_csv, CSV_FILES};

use rayon::prelude::*;

use crate::cascade::{
    decompose_with, Attribution, LevelAccumulator, LevelPoint, ShapeAccumulator, ShapePoint,
};
use crate::correction::{
    correction_error, partial_estimate, rece, sice, CorrectionMethod, PartialCascadeProfile,
};
use crate::diffusion::{read_edge_weights, DiffusionTrace, EdgeProbabilities, IcmSimulator};
use crate::error::{Error, Result};
use crate::generators::{erdos_renyi, toshk};
use crate::graph::{load_edge_list, Graph};
use crate::metrics::{convergence_zscores, mean_ci95, relative_error, MeanCi, SampleSummary};
use crate::partial::{partial_graph, sample_hidden, PartialGraph, PartialView};
use crate::random::derive_seed;
use crate::seeding::{select_seeds, SeedSet, SeedStrategy};

const VIEW_STREAM: u64 = 1;
const SEED_STREAM: u64 = 2;
const RUN_STREAM: u64 = 3;

/// Methods evaluated for every sample, in output order.
pub const CORRECTION_METHODS: [CorrectionMethod; 4] = [
    CorrectionMethod::Partial,
    CorrectionMethod::Sice,
    CorrectionMethod::SiceLiteral,
    CorrectionMethod::Rece,
];

/// Seed of the hidden-node sample `sample_id` at fraction `rho`. Views do
/// not depend on gamma, so seed sizes are compared on the same samples.
pub fn view_seed(master: u64, rho: f64, sample_id: usize) -> u64 {
    derive_seed(master, &[VIEW_STREAM, rho.to_bits(), sample_id as u64])
}

/// Seed for random seed selection.
pub fn seeding_seed(master: u64, rho: f64, gamma: f64, sample_id: usize) -> u64 {
    derive_seed(
        master,
        &[SEED_STREAM, rho.to_bits(), gamma.to_bits(), sample_id as u64],
    )
}

/// Coin seed shared by the oracle and partial runs `run_id` of a sample.
pub fn run_seed(master: u64, rho: f64, gamma: f64, sample_id: usize, run_id: usize) -> u64 {
    derive_seed(
        master,
        &[
            RUN_STREAM,
            rho.to_bits(),
            gamma.to_bits(),
            sample_id as u64,
            run_id as u64,
        ],
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionRow {
    pub sample_id: usize,
    pub method: CorrectionMethod,
    /// Mean estimate over the sample's runs.
    pub sigma_hat: f64,
    /// `|E(sigma) - sigma_hat| / E(sigma)`.
    pub abs_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergencePoint {
    pub r: usize,
    pub mean_z: f64,
    pub sd_z: f64,
    pub mean_abs_z: f64,
}

/// Traces kept for debugging.
#[derive(Clone, Debug)]
pub struct KeptTrace {
    pub sample_id: usize,
    pub run_id: usize,
    pub oracle: DiffusionTrace,
    pub partial: DiffusionTrace,
    /// Partial id to oracle id.
    pub partial_ids: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct ConfigResult {
    pub rho: f64,
    pub gamma: f64,
    pub seed_count: usize,
    pub samples: Vec<SampleSummary>,
    pub relative_error: MeanCi,
    pub corrections: Vec<CorrectionRow>,
    pub shape: Vec<ShapePoint>,
    pub levels: Vec<LevelPoint>,
    pub convergence: Vec<ConvergencePoint>,
    /// Mean first-hop observed fraction per sample.
    pub first_hop: Vec<f64>,
    /// Oracle cascade size of every run, per sample.
    pub run_sigmas: Vec<Vec<f64>>,
    pub traces: Vec<KeptTrace>,
}

impl ConfigResult {
    /// Mean over samples of the absolute relative correction error.
    pub fn mean_correction_error(&self, method: CorrectionMethod) -> MeanCi {
        let errors: Vec<f64> = self
            .corrections
            .iter()
            .filter(|c| c.method == method)
            .map(|c| c.abs_rel_error)
            .collect();
        mean_ci95(&errors)
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub configs: Vec<ConfigResult>,
    pub v: usize,
    pub r: usize,
    pub p: f64,
    pub master_seed: u64,
    pub attribution: Attribution,
    pub seed_strategy: SeedStrategy,
    pub oracle_nodes: usize,
    pub oracle_edges: usize,
}

impl ExperimentResult {
    pub fn config(&self, rho: f64, gamma: f64) -> Option<&ConfigResult> {
        self.configs
            .iter()
            .find(|c| c.rho == rho && c.gamma == gamma)
    }
}

/// Everything a single (oracle, partial) run pair reduces to.
struct RunRecord {
    sigma: f64,
    sigma_o: f64,
    sigma_ph: f64,
    sigma_h: f64,
    sigma_p: f64,
    first_hop: f64,
    level_sizes: Vec<usize>,
    levels: LevelAccumulator,
    estimates: [f64; CORRECTION_METHODS.len()],
    kept: Option<(DiffusionTrace, DiffusionTrace)>,
}

struct SampleOutcome {
    summary: SampleSummary,
    corrections: Vec<CorrectionRow>,
    first_hop: f64,
    shape: ShapeAccumulator,
    levels: LevelAccumulator,
    run_sigmas: Vec<f64>,
    zscores: Option<Vec<f64>>,
    traces: Vec<KeptTrace>,
}

/// Loads or generates the oracle network described by `cfg`.
pub fn build_graph(cfg: &ExperimentConfig) -> Result<Graph> {
    let g = match cfg
        .graph
        .as_ref()
        .ok_or_else(|| Error::invalid("no graph source configured"))?
    {
        GraphSource::File(path) => load_edge_list(path)?,
        GraphSource::ErdosRenyi { n, p_edge, seed } => erdos_renyi(*n, *p_edge, *seed)?,
        GraphSource::Toshk { params, seed } => toshk(*params, *seed)?,
    };
    Ok(if cfg.largest_component {
        g.largest_component()
    } else {
        g
    })
}

/// Builds the graph and runs the full protocol.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let g = build_graph(cfg)?;
    let probs = match &cfg.weights {
        Some(path) => EdgeProbabilities::weighted(&g, &read_edge_weights(path)?, cfg.p)?,
        None => EdgeProbabilities::uniform(cfg.p)?,
    };
    run_on_graph(&g, &probs, cfg)
}

/// Runs the protocol on an already built oracle network. The graph source
/// in `cfg` is ignored.
pub fn run_on_graph(
    g: &Graph,
    probs: &EdgeProbabilities,
    cfg: &ExperimentConfig,
) -> Result<ExperimentResult> {
    let mut checked = cfg.clone();
    if checked.graph.is_none() {
        checked.graph = Some(GraphSource::File(Default::default()));
    }
    checked.validate()?;
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_all(g, probs, cfg))
}

fn run_all(g: &Graph, probs: &EdgeProbabilities, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let clustering: Vec<f64> = (0..g.node_count() as u32)
        .into_par_iter()
        .map(|u| g.local_clustering(u))
        .collect();

    let mut configs = Vec::with_capacity(cfg.rho_list.len() * cfg.gamma_list.len());
    for &rho in &cfg.rho_list {
        // outcomes[sample][gamma]
        let outcomes: Vec<Vec<SampleOutcome>> = (0..cfg.v)
            .into_par_iter()
            .map(|sample_id| run_sample(g, probs, cfg, &clustering, rho, sample_id))
            .collect::<Result<_>>()?;

        for (gi, &gamma) in cfg.gamma_list.iter().enumerate() {
            let per_sample: Vec<&SampleOutcome> = outcomes.iter().map(|o| &o[gi]).collect();
            configs.push(aggregate(rho, gamma, g, cfg, &per_sample)?);
        }
    }

    Ok(ExperimentResult {
        configs,
        v: cfg.v,
        r: cfg.r,
        p: cfg.p,
        master_seed: cfg.master_seed,
        attribution: cfg.attribution,
        seed_strategy: cfg.seed_strategy,
        oracle_nodes: g.node_count(),
        oracle_edges: g.edge_count(),
    })
}

fn run_sample(
    g: &Graph,
    probs: &EdgeProbabilities,
    cfg: &ExperimentConfig,
    clustering: &[f64],
    rho: f64,
    sample_id: usize,
) -> Result<Vec<SampleOutcome>> {
    let view = sample_hidden(g, rho, view_seed(cfg.master_seed, rho, sample_id))?.with_sample_id(sample_id);
    let partial = partial_graph(g, &view)?;
    let partial_probs = probs.restricted(g, &partial);

    cfg.gamma_list
        .iter()
        .map(|&gamma| {
            let seeds = select_seeds(
                &partial,
                cfg.seed_strategy,
                gamma,
                cfg.p,
                seeding_seed(cfg.master_seed, rho, gamma, sample_id),
            )?;
            run_runs(
                g,
                probs,
                &partial,
                &partial_probs,
                &view,
                &seeds,
                cfg,
                clustering,
                gamma,
            )
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run_runs(
    g: &Graph,
    probs: &EdgeProbabilities,
    partial: &PartialGraph,
    partial_probs: &EdgeProbabilities,
    view: &PartialView,
    seeds: &SeedSet,
    cfg: &ExperimentConfig,
    clustering: &[f64],
    gamma: f64,
) -> Result<SampleOutcome> {
    let rho = view.rho();
    let sample_id = view.sample_id();
    let oracle_seeds = seeds.seeds.clone();
    let partial_seeds = seeds.in_partial(partial);

    let records: Vec<RunRecord> = (0..cfg.r)
        .into_par_iter()
        .map_init(
            || {
                (
                    IcmSimulator::new(g, probs),
                    IcmSimulator::new(&partial.graph, partial_probs),
                )
            },
            |(oracle_sim, partial_sim), run_id| -> Result<RunRecord> {
                let (oracle_sim, partial_sim) = match (oracle_sim, partial_sim) {
                    (Ok(o), Ok(p)) => (o, p),
                    (Err(e), _) | (_, Err(e)) => return Err(Error::invalid(e.to_string())),
                };
                let coin_seed = run_seed(cfg.master_seed, rho, gamma, sample_id, run_id);
                let oracle = oracle_sim.run(&oracle_seeds, coin_seed)?;
                let partial_trace = partial_sim.run(&partial_seeds, coin_seed)?;

                let d = decompose_with(&oracle, view, cfg.attribution)?;
                let profile = PartialCascadeProfile::from_trace(&partial_trace, &partial.graph, rho, cfg.p);
                let estimates = [
                    partial_estimate(&profile)?.sigma_hat,
                    sice(&profile, false)?.sigma_hat,
                    sice(&profile, true)?.sigma_hat,
                    rece(&profile)?.sigma_hat,
                ];
                let mut levels = LevelAccumulator::default();
                levels.add(&oracle, g, clustering);
                let level_sizes = oracle.level_sizes();
                Ok(RunRecord {
                    sigma: d.sigma,
                    sigma_o: d.sigma_o,
                    sigma_ph: d.sigma_ph,
                    sigma_h: d.sigma_h,
                    sigma_p: partial_trace.size() as f64,
                    first_hop: d.first_hop_observed_fraction,
                    level_sizes,
                    levels,
                    estimates,
                    kept: cfg.keep_traces.then_some((oracle, partial_trace)),
                })
            },
        )
        .collect::<Result<_>>()?;

    let r = records.len() as f64;
    let mean = |f: &dyn Fn(&RunRecord) -> f64| records.iter().map(f).sum::<f64>() / r;
    let summary = SampleSummary {
        sample_id,
        rho,
        gamma,
        mean_sigma: mean(&|x| x.sigma),
        mean_sigma_o: mean(&|x| x.sigma_o),
        mean_sigma_ph: mean(&|x| x.sigma_ph),
        mean_sigma_h: mean(&|x| x.sigma_h),
        mean_sigma_p: mean(&|x| x.sigma_p),
        run_count: records.len(),
    };
    let corrections = CORRECTION_METHODS
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let sigma_hat = mean(&|x| x.estimates[k]);
            Ok(CorrectionRow {
                sample_id,
                method,
                sigma_hat,
                abs_rel_error: correction_error(summary.mean_sigma, sigma_hat)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut shape = ShapeAccumulator::default();
    let mut levels = LevelAccumulator::default();
    for rec in &records {
        shape.add(&rec.level_sizes);
        levels.merge(&rec.levels);
    }
    let run_sigmas: Vec<f64> = records.iter().map(|x| x.sigma).collect();
    let zscores = if run_sigmas.len() >= 2 {
        Some(convergence_zscores(&run_sigmas, run_sigmas.len())?)
    } else {
        None
    };
    let first_hop = mean(&|x| x.first_hop);
    let traces = records
        .into_iter()
        .enumerate()
        .filter_map(|(run_id, rec)| {
            rec.kept.map(|(oracle, partial_trace)| KeptTrace {
                sample_id,
                run_id,
                oracle,
                partial: partial_trace,
                partial_ids: partial.oracle_ids().to_vec(),
            })
        })
        .collect();

    Ok(SampleOutcome {
        first_hop,
        summary,
        corrections,
        shape,
        levels,
        run_sigmas,
        zscores,
        traces,
    })
}

fn aggregate(
    rho: f64,
    gamma: f64,
    g: &Graph,
    cfg: &ExperimentConfig,
    samples: &[&SampleOutcome],
) -> Result<ConfigResult> {
    let summaries: Vec<SampleSummary> = samples.iter().map(|s| s.summary.clone()).collect();
    let per_sample_errors = summaries
        .iter()
        .map(SampleSummary::relative_error)
        .collect::<Result<Vec<_>>>()?;
    let mut rel = mean_ci95(&per_sample_errors);
    rel.mean = relative_error(&summaries)?;

    let mut shape = ShapeAccumulator::default();
    let mut levels = LevelAccumulator::default();
    for s in samples {
        shape.merge(&s.shape);
        levels.merge(&s.levels);
    }

    let convergence = if cfg.r >= 2 {
        (0..cfg.r)
            .map(|i| {
                let zs: Vec<f64> = samples
                    .iter()
                    .filter_map(|s| s.zscores.as_ref().map(|z| z[i]))
                    .collect();
                let n = zs.len() as f64;
                let mean_z = zs.iter().sum::<f64>() / n;
                let sd_z = (zs.iter().map(|z| (z - mean_z).powi(2)).sum::<f64>() / n).sqrt();
                ConvergencePoint {
                    r: i + 1,
                    mean_z,
                    sd_z,
                    mean_abs_z: zs.iter().map(|z| z.abs()).sum::<f64>() / n,
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let visible = g.node_count() - crate::partial::hidden_count(g.node_count(), rho);
    Ok(ConfigResult {
        rho,
        gamma,
        seed_count: crate::seeding::seed_count(gamma, visible),
        samples: summaries,
        relative_error: rel,
        corrections: samples.iter().flat_map(|s| s.corrections.clone()).collect(),
        shape: shape.finish(),
        levels: levels.finish(),
        convergence,
        first_hop: samples.iter().map(|s| s.first_hop).collect(),
        run_sigmas: samples.iter().map(|s| s.run_sigmas.clone()).collect(),
        traces: samples.iter().flat_map(|s| s.traces.clone()).collect(),
    })
}
