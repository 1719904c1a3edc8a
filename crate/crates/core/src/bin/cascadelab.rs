use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use cascadelab::cascade::{decompose_with, Attribution};
use cascadelab::correction::{rece, sice, CorrectionEstimate, PartialCascadeProfile};
use cascadelab::diffusion::{read_edge_weights, EdgeProbabilities, IcmSimulator, DEFAULT_TRANSMISSION};
use cascadelab::experiment::{export_csv, run_experiment, run_seed, view_seed, ExperimentConfig};
use cascadelab::generators::{erdos_renyi, toshk, ToshkParams};
use cascadelab::graph::{load_edge_list, topology_report, write_edge_list, Graph};
use cascadelab::partial::{partial_graph, sample_hidden, PartialGraph, PartialView};
use cascadelab::seeding::{select_seeds, SeedSet, SeedStrategy};

#[derive(Parser)]
#[command(name = "cascadelab", version, about = "Independent Cascade experiments on partially observed networks")]
struct Cli {
    /// Master seed for every random stream (default 0, or the config value).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Output directory for commands that write several files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Er,
    Toshk,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Sice,
    Rece,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic network as an edge list.
    Generate {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        nodes: usize,
        /// Edge probability (er).
        #[arg(long)]
        p: Option<f64>,
        /// Target average degree (toshk).
        #[arg(long)]
        k: Option<f64>,
        /// Neighbour acceptance probability (toshk).
        #[arg(long)]
        pneighbor: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print topology statistics of an edge list.
    Inspect {
        #[arg(long)]
        graph: PathBuf,
        /// Estimate diameter and radius from this many BFS sources.
        #[arg(long)]
        diameter_sample: Option<usize>,
        #[arg(long)]
        largest_component: bool,
    },
    /// Draw a hidden-node sample.
    Sample {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        sample_id: usize,
    },
    /// Select seeds on the (partial) network.
    Seed {
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value = "degree-discount")]
        strategy: SeedStrategy,
        #[arg(long, default_value_t = DEFAULT_TRANSMISSION)]
        p: f64,
        #[arg(long)]
        graph: PathBuf,
        /// Hidden-node sample; seeds are drawn from visible nodes only.
        #[arg(long)]
        view: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run oracle and partial diffusions from a seed file.
    Diffuse {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRANSMISSION)]
        p: f64,
        /// `u v weight` lines overriding `p` on listed edges.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        view: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        runs: usize,
        #[arg(long, default_value = "fractional")]
        attribution: Attribution,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full protocol from a config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. `--set rho=0.1,0.2`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Also write every oracle and partial trace to traces.csv.
        #[arg(long)]
        keep_traces: bool,
    },
    /// Correct a partial cascade profile (`step,size,mean_degree` CSV).
    Correct {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = DEFAULT_TRANSMISSION)]
        p: f64,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
        /// Apply the sample-level SiCE formula to the whole partial size.
        #[arg(long)]
        literal: bool,
        /// Mean degree used when a level is empty.
        #[arg(long)]
        fallback_degree: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or(0);
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .context("starting worker pool")?;
    }
    match cli.command {
        Command::Generate {
            model,
            nodes,
            p,
            k,
            pneighbor,
            out,
        } => {
            let g = match model {
                Model::Er => erdos_renyi(nodes, p.context("--p is required for er")?, seed)?,
                Model::Toshk => toshk(
                    ToshkParams {
                        n: nodes,
                        p_neighbor: pneighbor.context("--pneighbor is required for toshk")?,
                        k_target: k.context("--k is required for toshk")?,
                    },
                    seed,
                )?,
            };
            write_edge_list(&g, &out)?;
            println!("wrote {} nodes, {} edges to {}", g.node_count(), g.edge_count(), out.display());
        }
        Command::Inspect {
            graph,
            diameter_sample,
            largest_component,
        } => {
            let mut g = load_edge_list(&graph)?;
            if largest_component {
                g = g.largest_component();
            }
            let r = topology_report(&g, diameter_sample, seed)?;
            println!("nodes\t{}", r.node_count);
            println!("edges\t{}", r.edge_count);
            println!("avg_degree\t{:.4}", r.avg_degree);
            println!("avg_clustering\t{:.4}", r.avg_clustering);
            println!("diameter\t{}", r.diameter);
            println!("radius\t{}", r.radius);
            println!("assortativity\t{:.4}", r.assortativity);
            println!("largest_component\t{}", r.component_size);
            println!("estimated\t{}", r.estimated);
        }
        Command::Sample {
            rho,
            graph,
            out,
            sample_id,
        } => {
            let g = load_edge_list(&graph)?;
            let view = sample_hidden(&g, rho, view_seed(seed, rho, sample_id))?.with_sample_id(sample_id);
            view.write(&g, &out)?;
            println!("hid {} of {} nodes", view.hidden_count(), g.node_count());
        }
        Command::Seed {
            gamma,
            strategy,
            p,
            graph,
            view,
            out,
        } => {
            let g = load_edge_list(&graph)?;
            let partial = partial_for(&g, view.as_deref())?.1;
            let seeds = select_seeds(&partial, strategy, gamma, p, seed)?;
            seeds.write(&g, &out)?;
            println!("selected {} seeds", seeds.len());
        }
        Command::Diffuse {
            graph,
            seeds,
            p,
            weights,
            view,
            runs,
            attribution,
            out,
        } => {
            let g = load_edge_list(&graph)?;
            let probs = match weights {
                Some(path) => EdgeProbabilities::weighted(&g, &read_edge_weights(path)?, p)?,
                None => EdgeProbabilities::uniform(p)?,
            };
            let seeds = SeedSet::read(&g, &seeds)?;
            let (view, partial) = partial_for(&g, view.as_deref())?;
            diffuse(&g, &probs, &view, &partial, &seeds, runs, attribution, seed, &out)?;
        }
        Command::Experiment {
            config,
            overrides,
            keep_traces,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            let pairs = overrides
                .iter()
                .map(|s| {
                    s.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .with_context(|| format!("--set expects KEY=VALUE, got {s:?}"))
                })
                .collect::<Result<Vec<_>>>()?;
            cfg.apply_all(&pairs, Path::new("."))?;
            if let Some(seed) = cli.seed {
                cfg.master_seed = seed;
            }
            cfg.keep_traces |= keep_traces;
            if cli.workers > 0 {
                cfg.workers = cli.workers;
            }
            if let Some(dir) = cli.out_dir {
                cfg.out_dir = dir;
            }
            let result = run_experiment(&cfg)?;
            export_csv(&result, &cfg.out_dir)?;
            for c in &result.configs {
                println!(
                    "rho={} gamma={} seeds={} relative_error={:.4} [{:.4}, {:.4}]",
                    c.rho, c.gamma, c.seed_count, c.relative_error.mean, c.relative_error.ci_low, c.relative_error.ci_high
                );
            }
            println!("results written to {}", cfg.out_dir.display());
        }
        Command::Correct {
            profile,
            rho,
            p,
            method,
            literal,
            fallback_degree,
            out,
        } => {
            let profile = PartialCascadeProfile::read_csv(&profile, rho, p, fallback_degree)?;
            let mut estimates = Vec::new();
            if matches!(method, Method::Sice | Method::Both) {
                estimates.push(sice(&profile, literal)?);
            }
            if matches!(method, Method::Rece | Method::Both) {
                estimates.push(rece(&profile)?);
            }
            write_estimates(&estimates, out.as_deref())?;
        }
    }
    Ok(())
}

fn partial_for(g: &Graph, view: Option<&Path>) -> Result<(PartialView, PartialGraph)> {
    let view = match view {
        Some(path) => PartialView::read(g, path)?,
        None => PartialView::empty(g.node_count()),
    };
    let partial = partial_graph(g, &view)?;
    Ok((view, partial))
}

#[allow(clippy::too_many_arguments)]
fn diffuse(
    g: &Graph,
    probs: &EdgeProbabilities,
    view: &PartialView,
    partial: &PartialGraph,
    seeds: &SeedSet,
    runs: usize,
    attribution: Attribution,
    master: u64,
    out: &Path,
) -> Result<()> {
    if runs == 0 {
        bail!("--runs must be positive");
    }
    if let Some(hidden) = seeds.seeds.iter().find(|&&s| view.is_hidden(s)) {
        bail!("seed {} is hidden in the given view", g.label(*hidden));
    }
    let partial_probs = probs.restricted(g, partial);
    let partial_seeds = seeds.in_partial(partial);
    let (rho, sample_id) = (view.rho(), view.sample_id());
    let gamma = seeds.gamma.unwrap_or(0.0);

    let rows = (0..runs)
        .into_par_iter()
        .map(|run_id| -> Result<[String; 10]> {
            let coin_seed = run_seed(master, rho, gamma, sample_id, run_id);
            let oracle = IcmSimulator::new(g, probs)?.run(&seeds.seeds, coin_seed)?;
            let partial_trace = IcmSimulator::new(&partial.graph, &partial_probs)?.run(&partial_seeds, coin_seed)?;
            let d = decompose_with(&oracle, view, attribution)?;
            Ok([
                run_id.to_string(),
                sample_id.to_string(),
                rho.to_string(),
                gamma.to_string(),
                d.sigma.to_string(),
                d.sigma_o.to_string(),
                d.sigma_ph.to_string(),
                d.sigma_h.to_string(),
                partial_trace.size().to_string(),
                oracle.horizon().to_string(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut w = csv::Writer::from_path(out).with_context(|| format!("writing {}", out.display()))?;
    w.write_record([
        "run_id", "sample_id", "rho", "gamma", "sigma", "sigma_o", "sigma_ph", "sigma_h", "sigma_p", "horizon",
    ])?;
    for row in &rows {
        w.write_record(row)?;
    }
    w.flush()?;
    println!("wrote {runs} runs to {}", out.display());
    Ok(())
}

fn write_estimates(estimates: &[CorrectionEstimate], out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn std::io::Write> = match out {
        Some(path) => Box::new(std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["method", "level", "sigma_hat"])?;
    for e in estimates {
        for (t, v) in e.per_level.iter().flatten().enumerate() {
            w.write_record([e.method.name().to_string(), t.to_string(), v.to_string()])?;
        }
        w.write_record([e.method.name().to_string(), "total".to_string(), e.sigma_hat.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
