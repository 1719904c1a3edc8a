use cascadelab::cascade::decompose;
use cascadelab::diffusion::{exact_icm_expectations, EdgeProbabilities};
use cascadelab::experiment::{run_experiment, run_on_graph, ExperimentConfig, GraphSource};
use cascadelab::generators::{erdos_renyi, ToshkParams};
use cascadelab::partial::{partial_graph, PartialView};
use cascadelab::Graph;

fn cfg() -> ExperimentConfig {
    ExperimentConfig {
        graph: Some(GraphSource::Toshk {
            params: ToshkParams {
                n: 800,
                p_neighbor: 0.8,
                k_target: 10.0,
            },
            seed: 4,
        }),
        rho_list: vec![0.0, 0.2, 0.5],
        gamma_list: vec![0.005, 0.05],
        p: 0.08,
        v: 5,
        r: 10,
        master_seed: 17,
        ..ExperimentConfig::default()
    }
}

#[test]
fn results_ignore_worker_count() {
    let one = run_experiment(&ExperimentConfig { workers: 1, ..cfg() }).unwrap();
    let many = run_experiment(&ExperimentConfig { workers: 4, ..cfg() }).unwrap();
    for (a, b) in one.configs.iter().zip(&many.configs) {
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.corrections, b.corrections);
        assert_eq!(a.relative_error, b.relative_error);
        assert_eq!(a.convergence, b.convergence);
        assert_eq!(a.first_hop, b.first_hop);
    }
}

#[test]
fn changing_the_master_seed_changes_results() {
    let a = run_experiment(&cfg()).unwrap();
    let b = run_experiment(&ExperimentConfig { master_seed: 18, ..cfg() }).unwrap();
    assert_ne!(a.configs[2].samples, b.configs[2].samples);
}

#[test]
fn seed_counts_follow_visible_nodes() {
    let res = run_experiment(&cfg()).unwrap();
    let n = res.oracle_nodes;
    for c in &res.configs {
        let expected = cascadelab::partial::hidden_count(n, c.rho);
        let visible = n - expected;
        assert_eq!(c.seed_count, cascadelab::seeding::seed_count(c.gamma, visible));
    }
}

#[test]
fn decomposition_on_real_runs_tracks_exact_values_for_tiny_graphs() {
    let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 3), (3, 2), (2, 4)]).unwrap();
    let view = PartialView::from_hidden(5, &[3], 0.2).unwrap();
    let probs = EdgeProbabilities::uniform(0.6).unwrap();
    let exact = exact_icm_expectations(&g, &[0], &probs, &view).unwrap();
    let partial = partial_graph(&g, &view).unwrap();
    let pprobs = probs.restricted(&g, &partial);
    let runs = 40_000;
    let (mut o, mut ph, mut p) = (0.0, 0.0, 0.0);
    for seed in 0..runs {
        let t = cascadelab::diffusion::run_icm(&g, &[0], &probs, seed).unwrap();
        let d = decompose(&t, &view).unwrap();
        o += d.sigma_o;
        ph += d.sigma_ph;
        p += cascadelab::diffusion::run_icm(&partial.graph, &[0], &pprobs, seed)
            .unwrap()
            .size() as f64;
    }
    let n = runs as f64;
    assert!((o / n - exact.sigma_o).abs() < 0.03);
    assert!((ph / n - exact.sigma_ph).abs() < 0.03);
    assert!((p / n - exact.sigma_p).abs() < 0.03);
}

#[test]
fn er_graphs_run_end_to_end() {
    let g = erdos_renyi(600, 0.02, 2).unwrap();
    let c = ExperimentConfig {
        graph: Some(GraphSource::File(Default::default())),
        rho_list: vec![0.3],
        gamma_list: vec![0.01],
        p: 0.1,
        v: 3,
        r: 5,
        workers: 2,
        ..ExperimentConfig::default()
    };
    let res = run_on_graph(&g, &EdgeProbabilities::uniform(0.1).unwrap(), &c).unwrap();
    assert_eq!(res.configs[0].samples.len(), 3);
}
