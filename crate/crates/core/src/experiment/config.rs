use std::path::{Path, PathBuf};

use crate::cascade::Attribution;
use crate::diffusion::DEFAULT_TRANSMISSION;
use crate::error::{Error, Result};
use crate::generators::ToshkParams;
use crate::seeding::SeedStrategy;

/// Where the oracle network comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    ErdosRenyi { n: usize, p_edge: f64, seed: u64 },
    Toshk { params: ToshkParams, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub graph: Option<GraphSource>,
    /// Restrict the oracle to its largest connected component.
    pub largest_component: bool,
    pub rho_list: Vec<f64>,
    pub gamma_list: Vec<f64>,
    pub p: f64,
    /// Optional `u v weight` file replacing `p` on listed edges.
    pub weights: Option<PathBuf>,
    pub v: usize,
    pub r: usize,
    pub seed_strategy: SeedStrategy,
    pub master_seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub out_dir: PathBuf,
    pub attribution: Attribution,
    pub keep_traces: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: None,
            largest_component: false,
            rho_list: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            gamma_list: vec![0.0001, 0.001, 0.01],
            p: DEFAULT_TRANSMISSION,
            weights: None,
            v: 50,
            r: 50,
            seed_strategy: SeedStrategy::DegreeDiscount,
            master_seed: 0,
            workers: 0,
            out_dir: PathBuf::from("results"),
            attribution: Attribution::Fractional,
            keep_traces: false,
        }
    }
}

#[derive(Default)]
struct GeneratorKeys {
    model: Option<String>,
    nodes: Option<usize>,
    p_edge: Option<f64>,
    k: Option<f64>,
    p_neighbor: Option<f64>,
    seed: Option<u64>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("{key}: cannot parse {value:?}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse(key, v.trim()))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::invalid(format!("{key}: expected true/false, got {value:?}"))),
    }
}

impl ExperimentConfig {
    /// Parses `key = value` lines (`#` starts a comment) on top of the
    /// defaults. Relative paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: base_dir.to_path_buf(),
                line: i + 1,
                message: format!("expected key=value, found {line:?}"),
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        cfg.apply_all(&pairs, base_dir)?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_all(&mut self, pairs: &[(String, String)], base_dir: &Path) -> Result<()> {
        let mut gen = GeneratorKeys::default();
        if let Some(GraphSource::ErdosRenyi { n, p_edge, seed }) = &self.graph {
            gen = GeneratorKeys {
                model: Some("er".into()),
                nodes: Some(*n),
                p_edge: Some(*p_edge),
                seed: Some(*seed),
                ..Default::default()
            };
        } else if let Some(GraphSource::Toshk { params, seed }) = &self.graph {
            gen = GeneratorKeys {
                model: Some("toshk".into()),
                nodes: Some(params.n),
                k: Some(params.k_target),
                p_neighbor: Some(params.p_neighbor),
                seed: Some(*seed),
                ..Default::default()
            };
        }
        let mut touched_generator = false;

        for (key, value) in pairs {
            let (key, value) = (key.as_str(), value.as_str());
            match key {
                "graph" => {
                    let p = PathBuf::from(value);
                    self.graph = Some(GraphSource::File(if p.is_relative() { base_dir.join(p) } else { p }));
                    gen.model = None;
                }
                "generator" | "model" => {
                    gen.model = Some(value.to_string());
                    touched_generator = true;
                }
                "nodes" => {
                    gen.nodes = Some(parse(key, value)?);
                    touched_generator = true;
                }
                "p_edge" => {
                    gen.p_edge = Some(parse(key, value)?);
                    touched_generator = true;
                }
                "k" => {
                    gen.k = Some(parse(key, value)?);
                    touched_generator = true;
                }
                "p_neighbor" | "pneighbor" => {
                    gen.p_neighbor = Some(parse(key, value)?);
                    touched_generator = true;
                }
                "graph_seed" => {
                    gen.seed = Some(parse(key, value)?);
                    touched_generator = true;
                }
                "largest_component" => self.largest_component = parse_bool(key, value)?,
                "rho" => self.rho_list = parse_list(key, value)?,
                "gamma" => self.gamma_list = parse_list(key, value)?,
                "p" => self.p = parse(key, value)?,
                "weights" => {
                    let p = PathBuf::from(value);
                    self.weights = Some(if p.is_relative() { base_dir.join(p) } else { p });
                }
                "v" | "samples" => self.v = parse(key, value)?,
                "r" | "runs" => self.r = parse(key, value)?,
                "strategy" => self.seed_strategy = value.parse()?,
                "seed" => self.master_seed = parse(key, value)?,
                "workers" => self.workers = parse(key, value)?,
                "out_dir" => self.out_dir = PathBuf::from(value),
                "attribution" => self.attribution = value.parse()?,
                "keep_traces" => self.keep_traces = parse_bool(key, value)?,
                other => return Err(Error::invalid(format!("unknown config key {other:?}"))),
            }
        }

        if touched_generator {
            if let Some(model) = gen.model.as_deref() {
                let nodes = gen
                    .nodes
                    .ok_or_else(|| Error::invalid("generator needs `nodes`"))?;
                let seed = gen.seed.unwrap_or(0);
                self.graph = Some(match model {
                    "er" => GraphSource::ErdosRenyi {
                        n: nodes,
                        p_edge: gen
                            .p_edge
                            .ok_or_else(|| Error::invalid("er generator needs `p_edge`"))?,
                        seed,
                    },
                    "toshk" => GraphSource::Toshk {
                        params: ToshkParams {
                            n: nodes,
                            p_neighbor: gen
                                .p_neighbor
                                .ok_or_else(|| Error::invalid("toshk generator needs `p_neighbor`"))?,
                            k_target: gen
                                .k
                                .ok_or_else(|| Error::invalid("toshk generator needs `k`"))?,
                        },
                        seed,
                    },
                    other => return Err(Error::invalid(format!("unknown generator {other:?}"))),
                });
            } else {
                return Err(Error::invalid("generator keys given without `generator`"));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.graph.is_none() {
            return Err(Error::invalid("no graph source configured"));
        }
        if self.v == 0 || self.r == 0 {
            return Err(Error::invalid("v and r must be at least 1"));
        }
        if self.rho_list.is_empty() || self.gamma_list.is_empty() {
            return Err(Error::invalid("rho and gamma lists must be non-empty"));
        }
        if let Some(rho) = self.rho_list.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return Err(Error::invalid(format!("rho {rho} not in [0, 1)")));
        }
        if let Some(g) = self.gamma_list.iter().find(|g| !(**g > 0.0 && **g <= 1.0)) {
            return Err(Error::invalid(format!("gamma {g} not in (0, 1]")));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(format!("p {} not in [0, 1]", self.p)));
        }
        Ok(())
    }
}
