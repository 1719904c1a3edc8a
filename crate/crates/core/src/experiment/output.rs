use std::fs;
use std::io::Write;
use std::path::Path;

use csv::Writer;

use super::ExperimentResult;
use crate::error::{Error, Result};

/// Files written by [`export_csv`], besides `metadata.txt` and the
/// optional `traces.csv`.
pub const CSV_FILES: [&str; 7] = [
    "relative_error.csv",
    "samples.csv",
    "corrections.csv",
    "shape.csv",
    "levels.csv",
    "convergence.csv",
    "first_hop.csv",
];

fn open(dir: &Path, name: &str) -> Result<Writer<fs::File>> {
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok(Writer::from_writer(file))
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Writes every table of `result` into `dir`, creating it if needed.
/// Rows follow the configuration order, then sample id, then step.
pub fn export_csv(result: &ExperimentResult, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut w = open(dir, "relative_error.csv")?;
    w.write_record(["rho", "gamma", "relative_error", "ci_low", "ci_high", "v", "r"])?;
    for c in &result.configs {
        let e = c.relative_error;
        w.write_record([
            fmt(c.rho),
            fmt(c.gamma),
            fmt(e.mean),
            fmt(e.ci_low),
            fmt(e.ci_high),
            result.v.to_string(),
            result.r.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(dir, e))?;

    let mut w = open(dir, "samples.csv")?;
    w.write_record([
        "rho",
        "gamma",
        "sample_id",
        "mean_sigma",
        "mean_sigma_o",
        "mean_sigma_ph",
        "mean_sigma_h",
        "mean_sigma_p",
        "r",
    ])?;
    for c in &result.configs {
        for s in &c.samples {
            w.write_record([
                fmt(c.rho),
                fmt(c.gamma),
                s.sample_id.to_string(),
                fmt(s.mean_sigma),
                fmt(s.mean_sigma_o),
                fmt(s.mean_sigma_ph),
                fmt(s.mean_sigma_h),
                fmt(s.mean_sigma_p),
                s.run_count.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir, e))?;

    let mut w = open(dir, "corrections.csv")?;
    w.write_record(["rho", "gamma", "sample_id", "method", "sigma_hat", "abs_rel_error"])?;
    for c in &result.configs {
        for row in &c.corrections {
            w.write_record([
                fmt(c.rho),
                fmt(c.gamma),
                row.sample_id.to_string(),
                row.method.name().to_string(),
                fmt(row.sigma_hat),
                fmt(row.abs_rel_error),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir, e))?;

    let mut w = open(dir, "shape.csv")?;
    w.write_record(["rho", "gamma", "step", "mean_new_activations", "trace_count"])?;
    for c in &result.configs {
        for p in &c.shape {
            w.write_record([
                fmt(c.rho),
                fmt(c.gamma),
                p.step.to_string(),
                fmt(p.mean_new_activations),
                p.trace_count.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir, e))?;

    let mut w = open(dir, "levels.csv")?;
    w.write_record(["rho", "gamma", "step", "mean_clustering", "mean_degree", "count"])?;
    for c in &result.configs {
        for p in &c.levels {
            w.write_record([
                fmt(c.rho),
                fmt(c.gamma),
                p.step.to_string(),
                fmt(p.mean_clustering),
                fmt(p.mean_degree),
                p.count.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir, e))?;

    let mut w = open(dir, "convergence.csv")?;
    w.write_record(["rho", "gamma", "r", "mean_z", "sd_z", "mean_abs_z"])?;
    for c in &result.configs {
        for p in &c.convergence {
            w.write_record([
                fmt(c.rho),
                fmt(c.gamma),
                p.r.to_string(),
                fmt(p.mean_z),
                fmt(p.sd_z),
                fmt(p.mean_abs_z),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir, e))?;

    let mut w = open(dir, "first_hop.csv")?;
    w.write_record(["rho", "gamma", "sample_id", "first_hop_observed_fraction"])?;
    for c in &result.configs {
        for (s, f) in c.samples.iter().zip(&c.first_hop) {
            w.write_record([fmt(c.rho), fmt(c.gamma), s.sample_id.to_string(), fmt(*f)])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir, e))?;

    if result.configs.iter().any(|c| !c.traces.is_empty()) {
        let mut w = open(dir, "traces.csv")?;
        w.write_record(["rho", "gamma", "sample_id", "run_id", "scenario", "step", "node"])?;
        for c in &result.configs {
            for t in &c.traces {
                let scenarios = [("oracle", &t.oracle, None), ("partial", &t.partial, Some(&t.partial_ids))];
                for (name, trace, ids) in scenarios {
                    for step in 0..trace.level_count() {
                        for &u in trace.level(step) {
                            let node = ids.map_or(u, |ids| ids[u as usize]);
                            w.write_record([
                                fmt(c.rho),
                                fmt(c.gamma),
                                t.sample_id.to_string(),
                                t.run_id.to_string(),
                                name.to_string(),
                                step.to_string(),
                                node.to_string(),
                            ])?;
                        }
                    }
                }
            }
        }
        w.flush().map_err(|e| Error::io(dir, e))?;
    }

    let path = dir.join("metadata.txt");
    let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let text = format!(
        "oracle_nodes={}\noracle_edges={}\np={}\nv={}\nr={}\nmaster_seed={}\n\
         seed_strategy={}\nattribution={}\n\
         seed_count_rounding=round-half-up, at least one seed\n\
         zscore_std=population standard deviation of the r_max runs\n\
         ci=normal 95% interval over samples, mean +- 1.96 * sample sd / sqrt(v)\n\
         trace_nodes=oracle node index\n",
        result.oracle_nodes,
        result.oracle_edges,
        result.p,
        result.v,
        result.r,
        result.master_seed,
        result.seed_strategy,
        result.attribution,
    );
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&path, e))?;
    Ok(())
}
