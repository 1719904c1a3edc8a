//! Estimators of the oracle cascade size from a partial-network cascade.
//!
//! * `partial` – the partial cascade size itself.
//! * `sice` – inflate every non-seed level by `1 / (1 - rho)`; the literal
//!   variant inflates the whole cascade, seeds included.
//! * `rece` – level-wise inflation where the nodes added at level `t - 1`
//!   spawn `E(deg^{t-1}) * p` descendants each at level `t`.

use std::path::Path;

use crate::diffusion::DiffusionTrace;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Level structure of one partial-network cascade.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialCascadeProfile {
    /// `sigma_p^t` for `t = 0..=horizon`; level 0 holds the seeds.
    pub per_level_sizes: Vec<f64>,
    /// Mean partial-graph degree of the nodes activated at each level.
    pub per_level_mean_degree: Vec<f64>,
    /// Used for a level that has no activations.
    pub fallback_mean_degree: f64,
    pub rho: f64,
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CorrectionMethod {
    Partial,
    Sice,
    SiceLiteral,
    Rece,
}

impl CorrectionMethod {
    pub fn name(self) -> &'static str {
        match self {
            CorrectionMethod::Partial => "partial",
            CorrectionMethod::Sice => "sice",
            CorrectionMethod::SiceLiteral => "sice-literal",
            CorrectionMethod::Rece => "rece",
        }
    }
}

impl std::fmt::Display for CorrectionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionEstimate {
    pub method: CorrectionMethod,
    pub sigma_hat: f64,
    pub per_level: Option<Vec<f64>>,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::invalid(format!("hidden fraction {rho} must lie in [0, 1)")));
    }
    Ok(())
}

impl PartialCascadeProfile {
    /// Profile of a trace recorded on the partial graph `g_partial`.
    pub fn from_trace(trace: &DiffusionTrace, g_partial: &Graph, rho: f64, p: f64) -> Self {
        let mut sizes = Vec::with_capacity(trace.level_count());
        let mut degrees = Vec::with_capacity(trace.level_count());
        for t in 0..trace.level_count() {
            let level = trace.level(t);
            sizes.push(level.len() as f64);
            degrees.push(if level.is_empty() {
                0.0
            } else {
                level.iter().map(|&u| g_partial.degree(u) as f64).sum::<f64>() / level.len() as f64
            });
        }
        PartialCascadeProfile {
            per_level_sizes: sizes,
            per_level_mean_degree: degrees,
            fallback_mean_degree: g_partial.average_degree(),
            rho,
            p,
        }
    }

    pub fn seed_count(&self) -> f64 {
        self.per_level_sizes.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_p(&self) -> f64 {
        self.per_level_sizes.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        check_rho(self.rho)?;
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(format!("probability {} not in [0, 1]", self.p)));
        }
        if self.per_level_sizes.is_empty() {
            return Err(Error::invalid("empty cascade profile"));
        }
        if self.per_level_sizes.len() != self.per_level_mean_degree.len() {
            return Err(Error::invalid("profile size and degree columns differ in length"));
        }
        if self
            .per_level_sizes
            .iter()
            .chain(&self.per_level_mean_degree)
            .any(|&x| !(x >= 0.0))
        {
            return Err(Error::invalid("profile entries must be non-negative"));
        }
        Ok(())
    }

    fn mean_degree(&self, t: usize) -> f64 {
        if self.per_level_sizes[t] > 0.0 {
            self.per_level_mean_degree[t]
        } else {
            self.fallback_mean_degree
        }
    }

    /// Reads a `step,size,mean_degree` CSV. Without an explicit fallback the
    /// size-weighted mean of the listed degrees is used.
    pub fn read_csv(
        path: impl AsRef<Path>,
        rho: f64,
        p: f64,
        fallback_mean_degree: Option<f64>,
    ) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let mut rows: Vec<(usize, f64, f64)> = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message,
            };
            let field = |k: usize| -> Result<&str> {
                record.get(k).ok_or_else(|| err("expected step,size,mean_degree".into()))
            };
            let step = field(0)?.parse().map_err(|_| err("invalid step".into()))?;
            let size = field(1)?.parse().map_err(|_| err("invalid size".into()))?;
            let degree = field(2)?.parse().map_err(|_| err("invalid mean degree".into()))?;
            rows.push((step, size, degree));
        }
        rows.sort_by_key(|r| r.0);
        if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
            return Err(Error::invalid(format!(
                "{}: steps must run 0, 1, 2, ... without gaps",
                path.display()
            )));
        }
        let total: f64 = rows.iter().map(|r| r.1).sum();
        let weighted = if total > 0.0 {
            rows.iter().map(|r| r.1 * r.2).sum::<f64>() / total
        } else {
            0.0
        };
        let profile = PartialCascadeProfile {
            per_level_sizes: rows.iter().map(|r| r.1).collect(),
            per_level_mean_degree: rows.iter().map(|r| r.2).collect(),
            fallback_mean_degree: fallback_mean_degree.unwrap_or(weighted),
            rho,
            p,
        };
        profile.validate()?;
        Ok(profile)
    }
}

/// The uncorrected partial cascade size.
pub fn partial_estimate(profile: &PartialCascadeProfile) -> Result<CorrectionEstimate> {
    profile.validate()?;
    Ok(CorrectionEstimate {
        method: CorrectionMethod::Partial,
        sigma_hat: profile.sigma_p(),
        per_level: Some(profile.per_level_sizes.clone()),
    })
}

/// Simple expansion. Per-node mode keeps the seed level as is and inflates
/// each later level by `1 / (1 - rho)`; literal mode inflates the total.
pub fn sice(profile: &PartialCascadeProfile, literal: bool) -> Result<CorrectionEstimate> {
    profile.validate()?;
    let scale = 1.0 / (1.0 - profile.rho);
    if literal {
        return Ok(CorrectionEstimate {
            method: CorrectionMethod::SiceLiteral,
            sigma_hat: profile.sigma_p() * scale,
            per_level: None,
        });
    }
    let per_level: Vec<f64> = profile
        .per_level_sizes
        .iter()
        .enumerate()
        .map(|(t, &s)| if t == 0 { s } else { s * scale })
        .collect();
    Ok(CorrectionEstimate {
        method: CorrectionMethod::Sice,
        sigma_hat: per_level.iter().sum(),
        per_level: Some(per_level),
    })
}

/// Recursive expansion.
///
/// ```text
/// est[0] = sp[0]
/// est[1] = sp[1] / (1 - rho)
/// est[t] = sp[t] / (1 - rho) + (est[t-1] - sp[t-1]) * E(deg^{t-1}) * p   (t >= 2)
/// ```
pub fn rece(profile: &PartialCascadeProfile) -> Result<CorrectionEstimate> {
    profile.validate()?;
    let sp = &profile.per_level_sizes;
    let scale = 1.0 / (1.0 - profile.rho);
    let mut est = Vec::with_capacity(sp.len());
    est.push(sp[0]);
    for t in 1..sp.len() {
        let mut value = sp[t] * scale;
        if t >= 2 {
            value += (est[t - 1] - sp[t - 1]) * profile.mean_degree(t - 1) * profile.p;
        }
        est.push(value);
    }
    Ok(CorrectionEstimate {
        method: CorrectionMethod::Rece,
        sigma_hat: est.iter().sum(),
        per_level: Some(est),
    })
}

/// `|sigma - sigma_hat| / sigma`.
pub fn correction_error(sigma: f64, sigma_hat: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("cascade size {sigma} must be positive")));
    }
    Ok((sigma - sigma_hat).abs() / sigma)
}
