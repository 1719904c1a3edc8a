//! Error and convergence measures over samples and runs.

use crate::error::{Error, Result};

/// Means over the `run_count` diffusions of one hidden-node sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSummary {
    pub sample_id: usize,
    pub rho: f64,
    pub gamma: f64,
    pub mean_sigma: f64,
    pub mean_sigma_o: f64,
    pub mean_sigma_ph: f64,
    pub mean_sigma_h: f64,
    pub mean_sigma_p: f64,
    pub run_count: usize,
}

impl SampleSummary {
    /// `|(E(sigma_ph) + E(sigma_o)) - E(sigma_p)| / (E(sigma_ph) + E(sigma_o))`.
    pub fn relative_error(&self) -> Result<f64> {
        let visible = self.mean_sigma_ph + self.mean_sigma_o;
        if !(visible > 0.0) {
            return Err(Error::ZeroDenominator {
                sample_id: self.sample_id,
            });
        }
        Ok((visible - self.mean_sigma_p).abs() / visible)
    }
}

/// Mean of the per-sample relative errors.
pub fn relative_error(summaries: &[SampleSummary]) -> Result<f64> {
    if summaries.is_empty() {
        return Err(Error::invalid("relative error needs at least one sample"));
    }
    let errors = summaries
        .iter()
        .map(SampleSummary::relative_error)
        .collect::<Result<Vec<_>>>()?;
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

/// Mean with a normal-approximation 95% confidence interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn mean_ci95(values: &[f64]) -> MeanCi {
    let n = values.len();
    if n == 0 {
        return MeanCi {
            mean: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return MeanCi {
            mean,
            ci_low: mean,
            ci_high: mean,
        };
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let half = 1.96 * (var / n as f64).sqrt();
    MeanCi {
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
    }
}

/// z-score of each running mean against the final mean, in units of the
/// final population standard deviation. Identical runs give all zeros.
pub fn convergence_zscores(run_sizes: &[f64], r_max: usize) -> Result<Vec<f64>> {
    if r_max < 2 || run_sizes.len() != r_max {
        return Err(Error::invalid(format!(
            "need r_max >= 2 run sizes, got {} for r_max {r_max}",
            run_sizes.len()
        )));
    }
    let mut prefix = Vec::with_capacity(r_max + 1);
    prefix.push(0.0);
    for &s in run_sizes {
        prefix.push(prefix.last().unwrap() + s);
    }
    let final_mean = prefix[r_max] / r_max as f64;
    let var = run_sizes
        .iter()
        .map(|s| (s - final_mean).powi(2))
        .sum::<f64>()
        / r_max as f64;
    let sd = var.sqrt();
    Ok((1..=r_max)
        .map(|r| {
            if sd == 0.0 {
                0.0
            } else {
                (prefix[r] / r as f64 - final_mean) / sd
            }
        })
        .collect())
}
