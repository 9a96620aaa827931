//! Cross-seed aggregation of run records.

use anyhow::{bail, Result};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Window over which a run's final performance is averaged.
pub const FINAL_WINDOW: usize = 1000;

/// Mean of the last `window` values; the flag is set when the run is shorter.
pub fn final_mean(values: &[f64], window: usize) -> Result<(f64, bool)> {
    if values.is_empty() || window == 0 {
        bail!("final mean needs a non-empty run and window");
    }
    let short = values.len() < window;
    let tail = &values[values.len().saturating_sub(window)..];
    Ok((tail.iter().sum::<f64>() / tail.len() as f64, short))
}

/// Two-sided Student-t confidence interval of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub mean: f64,
    pub half_width: f64,
}

impl Interval {
    pub fn lo(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.mean + self.half_width
    }
}

/// `n = 1` gives a zero half-width.
pub fn t_interval(samples: &[f64], level: f64) -> Result<Interval> {
    let n = samples.len();
    if n == 0 {
        bail!("confidence interval of an empty sample");
    }
    if !(0.0 < level && level < 1.0) {
        bail!("confidence level must lie in (0, 1), got {level}");
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(Interval { mean, half_width: 0.0 });
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)?.inverse_cdf(0.5 + level / 2.0);
    Ok(Interval {
        mean,
        half_width: t * (var / n as f64).sqrt(),
    })
}

/// Share of the golden-over-mismatch gap recovered, in percent.
///
/// `None` unless `golden > mismatch`.
pub fn performance_increase(beta: f64, mismatch: f64, golden: f64) -> Option<f64> {
    (golden > mismatch).then(|| 100.0 * (beta - mismatch) / (golden - mismatch))
}

/// Trailing moving average; early entries average what is available.
pub fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (i, &v) in values.iter().enumerate() {
        acc += v;
        if i >= w {
            acc -= values[i - w];
        }
        out.push(acc / (i + 1).min(w) as f64);
    }
    out
}

/// Per-step mean and CI across equally long runs.
pub fn curve_band(runs: &[Vec<f64>], level: f64) -> Result<Vec<Interval>> {
    let Some(len) = runs.first().map(Vec::len) else {
        bail!("no runs to aggregate");
    };
    if runs.iter().any(|r| r.len() != len) {
        bail!("runs differ in length");
    }
    (0..len)
        .map(|t| t_interval(&runs.iter().map(|r| r[t]).collect::<Vec<_>>(), level))
        .collect()
}

/// Final-window summary over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSummary {
    pub per_seed: Vec<f64>,
    pub interval: Interval,
    /// Some run was shorter than the final window.
    pub short_runs: bool,
}

pub fn summarize(runs: &[Vec<f64>], window: usize) -> Result<AggregateSummary> {
    let mut short_runs = false;
    let per_seed = runs
        .iter()
        .map(|r| {
            let (m, short) = final_mean(r, window)?;
            short_runs |= short;
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AggregateSummary {
        interval: t_interval(&per_seed, 0.95)?,
        per_seed,
        short_runs,
    })
}
