//! Percentile bootstrap with per-replicate random streams.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::PredictionSample;
use crate::error::{Error, Result};
use crate::measures::MeasureId;
use crate::rng::{stream_rng, uniform_index};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSpec {
    pub replicates: usize,
    pub level: f64,
    pub master_seed: u64,
    /// Resample events and non-events separately, keeping class counts fixed.
    pub stratified: bool,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        Self {
            replicates: 1000,
            level: 0.95,
            master_seed: 20240101,
            stratified: false,
        }
    }
}

impl BootstrapSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidArgument(
                "bootstrap needs at least 2 replicates".into(),
            ));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence level must lie in (0, 1), got {}",
                self.level
            )));
        }
        Ok(())
    }
}

/// Percentile interval together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub replicates: usize,
    /// Replicates on which the statistic was undefined.
    pub dropped: usize,
    pub seed: u64,
}

/// A named measure value with an optional bootstrap interval. The value may
/// be `f64::INFINITY` (diagnostic odds ratio without errors).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricEstimate {
    pub measure: MeasureId,
    pub value: f64,
    pub ci: Option<Interval>,
}

impl MetricEstimate {
    pub fn point(measure: MeasureId, value: f64) -> Self {
        Self {
            measure,
            value,
            ci: None,
        }
    }
}

/// Record indices of bootstrap replicate `replicate`.
pub fn resample_indices(
    sample: &PredictionSample,
    spec: &BootstrapSpec,
    replicate: usize,
) -> Vec<usize> {
    let mut rng = stream_rng(spec.master_seed, replicate as u64);
    let n = sample.len();
    if !spec.stratified {
        return (0..n).map(|_| uniform_index(&mut rng, n)).collect();
    }
    let (events, nonevents): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| sample.events()[i]);
    let mut out = Vec::with_capacity(n);
    for class in [&events, &nonevents] {
        for _ in 0..class.len() {
            out.push(class[uniform_index(&mut rng, class.len())]);
        }
    }
    out
}

/// Evaluates `statistic` on every replicate. Each entry of the result is one
/// replicate, in replicate order, whatever the number of worker threads.
pub fn bootstrap_replicates<T, F>(
    sample: &PredictionSample,
    spec: &BootstrapSpec,
    statistic: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(&PredictionSample) -> T + Sync,
{
    (0..spec.replicates)
        .into_par_iter()
        .map(|r| statistic(&sample.select(&resample_indices(sample, spec, r))))
        .collect()
}

/// Interval from replicate values; `None` marks an undefined replicate.
pub fn percentile_interval(
    name: &str,
    values: &[Option<f64>],
    spec: &BootstrapSpec,
) -> Result<Interval> {
    let mut kept: Vec<f64> = values
        .iter()
        .filter_map(|v| *v)
        .filter(|v| !v.is_nan())
        .collect();
    let dropped = values.len() - kept.len();
    if kept.is_empty() || 2 * dropped > values.len() {
        return Err(Error::BootstrapRefused {
            measure: name.to_string(),
            dropped,
            replicates: values.len(),
        });
    }
    kept.sort_by(f64::total_cmp);
    let alpha = (1.0 - spec.level) / 2.0;
    Ok(Interval {
        lower: quantile_type7(&kept, alpha),
        upper: quantile_type7(&kept, 1.0 - alpha),
        level: spec.level,
        replicates: values.len(),
        dropped,
        seed: spec.master_seed,
    })
}

/// Percentile bootstrap interval of a scalar statistic.
pub fn bootstrap_ci<F>(
    sample: &PredictionSample,
    name: &str,
    spec: &BootstrapSpec,
    statistic: F,
) -> Result<Interval>
where
    F: Fn(&PredictionSample) -> Option<f64> + Sync,
{
    spec.validate()?;
    let values = bootstrap_replicates(sample, spec, statistic);
    percentile_interval(name, &values, spec)
}

/// Linear interpolation between order statistics (`h = (n - 1) p`). Input
/// must be sorted ascending; infinite order statistics are handled without
/// producing NaN.
pub fn quantile_type7(sorted: &[f64], prob: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * prob.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 || lo + 1 >= sorted.len() {
        return sorted[lo];
    }
    let (a, b) = (sorted[lo], sorted[lo + 1]);
    if a == b {
        return a;
    }
    if a.is_infinite() || b.is_infinite() {
        return if frac < 1.0 && a.is_infinite() { a } else { b };
    }
    a + frac * (b - a)
}
