//! k-nearest-neighbor classification under either norm, and the moving
//! window rule.

use crate::curve::{Curve, LabeledSample, MetricKind};
use crate::error::{Error, Result};
use crate::metric::distance;

/// k-NN smoothing parameter and metric.
#[derive(Debug, Clone, Copy)]
pub struct KnnConfig {
    pub k: usize,
    pub metric: MetricKind,
}

/// Moving-window radius and metric.
#[derive(Debug, Clone, Copy)]
pub struct MwrConfig {
    pub h: f64,
    pub metric: MetricKind,
}

/// Indices of the k training curves nearest to `x`, distance ties broken
/// by original sample index (lower index first).
pub(crate) fn nearest_indices(
    x: &Curve,
    s: &LabeledSample,
    k: usize,
    metric: MetricKind,
) -> Result<Vec<usize>> {
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(s.n());
    for (i, c) in s.curves().iter().enumerate() {
        order.push((distance(metric, x, c, s.grid())?, i));
    }
    order.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(order.into_iter().take(k).map(|(_, i)| i).collect())
}

/// Fraction of label-1 curves among the k nearest neighbors of `x`.
pub fn knn_eta(x: &Curve, s: &LabeledSample, cfg: &KnnConfig) -> Result<f64> {
    if cfg.k == 0 || cfg.k > s.n() {
        return Err(Error::parameter(format!(
            "neighbors: k must satisfy 1 <= k <= n = {}, got {}",
            s.n(),
            cfg.k
        )));
    }
    let idx = nearest_indices(x, s, cfg.k, cfg.metric)?;
    let ones = idx.iter().filter(|&&i| s.labels()[i] == 1).count();
    Ok(ones as f64 / cfg.k as f64)
}

/// 1 iff the neighbor-label average exceeds 1/2 strictly; ties go to 0.
pub fn knn_classify(x: &Curve, s: &LabeledSample, cfg: &KnnConfig) -> Result<u8> {
    Ok(u8::from(knn_eta(x, s, cfg)? > 0.5))
}

/// Moving window rule: class 0 unless strictly more label-1 than label-0
/// training curves fall in the closed ball of radius h around `x`.
pub fn mwr_classify(x: &Curve, s: &LabeledSample, cfg: &MwrConfig) -> Result<u8> {
    if cfg.h <= 0.0 {
        return Err(Error::parameter(format!(
            "neighbors: window radius must be positive, got {}",
            cfg.h
        )));
    }
    let mut count0 = 0usize;
    let mut count1 = 0usize;
    for (c, &y) in s.curves().iter().zip(s.labels()) {
        if distance(cfg.metric, x, c, s.grid())? <= cfg.h {
            if y == 0 {
                count0 += 1;
            } else {
                count1 += 1;
            }
        }
    }
    Ok(u8::from(count1 > count0))
}
