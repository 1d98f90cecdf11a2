//! h-mode depth, random-projection depth, and the deeper-population
//! classification rule.
//!
//! The h-mode depth of a curve within a population sample is the average
//! kernel-smoothed proximity n⁻¹ Σ K_h(‖x − X_i‖₂) with the Gaussian
//! kernel K(t) = √(2/π)·exp(−t²/2) and K_h(·) = h⁻¹K(·/h). The
//! random-projection depth projects curves onto random directions and
//! averages the one-dimensional h-mode depth of the projections.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curve::{Curve, Grid, LabeledSample};
use crate::error::{Error, Result};
use crate::metric::{l2_distance, pairwise_abs_diff_percentile, pairwise_percentile_of};
use crate::curve::MetricKind;

/// √(2/π), the kernel's value at 0.
pub(crate) const KERNEL_MAX: f64 = 0.7978845608028654;

/// Bandwidths derived from distance percentiles are floored here so that
/// duplicate-heavy samples cannot produce h = 0.
pub const BANDWIDTH_FLOOR: f64 = 1e-8;

/// Fraction of the pairwise-distance distribution used as bandwidth.
pub const BANDWIDTH_PERCENTILE: f64 = 0.20;

fn gaussian_kernel(t: f64) -> f64 {
    KERNEL_MAX * (-0.5 * t * t).exp()
}

/// Per-class h-mode configuration: bandwidth percentile for selection.
#[derive(Debug, Clone, Copy)]
pub struct HModeConfig {
    pub percentile: f64,
}

impl Default for HModeConfig {
    fn default() -> Self {
        HModeConfig {
            percentile: BANDWIDTH_PERCENTILE,
        }
    }
}

/// Random-projection configuration: number of directions and the seed of
/// the direction stream.
#[derive(Debug, Clone, Copy)]
pub struct RpConfig {
    pub n_directions: usize,
    pub seed: u64,
}

impl Default for RpConfig {
    fn default() -> Self {
        RpConfig {
            n_directions: 50,
            seed: 0,
        }
    }
}

/// Depth notion used by [`depth_classify`].
#[derive(Debug, Clone, Copy)]
pub enum DepthMethod {
    HMode(HModeConfig),
    Rp(RpConfig),
}

/// n⁻¹ Σ K_h(‖x − X_i‖₂) over the class sample.
pub fn hmode_depth(x: &Curve, class_sample: &[Curve], g: &Grid, h: f64) -> Result<f64> {
    if class_sample.is_empty() {
        return Err(Error::insufficient(
            "depth: h-mode depth needs a nonempty class sample",
        ));
    }
    if h <= 0.0 {
        return Err(Error::parameter(format!(
            "depth: bandwidth must be positive, got {h}"
        )));
    }
    let mut acc = 0.0;
    for c in class_sample {
        acc += gaussian_kernel(l2_distance(x, c, g)? / h) / h;
    }
    Ok(acc / class_sample.len() as f64)
}

/// One-dimensional h-mode depth of a projected point within projected
/// sample values.
pub fn univariate_hmode_depth(p: f64, sample: &[f64], h: f64) -> f64 {
    let mut acc = 0.0;
    for &q in sample {
        acc += gaussian_kernel((p - q) / h) / h;
    }
    acc / sample.len() as f64
}

/// Draw `n` uniform directions on the unit sphere of R^dim
/// (standard normal vector, Euclidean-normalized).
pub fn random_directions(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = dir.iter().map(|z| z * z).sum::<f64>().sqrt();
            if norm > 0.0 {
                dir.iter_mut().for_each(|z| *z /= norm);
            }
            dir
        })
        .collect()
}

/// Trapezoid L² inner product of a curve with a direction vector.
pub(crate) fn project_one(x: &Curve, dir: &[f64], g: &Grid) -> f64 {
    x.values()
        .iter()
        .zip(dir)
        .zip(g.weights())
        .map(|((v, d), w)| w * v * d)
        .sum()
}

/// Projections of a curve set onto each direction: one vector of length
/// `curves.len()` per direction.
pub(crate) fn project_all(curves: &[Curve], directions: &[Vec<f64>], g: &Grid) -> Vec<Vec<f64>> {
    directions
        .iter()
        .map(|dir| curves.iter().map(|c| project_one(c, dir, g)).collect())
        .collect()
}

/// Per-direction univariate bandwidths (20th percentile of pairwise
/// projected differences, floored).
pub(crate) fn pairwise_projected_bandwidths(
    projections: &[Vec<f64>],
    percentile: f64,
) -> Vec<f64> {
    projections
        .iter()
        .map(|p| {
            if p.len() < 2 {
                BANDWIDTH_FLOOR
            } else {
                pairwise_abs_diff_percentile(p, percentile)
                    .map(|h| h.max(BANDWIDTH_FLOOR))
                    .unwrap_or(BANDWIDTH_FLOOR)
            }
        })
        .collect()
}

/// RP depth with explicit directions: for each direction, the univariate
/// h-mode depth of ⟨x,a⟩ within {⟨X_i,a⟩}, bandwidth the 20th percentile
/// of pairwise projected differences (floored); averaged over directions.
pub fn rp_depth_with_directions(
    x: &Curve,
    class_sample: &[Curve],
    g: &Grid,
    directions: &[Vec<f64>],
) -> Result<f64> {
    if class_sample.is_empty() {
        return Err(Error::insufficient(
            "depth: RP depth needs a nonempty class sample",
        ));
    }
    if directions.is_empty() {
        return Err(Error::parameter("depth: RP depth needs >= 1 direction"));
    }
    let mut total = 0.0;
    for dir in directions {
        let projected: Vec<f64> = class_sample.iter().map(|c| project_one(c, dir, g)).collect();
        let h = projected_bandwidth(&projected);
        total += univariate_hmode_depth(project_one(x, dir, g), &projected, h);
    }
    Ok(total / directions.len() as f64)
}

fn projected_bandwidth(projected: &[f64]) -> f64 {
    if projected.len() < 2 {
        return BANDWIDTH_FLOOR;
    }
    pairwise_abs_diff_percentile(projected, BANDWIDTH_PERCENTILE)
        .map(|h| h.max(BANDWIDTH_FLOOR))
        .unwrap_or(BANDWIDTH_FLOOR)
}

/// RP depth with directions drawn from the config seed.
pub fn rp_depth(x: &Curve, class_sample: &[Curve], g: &Grid, cfg: &RpConfig) -> Result<f64> {
    if cfg.n_directions == 0 {
        return Err(Error::parameter("depth: n_directions must be >= 1"));
    }
    let dirs = random_directions(cfg.n_directions, g.len(), cfg.seed);
    rp_depth_with_directions(x, class_sample, g, &dirs)
}

/// Per-class bandwidth for the curve-level h-mode depth: the q-percentile
/// of within-class pairwise L² distances, floored.
pub fn class_bandwidth(class_sample: &[Curve], g: &Grid, percentile: f64) -> Result<f64> {
    if class_sample.len() < 2 {
        return Ok(BANDWIDTH_FLOOR);
    }
    pairwise_percentile_of(class_sample, g, percentile, MetricKind::L2)
        .map(|h| h.max(BANDWIDTH_FLOOR))
}

/// Assign `x` to the class with the strictly larger depth; exact ties go
/// to class 0. Both classes must be nonempty.
pub fn depth_classify(x: &Curve, s: &LabeledSample, method: &DepthMethod) -> Result<u8> {
    let class0 = s.class_curves(0);
    let class1 = s.class_curves(1);
    if class0.is_empty() || class1.is_empty() {
        return Err(Error::insufficient(
            "depth: depth classification needs both classes nonempty",
        ));
    }
    let g = s.grid();
    let (d0, d1) = match method {
        DepthMethod::HMode(cfg) => {
            let h0 = class_bandwidth(&class0, g, cfg.percentile)?;
            let h1 = class_bandwidth(&class1, g, cfg.percentile)?;
            (
                hmode_depth(x, &class0, g, h0)?,
                hmode_depth(x, &class1, g, h1)?,
            )
        }
        DepthMethod::Rp(cfg) => {
            // one direction set per query, shared by both class evaluations
            let dirs = random_directions(cfg.n_directions, g.len(), cfg.seed);
            (
                rp_depth_with_directions(x, &class0, g, &dirs)?,
                rp_depth_with_directions(x, &class1, g, &dirs)?,
            )
        }
    };
    Ok(u8::from(d1 > d0))
}
