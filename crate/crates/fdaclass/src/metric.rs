//! Norms, distances and distance-percentile utilities.
//!
//! The supremum distance is the node-wise max of |x - y|; the L² distance
//! is the square root of the trapezoid-rule approximation of
//! ∫_a^b (x - y)² dt, which is exact for piecewise-linear interpolants of
//! the discretized curves.

use crate::curve::{Curve, Grid, LabeledSample, MetricKind};
use crate::error::{Error, Result};

/// max_j |x(t_j) - y(t_j)|.
pub fn sup_distance(x: &Curve, y: &Curve, g: &Grid) -> Result<f64> {
    g.check_len(x.len(), "fda-core: sup_distance x")?;
    g.check_len(y.len(), "fda-core: sup_distance y")?;
    let d = x
        .values()
        .iter()
        .zip(y.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(d)
}

/// sqrt of the trapezoid quadrature of (x - y)² over the grid.
pub fn l2_distance(x: &Curve, y: &Curve, g: &Grid) -> Result<f64> {
    g.check_len(x.len(), "fda-core: l2_distance x")?;
    g.check_len(y.len(), "fda-core: l2_distance y")?;
    let mut acc = 0.0;
    for ((a, b), w) in x.values().iter().zip(y.values()).zip(g.weights()) {
        let d = a - b;
        acc += w * d * d;
    }
    Ok(acc.sqrt())
}

/// Distance under the chosen metric.
pub fn distance(kind: MetricKind, x: &Curve, y: &Curve, g: &Grid) -> Result<f64> {
    match kind {
        MetricKind::Sup => sup_distance(x, y, g),
        MetricKind::L2 => l2_distance(x, y, g),
    }
}

/// Nearest-rank q-quantile of a slice: the ⌈q·M⌉-th smallest value.
/// Requires q in (0, 1) and a nonempty slice.
pub(crate) fn nearest_rank(sorted: &[f64], q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::parameter(format!(
            "fda-core: percentile fraction must lie in (0,1), got {q}"
        )));
    }
    if sorted.is_empty() {
        return Err(Error::insufficient(
            "fda-core: percentile of an empty set",
        ));
    }
    let m = sorted.len();
    let rank = (q * m as f64).ceil() as usize;
    Ok(sorted[rank.max(1) - 1])
}

fn sorted_pairwise_distances(curves: &[Curve], g: &Grid, kind: MetricKind) -> Result<Vec<f64>> {
    let n = curves.len();
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            d.push(distance(kind, &curves[i], &curves[j], g)?);
        }
    }
    d.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Nearest-rank q-quantile of the n(n-1)/2 pairwise distances of a curve set.
pub fn pairwise_percentile_of(
    curves: &[Curve],
    g: &Grid,
    q: f64,
    kind: MetricKind,
) -> Result<f64> {
    if curves.len() < 2 {
        return Err(Error::insufficient(format!(
            "fda-core: pairwise percentile needs >= 2 curves, got {}",
            curves.len()
        )));
    }
    let d = sorted_pairwise_distances(curves, g, kind)?;
    nearest_rank(&d, q)
}

/// Nearest-rank q-quantile of the pairwise distances of a labeled sample.
pub fn pairwise_distance_percentile(s: &LabeledSample, q: f64, kind: MetricKind) -> Result<f64> {
    pairwise_percentile_of(s.curves(), s.grid(), q, kind)
}

/// Nearest-rank q-quantile of pairwise |p_i - p_j| of scalar projections.
pub fn pairwise_abs_diff_percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::insufficient(
            "fda-core: pairwise percentile needs >= 2 values",
        ));
    }
    let n = values.len();
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            d.push((values[i] - values[j]).abs());
        }
    }
    d.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    nearest_rank(&d, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> Grid {
        Grid::new(vec![0.0, 0.5, 1.0]).unwrap()
    }

    #[test]
    fn sup_distance_max_of_abs() {
        let g = grid3();
        let x = Curve::new(vec![1.0, -3.0, 2.0]).unwrap();
        let y = Curve::new(vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(sup_distance(&x, &y, &g).unwrap(), 3.0);
        assert_eq!(sup_distance(&x, &x, &g).unwrap(), 0.0);
    }

    #[test]
    fn sup_distance_of_identity_curve() {
        // x(t) = t vs 0 attains its max at t = 1 on any grid of [0,1]
        for n in [2, 7, 101] {
            let g = Grid::equispaced(0.0, 1.0, n).unwrap();
            let x = Curve::from_fn(&g, |t| t).unwrap();
            let y = Curve::from_fn(&g, |_| 0.0).unwrap();
            assert_eq!(sup_distance(&x, &y, &g).unwrap(), 1.0);
        }
    }

    #[test]
    fn sup_distance_dimension_error() {
        let g = grid3();
        let x = Curve::new(vec![1.0, 2.0]).unwrap();
        let y = Curve::new(vec![0.0, 0.0, 0.0]).unwrap();
        assert!(sup_distance(&x, &y, &g).is_err());
    }

    #[test]
    fn l2_distance_constant_exact() {
        for nodes in [vec![0.0, 0.3, 1.0], vec![0.0, 0.5, 0.6, 1.0]] {
            let g = Grid::new(nodes).unwrap();
            let x = Curve::from_fn(&g, |_| 1.0).unwrap();
            let y = Curve::from_fn(&g, |_| 0.0).unwrap();
            assert!((l2_distance(&x, &y, &g).unwrap() - 1.0).abs() < 1e-14);
            assert_eq!(l2_distance(&x, &x, &g).unwrap(), 0.0);
        }
    }

    #[test]
    fn l2_distance_linear_curve_trapezoid_value() {
        // Independent oracle: for f(t) = t² on 101 equispaced nodes the
        // composite trapezoid rule gives exactly 1/3 + h²/12 · (b-a) · f''
        // = 1/3 + 0.01²/12 · 2, because f''' = 0.
        let g = Grid::equispaced(0.0, 1.0, 101).unwrap();
        let x = Curve::from_fn(&g, |t| t).unwrap();
        let y = Curve::from_fn(&g, |_| 0.0).unwrap();
        let expected = (1.0 / 3.0 + 0.01f64.powi(2) / 12.0 * 2.0).sqrt();
        let got = l2_distance(&x, &y, &g).unwrap();
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
        // Close to, but distinguishable from, the exact 1/sqrt(3).
        assert!((got - 0.57737).abs() < 1e-4);
        assert!(got > 1.0 / 3.0f64.sqrt());
    }

    #[test]
    fn percentile_nearest_rank() {
        let g = grid3();
        // Three curves with pairwise sup distances {1, 2, 3}
        let c0 = Curve::new(vec![0.0, 0.0, 0.0]).unwrap();
        let c1 = Curve::new(vec![1.0, 0.0, 0.0]).unwrap();
        let c2 = Curve::new(vec![3.0, 0.0, 0.0]).unwrap();
        let s = LabeledSample::new(g, vec![c0, c1, c2], vec![0, 0, 1]).unwrap();
        let p = pairwise_distance_percentile(&s, 0.2, MetricKind::Sup).unwrap();
        assert_eq!(p, 1.0);
        // q = 1.0 is outside the domain
        assert!(pairwise_distance_percentile(&s, 1.0, MetricKind::Sup).is_err());
    }

    #[test]
    fn percentile_zero_with_duplicates() {
        let g = grid3();
        let c = Curve::new(vec![1.0, 1.0, 1.0]).unwrap();
        let other = Curve::new(vec![2.0, 2.0, 2.0]).unwrap();
        let s = LabeledSample::new(g, vec![c.clone(), c, other], vec![0, 0, 1]).unwrap();
        let p = pairwise_distance_percentile(&s, 0.1, MetricKind::L2).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn percentile_insufficient_data() {
        let g = grid3();
        let c = Curve::new(vec![1.0, 1.0, 1.0]).unwrap();
        let s = LabeledSample::new(g, vec![c], vec![0]).unwrap();
        assert!(pairwise_distance_percentile(&s, 0.2, MetricKind::L2).is_err());
    }
}
