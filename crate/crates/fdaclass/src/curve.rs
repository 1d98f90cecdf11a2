//! Discretized-curve data model.
//!
//! Every functional observation lives on a [`Grid`]: a strictly increasing
//! node vector `t_1 < ... < t_N` spanning `[a, b]` with `a = t_1`,
//! `b = t_N`. A [`Curve`] is the vector of values at those nodes and a
//! [`LabeledSample`] bundles curves with binary class labels on a shared
//! grid. Irregular (per-curve) sampling is rejected at construction.

use crate::error::{Error, Result};

/// Observation nodes `t_1 < ... < t_N` on `[a, b]`, with trapezoid
/// quadrature weights precomputed for L²-type functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// Build a grid from its nodes. Requires at least two strictly
    /// increasing finite nodes.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::parameter(format!(
                "fda-core: grid needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        for (j, &t) in nodes.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::parameter(format!(
                    "fda-core: grid node {j} is not finite"
                )));
            }
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::parameter(
                "fda-core: grid nodes must be strictly increasing",
            ));
        }
        let weights = trapezoid_weights(&nodes);
        Ok(Grid { nodes, weights })
    }

    /// `n` equispaced nodes on `[a, b]`.
    pub fn equispaced(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::parameter(format!(
                "fda-core: invalid interval [{a}, {b}]"
            )));
        }
        if n < 2 {
            return Err(Error::parameter(
                "fda-core: an equispaced grid needs n >= 2",
            ));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|j| a + h * j as f64).collect();
        // Pin the right endpoint exactly.
        nodes[n - 1] = b;
        Grid::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Trapezoid quadrature weights aligned with the nodes.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Left endpoint `a = t_1`.
    pub fn a(&self) -> f64 {
        self.nodes[0]
    }

    /// Right endpoint `b = t_N`.
    pub fn b(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Interval length `b - a`.
    pub fn span(&self) -> f64 {
        self.b() - self.a()
    }

    pub(crate) fn check_len(&self, len: usize, context: &'static str) -> Result<()> {
        if len != self.len() {
            return Err(Error::Dimension {
                context,
                expected: self.len(),
                got: len,
            });
        }
        Ok(())
    }
}

fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for j in 0..n {
        if j == 0 {
            w[j] = (nodes[1] - nodes[0]) / 2.0;
        } else if j == n - 1 {
            w[j] = (nodes[n - 1] - nodes[n - 2]) / 2.0;
        } else {
            w[j] = (nodes[j + 1] - nodes[j - 1]) / 2.0;
        }
    }
    w
}

/// Values of one functional observation at the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    values: Vec<f64>,
}

impl Curve {
    /// Requires every value finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::parameter(format!(
                "fda-core: curve value {j} is not finite"
            )));
        }
        Ok(Curve { values })
    }

    /// Evaluate a scalar function at the grid nodes.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Curve::new(grid.nodes().iter().map(|&t| f(t)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Binary classification metric choice: supremum or L² norm on curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Sup,
    L2,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricKind::Sup => write!(f, "sup"),
            MetricKind::L2 => write!(f, "l2"),
        }
    }
}

/// Training material: curves on a shared grid with labels in {0, 1}.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    grid: Grid,
    curves: Vec<Curve>,
    labels: Vec<u8>,
}

impl LabeledSample {
    pub fn new(grid: Grid, curves: Vec<Curve>, labels: Vec<u8>) -> Result<Self> {
        if curves.len() != labels.len() {
            return Err(Error::Dimension {
                context: "fda-core: curves vs labels",
                expected: curves.len(),
                got: labels.len(),
            });
        }
        if curves.is_empty() {
            return Err(Error::insufficient("fda-core: sample needs n >= 1 curves"));
        }
        for c in &curves {
            grid.check_len(c.len(), "fda-core: curve vs grid")?;
        }
        if let Some(&bad) = labels.iter().find(|&&y| y > 1) {
            return Err(Error::parameter(format!(
                "fda-core: labels must be 0 or 1, got {bad}"
            )));
        }
        Ok(LabeledSample {
            grid,
            curves,
            labels,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.curves.len()
    }

    /// Number of observations with the given label.
    pub fn class_count(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&y| y == label).count()
    }

    /// Curves of one class, cloned out in sample order.
    pub fn class_curves(&self, label: u8) -> Vec<Curve> {
        self.curves
            .iter()
            .zip(&self.labels)
            .filter(|(_, &y)| y == label)
            .map(|(c, _)| c.clone())
            .collect()
    }

    /// Leave one observation out, preserving order.
    pub fn leave_out(&self, index: usize) -> Result<LabeledSample> {
        if self.n() < 2 {
            return Err(Error::insufficient(
                "fda-core: cannot leave one out of a single-curve sample",
            ));
        }
        let mut curves = self.curves.clone();
        let mut labels = self.labels.clone();
        curves.remove(index);
        labels.remove(index);
        LabeledSample::new(self.grid.clone(), curves, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_short_and_unordered() {
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.5, 0.25]).is_err());
        assert!(Grid::new(vec![0.0, 0.0, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn equispaced_endpoints_exact() {
        let g = Grid::equispaced(0.0, 1.0, 51).unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g.a(), 0.0);
        assert_eq!(g.b(), 1.0);
        assert_eq!(g.span(), 1.0);
    }

    #[test]
    fn trapezoid_weights_sum_to_span() {
        let g = Grid::new(vec![0.0, 0.1, 0.4, 1.0]).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curve_rejects_non_finite() {
        assert!(Curve::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn sample_checks_lengths_and_labels() {
        let g = Grid::equispaced(0.0, 1.0, 3).unwrap();
        let c = Curve::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(LabeledSample::new(g.clone(), vec![c.clone()], vec![2]).is_err());
        assert!(LabeledSample::new(g.clone(), vec![c.clone()], vec![0, 1]).is_err());
        let short = Curve::new(vec![0.0, 1.0]).unwrap();
        assert!(LabeledSample::new(g.clone(), vec![short], vec![0]).is_err());
        let s = LabeledSample::new(g, vec![c.clone(), c], vec![0, 1]).unwrap();
        assert_eq!(s.class_count(0), 1);
        assert_eq!(s.class_count(1), 1);
    }
}
