//! Least-squares cubic B-spline smoothing.
//!
//! A curve is projected onto a clamped cubic B-spline basis with
//! `basis_size` functions and uniformly spaced interior knots, then
//! evaluated back on its grid. One integer knob, no penalty search.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::curve::{Curve, Grid};
use crate::error::{Error, Result};

const ORDER: usize = 4; // cubic

/// Suggested basis size for pre-smoothing: N/4, floored at the cubic
/// minimum of 4.
pub fn default_basis_size(n_nodes: usize) -> usize {
    (n_nodes / 4).max(4)
}

/// Clamped knot vector with `basis_size - 4` uniform interior knots.
fn knot_vector(a: f64, b: f64, basis_size: usize) -> Vec<f64> {
    let segments = basis_size - ORDER + 1; // = basis_size - 3
    let mut knots = Vec::with_capacity(basis_size + ORDER);
    knots.extend(std::iter::repeat(a).take(ORDER));
    for i in 1..segments {
        knots.push(a + (b - a) * i as f64 / segments as f64);
    }
    knots.extend(std::iter::repeat(b).take(ORDER));
    knots
}

/// Index s with knots[s] <= t < knots[s+1], clamped so the right
/// endpoint falls in the last non-degenerate span.
fn find_span(knots: &[f64], basis_size: usize, t: f64) -> usize {
    let last = basis_size - 1; // last valid span start
    if t >= knots[basis_size] {
        return last;
    }
    let mut lo = ORDER - 1;
    let mut hi = basis_size;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if t < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// The four nonzero cubic basis values N_{span-3..=span}(t)
/// (Cox-de Boor triangular recurrence).
fn basis_values(knots: &[f64], span: usize, t: f64) -> [f64; ORDER] {
    let mut vals = [0.0; ORDER];
    let mut left = [0.0; ORDER];
    let mut right = [0.0; ORDER];
    vals[0] = 1.0;
    for j in 1..ORDER {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let temp = vals[r] / (right[r + 1] + left[j - r]);
            vals[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        vals[j] = saved;
    }
    vals
}

/// N x basis_size design matrix of the basis evaluated at the grid nodes.
fn design_matrix(g: &Grid, basis_size: usize) -> DMatrix<f64> {
    let knots = knot_vector(g.a(), g.b(), basis_size);
    let mut design = DMatrix::zeros(g.len(), basis_size);
    for (i, &t) in g.nodes().iter().enumerate() {
        let span = find_span(&knots, basis_size, t);
        let vals = basis_values(&knots, span, t);
        for (r, &v) in vals.iter().enumerate() {
            design[(i, span - (ORDER - 1) + r)] = v;
        }
    }
    design
}

/// Least-squares projection of `x` onto the spline basis, returned on the
/// same grid. Requires `4 <= basis_size <= N`.
pub fn smooth_spline(x: &Curve, g: &Grid, basis_size: usize) -> Result<Curve> {
    g.check_len(x.len(), "fda-core: smooth_spline")?;
    if basis_size < ORDER || basis_size > g.len() {
        return Err(Error::parameter(format!(
            "fda-core: basis_size must satisfy 4 <= basis_size <= {}, got {}",
            g.len(),
            basis_size
        )));
    }
    let design = design_matrix(g, basis_size);
    let rhs = design.transpose() * DVector::from_column_slice(x.values());
    let normal = design.transpose() * &design;
    let coef = match Cholesky::new(normal.clone()) {
        Some(chol) => chol.solve(&rhs),
        // Interpolating bases (basis_size = N) can make the normal matrix
        // borderline; fall back to an SVD least-squares solve on the design.
        None => design
            .clone()
            .svd(true, true)
            .solve(&DVector::from_column_slice(x.values()), 1e-12)
            .map_err(|e| Error::fit(format!("fda-core: spline solve failed: {e}")))?,
    };
    let fitted = design * coef;
    Curve::new(fitted.iter().copied().collect())
}
