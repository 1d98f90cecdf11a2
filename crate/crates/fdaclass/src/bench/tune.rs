//! Leave-one-out parameter selection.
//!
//! Grids are ordered simplest-first (smallest k, largest window, fewest
//! components, largest penalty); ties in leave-one-out accuracy go to the
//! earliest grid position. Selection for the kernel methods runs in
//! O(n³) per candidate via exact algebraic identities rather than n
//! refits; the identities are checked against direct refits in the tests.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::classifier::{FittedClassifier, MethodId, MethodParams};
use crate::curve::{LabeledSample, MetricKind};
use crate::error::{Error, Result};
use crate::metric::{distance, nearest_rank};
use crate::project::PlsPath;

/// Candidate lists for the tunable methods. `mwr_percentiles` are
/// fractions of the training pairwise-distance distribution, largest
/// (smoothest) first; `rkhs_sigma_factors` multiply the median pairwise
/// L² distance.
#[derive(Debug, Clone)]
pub struct TuningGrids {
    pub ks: Vec<usize>,
    pub mwr_percentiles: Vec<f64>,
    pub pls_components: Vec<usize>,
    pub rkhs_sigma_factors: Vec<f64>,
    pub rkhs_lambdas: Vec<f64>,
}

impl Default for TuningGrids {
    fn default() -> Self {
        TuningGrids {
            ks: (0..11).map(|i| 2 * i + 1).collect(), // 1, 3, ..., 21
            mwr_percentiles: (1..=9).rev().map(|i| i as f64 / 10.0).collect(),
            pls_components: (1..=10).collect(),
            rkhs_sigma_factors: vec![2.0, 1.0, 0.5, 0.25, 0.1],
            rkhs_lambdas: (0..=6).map(|i| 10f64.powi(-i)).collect(),
        }
    }
}

/// Winner of a leave-one-out sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Selected {
    pub params: MethodParams,
    pub accuracy: f64,
}

fn distance_matrix(s: &LabeledSample, metric: MetricKind) -> Result<DMatrix<f64>> {
    let n = s.n();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = distance(metric, &s.curves()[i], &s.curves()[j], s.grid())?;
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    Ok(d)
}

fn pick_best(candidates: Vec<(MethodParams, f64)>) -> Result<Selected> {
    candidates
        .into_iter()
        .fold(None::<Selected>, |best, (params, accuracy)| match best {
            Some(b) if b.accuracy >= accuracy => Some(b),
            _ => Some(Selected { params, accuracy }),
        })
        .ok_or_else(|| Error::parameter("bench-cli: empty or infeasible tuning grid"))
}

/// Leave-one-out selection for one method over its candidate grid.
pub fn loo_cv_select(s: &LabeledSample, method: MethodId, grids: &TuningGrids) -> Result<Selected> {
    if s.n() < 3 {
        return Err(Error::insufficient(format!(
            "bench-cli: leave-one-out selection needs n >= 3, got {}",
            s.n()
        )));
    }
    match method {
        MethodId::KnnSup => loo_knn(s, MetricKind::Sup, &grids.ks),
        MethodId::KnnL2 => loo_knn(s, MetricKind::L2, &grids.ks),
        MethodId::Mwr => loo_mwr(s, MetricKind::L2, &grids.mwr_percentiles),
        MethodId::Pls => loo_pls(s, &grids.pls_components),
        MethodId::Rkhs => loo_rkhs(s, &grids.rkhs_sigma_factors, &grids.rkhs_lambdas),
        MethodId::HMode => loo_refit_singleton(s, method, MethodParams::HMode),
        MethodId::Rp => loo_refit_singleton(s, method, MethodParams::Rp { seed: 0 }),
        MethodId::Bayes => Err(Error::unsupported(
            "bench-cli: the bayes rule has no tunable parameters",
        )),
    }
}

fn loo_knn(s: &LabeledSample, metric: MetricKind, ks: &[usize]) -> Result<Selected> {
    let n = s.n();
    let d = distance_matrix(s, metric)?;
    // per left-out point, neighbors among the rest ordered by (distance, index)
    let mut ordered_labels: Vec<Vec<u8>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut order: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (d[(i, j)], j))
            .collect();
        order.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        ordered_labels.push(order.into_iter().map(|(_, j)| s.labels()[j]).collect());
    }
    let mut candidates = Vec::new();
    for &k in ks {
        if k == 0 || k > n - 1 {
            continue;
        }
        let mut correct = 0usize;
        for i in 0..n {
            let ones = ordered_labels[i][..k].iter().filter(|&&y| y == 1).count();
            let pred = u8::from(ones as f64 / k as f64 > 0.5);
            correct += usize::from(pred == s.labels()[i]);
        }
        candidates.push((
            MethodParams::Knn { k },
            correct as f64 / n as f64,
        ));
    }
    pick_best(candidates)
}

fn loo_mwr(s: &LabeledSample, metric: MetricKind, percentiles: &[f64]) -> Result<Selected> {
    let n = s.n();
    let d = distance_matrix(s, metric)?;
    let mut pairwise: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairwise.push(d[(i, j)]);
        }
    }
    pairwise.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let mut candidates = Vec::new();
    for &p in percentiles {
        let h = nearest_rank(&pairwise, p)?;
        if h <= 0.0 {
            continue;
        }
        let mut correct = 0usize;
        for i in 0..n {
            let mut count0 = 0usize;
            let mut count1 = 0usize;
            for j in 0..n {
                if j != i && d[(i, j)] <= h {
                    if s.labels()[j] == 0 {
                        count0 += 1;
                    } else {
                        count1 += 1;
                    }
                }
            }
            let pred = u8::from(count1 > count0);
            correct += usize::from(pred == s.labels()[i]);
        }
        candidates.push((MethodParams::Mwr { h }, correct as f64 / n as f64));
    }
    pick_best(candidates)
}

fn loo_pls(s: &LabeledSample, components: &[usize]) -> Result<Selected> {
    let n = s.n();
    let cap = s.grid().len().min(n - 2); // leave-one-out samples have n-1 curves
    let feasible: Vec<usize> = components.iter().copied().filter(|&c| c <= cap).collect();
    if feasible.is_empty() {
        return Err(Error::parameter(
            "bench-cli: no feasible PLS component count for this sample size",
        ));
    }
    let cmax = *feasible.iter().max().unwrap();
    let mut correct = vec![0usize; feasible.len()];
    for i in 0..n {
        let reduced = s.leave_out(i)?;
        let path = PlsPath::fit(&reduced, cmax)?;
        for (slot, &c) in feasible.iter().enumerate() {
            let c_eff = c.min(path.extracted());
            let model = path.model(c_eff)?;
            let pred = crate::project::pls_classify(&model, &s.curves()[i])?;
            correct[slot] += usize::from(pred == s.labels()[i]);
        }
    }
    let candidates = feasible
        .iter()
        .zip(&correct)
        .map(|(&c, &hits)| {
            (
                MethodParams::Pls { n_components: c },
                hits as f64 / n as f64,
            )
        })
        .collect();
    pick_best(candidates)
}

fn loo_rkhs(s: &LabeledSample, sigma_factors: &[f64], lambdas: &[f64]) -> Result<Selected> {
    let n = s.n();
    let d = distance_matrix(s, MetricKind::L2)?;
    let mut pairwise: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairwise.push(d[(i, j)]);
        }
    }
    pairwise.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let median = nearest_rank(&pairwise, 0.5)?.max(1e-8);
    let y = DVector::from_iterator(n, s.labels().iter().map(|&l| l as f64));

    let mut candidates = Vec::new();
    for &lambda in lambdas {
        for &factor in sigma_factors {
            let sigma = factor * median;
            let mut gram = DMatrix::zeros(n, n);
            let s2 = sigma * sigma;
            for i in 0..n {
                gram[(i, i)] = 1.0;
                for j in (i + 1)..n {
                    let v = (-d[(i, j)] * d[(i, j)] / s2).exp();
                    gram[(i, j)] = v;
                    gram[(j, i)] = v;
                }
            }
            let accuracy = match rkhs_loo_accuracy(&gram, &y, s.labels(), lambda) {
                Some(acc) => acc,
                None => continue,
            };
            candidates.push((MethodParams::Rkhs { sigma, lambda }, accuracy));
        }
    }
    pick_best(candidates)
}

/// Exact leave-one-out accuracy of the kernel regression rule.
///
/// Refitting without point i solves (K₋ᵢ + (n−1)λI)c₋ᵢ = Y₋ᵢ, the
/// principal submatrix system of M = K + (n−1)λI. With B = M⁻¹ and
/// γ = BY, the reduced solution is c₋ᵢ = γ₋ᵢ − B₋ᵢ,ᵢ·γᵢ/Bᵢᵢ, so the
/// held-out prediction Σ_{j≠i} K_ij c₋ᵢ,j needs only O(n) per point.
fn rkhs_loo_accuracy(gram: &DMatrix<f64>, y: &DVector<f64>, labels: &[u8], lambda: f64) -> Option<f64> {
    let n = gram.nrows();
    let mut m = gram.clone();
    let reg = (n - 1) as f64 * lambda;
    for i in 0..n {
        m[(i, i)] += reg;
    }
    let b = Cholesky::new(m)?.inverse();
    let gamma = &b * y;
    let k_gamma = gram * &gamma;
    let mut correct = 0usize;
    for i in 0..n {
        let b_ii = b[(i, i)];
        if b_ii.abs() < 1e-300 {
            return None;
        }
        // (K·B[:,i])_i with the diagonal term removed
        let k_b_col: f64 = (0..n).map(|j| gram[(i, j)] * b[(j, i)]).sum();
        let eta = k_gamma[i] - gram[(i, i)] * gamma[i]
            - gamma[i] / b_ii * (k_b_col - gram[(i, i)] * b_ii);
        let pred = u8::from(eta > 0.5);
        correct += usize::from(pred == labels[i]);
    }
    Some(correct as f64 / n as f64)
}

/// Direct leave-one-out by refitting, for methods whose parameters are
/// fixed rules rather than grids.
fn loo_refit_singleton(
    s: &LabeledSample,
    method: MethodId,
    params: MethodParams,
) -> Result<Selected> {
    let n = s.n();
    let mut correct = 0usize;
    for i in 0..n {
        let reduced = s.leave_out(i)?;
        let fitted = FittedClassifier::fit(&reduced, method, &params)?;
        correct += usize::from(fitted.predict(&s.curves()[i])? == s.labels()[i]);
    }
    Ok(Selected {
        params,
        accuracy: correct as f64 / n as f64,
    })
}
