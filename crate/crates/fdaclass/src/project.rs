//! Projection-based classifiers: partial least squares discrimination and
//! the regularized RKHS regression rule.
//!
//! PLS uses classical single-response iterative deflation: each direction
//! maximizes the covariance of the projected (centered, discretized)
//! curves with the centered 0/1 labels subject to unit norm, followed by
//! rank-one deflation, so scores of distinct components come out
//! uncorrelated. Fisher's linear discriminant with pooled score
//! covariance is then applied to the scores.
//!
//! The RKHS rule fits η_n(x) = Σ c_i κ(x, X_i) with the Gaussian kernel
//! κ(s,t) = exp(−‖s−t‖₂²/σ²); the coefficients minimize
//! n⁻¹Σ(Y_i − η_n(X_i))² + λ⟨η,η⟩_κ, i.e. solve (K + nλI)c = Y.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::curve::{Curve, Grid, LabeledSample};
use crate::error::{Error, Result};
use crate::metric::l2_distance;

/// Fisher discriminant on score vectors.
#[derive(Debug, Clone)]
struct ScoreLda {
    beta: DVector<f64>,
    midpoint: DVector<f64>,
    /// ln(π0/π1); the rule assigns 1 iff β'(t − midpoint) > bias.
    bias: f64,
}

impl ScoreLda {
    fn classify(&self, scores: &DVector<f64>) -> u8 {
        u8::from(self.beta.dot(&(scores - &self.midpoint)) > self.bias)
    }
}

/// Fitted PLS discriminant model.
#[derive(Debug, Clone)]
pub struct PlsModel {
    center: DVector<f64>,
    weights: DMatrix<f64>,
    loadings: DMatrix<f64>,
    n_components: usize,
    lda: ScoreLda,
}

impl PlsModel {
    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// PLS scores of a new curve (centering, projection, deflation).
    pub fn scores(&self, x: &Curve) -> Result<DVector<f64>> {
        if x.len() != self.center.len() {
            return Err(Error::Dimension {
                context: "project: pls scores",
                expected: self.center.len(),
                got: x.len(),
            });
        }
        let mut residual = DVector::from_column_slice(x.values()) - &self.center;
        let mut scores = DVector::zeros(self.n_components);
        for l in 0..self.n_components {
            let w = self.weights.column(l);
            let t = residual.dot(&w);
            scores[l] = t;
            residual -= self.loadings.column(l) * t;
        }
        Ok(scores)
    }

    /// Training-score matrix reconstruction support: X̃ ≈ Σ s_l p_l'.
    pub fn loadings(&self) -> &DMatrix<f64> {
        &self.loadings
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }
}

/// Full PLS extraction up to `max_components`, reusable for every
/// component count at or below the extracted depth (the first c
/// directions of a deeper extraction are exactly the c-component fit).
#[derive(Debug, Clone)]
pub struct PlsPath {
    center: DVector<f64>,
    weights: DMatrix<f64>,
    loadings: DMatrix<f64>,
    score_mat: DMatrix<f64>,
    labels: Vec<u8>,
    n0: usize,
    n1: usize,
}

impl PlsPath {
    pub fn fit(s: &LabeledSample, max_components: usize) -> Result<Self> {
        let n = s.n();
        let dim = s.grid().len();
        if n < 4 {
            return Err(Error::insufficient(format!(
                "project: PLS needs n >= 4 curves, got {n}"
            )));
        }
        let (n0, n1) = (s.class_count(0), s.class_count(1));
        if n0 == 0 || n1 == 0 {
            return Err(Error::insufficient(
                "project: PLS needs both classes present",
            ));
        }
        let cap = dim.min(n - 1);
        if max_components == 0 || max_components > cap {
            return Err(Error::parameter(format!(
                "project: n_components must satisfy 1 <= c <= min(N, n-1) = {cap}, got {max_components}"
            )));
        }

        let mut x = DMatrix::from_fn(n, dim, |i, j| s.curves()[i].values()[j]);
        let center = DVector::from_iterator(dim, (0..dim).map(|j| x.column(j).sum() / n as f64));
        for i in 0..n {
            for j in 0..dim {
                x[(i, j)] -= center[j];
            }
        }
        let y_mean = s.labels().iter().map(|&y| y as f64).sum::<f64>() / n as f64;
        let mut y = DVector::from_iterator(n, s.labels().iter().map(|&l| l as f64 - y_mean));

        let x_scale = x.norm().max(1e-300);
        let mut weights = DMatrix::zeros(dim, max_components);
        let mut loadings = DMatrix::zeros(dim, max_components);
        let mut score_mat = DMatrix::zeros(n, max_components);
        let mut extracted = 0;
        for l in 0..max_components {
            let mut w = x.transpose() * &y;
            let w_norm = w.norm();
            if w_norm <= 1e-13 * x_scale {
                break;
            }
            w /= w_norm;
            let t = &x * &w;
            let tt = t.norm_squared();
            if tt <= (1e-13 * x_scale).powi(2) {
                break;
            }
            let p = x.transpose() * &t / tt;
            x -= &t * p.transpose();
            let r = t.dot(&y) / tt;
            y -= &t * r;
            weights.set_column(l, &w);
            loadings.set_column(l, &p);
            score_mat.set_column(l, &t);
            extracted += 1;
        }
        if extracted == 0 {
            return Err(Error::fit(
                "project: PLS extracted no components (degenerate sample)",
            ));
        }
        Ok(PlsPath {
            center,
            weights: weights.columns(0, extracted).into_owned(),
            loadings: loadings.columns(0, extracted).into_owned(),
            score_mat: score_mat.columns(0, extracted).into_owned(),
            labels: s.labels().to_vec(),
            n0,
            n1,
        })
    }

    /// Number of components actually extracted (may fall short of the
    /// request on degenerate samples).
    pub fn extracted(&self) -> usize {
        self.weights.ncols()
    }

    /// Discriminant model on the first `c` components.
    pub fn model(&self, c: usize) -> Result<PlsModel> {
        if c == 0 || c > self.extracted() {
            return Err(Error::parameter(format!(
                "project: component count {c} outside extracted range 1..={}",
                self.extracted()
            )));
        }
        let scores = self.score_mat.columns(0, c).into_owned();
        let lda = fit_score_lda(&scores, &self.labels, self.n0, self.n1)?;
        Ok(PlsModel {
            center: self.center.clone(),
            weights: self.weights.columns(0, c).into_owned(),
            loadings: self.loadings.columns(0, c).into_owned(),
            n_components: c,
            lda,
        })
    }
}

/// Extract PLS components and fit the score-space discriminant.
pub fn pls_fit(s: &LabeledSample, n_components: usize) -> Result<PlsModel> {
    let path = PlsPath::fit(s, n_components)?;
    path.model(path.extracted().min(n_components))
}

fn fit_score_lda(scores: &DMatrix<f64>, labels: &[u8], n0: usize, n1: usize) -> Result<ScoreLda> {
    let n = scores.nrows();
    let c = scores.ncols();
    let mut mu0 = DVector::zeros(c);
    let mut mu1 = DVector::zeros(c);
    for i in 0..n {
        let row = scores.row(i).transpose();
        if labels[i] == 0 {
            mu0 += row;
        } else {
            mu1 += row;
        }
    }
    mu0 /= n0 as f64;
    mu1 /= n1 as f64;

    if n < 3 {
        return Err(Error::insufficient(
            "project: pooled covariance needs n >= 3",
        ));
    }
    let mut pooled = DMatrix::zeros(c, c);
    for i in 0..n {
        let mu = if labels[i] == 0 { &mu0 } else { &mu1 };
        let d = scores.row(i).transpose() - mu;
        pooled += &d * d.transpose();
    }
    pooled /= (n - 2) as f64;

    let diff = &mu1 - &mu0;
    let beta = Cholesky::new(pooled)
        .ok_or_else(|| Error::fit("project: pooled score covariance is singular"))?
        .solve(&diff);
    let midpoint = (&mu0 + &mu1) / 2.0;
    let bias = ((n0 as f64 / n as f64) / (n1 as f64 / n as f64)).ln();
    Ok(ScoreLda {
        beta,
        midpoint,
        bias,
    })
}

/// Linear discriminant decision on the curve's PLS scores; ties go to 0.
pub fn pls_classify(m: &PlsModel, x: &Curve) -> Result<u8> {
    let scores = m.scores(x)?;
    Ok(m.lda.classify(&scores))
}

/// Fitted RKHS regression rule.
#[derive(Debug, Clone)]
pub struct RkhsModel {
    train: Vec<Curve>,
    grid: Grid,
    coef: DVector<f64>,
    sigma: f64,
    lambda: f64,
}

impl RkhsModel {
    pub fn coefficients(&self) -> &[f64] {
        self.coef.as_slice()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// η_n(x) = Σ c_i κ(x, X_i).
    pub fn eta(&self, x: &Curve) -> Result<f64> {
        self.grid.check_len(x.len(), "project: rkhs eta")?;
        let s2 = self.sigma * self.sigma;
        let mut acc = 0.0;
        for (c, xi) in self.coef.iter().zip(&self.train) {
            let d = l2_distance(x, xi, &self.grid)?;
            acc += c * (-d * d / s2).exp();
        }
        Ok(acc)
    }
}

/// Gaussian Gram matrix of a sample under the trapezoid L² distance.
pub fn gaussian_gram(s: &LabeledSample, sigma: f64) -> Result<DMatrix<f64>> {
    let n = s.n();
    let s2 = sigma * sigma;
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 1.0;
        for j in (i + 1)..n {
            let d = l2_distance(&s.curves()[i], &s.curves()[j], s.grid())?;
            let v = (-d * d / s2).exp();
            if !v.is_finite() {
                return Err(Error::fit(format!(
                    "project: non-finite kernel entry at ({i}, {j})"
                )));
            }
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Solve (K + nλI)c = Y for the raw 0/1 labels.
pub fn rkhs_fit(s: &LabeledSample, sigma_k: f64, lambda: f64) -> Result<RkhsModel> {
    if sigma_k <= 0.0 || lambda <= 0.0 {
        return Err(Error::parameter(format!(
            "project: RKHS parameters must be positive, got sigma = {sigma_k}, lambda = {lambda}"
        )));
    }
    let n = s.n();
    let mut system = gaussian_gram(s, sigma_k)?;
    for i in 0..n {
        system[(i, i)] += n as f64 * lambda;
    }
    let y = DVector::from_iterator(n, s.labels().iter().map(|&l| l as f64));
    let coef = Cholesky::new(system)
        .ok_or_else(|| Error::fit("project: RKHS system is not positive definite"))?
        .solve(&y);
    Ok(RkhsModel {
        train: s.curves().to_vec(),
        grid: s.grid().clone(),
        coef,
        sigma: sigma_k,
        lambda,
    })
}

/// 1 iff η_n(x) > 1/2 strictly; ties go to 0.
pub fn rkhs_classify(m: &RkhsModel, x: &Curve) -> Result<u8> {
    Ok(u8::from(m.eta(x)? > 0.5))
}
