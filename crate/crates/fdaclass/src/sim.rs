//! Gaussian process simulation with triangular covariances, plus the
//! non-Gaussian mixture model used in the second benchmark scenario.
//!
//! A triangular covariance is Γ(s,t) = u(min(s,t))·v(max(s,t)). Paths are
//! drawn by lower-triangular factorization of the grid covariance matrix
//! with escalating diagonal jitter, which copes with degenerate marginals
//! such as Brownian motion at the origin.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::curve::{Curve, Grid};
use crate::error::{Error, Result};

/// Scalar function on [a, b], shareable across threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Covariance factorization Γ(s,t) = u(min(s,t))·v(max(s,t)) together
/// with the factor derivatives needed by the likelihood-ratio formulas.
#[derive(Clone)]
pub struct TriangularCovariance {
    u: RealFn,
    v: RealFn,
    du: RealFn,
    dv: RealFn,
}

impl std::fmt::Debug for TriangularCovariance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TriangularCovariance").finish_non_exhaustive()
    }
}

impl TriangularCovariance {
    pub fn new(
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        du: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TriangularCovariance {
            u: Arc::new(u),
            v: Arc::new(v),
            du: Arc::new(du),
            dv: Arc::new(dv),
        }
    }

    pub fn u(&self, t: f64) -> f64 {
        (self.u)(t)
    }

    pub fn v(&self, t: f64) -> f64 {
        (self.v)(t)
    }

    pub fn du(&self, t: f64) -> f64 {
        (self.du)(t)
    }

    pub fn dv(&self, t: f64) -> f64 {
        (self.dv)(t)
    }

    /// Γ(s, t) = u(min)·v(max).
    pub fn gamma(&self, s: f64, t: f64) -> f64 {
        self.u(s.min(t)) * self.v(s.max(t))
    }

    /// v·u' − u·v', the common "diffusion scale" appearing in the
    /// equivalence conditions.
    pub fn w(&self, t: f64) -> f64 {
        self.v(t) * self.du(t) - self.u(t) * self.dv(t)
    }
}

/// Grid covariance matrix with entries u(min(t_j,t_k))·v(max(t_j,t_k)).
pub fn covariance_matrix(c: &TriangularCovariance, g: &Grid) -> Result<DMatrix<f64>> {
    let n = g.len();
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for &t in g.nodes() {
        let (ut, vt) = (c.u(t), c.v(t));
        if !ut.is_finite() || !vt.is_finite() {
            return Err(Error::fit(format!(
                "gp-sim: covariance factor is not finite at t = {t}"
            )));
        }
        u.push(ut);
        v.push(vt);
    }
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            // nodes are sorted, so min/max reduce to index order
            let entry = u[j] * v[k];
            m[(j, k)] = entry;
            m[(k, j)] = entry;
        }
    }
    Ok(m)
}

/// Lower-triangular factorization with diagonal jitter escalation:
/// ε·I is added with ε = 1e−12, 1e−11, ..., 1e−7 (six attempts) if the
/// plain factorization fails.
pub(crate) fn cholesky_with_jitter(m: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if let Some(chol) = Cholesky::new(m.clone()) {
        return Ok(chol);
    }
    let mut eps = 1e-12;
    for _ in 0..6 {
        let mut jittered = m.clone();
        for i in 0..m.nrows() {
            jittered[(i, i)] += eps;
        }
        if let Some(chol) = Cholesky::new(jittered) {
            return Ok(chol);
        }
        eps *= 10.0;
    }
    Err(Error::SingularCovariance)
}

/// A Gaussian process on [a, b]: mean, mean derivative, triangular
/// covariance.
#[derive(Clone)]
pub struct GpModel {
    a: f64,
    b: f64,
    mean: RealFn,
    dmean: RealFn,
    cov: TriangularCovariance,
}

impl std::fmt::Debug for GpModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GpModel")
            .field("a", &self.a)
            .field("b", &self.b)
            .finish_non_exhaustive()
    }
}

impl GpModel {
    /// Checks the compatibility hypothesis at construction: when the
    /// marginal variance vanishes at `a` (u(a) = 0) the mean must vanish
    /// there too, otherwise no equivalent-measure formula applies.
    pub fn new(
        a: f64,
        b: f64,
        mean: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dmean: impl Fn(f64) -> f64 + Send + Sync + 'static,
        cov: TriangularCovariance,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::parameter(format!(
                "gp-sim: invalid interval [{a}, {b}]"
            )));
        }
        let m_a = mean(a);
        if !m_a.is_finite() {
            return Err(Error::hypothesis(format!(
                "gp-sim: mean is not finite at t = {a}"
            )));
        }
        if cov.u(a).abs() <= 1e-12 && m_a.abs() > 1e-12 {
            return Err(Error::hypothesis(format!(
                "gp-sim: u({a}) = 0 requires m({a}) = 0, got m({a}) = {m_a}"
            )));
        }
        Ok(GpModel {
            a,
            b,
            mean: Arc::new(mean),
            dmean: Arc::new(dmean),
            cov,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mean(&self, t: f64) -> f64 {
        (self.mean)(t)
    }

    pub fn dmean(&self, t: f64) -> f64 {
        (self.dmean)(t)
    }

    pub fn cov(&self) -> &TriangularCovariance {
        &self.cov
    }

    pub fn mean_vector(&self, g: &Grid) -> DVector<f64> {
        DVector::from_iterator(g.len(), g.nodes().iter().map(|&t| self.mean(t)))
    }
}

/// Draw `n` independent paths of the model at the grid nodes.
pub fn sample_gaussian_paths(
    model: &GpModel,
    g: &Grid,
    n: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Curve>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let sigma = covariance_matrix(model.cov(), g)?;
    let chol = cholesky_with_jitter(&sigma)?;
    let lower = chol.l();
    let mean = model.mean_vector(g);
    let dim = g.len();
    let mut paths = Vec::with_capacity(n);
    for _ in 0..n {
        let z = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample(StandardNormal)));
        let x = &mean + &lower * z;
        paths.push(Curve::new(x.iter().copied().collect())?);
    }
    Ok(paths)
}

/// First benchmark population: mean 30·(1−t)^(1.1^i)·t^(1.1^(1−i)) with
/// covariance 0.25·exp(−|s−t|/0.3) on [0, 1], factored as
/// u(t) = 0.25·e^(t/0.3), v(t) = e^(−t/0.3).
pub fn model1_population(class: u8) -> GpModel {
    assert!(class <= 1, "class index must be 0 or 1");
    let p = 1.1f64.powi(class as i32); // exponent of (1-t)
    let r = 1.1f64.powi(1 - class as i32); // exponent of t
    let mean = move |t: f64| 30.0 * (1.0 - t).powf(p) * t.powf(r);
    let dmean = move |t: f64| {
        30.0 * (r * t.powf(r - 1.0) * (1.0 - t).powf(p) - p * t.powf(r) * (1.0 - t).powf(p - 1.0))
    };
    let cov = TriangularCovariance::new(
        |t| 0.25 * (t / 0.3).exp(),
        |t| (-t / 0.3).exp(),
        |t| 0.25 / 0.3 * (t / 0.3).exp(),
        |t| -1.0 / 0.3 * (-t / 0.3).exp(),
    );
    GpModel::new(0.0, 1.0, mean, dmean, cov).expect("first benchmark model is always valid")
}

/// Class spec for the mixture model: X_i(t) = U·h₁(t) + (1−U)·h_{i+2}(t) + ε(t)
/// with U uniform on [0,1] and unit white noise at the nodes.
#[derive(Debug, Clone, Copy)]
pub struct Model2Spec {
    class: u8,
}

impl Model2Spec {
    pub fn new(class: u8) -> Result<Self> {
        if class > 1 {
            return Err(Error::parameter(format!(
                "gp-sim: class index must be 0 or 1, got {class}"
            )));
        }
        Ok(Model2Spec { class })
    }

    pub fn class(&self) -> u8 {
        self.class
    }
}

/// h₁(t) = 2·max(3 − 5|2t − 1|, 0); the class bumps are shifts of it.
pub fn model2_h1(t: f64) -> f64 {
    2.0 * (3.0 - 5.0 * (2.0 * t - 1.0).abs()).max(0.0)
}

/// Noiseless mixture component for a fixed U = u.
pub fn model2_component(spec: Model2Spec, u: f64, g: &Grid) -> Curve {
    let shift = if spec.class == 0 { -0.2 } else { 0.2 };
    let values = g
        .nodes()
        .iter()
        .map(|&t| u * model2_h1(t) + (1.0 - u) * model2_h1(t + shift))
        .collect();
    Curve::new(values).expect("bump functions are finite")
}

/// Draw `n` mixture curves: per curve one uniform U, then independent
/// standard normal noise at every node.
pub fn model2_sample(
    spec: Model2Spec,
    g: &Grid,
    n: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Curve>> {
    if g.a() < 0.0 || g.b() > 1.0 {
        return Err(Error::parameter(format!(
            "gp-sim: mixture model needs a grid inside [0, 1], got [{}, {}]",
            g.a(),
            g.b()
        )));
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let base = model2_component(spec, u, g);
        let values = base
            .values()
            .iter()
            .map(|&x| x + rng.sample::<f64, _>(StandardNormal))
            .collect();
        out.push(Curve::new(values)?);
    }
    Ok(out)
}

/// Ornstein-Uhlenbeck covariance σ²·exp(−β|s−t|) in triangular form
/// u(t) = σ²e^(βt), v(t) = e^(−βt).
pub fn ou_model(sigma: f64, beta: f64) -> Result<TriangularCovariance> {
    if !(sigma > 0.0 && beta > 0.0) {
        return Err(Error::parameter(format!(
            "gp-sim: OU parameters must be positive, got sigma = {sigma}, beta = {beta}"
        )));
    }
    let s2 = sigma * sigma;
    Ok(TriangularCovariance::new(
        move |t| s2 * (beta * t).exp(),
        move |t| (-beta * t).exp(),
        move |t| s2 * beta * (beta * t).exp(),
        move |t| -beta * (-beta * t).exp(),
    ))
}

/// Brownian motion (u(t) = t, v ≡ 1) on [0, b] with the given trend.
/// The trend must vanish at the origin.
pub fn brownian_model(
    mean: impl Fn(f64) -> f64 + Send + Sync + 'static,
    dmean: impl Fn(f64) -> f64 + Send + Sync + 'static,
    b: f64,
) -> Result<GpModel> {
    let cov = TriangularCovariance::new(|t| t, |_| 1.0, |_| 1.0, |_| 0.0);
    if mean(0.0).abs() > 1e-12 {
        return Err(Error::hypothesis(format!(
            "gp-sim: Brownian trend must satisfy m(0) = 0, got m(0) = {}",
            mean(0.0)
        )));
    }
    GpModel::new(0.0, b, mean, dmean, cov)
}
