//! Closed-form likelihood ratios between Gaussian-process populations
//! with triangular covariances, the regression function they induce, the
//! plug-in Bayes classifier, and a finite-dimensional density-ratio
//! oracle used to validate the closed forms.
//!
//! Three population pairs admit closed forms:
//!
//! * equal (zero) means, covariances Γ_i = u_i(min)·v_i(max) with
//!   v_i u_i' − u_i v_i' shared between classes (the Varberg case);
//! * equal covariance, class-0 trend m and class-1 mean zero (the
//!   Jørsboe / Girsanov-type case);
//! * the general case, factored as a product of the two above.
//!
//! All computation is done in the log domain: the quadratic exponent of
//! the equal-means ratio grows with ‖x‖² and overflows `exp` otherwise.
//! Stieltjes integrals over the bounded-variation integrators f and g are
//! discretized as midpoint-weighted node sums
//! Σ_j ½(w(t_j)+w(t_{j+1}))·(F(t_{j+1})−F(t_j)), with f, g evaluated
//! analytically from (u, v, u', v', m, m'); nothing is ever integrated
//! against the rough path itself.
//!
//! The integrated-by-parts coefficient sets below are re-derived from the
//! pre-integration displays (not transcribed): for the equal-covariance
//! case the correct form is
//!
//! ```text
//! log dμ0/dμ1(x) = D1 − ½∫ g d(m/v)
//!                  + (D2 − g(a)/v(a))·x(a) + (g(b)/v(b))·x(b) − ∫ (x/v) dg
//! ```
//!
//! which reproduces the Girsanov ratio exp{θx(1) − θ²/2} exactly for
//! Brownian motion with trend θt, and for the equal-means case
//!
//! ```text
//! log dμ0/dμ1(x) = log C1 + ½(C3·x²(a) + C4·x²(b) − ∫ x²/(v0·v1) df)
//! C2 = 1/(u1(a)v1(a)) − 1/(u0(a)v0(a))   (0 when u(a) = 0)
//! C3 = C2 − f(a)/(v0(a)v1(a)),  C4 = f(b)/(v0(b)v1(b))
//! ```
//!
//! Both forms are checked against [`grid_density_log_ratio`] in the test
//! suites; the discrepancy vanishes as the grid is refined.

use nalgebra::{DMatrix, DVector};

use crate::curve::{Curve, Grid};
use crate::error::{Error, Result};
use crate::sim::{cholesky_with_jitter, GpModel, RealFn, TriangularCovariance};

/// Threshold below which u(a) is treated as exactly zero.
const U_ZERO_TOL: f64 = 1e-12;
/// Minimum admissible value of v·u' − u·v' over the grid.
const W_MIN: f64 = 1e-10;
/// Relative tolerance for the shared-w equivalence condition.
const W_MATCH_RTOL: f64 = 1e-8;

/// Zero-mean pair with triangular covariances satisfying the
/// equivalence conditions of the equal-means closed form.
#[derive(Debug, Clone)]
pub struct EqualMeansPair {
    pub cov0: TriangularCovariance,
    pub cov1: TriangularCovariance,
}

impl EqualMeansPair {
    pub fn new(cov0: TriangularCovariance, cov1: TriangularCovariance) -> Self {
        EqualMeansPair { cov0, cov1 }
    }

    /// The pair with class roles exchanged.
    pub fn swapped(&self) -> EqualMeansPair {
        EqualMeansPair::new(self.cov1.clone(), self.cov0.clone())
    }
}

/// Shared covariance; class 0 has trend `m`, class 1 has mean zero.
#[derive(Clone)]
pub struct EqualCovPair {
    cov: TriangularCovariance,
    mean: RealFn,
    dmean: RealFn,
}

impl std::fmt::Debug for EqualCovPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EqualCovPair").finish_non_exhaustive()
    }
}

impl EqualCovPair {
    pub fn new(
        cov: TriangularCovariance,
        mean: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dmean: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        EqualCovPair {
            cov,
            mean: std::sync::Arc::new(mean),
            dmean: std::sync::Arc::new(dmean),
        }
    }

    fn from_parts(cov: TriangularCovariance, mean: RealFn, dmean: RealFn) -> Self {
        EqualCovPair { cov, mean, dmean }
    }

    pub fn cov(&self) -> &TriangularCovariance {
        &self.cov
    }

    pub fn mean(&self, t: f64) -> f64 {
        (self.mean)(t)
    }
}

/// Arbitrary means, triangular covariances under the equal-means-case
/// conditions; the ratio factors through a zero-mean middle measure.
#[derive(Debug, Clone)]
pub struct GeneralPair {
    pub model0: GpModel,
    pub model1: GpModel,
}

impl GeneralPair {
    pub fn new(model0: GpModel, model1: GpModel) -> Self {
        GeneralPair { model0, model1 }
    }

    pub fn swapped(&self) -> GeneralPair {
        GeneralPair::new(self.model1.clone(), self.model0.clone())
    }
}

/// Midpoint-weighted Stieltjes sum Σ ½(y_j + y_{j+1})(F_{j+1} − F_j).
fn stieltjes(y: &[f64], integrator: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..y.len() - 1 {
        acc += 0.5 * (y[j] + y[j + 1]) * (integrator[j + 1] - integrator[j]);
    }
    acc
}

/// Grid-bound evaluator for the equal-means ratio: the log-ratio is a
/// diagonal quadratic form log C1 + Σ q_j·x(t_j)².
#[derive(Debug, Clone)]
pub struct EqualMeansRn {
    log_c1: f64,
    quad: Vec<f64>,
    n: usize,
}

impl EqualMeansRn {
    pub fn new(pair: &EqualMeansPair, g: &Grid) -> Result<Self> {
        let n = g.len();
        let nodes = g.nodes();
        let (c0, c1) = (&pair.cov0, &pair.cov1);

        let mut f = Vec::with_capacity(n);
        let mut recip_vv = Vec::with_capacity(n);
        for (j, &t) in nodes.iter().enumerate() {
            let (u0, v0, dv0) = (c0.u(t), c0.v(t), c0.dv(t));
            let (u1, v1, dv1) = (c1.u(t), c1.v(t), c1.dv(t));
            if v0 <= 0.0 || v1 <= 0.0 {
                return Err(Error::hypothesis(format!(
                    "bayes-oracle: v must be positive on the grid, violated at t = {t}"
                )));
            }
            if j > 0 && (u0 <= 0.0 || u1 <= 0.0) {
                return Err(Error::hypothesis(format!(
                    "bayes-oracle: u must be positive on (a, b], violated at t = {t}"
                )));
            }
            let w1 = c1.w(t);
            let w0 = c0.w(t);
            if w1 <= W_MIN {
                return Err(Error::hypothesis(format!(
                    "bayes-oracle: v1·u1' − u1·v1' must exceed {W_MIN} on the grid, got {w1} at t = {t}"
                )));
            }
            if (w1 - w0).abs() > W_MATCH_RTOL * w1.abs().max(w0.abs()) {
                return Err(Error::hypothesis(format!(
                    "bayes-oracle: equivalence condition u·v' − u'·v shared between classes fails at t = {t}: {w0} vs {w1}"
                )));
            }
            f.push((v1 * dv0 - v0 * dv1) / w1);
            recip_vv.push(1.0 / (v0 * v1));
        }

        let a = nodes[0];
        let b = nodes[n - 1];
        let u0a = c0.u(a);
        let u1a = c1.u(a);
        if (u0a.abs() <= U_ZERO_TOL) != (u1a.abs() <= U_ZERO_TOL) {
            return Err(Error::hypothesis(format!(
                "bayes-oracle: u1(a) = 0 iff u0(a) = 0 fails: u0(a) = {u0a}, u1(a) = {u1a}"
            )));
        }
        let (log_c1, c2) = if u0a.abs() <= U_ZERO_TOL {
            let c1_sq = c0.v(a) * c1.v(b) / (c0.v(b) * c1.v(a));
            (0.5 * c1_sq.ln(), 0.0)
        } else {
            let c1_sq = u1a * c1.v(b) / (c0.v(b) * u0a);
            (
                0.5 * c1_sq.ln(),
                1.0 / (u1a * c1.v(a)) - 1.0 / (u0a * c0.v(a)),
            )
        };
        let c3 = c2 - f[0] * recip_vv[0];
        let c4 = f[n - 1] * recip_vv[n - 1];

        let mut quad = vec![0.0; n];
        quad[0] = 0.5 * c3 - 0.25 * recip_vv[0] * (f[1] - f[0]);
        for j in 1..n - 1 {
            quad[j] = -0.25 * recip_vv[j] * (f[j + 1] - f[j - 1]);
        }
        quad[n - 1] = 0.5 * c4 - 0.25 * recip_vv[n - 1] * (f[n - 1] - f[n - 2]);

        if !log_c1.is_finite() || quad.iter().any(|q| !q.is_finite()) {
            return Err(Error::hypothesis(
                "bayes-oracle: non-finite coefficient in the equal-means ratio",
            ));
        }
        Ok(EqualMeansRn { log_c1, quad, n })
    }

    pub fn log_rn(&self, x: &Curve) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                context: "bayes-oracle: equal-means ratio",
                expected: self.n,
                got: x.len(),
            });
        }
        let mut acc = self.log_c1;
        for (q, v) in self.quad.iter().zip(x.values()) {
            acc += q * v * v;
        }
        Ok(acc)
    }
}

/// Grid-bound evaluator for the equal-covariance ratio: the log-ratio is
/// affine in the path, constant + Σ l_j·x(t_j).
#[derive(Debug, Clone)]
pub struct EqualCovRn {
    constant: f64,
    lin: Vec<f64>,
    n: usize,
}

impl EqualCovRn {
    pub fn new(pair: &EqualCovPair, g: &Grid) -> Result<Self> {
        let n = g.len();
        let nodes = g.nodes();
        let cov = &pair.cov;

        let mut g_fn = Vec::with_capacity(n);
        let mut m_over_v = Vec::with_capacity(n);
        let mut recip_v = Vec::with_capacity(n);
        for &t in nodes {
            let (v, dv) = (cov.v(t), cov.dv(t));
            if v <= 0.0 {
                return Err(Error::hypothesis(format!(
                    "bayes-oracle: v must be positive on the grid, violated at t = {t}"
                )));
            }
            let w = cov.w(t);
            if w <= W_MIN {
                return Err(Error::hypothesis(format!(
                    "bayes-oracle: v·u' − u·v' must exceed {W_MIN} on the grid, got {w} at t = {t}"
                )));
            }
            let m = pair.mean(t);
            let dm = (pair.dmean)(t);
            if !m.is_finite() || !dm.is_finite() {
                return Err(Error::hypothesis(format!(
                    "bayes-oracle: trend or its derivative is not finite at t = {t}"
                )));
            }
            g_fn.push((v * dm - m * dv) / w);
            m_over_v.push(m / v);
            recip_v.push(1.0 / v);
        }

        let a = nodes[0];
        let ua = cov.u(a);
        let ma = pair.mean(a);
        let (d1, d2) = if ua.abs() <= U_ZERO_TOL {
            if ma.abs() > U_ZERO_TOL {
                return Err(Error::hypothesis(format!(
                    "bayes-oracle: u(a) = 0 requires m(a) = 0, got m(a) = {ma}"
                )));
            }
            (0.0, 0.0)
        } else {
            let va = cov.v(a);
            (-ma * ma / (2.0 * ua * va), ma / (ua * va))
        };

        let constant = d1 - 0.5 * stieltjes(&g_fn, &m_over_v);

        let mut lin = vec![0.0; n];
        lin[0] = d2 - g_fn[0] * recip_v[0] - 0.5 * recip_v[0] * (g_fn[1] - g_fn[0]);
        for j in 1..n - 1 {
            lin[j] = -0.5 * recip_v[j] * (g_fn[j + 1] - g_fn[j - 1]);
        }
        lin[n - 1] =
            g_fn[n - 1] * recip_v[n - 1] - 0.5 * recip_v[n - 1] * (g_fn[n - 1] - g_fn[n - 2]);

        if !constant.is_finite() || lin.iter().any(|l| !l.is_finite()) {
            return Err(Error::hypothesis(
                "bayes-oracle: non-finite coefficient in the equal-covariance ratio",
            ));
        }
        Ok(EqualCovRn { constant, lin, n })
    }

    pub fn log_rn(&self, x: &Curve) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                context: "bayes-oracle: equal-covariance ratio",
                expected: self.n,
                got: x.len(),
            });
        }
        let mut acc = self.constant;
        for (l, v) in self.lin.iter().zip(x.values()) {
            acc += l * v;
        }
        Ok(acc)
    }
}

/// Grid-bound evaluator for the general ratio, the three-factor product
/// dP_{m0,Γ0}/dP_{0,Γ0} · dP_{0,Γ0}/dP_{0,Γ1} · dP_{0,Γ1}/dP_{m1,Γ1}
/// accumulated in the log domain.
#[derive(Debug, Clone)]
pub struct GeneralRn {
    lead: EqualCovRn,
    mid: EqualMeansRn,
    trail: EqualCovRn,
}

impl GeneralRn {
    pub fn new(pair: &GeneralPair, g: &Grid) -> Result<Self> {
        let (m0, m1) = (&pair.model0, &pair.model1);
        let mid = EqualMeansRn::new(
            &EqualMeansPair::new(m0.cov().clone(), m1.cov().clone()),
            g,
        )?;
        let lead = EqualCovRn::new(
            &EqualCovPair::from_parts(
                m0.cov().clone(),
                mean_fn(m0.clone()),
                dmean_fn(m0.clone()),
            ),
            g,
        )?;
        let trail = EqualCovRn::new(
            &EqualCovPair::from_parts(
                m1.cov().clone(),
                mean_fn(m1.clone()),
                dmean_fn(m1.clone()),
            ),
            g,
        )?;
        Ok(GeneralRn { lead, mid, trail })
    }

    pub fn log_rn(&self, x: &Curve) -> Result<f64> {
        Ok(self.lead.log_rn(x)? + self.mid.log_rn(x)? - self.trail.log_rn(x)?)
    }
}

fn mean_fn(model: GpModel) -> RealFn {
    std::sync::Arc::new(move |t| model.mean(t))
}

fn dmean_fn(model: GpModel) -> RealFn {
    std::sync::Arc::new(move |t| model.dmean(t))
}

/// dμ0/dμ1 for a zero-mean pair. May overflow to +∞ for extreme paths;
/// use [`log_rn_equal_means`] in that regime.
pub fn rn_equal_means(pair: &EqualMeansPair, x: &Curve, g: &Grid) -> Result<f64> {
    log_rn_equal_means(pair, x, g).map(f64::exp)
}

pub fn log_rn_equal_means(pair: &EqualMeansPair, x: &Curve, g: &Grid) -> Result<f64> {
    EqualMeansRn::new(pair, g)?.log_rn(x)
}

/// dμ0/dμ1 for an equal-covariance pair (class-0 trend m, class-1 mean 0).
pub fn rn_equal_cov(pair: &EqualCovPair, x: &Curve, g: &Grid) -> Result<f64> {
    log_rn_equal_cov(pair, x, g).map(f64::exp)
}

pub fn log_rn_equal_cov(pair: &EqualCovPair, x: &Curve, g: &Grid) -> Result<f64> {
    EqualCovRn::new(pair, g)?.log_rn(x)
}

/// dμ0/dμ1 for the general pair.
pub fn rn_general(pair: &GeneralPair, x: &Curve, g: &Grid) -> Result<f64> {
    log_rn_general(pair, x, g).map(f64::exp)
}

pub fn log_rn_general(pair: &GeneralPair, x: &Curve, g: &Grid) -> Result<f64> {
    GeneralRn::new(pair, g)?.log_rn(x)
}

/// Regression function value on the common support:
/// η = (1 − p) / (p·r + 1 − p) with r = dμ0/dμ1(x), p = P{Y = 0}.
/// Monotone decreasing in r.
pub fn eta(r: f64, p: f64) -> f64 {
    (1.0 - p) / (p * r + (1.0 - p))
}

/// One of the three closed-form pair types.
#[derive(Debug, Clone)]
pub enum RnPair {
    EqualMeans(EqualMeansPair),
    EqualCov(EqualCovPair),
    General(GeneralPair),
}

/// The plug-in Bayes rule: classify 1 when η(x) > 1/2, i.e. when
/// dμ0/dμ1(x) < (1−p)/p; ties go to class 0.
#[derive(Debug, Clone)]
pub struct PluginClassifier {
    pair: RnPair,
    prior: f64,
}

impl PluginClassifier {
    /// `prior` = P{Y = 0}, in (0, 1).
    pub fn new(pair: RnPair, prior: f64) -> Result<Self> {
        if !(prior > 0.0 && prior < 1.0) {
            return Err(Error::parameter(format!(
                "bayes-oracle: prior must lie in (0,1), got {prior}"
            )));
        }
        Ok(PluginClassifier { pair, prior })
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    /// Precompute the grid-bound evaluator.
    pub fn bind(&self, g: &Grid) -> Result<BoundPlugin> {
        let rn = match &self.pair {
            RnPair::EqualMeans(p) => BoundRn::EqualMeans(EqualMeansRn::new(p, g)?),
            RnPair::EqualCov(p) => BoundRn::EqualCov(EqualCovRn::new(p, g)?),
            RnPair::General(p) => BoundRn::General(GeneralRn::new(p, g)?),
        };
        Ok(BoundPlugin {
            rn,
            prior: self.prior,
            log_threshold: ((1.0 - self.prior) / self.prior).ln(),
        })
    }
}

#[derive(Debug, Clone)]
enum BoundRn {
    EqualMeans(EqualMeansRn),
    EqualCov(EqualCovRn),
    General(GeneralRn),
}

/// Grid-bound plug-in rule.
#[derive(Debug, Clone)]
pub struct BoundPlugin {
    rn: BoundRn,
    prior: f64,
    log_threshold: f64,
}

impl BoundPlugin {
    pub fn log_rn(&self, x: &Curve) -> Result<f64> {
        match &self.rn {
            BoundRn::EqualMeans(r) => r.log_rn(x),
            BoundRn::EqualCov(r) => r.log_rn(x),
            BoundRn::General(r) => r.log_rn(x),
        }
    }

    pub fn eta(&self, x: &Curve) -> Result<f64> {
        Ok(eta(self.log_rn(x)?.exp(), self.prior))
    }

    /// 1 iff dμ0/dμ1(x) < (1−p)/p (strict); the η = 1/2 tie goes to 0.
    pub fn classify(&self, x: &Curve) -> Result<u8> {
        Ok(u8::from(self.log_rn(x)? < self.log_threshold))
    }
}

/// One-shot plug-in classification.
pub fn bayes_classify(x: &Curve, c: &PluginClassifier, g: &Grid) -> Result<u8> {
    c.bind(g)?.classify(x)
}

/// Validation oracle: log-ratio of the two N-variate normal densities of
/// the discretized path, log φ_{m0,Σ0}(x) − log φ_{m1,Σ1}(x), computed by
/// factorized solves. When Γ(a, a) = 0 (a degenerate marginal at the left
/// endpoint, e.g. Brownian motion) the first node is dropped.
pub fn grid_density_log_ratio(
    x: &Curve,
    model0: &GpModel,
    model1: &GpModel,
    g: &Grid,
) -> Result<f64> {
    g.check_len(x.len(), "bayes-oracle: grid_density_log_ratio")?;
    let a = g.a();
    let degenerate =
        model0.cov().gamma(a, a).abs() <= U_ZERO_TOL || model1.cov().gamma(a, a).abs() <= U_ZERO_TOL;
    let start = usize::from(degenerate);
    density_log_ratio_at_nodes(
        &g.nodes()[start..],
        &x.values()[start..],
        model0,
        model1,
    )
}

/// Core of the oracle on an explicit node set (length >= 1).
pub(crate) fn density_log_ratio_at_nodes(
    nodes: &[f64],
    x: &[f64],
    model0: &GpModel,
    model1: &GpModel,
) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::OracleUnavailable(
            "no nodes left after dropping the degenerate endpoint".into(),
        ));
    }
    Ok(mvn_log_density(nodes, x, model0)? - mvn_log_density(nodes, x, model1)?)
}

fn mvn_log_density(nodes: &[f64], x: &[f64], model: &GpModel) -> Result<f64> {
    let n = nodes.len();
    let mut sigma = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let gamma = model.cov().gamma(nodes[j], nodes[k]);
            sigma[(j, k)] = gamma;
            sigma[(k, j)] = gamma;
        }
    }
    let chol = cholesky_with_jitter(&sigma).map_err(|_| {
        Error::OracleUnavailable("covariance matrix singular after node drop and jitter".into())
    })?;
    let centered = DVector::from_iterator(n, (0..n).map(|j| x[j] - model.mean(nodes[j])));
    let solved = chol.solve(&centered);
    let quad = centered.dot(&solved);
    let log_det: f64 = (0..n).map(|j| chol.l_dirty()[(j, j)].ln()).sum::<f64>() * 2.0;
    Ok(-0.5 * (quad + log_det + n as f64 * (2.0 * std::f64::consts::PI).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{brownian_model, model1_population, ou_model, sample_gaussian_paths};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn remark_ou_pair() -> EqualMeansPair {
        EqualMeansPair::new(ou_model(0.5, 2.0).unwrap(), ou_model(1.0, 0.5).unwrap())
    }

    fn ou_gp(sigma: f64, beta: f64, mean0: f64) -> GpModel {
        GpModel::new(
            0.0,
            1.0,
            move |_| mean0,
            |_| 0.0,
            ou_model(sigma, beta).unwrap(),
        )
        .unwrap()
    }

    /// Simulate a Brownian path with x(0) = 0 exactly via increments.
    fn brownian_path(g: &Grid, drift: f64, rng: &mut impl Rng) -> Curve {
        let nodes = g.nodes();
        let mut values = Vec::with_capacity(nodes.len());
        let mut x = 0.0;
        values.push(0.0);
        for w in nodes.windows(2) {
            let dt = w[1] - w[0];
            let z: f64 = rng.sample(StandardNormal);
            x += drift * dt + dt.sqrt() * z;
            values.push(x);
        }
        Curve::new(values).unwrap()
    }

    #[test]
    fn identical_covariances_give_ratio_one() {
        let g = Grid::equispaced(0.0, 1.0, 17).unwrap();
        let pair = EqualMeansPair::new(ou_model(0.5, 2.0).unwrap(), ou_model(0.5, 2.0).unwrap());
        let x = Curve::from_fn(&g, |t| (3.0 * t).sin()).unwrap();
        assert_eq!(rn_equal_means(&pair, &x, &g).unwrap(), 1.0);
    }

    #[test]
    fn ou_pair_constant_on_zero_path() {
        // x ≡ 0 kills every quadratic term, leaving
        // C1 = sqrt(u1(0)·v1(1)/(v0(1)·u0(0))) = sqrt(4·e^1.5)
        let g = Grid::equispaced(0.0, 1.0, 51).unwrap();
        let x = Curve::from_fn(&g, |_| 0.0).unwrap();
        let got = rn_equal_means(&remark_ou_pair(), &x, &g).unwrap();
        let want = (4.0 * 1.5f64.exp()).sqrt();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!((want - 4.2340).abs() < 1e-4);
    }

    #[test]
    fn ou_pair_log_ratio_converges_to_oracle() {
        let fine = Grid::equispaced(0.0, 1.0, 201).unwrap();
        let gp0 = ou_gp(0.5, 2.0, 0.0);
        let gp1 = ou_gp(1.0, 0.5, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut paths = sample_gaussian_paths(&gp0, &fine, 10, &mut rng).unwrap();
        paths.extend(sample_gaussian_paths(&gp1, &fine, 10, &mut rng).unwrap());
        let pair = remark_ou_pair();

        let mut medians = Vec::new();
        for stride in [20usize, 4, 1] {
            let nodes: Vec<f64> = fine.nodes().iter().step_by(stride).copied().collect();
            let g = Grid::new(nodes).unwrap();
            let rn = EqualMeansRn::new(&pair, &g).unwrap();
            let mut errs: Vec<f64> = paths
                .iter()
                .map(|p| {
                    let sub: Vec<f64> = p.values().iter().step_by(stride).copied().collect();
                    let x = Curve::new(sub).unwrap();
                    let oracle = grid_density_log_ratio(&x, &gp0, &gp1, &g).unwrap();
                    (rn.log_rn(&x).unwrap() - oracle).abs()
                })
                .collect();
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push(errs[errs.len() / 2]);
        }
        assert!(
            medians[0] >= medians[1] && medians[1] >= medians[2],
            "medians not non-increasing: {medians:?}"
        );
        assert!(medians[2] < 1e-2, "N=201 median too large: {medians:?}");
    }

    #[test]
    fn equal_means_reciprocity() {
        let g = Grid::equispaced(0.0, 1.0, 31).unwrap();
        let pair = remark_ou_pair();
        let swapped = pair.swapped();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let paths = sample_gaussian_paths(&ou_gp(0.5, 2.0, 0.0), &g, 20, &mut rng).unwrap();
        for x in &paths {
            let fwd = log_rn_equal_means(&pair, x, &g).unwrap();
            let bwd = log_rn_equal_means(&swapped, x, &g).unwrap();
            assert!((fwd + bwd).abs() < 1e-8, "{fwd} vs {bwd}");
        }
    }

    #[test]
    fn zero_trend_gives_ratio_one() {
        let g = Grid::equispaced(0.0, 1.0, 21).unwrap();
        let pair = EqualCovPair::new(ou_model(1.0, 1.0).unwrap(), |_| 0.0, |_| 0.0);
        let x = Curve::from_fn(&g, |t| t * t - 0.3).unwrap();
        assert_eq!(rn_equal_cov(&pair, &x, &g).unwrap(), 1.0);
    }

    #[test]
    fn brownian_drift_matches_girsanov_closed_form() {
        // For u(t) = t, v ≡ 1, m(t) = θt the ratio is exp{θx(1) − θ²/2};
        // g ≡ θ makes every Stieltjes sum exact on any grid.
        let theta = 1.0;
        let pair = EqualCovPair::new(
            TriangularCovariance::new(|t| t, |_| 1.0, |_| 1.0, |_| 0.0),
            move |t| theta * t,
            move |_| theta,
        );
        for nodes in [
            vec![0.0, 0.25, 0.5, 0.75, 1.0],
            vec![0.0, 0.1, 0.33, 0.8, 0.94, 1.0],
        ] {
            let g = Grid::new(nodes).unwrap();
            let mut values: Vec<f64> = g.nodes().iter().map(|&t| 0.3 * t).collect();
            values[0] = 0.0;
            // force x(1) = 0.3
            let last = values.len() - 1;
            values[last] = 0.3;
            let x = Curve::new(values).unwrap();
            let got = rn_equal_cov(&pair, &x, &g).unwrap();
            let want = (theta * 0.3 - theta * theta / 2.0).exp();
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            assert!((want - 0.81873).abs() < 1e-5);
        }
    }

    #[test]
    fn brownian_drift_matches_oracle_exactly() {
        let theta = 2.0;
        let pair = EqualCovPair::new(
            TriangularCovariance::new(|t| t, |_| 1.0, |_| 1.0, |_| 0.0),
            move |t| theta * t,
            move |_| theta,
        );
        let gp0 = brownian_model(move |t| theta * t, move |_| theta, 1.0).unwrap();
        let gp1 = brownian_model(|_| 0.0, |_| 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [11usize, 51, 201] {
            let g = Grid::equispaced(0.0, 1.0, n).unwrap();
            let rn = EqualCovRn::new(&pair, &g).unwrap();
            for _ in 0..20 {
                let x = brownian_path(&g, theta, &mut rng);
                let formula = rn.log_rn(&x).unwrap();
                let oracle = grid_density_log_ratio(&x, &gp0, &gp1, &g).unwrap();
                let closed = theta * x.values()[n - 1] - theta * theta / 2.0;
                assert!((formula - closed).abs() < 1e-8, "formula {formula} vs {closed}");
                assert!((oracle - closed).abs() < 1e-8, "oracle {oracle} vs {closed}");
            }
        }
    }

    #[test]
    fn equal_cov_reciprocity_via_shift() {
        // dμ1/dμ0(x) = dN(−m)/dN(0)(x − m): antisymmetry is exact even on
        // coarse grids because both sides share the discretization.
        let g = Grid::equispaced(0.0, 1.0, 13).unwrap();
        let cov = ou_model(0.8, 1.2).unwrap();
        let mean = |t: f64| 2.0 * t * (1.0 - t);
        let dmean = |t: f64| 2.0 - 4.0 * t;
        let pair = EqualCovPair::new(cov.clone(), mean, dmean);
        let flipped = EqualCovPair::new(cov, move |t| -mean(t), move |t| -dmean(t));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let paths = sample_gaussian_paths(&ou_gp(0.8, 1.2, 0.0), &g, 10, &mut rng).unwrap();
        for x in &paths {
            let fwd = log_rn_equal_cov(&pair, x, &g).unwrap();
            let shifted = Curve::new(
                x.values()
                    .iter()
                    .zip(g.nodes())
                    .map(|(v, &t)| v - mean(t))
                    .collect(),
            )
            .unwrap();
            let bwd = log_rn_equal_cov(&flipped, &shifted, &g).unwrap();
            assert!((fwd + bwd).abs() < 1e-9, "{fwd} vs {bwd}");
        }
    }

    #[test]
    fn general_pair_trivial_and_reciprocal() {
        let g = Grid::equispaced(0.0, 1.0, 26).unwrap();
        let pair = GeneralPair::new(model1_population(0), model1_population(1));
        let same = GeneralPair::new(model1_population(0), model1_population(0));
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let paths = sample_gaussian_paths(&model1_population(0), &g, 10, &mut rng).unwrap();
        for x in &paths {
            assert_eq!(rn_general(&same, x, &g).unwrap(), 1.0);
            let fwd = log_rn_general(&pair, x, &g).unwrap();
            let bwd = log_rn_general(&pair.swapped(), x, &g).unwrap();
            assert!((fwd + bwd).abs() < 1e-9);
        }
    }

    #[test]
    fn model1_log_ratio_converges_to_oracle() {
        let fine = Grid::equispaced(0.0, 1.0, 201).unwrap();
        let (gp0, gp1) = (model1_population(0), model1_population(1));
        let pair = GeneralPair::new(gp0.clone(), gp1.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut paths = sample_gaussian_paths(&gp0, &fine, 10, &mut rng).unwrap();
        paths.extend(sample_gaussian_paths(&gp1, &fine, 10, &mut rng).unwrap());

        let mut medians = Vec::new();
        for stride in [20usize, 4, 1] {
            let nodes: Vec<f64> = fine.nodes().iter().step_by(stride).copied().collect();
            let g = Grid::new(nodes).unwrap();
            let rn = GeneralRn::new(&pair, &g).unwrap();
            let mut errs: Vec<f64> = paths
                .iter()
                .map(|p| {
                    let sub: Vec<f64> = p.values().iter().step_by(stride).copied().collect();
                    let x = Curve::new(sub).unwrap();
                    let oracle = grid_density_log_ratio(&x, &gp0, &gp1, &g).unwrap();
                    (rn.log_rn(&x).unwrap() - oracle).abs()
                })
                .collect();
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push(errs[errs.len() / 2]);
        }
        assert!(
            medians[0] >= medians[1] && medians[1] >= medians[2],
            "medians not non-increasing: {medians:?}"
        );
    }

    #[test]
    fn eta_values_and_monotonicity() {
        assert!((eta(1.0, 0.5) - 0.5).abs() < 1e-15);
        assert!((eta(3.0, 0.5) - 0.25).abs() < 1e-15);
        assert_eq!(eta(f64::INFINITY, 0.5), 0.0);
        let mut last = f64::INFINITY;
        for j in 0..50 {
            let r = 0.05 * j as f64;
            let e = eta(r, 0.3);
            assert!((0.0..=1.0).contains(&e));
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn bayes_classify_threshold_and_ties() {
        let g = Grid::equispaced(0.0, 1.0, 11).unwrap();
        // Identical models force r = 1 exactly: the η = 1/2 tie goes to 0.
        let same = PluginClassifier::new(
            RnPair::General(GeneralPair::new(model1_population(0), model1_population(0))),
            0.5,
        )
        .unwrap();
        let x = Curve::from_fn(&g, |t| t).unwrap();
        assert_eq!(bayes_classify(&x, &same, &g).unwrap(), 0);
    }

    #[test]
    fn classify_flips_with_prior_and_ratio() {
        // threshold r < (1−p)/p: with p = 1/2, r = 0.5 → 1; with p = 0.9 → 0
        assert!(eta(0.5, 0.5) > 0.5);
        assert!(eta(0.5, 0.9) < 0.5);
        let g = Grid::equispaced(0.0, 1.0, 5).unwrap();
        let plugin = |p: f64| {
            PluginClassifier::new(
                RnPair::EqualCov(EqualCovPair::new(
                    TriangularCovariance::new(|t| t, |_| 1.0, |_| 1.0, |_| 0.0),
                    |t| t,
                    |_| 1.0,
                )),
                p,
            )
            .unwrap()
        };
        // log r = x(1) − 1/2 ; choose x(1) to make r = 0.5
        let target = 0.5f64.ln() + 0.5;
        let x = Curve::new(vec![0.0, 0.0, 0.0, 0.0, target]).unwrap();
        assert_eq!(bayes_classify(&x, &plugin(0.5), &g).unwrap(), 1);
        assert_eq!(bayes_classify(&x, &plugin(0.9), &g).unwrap(), 0);
    }

    #[test]
    fn oracle_identical_models_zero() {
        let g = Grid::equispaced(0.0, 1.0, 9).unwrap();
        let gp = ou_gp(1.0, 1.0, 0.0);
        let x = Curve::from_fn(&g, |t| t.cos()).unwrap();
        assert_eq!(grid_density_log_ratio(&x, &gp, &gp, &g).unwrap(), 0.0);
    }

    #[test]
    fn oracle_single_node_closed_form() {
        // At the single node t = 1 with OU(1,1) covariance the marginal is
        // standard normal; means 0 and c give the 1-D log-density difference.
        let c = 0.7;
        let gp0 = ou_gp(1.0, 1.0, 0.0);
        let gp1 = ou_gp(1.0, 1.0, c);
        for x in [-1.3, 0.0, 0.4, 2.2] {
            let got = density_log_ratio_at_nodes(&[1.0], &[x], &gp0, &gp1).unwrap();
            let want = -0.5 * x * x + 0.5 * (x - c) * (x - c);
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn equal_means_u_zero_branch_against_oracle() {
        // Brownian motion (u = t, v ≡ 1) vs the hyperbolic-sine pair
        // (u = sinh t, v = e^{-t}); both have v·u' − u·v' ≡ 1 and u(0) = 0.
        let bm_cov = TriangularCovariance::new(|t| t, |_| 1.0, |_| 1.0, |_| 0.0);
        let sinh_cov = TriangularCovariance::new(
            |t| t.sinh(),
            |t| (-t).exp(),
            |t| t.cosh(),
            |t| -(-t).exp(),
        );
        let pair = EqualMeansPair::new(bm_cov.clone(), sinh_cov.clone());
        let gp0 = GpModel::new(0.0, 1.0, |_| 0.0, |_| 0.0, bm_cov).unwrap();
        let gp1 = GpModel::new(0.0, 1.0, |_| 0.0, |_| 0.0, sinh_cov).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);

        let mut medians = Vec::new();
        for n in [11usize, 51, 201] {
            let g = Grid::equispaced(0.0, 1.0, n).unwrap();
            let rn = EqualMeansRn::new(&pair, &g).unwrap();
            let mut errs: Vec<f64> = (0..30)
                .map(|_| {
                    let x = brownian_path(&g, 0.0, &mut rng);
                    let formula = rn.log_rn(&x).unwrap();
                    let oracle = grid_density_log_ratio(&x, &gp0, &gp1, &g).unwrap();
                    (formula - oracle).abs()
                })
                .collect();
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push(errs[errs.len() / 2]);
        }
        assert!(
            medians[0] >= medians[1] && medians[1] >= medians[2],
            "medians not non-increasing: {medians:?}"
        );
    }

    #[test]
    fn hypothesis_violations_are_rejected() {
        let g = Grid::equispaced(0.0, 1.0, 7).unwrap();
        // Different σ²β breaks the shared-w condition.
        let bad = EqualMeansPair::new(ou_model(1.0, 1.0).unwrap(), ou_model(1.0, 0.5).unwrap());
        assert!(EqualMeansRn::new(&bad, &g).is_err());
        // u(a) = 0 for one class only.
        let bm = TriangularCovariance::new(|t| t, |_| 1.0, |_| 1.0, |_| 0.0);
        let shifted = TriangularCovariance::new(|t| t + 1.0, |_| 1.0, |_| 1.0, |_| 0.0);
        let mixed = EqualMeansPair::new(EqualMeansPair::new(bm.clone(), shifted.clone()).cov0, shifted);
        assert!(EqualMeansRn::new(&mixed, &g).is_err());
        // Brownian trend with m(0) ≠ 0.
        let pair = EqualCovPair::new(bm, |_| 1.0, |_| 0.0);
        assert!(EqualCovRn::new(&pair, &g).is_err());
    }
}
