//! Method identifiers, tuned parameters, and the immutable trained rules
//! behind the common predict contract.

use crate::bayes::BoundPlugin;
use crate::curve::{Curve, Grid, LabeledSample, MetricKind};
use crate::depth::{
    class_bandwidth, hmode_depth, pairwise_projected_bandwidths, project_all, random_directions,
    univariate_hmode_depth, RpConfig, BANDWIDTH_PERCENTILE,
};
use crate::error::{Error, Result};
use crate::knn::{knn_classify, mwr_classify, KnnConfig, MwrConfig};
use crate::project::{pls_classify, pls_fit, rkhs_classify, rkhs_fit, PlsModel, RkhsModel};

/// The eight benchmark methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodId {
    KnnSup,
    KnnL2,
    Pls,
    Rkhs,
    HMode,
    Rp,
    Mwr,
    Bayes,
}

impl MethodId {
    pub const ALL: [MethodId; 8] = [
        MethodId::KnnSup,
        MethodId::KnnL2,
        MethodId::Pls,
        MethodId::Rkhs,
        MethodId::HMode,
        MethodId::Rp,
        MethodId::Mwr,
        MethodId::Bayes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MethodId::KnnSup => "knn-sup",
            MethodId::KnnL2 => "knn-l2",
            MethodId::Pls => "pls",
            MethodId::Rkhs => "rkhs",
            MethodId::HMode => "hmode",
            MethodId::Rp => "rp",
            MethodId::Mwr => "mwr",
            MethodId::Bayes => "bayes",
        }
    }

    pub fn parse(s: &str) -> Result<MethodId> {
        MethodId::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::parameter(format!(
                    "bench-cli: unknown method '{s}' (expected one of knn-sup, knn-l2, pls, rkhs, hmode, rp, mwr, bayes)"
                ))
            })
    }
}

impl std::fmt::Display for MethodId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Tuned parameters for one method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodParams {
    Knn { k: usize },
    Mwr { h: f64 },
    Pls { n_components: usize },
    Rkhs { sigma: f64, lambda: f64 },
    HMode,
    Rp { seed: u64 },
}

impl std::fmt::Display for MethodParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MethodParams::Knn { k } => write!(f, "k={k}"),
            MethodParams::Mwr { h } => write!(f, "h={h:.6}"),
            MethodParams::Pls { n_components } => write!(f, "components={n_components}"),
            MethodParams::Rkhs { sigma, lambda } => {
                write!(f, "sigma={sigma:.6},lambda={lambda:.0e}")
            }
            MethodParams::HMode => write!(f, "bandwidth-percentile=0.20"),
            MethodParams::Rp { seed } => write!(f, "directions=50,seed={seed}"),
        }
    }
}

/// Fitted h-mode depth rule with per-class 20th-percentile bandwidths.
#[derive(Debug, Clone)]
pub struct HModeClassifier {
    grid: Grid,
    class0: Vec<Curve>,
    class1: Vec<Curve>,
    h0: f64,
    h1: f64,
}

impl HModeClassifier {
    pub fn fit(s: &LabeledSample, percentile: f64) -> Result<Self> {
        let class0 = s.class_curves(0);
        let class1 = s.class_curves(1);
        if class0.is_empty() || class1.is_empty() {
            return Err(Error::insufficient(
                "depth: h-mode classification needs both classes nonempty",
            ));
        }
        let h0 = class_bandwidth(&class0, s.grid(), percentile)?;
        let h1 = class_bandwidth(&class1, s.grid(), percentile)?;
        Ok(HModeClassifier {
            grid: s.grid().clone(),
            class0,
            class1,
            h0,
            h1,
        })
    }

    pub fn classify(&self, x: &Curve) -> Result<u8> {
        let d0 = hmode_depth(x, &self.class0, &self.grid, self.h0)?;
        let d1 = hmode_depth(x, &self.class1, &self.grid, self.h1)?;
        Ok(u8::from(d1 > d0))
    }
}

/// Fitted random-projection depth rule. Directions come from the config
/// seed once; projections and per-direction bandwidths of the training
/// classes are precomputed, which matches evaluating `rp_depth` with the
/// same seed for every query.
#[derive(Debug, Clone)]
pub struct RpClassifier {
    grid: Grid,
    directions: Vec<Vec<f64>>,
    proj0: Vec<Vec<f64>>,
    proj1: Vec<Vec<f64>>,
    h0: Vec<f64>,
    h1: Vec<f64>,
}

impl RpClassifier {
    pub fn fit(s: &LabeledSample, cfg: &RpConfig) -> Result<Self> {
        if cfg.n_directions == 0 {
            return Err(Error::parameter("depth: n_directions must be >= 1"));
        }
        let class0 = s.class_curves(0);
        let class1 = s.class_curves(1);
        if class0.is_empty() || class1.is_empty() {
            return Err(Error::insufficient(
                "depth: RP classification needs both classes nonempty",
            ));
        }
        let directions = random_directions(cfg.n_directions, s.grid().len(), cfg.seed);
        let proj0 = project_all(&class0, &directions, s.grid());
        let proj1 = project_all(&class1, &directions, s.grid());
        let h0 = pairwise_projected_bandwidths(&proj0, BANDWIDTH_PERCENTILE);
        let h1 = pairwise_projected_bandwidths(&proj1, BANDWIDTH_PERCENTILE);
        Ok(RpClassifier {
            grid: s.grid().clone(),
            directions,
            proj0,
            proj1,
            h0,
            h1,
        })
    }

    pub fn classify(&self, x: &Curve) -> Result<u8> {
        self.grid.check_len(x.len(), "depth: rp classify")?;
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for (l, dir) in self.directions.iter().enumerate() {
            let p = crate::depth::project_one(x, dir, &self.grid);
            d0 += univariate_hmode_depth(p, &self.proj0[l], self.h0[l]);
            d1 += univariate_hmode_depth(p, &self.proj1[l], self.h1[l]);
        }
        Ok(u8::from(d1 > d0))
    }
}

/// An immutable trained rule exposing the predict contract.
#[derive(Debug, Clone)]
pub enum FittedClassifier {
    Knn { sample: LabeledSample, cfg: KnnConfig },
    Mwr { sample: LabeledSample, cfg: MwrConfig },
    Pls(PlsModel),
    Rkhs(RkhsModel),
    HMode(HModeClassifier),
    Rp(RpClassifier),
    Bayes(BoundPlugin),
}

impl FittedClassifier {
    /// Fit an empirical method with explicit parameters. The plug-in
    /// Bayes rule is constructed from a population pair instead; see
    /// [`crate::bayes::PluginClassifier::bind`].
    pub fn fit(s: &LabeledSample, method: MethodId, params: &MethodParams) -> Result<Self> {
        match (method, params) {
            (MethodId::KnnSup, MethodParams::Knn { k }) => Ok(FittedClassifier::Knn {
                sample: s.clone(),
                cfg: KnnConfig {
                    k: *k,
                    metric: MetricKind::Sup,
                },
            }),
            (MethodId::KnnL2, MethodParams::Knn { k }) => Ok(FittedClassifier::Knn {
                sample: s.clone(),
                cfg: KnnConfig {
                    k: *k,
                    metric: MetricKind::L2,
                },
            }),
            (MethodId::Mwr, MethodParams::Mwr { h }) => Ok(FittedClassifier::Mwr {
                sample: s.clone(),
                cfg: MwrConfig {
                    h: *h,
                    metric: MetricKind::L2,
                },
            }),
            (MethodId::Pls, MethodParams::Pls { n_components }) => {
                Ok(FittedClassifier::Pls(pls_fit(s, *n_components)?))
            }
            (MethodId::Rkhs, MethodParams::Rkhs { sigma, lambda }) => {
                Ok(FittedClassifier::Rkhs(rkhs_fit(s, *sigma, *lambda)?))
            }
            (MethodId::HMode, MethodParams::HMode) => Ok(FittedClassifier::HMode(
                HModeClassifier::fit(s, BANDWIDTH_PERCENTILE)?,
            )),
            (MethodId::Rp, MethodParams::Rp { seed }) => Ok(FittedClassifier::Rp(
                RpClassifier::fit(
                    s,
                    &RpConfig {
                        n_directions: 50,
                        seed: *seed,
                    },
                )?,
            )),
            (MethodId::Bayes, _) => Err(Error::unsupported(
                "bench-cli: the bayes rule is built from a population pair, not fitted to a sample",
            )),
            (m, p) => Err(Error::parameter(format!(
                "bench-cli: parameters {p:?} do not match method {m}"
            ))),
        }
    }

    /// Fit a moving-window rule with an explicit metric (the benchmark
    /// default is L²).
    pub fn fit_mwr_with_metric(s: &LabeledSample, h: f64, metric: MetricKind) -> FittedClassifier {
        FittedClassifier::Mwr {
            sample: s.clone(),
            cfg: MwrConfig { h, metric },
        }
    }

    pub fn predict(&self, x: &Curve) -> Result<u8> {
        match self {
            FittedClassifier::Knn { sample, cfg } => knn_classify(x, sample, cfg),
            FittedClassifier::Mwr { sample, cfg } => mwr_classify(x, sample, cfg),
            FittedClassifier::Pls(m) => pls_classify(m, x),
            FittedClassifier::Rkhs(m) => rkhs_classify(m, x),
            FittedClassifier::HMode(m) => m.classify(x),
            FittedClassifier::Rp(m) => m.classify(x),
            FittedClassifier::Bayes(m) => m.classify(x),
        }
    }

    pub fn predict_all(&self, xs: &[Curve]) -> Result<Vec<u8>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}
