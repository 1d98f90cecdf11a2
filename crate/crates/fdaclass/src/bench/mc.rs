//! Monte Carlo benchmark: per-replication simulate/tune/test, and the
//! descriptive summary of per-run correct-classification rates.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bayes::{GeneralPair, PluginClassifier, RnPair};
use crate::bench::tune::{loo_cv_select, TuningGrids};
use crate::classifier::{FittedClassifier, MethodId, MethodParams};
use crate::curve::{Curve, Grid, LabeledSample};
use crate::error::{Error, Result};
use crate::sim::{model1_population, model2_sample, sample_gaussian_paths, Model2Spec};
use crate::smooth::{default_basis_size, smooth_spline};

/// Simulated data-generating model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    Model1,
    Model2,
}

impl ModelId {
    pub fn parse(v: u8) -> Result<ModelId> {
        match v {
            1 => Ok(ModelId::Model1),
            2 => Ok(ModelId::Model2),
            other => Err(Error::parameter(format!(
                "bench-cli: model must be 1 or 2, got {other}"
            ))),
        }
    }
}

/// Benchmark configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelId,
    pub runs: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub nodes: usize,
    pub seed: u64,
    pub methods: Vec<MethodId>,
    pub smooth: bool,
    pub grids: TuningGrids,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 || self.train_per_class == 0 || self.test_per_class == 0 {
            return Err(Error::parameter(
                "bench-cli: runs, train and test sizes must be positive",
            ));
        }
        if self.nodes < 2 {
            return Err(Error::parameter("bench-cli: need at least 2 nodes"));
        }
        if self.methods.is_empty() {
            return Err(Error::parameter("bench-cli: empty method list"));
        }
        if self.model == ModelId::Model2 && self.methods.contains(&MethodId::Bayes) {
            return Err(Error::unsupported(
                "bench-cli: the bayes method applies to model 1 only (model 2 is not Gaussian, no closed-form ratio exists)",
            ));
        }
        if self.smooth && self.nodes < 4 {
            return Err(Error::parameter(
                "bench-cli: spline pre-smoothing needs at least 4 nodes",
            ));
        }
        Ok(())
    }
}

/// Row schema of the summary tables: descriptive statistics of per-run
/// correct-classification rates. Quartiles use the median-of-halves
/// convention (the middle observation is excluded from both halves when
/// the count is odd).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
    pub sd: f64,
}

fn median_of(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

impl SummaryStats {
    pub fn from_rates(rates: &[f64]) -> Result<SummaryStats> {
        if rates.is_empty() {
            return Err(Error::insufficient("bench-cli: no rates to summarize"));
        }
        let mut sorted = rates.to_vec();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        let half = n / 2;
        let (q1, q3) = if half == 0 {
            (sorted[0], sorted[0])
        } else {
            (median_of(&sorted[..half]), median_of(&sorted[n - half..]))
        };
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (sorted.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(SummaryStats {
            min: sorted[0],
            q1,
            median: median_of(&sorted),
            mean,
            q3,
            max: sorted[n - 1],
            sd,
        })
    }
}

/// Benchmark artifacts: one rate per (replication, method) plus the
/// per-method summaries, both in deterministic order.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutput {
    pub per_run: Vec<(usize, MethodId, f64)>,
    pub summaries: Vec<(MethodId, SummaryStats)>,
}

fn smooth_all(curves: Vec<Curve>, g: &Grid, basis: usize) -> Result<Vec<Curve>> {
    curves
        .into_iter()
        .map(|c| smooth_spline(&c, g, basis))
        .collect()
}

/// Simulated train/test material of one replication.
struct ReplicationData {
    train: LabeledSample,
    test_curves: Vec<Curve>,
    test_labels: Vec<u8>,
    raw_test_curves: Vec<Curve>,
    rp_seed: u64,
}

fn simulate_replication(cfg: &RunConfig, rep: usize, g: &Grid) -> Result<ReplicationData> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(rep as u64 + 1);

    let (m, t) = (cfg.train_per_class, cfg.test_per_class);
    let (mut train0, mut train1, mut test0, mut test1) = match cfg.model {
        ModelId::Model1 => {
            let (pop0, pop1) = (model1_population(0), model1_population(1));
            (
                sample_gaussian_paths(&pop0, g, m, &mut rng)?,
                sample_gaussian_paths(&pop1, g, m, &mut rng)?,
                sample_gaussian_paths(&pop0, g, t, &mut rng)?,
                sample_gaussian_paths(&pop1, g, t, &mut rng)?,
            )
        }
        ModelId::Model2 => {
            let (s0, s1) = (Model2Spec::new(0)?, Model2Spec::new(1)?);
            (
                model2_sample(s0, g, m, &mut rng)?,
                model2_sample(s1, g, m, &mut rng)?,
                model2_sample(s0, g, t, &mut rng)?,
                model2_sample(s1, g, t, &mut rng)?,
            )
        }
    };
    let rp_seed = rng.next_u64();

    let mut raw_test_curves = Vec::with_capacity(2 * t);
    raw_test_curves.extend(test0.iter().cloned());
    raw_test_curves.extend(test1.iter().cloned());

    if cfg.smooth {
        let basis = default_basis_size(cfg.nodes);
        train0 = smooth_all(train0, g, basis)?;
        train1 = smooth_all(train1, g, basis)?;
        test0 = smooth_all(test0, g, basis)?;
        test1 = smooth_all(test1, g, basis)?;
    }

    let mut curves = Vec::with_capacity(2 * m);
    let mut labels = Vec::with_capacity(2 * m);
    curves.extend(train0);
    labels.extend(std::iter::repeat(0u8).take(m));
    curves.extend(train1);
    labels.extend(std::iter::repeat(1u8).take(m));
    let train = LabeledSample::new(g.clone(), curves, labels)?;

    let mut test_curves = Vec::with_capacity(2 * t);
    test_curves.extend(test0);
    test_curves.extend(test1);
    let mut test_labels = vec![0u8; t];
    test_labels.extend(std::iter::repeat(1u8).take(t));

    Ok(ReplicationData {
        train,
        test_curves,
        test_labels,
        raw_test_curves,
        rp_seed,
    })
}

fn fraction_correct(predictions: &[u8], truth: &[u8]) -> f64 {
    let hits = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p == t)
        .count();
    hits as f64 / truth.len() as f64
}

/// Per-method correct-classification rates of one replication. Tunable
/// methods are selected by leave-one-out on the training sample; the
/// plug-in Bayes rule (model 1 only, prior 1/2) needs no tuning and is
/// always evaluated on the unsmoothed test curves.
pub fn run_replication(cfg: &RunConfig, rep: usize) -> Result<Vec<(MethodId, f64)>> {
    cfg.validate()?;
    let g = Grid::equispaced(0.0, 1.0, cfg.nodes)?;
    let data = simulate_replication(cfg, rep, &g)?;

    let mut rates = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let rate = match method {
            MethodId::Bayes => {
                let pair = GeneralPair::new(model1_population(0), model1_population(1));
                let plugin = PluginClassifier::new(RnPair::General(pair), 0.5)?.bind(&g)?;
                let preds: Vec<u8> = data
                    .raw_test_curves
                    .iter()
                    .map(|x| plugin.classify(x))
                    .collect::<Result<_>>()?;
                fraction_correct(&preds, &data.test_labels)
            }
            MethodId::HMode => {
                let fitted =
                    FittedClassifier::fit(&data.train, MethodId::HMode, &MethodParams::HMode)?;
                fraction_correct(&fitted.predict_all(&data.test_curves)?, &data.test_labels)
            }
            MethodId::Rp => {
                let fitted = FittedClassifier::fit(
                    &data.train,
                    MethodId::Rp,
                    &MethodParams::Rp { seed: data.rp_seed },
                )?;
                fraction_correct(&fitted.predict_all(&data.test_curves)?, &data.test_labels)
            }
            tunable => {
                let selected = loo_cv_select(&data.train, tunable, &cfg.grids)?;
                let fitted = FittedClassifier::fit(&data.train, tunable, &selected.params)?;
                fraction_correct(&fitted.predict_all(&data.test_curves)?, &data.test_labels)
            }
        };
        rates.push((method, rate));
    }
    Ok(rates)
}

/// Aggregate `run_replication` over all runs.
pub fn monte_carlo(cfg: &RunConfig) -> Result<BenchOutput> {
    cfg.validate()?;
    let mut per_run = Vec::with_capacity(cfg.runs * cfg.methods.len());
    let mut by_method: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.runs); cfg.methods.len()];
    for rep in 0..cfg.runs {
        let rates = run_replication(cfg, rep)?;
        for (slot, (method, rate)) in rates.into_iter().enumerate() {
            per_run.push((rep, method, rate));
            by_method[slot].push(rate);
        }
    }
    let summaries = cfg
        .methods
        .iter()
        .zip(&by_method)
        .map(|(&m, rates)| Ok((m, SummaryStats::from_rates(rates)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchOutput { per_run, summaries })
}

/// Per-run rates in the `rep,method,rate` column format.
pub fn format_rates_csv(per_run: &[(usize, MethodId, f64)]) -> String {
    let mut out = String::from("rep,method,rate\n");
    for (rep, method, rate) in per_run {
        out.push_str(&format!("{rep},{method},{rate:?}\n"));
    }
    out
}

/// Machine-readable summary with the `method,min,q1,median,mean,q3,max,sd`
/// columns; the header comment names the quartile convention.
pub fn format_summary_csv(summaries: &[(MethodId, SummaryStats)]) -> String {
    let mut out = String::from("# quartile convention: median-of-halves\n");
    out.push_str("method,min,q1,median,mean,q3,max,sd\n");
    for (m, s) in summaries {
        out.push_str(&format!(
            "{m},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            s.min, s.q1, s.median, s.mean, s.q3, s.max, s.sd
        ));
    }
    out
}

/// Human-readable summary in the benchmark-table layout (methods as
/// columns, statistics as rows).
pub fn format_summary_table(summaries: &[(MethodId, SummaryStats)]) -> String {
    let mut out = String::from("Quartile convention: median-of-halves\n");
    out.push_str(&format!("{:<16}", ""));
    for (m, _) in summaries {
        out.push_str(&format!("{:>10}", m.name()));
    }
    out.push('\n');
    let rows: [(&str, fn(&SummaryStats) -> f64); 7] = [
        ("Minimum", |s| s.min),
        ("First quartile", |s| s.q1),
        ("Median", |s| s.median),
        ("Mean", |s| s.mean),
        ("Third quartile", |s| s.q3),
        ("Maximum", |s| s.max),
        ("Std. deviation", |s| s.sd),
    ];
    for (label, get) in rows {
        out.push_str(&format!("{label:<16}"));
        for (_, s) in summaries {
            out.push_str(&format!("{:>10.4}", get(s)));
        }
        out.push('\n');
    }
    out
}
