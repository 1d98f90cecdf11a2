//! Python bindings: curves are plain lists of floats, grids are node
//! lists, and the classifiers are exposed through a single `Classifier`
//! class plus free functions for distances, smoothing, simulation, the
//! plug-in Bayes rule and the Monte Carlo benchmark.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use fdaclass::bayes::{self, GeneralPair, PluginClassifier, RnPair};
use fdaclass::bench::{self, loo_cv_select, ModelId, RunConfig, TuningGrids};
use fdaclass::classifier::{FittedClassifier, MethodId};
use fdaclass::curve::{Curve, Grid, LabeledSample, MetricKind};
use fdaclass::sim::{model1_population, model2_sample, sample_gaussian_paths, Model2Spec};
use fdaclass::{metric, smooth};
use rand::SeedableRng;

fn err(e: fdaclass::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn grid_from(nodes: Vec<f64>) -> PyResult<Grid> {
    Grid::new(nodes).map_err(err)
}

fn curve_from(values: Vec<f64>) -> PyResult<Curve> {
    Curve::new(values).map_err(err)
}

fn sample_from(nodes: Vec<f64>, curves: Vec<Vec<f64>>, labels: Vec<u8>) -> PyResult<LabeledSample> {
    let grid = grid_from(nodes)?;
    let curves = curves
        .into_iter()
        .map(curve_from)
        .collect::<PyResult<Vec<_>>>()?;
    LabeledSample::new(grid, curves, labels).map_err(err)
}

fn metric_from(name: &str) -> PyResult<MetricKind> {
    match name {
        "sup" => Ok(MetricKind::Sup),
        "l2" => Ok(MetricKind::L2),
        other => Err(PyValueError::new_err(format!(
            "metric must be 'sup' or 'l2', got '{other}'"
        ))),
    }
}

/// Supremum distance between two curves on a shared grid.
#[pyfunction]
fn sup_distance(x: Vec<f64>, y: Vec<f64>, nodes: Vec<f64>) -> PyResult<f64> {
    let g = grid_from(nodes)?;
    metric::sup_distance(&curve_from(x)?, &curve_from(y)?, &g).map_err(err)
}

/// Trapezoid L² distance between two curves on a shared grid.
#[pyfunction]
fn l2_distance(x: Vec<f64>, y: Vec<f64>, nodes: Vec<f64>) -> PyResult<f64> {
    let g = grid_from(nodes)?;
    metric::l2_distance(&curve_from(x)?, &curve_from(y)?, &g).map_err(err)
}

/// Least-squares cubic B-spline smoothing of one curve.
#[pyfunction]
fn smooth_spline(x: Vec<f64>, nodes: Vec<f64>, basis_size: usize) -> PyResult<Vec<f64>> {
    let g = grid_from(nodes)?;
    let smoothed = smooth::smooth_spline(&curve_from(x)?, &g, basis_size).map_err(err)?;
    Ok(smoothed.values().to_vec())
}

/// Regression function value (1 − p)/(p·r + 1 − p).
#[pyfunction]
fn eta(r: f64, p: f64) -> f64 {
    bayes::eta(r, p)
}

/// Simulate `n_per_class` curves per class from model 1 or 2 on an
/// equispaced grid; returns (nodes, curves, labels).
#[pyfunction]
#[pyo3(signature = (model, n_per_class, nodes=51, seed=1))]
fn simulate(
    model: u8,
    n_per_class: usize,
    nodes: usize,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<Vec<f64>>, Vec<u8>)> {
    let g = Grid::equispaced(0.0, 1.0, nodes).map_err(err)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (c0, c1) = match ModelId::parse(model).map_err(err)? {
        ModelId::Model1 => (
            sample_gaussian_paths(&model1_population(0), &g, n_per_class, &mut rng).map_err(err)?,
            sample_gaussian_paths(&model1_population(1), &g, n_per_class, &mut rng).map_err(err)?,
        ),
        ModelId::Model2 => (
            model2_sample(Model2Spec::new(0).map_err(err)?, &g, n_per_class, &mut rng)
                .map_err(err)?,
            model2_sample(Model2Spec::new(1).map_err(err)?, &g, n_per_class, &mut rng)
                .map_err(err)?,
        ),
    };
    let mut curves: Vec<Vec<f64>> = c0.iter().map(|c| c.values().to_vec()).collect();
    curves.extend(c1.iter().map(|c| c.values().to_vec()));
    let mut labels = vec![0u8; n_per_class];
    labels.extend(std::iter::repeat(1u8).take(n_per_class));
    Ok((g.nodes().to_vec(), curves, labels))
}

/// Log likelihood-ratio log dμ0/dμ1 of the model-1 populations for one
/// curve on the given grid.
#[pyfunction]
fn model1_log_rn(x: Vec<f64>, nodes: Vec<f64>) -> PyResult<f64> {
    let g = grid_from(nodes)?;
    let pair = GeneralPair::new(model1_population(0), model1_population(1));
    bayes::log_rn_general(&pair, &curve_from(x)?, &g).map_err(err)
}

/// Plug-in Bayes labels for curves under the model-1 populations.
#[pyfunction]
#[pyo3(signature = (curves, nodes, prior=0.5))]
fn model1_bayes_labels(curves: Vec<Vec<f64>>, nodes: Vec<f64>, prior: f64) -> PyResult<Vec<u8>> {
    let g = grid_from(nodes)?;
    let pair = GeneralPair::new(model1_population(0), model1_population(1));
    let plugin = PluginClassifier::new(RnPair::General(pair), prior)
        .map_err(err)?
        .bind(&g)
        .map_err(err)?;
    curves
        .into_iter()
        .map(|c| plugin.classify(&curve_from(c)?).map_err(err))
        .collect()
}

/// Write a labeled dataset in the toolkit's CSV format.
#[pyfunction]
fn save_csv(path: String, nodes: Vec<f64>, curves: Vec<Vec<f64>>, labels: Vec<u8>) -> PyResult<()> {
    let s = sample_from(nodes, curves, labels)?;
    bench::save_csv(&s, path).map_err(err)
}

/// Load a dataset CSV; returns (nodes, curves, labels) where unlabeled
/// query rows carry None.
#[pyfunction]
fn load_csv(path: String) -> PyResult<(Vec<f64>, Vec<Vec<f64>>, Vec<Option<u8>>)> {
    let ds = bench::load_csv(path).map_err(err)?;
    let nodes = ds.grid.nodes().to_vec();
    let curves = ds.rows.iter().map(|(_, c)| c.values().to_vec()).collect();
    let labels = ds.rows.iter().map(|(l, _)| *l).collect();
    Ok((nodes, curves, labels))
}

/// A trained classification rule.
#[pyclass]
struct Classifier {
    inner: FittedClassifier,
    params: String,
    loo_accuracy: f64,
}

#[pymethods]
impl Classifier {
    /// Tune by leave-one-out where the method has free parameters, then
    /// fit on the whole training set. Methods: knn-sup, knn-l2, pls,
    /// rkhs, hmode, rp, mwr.
    #[staticmethod]
    fn fit(
        method: &str,
        nodes: Vec<f64>,
        curves: Vec<Vec<f64>>,
        labels: Vec<u8>,
    ) -> PyResult<Classifier> {
        let id = MethodId::parse(method).map_err(err)?;
        let s = sample_from(nodes, curves, labels)?;
        let selected = loo_cv_select(&s, id, &TuningGrids::default()).map_err(err)?;
        let inner = FittedClassifier::fit(&s, id, &selected.params).map_err(err)?;
        Ok(Classifier {
            inner,
            params: selected.params.to_string(),
            loo_accuracy: selected.accuracy,
        })
    }

    fn predict(&self, curves: Vec<Vec<f64>>) -> PyResult<Vec<u8>> {
        curves
            .into_iter()
            .map(|c| self.inner.predict(&curve_from(c)?).map_err(err))
            .collect()
    }

    #[getter]
    fn params(&self) -> String {
        self.params.clone()
    }

    #[getter]
    fn loo_accuracy(&self) -> f64 {
        self.loo_accuracy
    }
}

/// Monte Carlo benchmark; returns a list of
/// (method, [min, q1, median, mean, q3, max, sd]) rows.
#[pyfunction]
#[pyo3(signature = (model, runs, train, test, nodes=51, seed=1, methods=None, smooth=false))]
#[allow(clippy::too_many_arguments)]
fn run_benchmark(
    model: u8,
    runs: usize,
    train: usize,
    test: usize,
    nodes: usize,
    seed: u64,
    methods: Option<Vec<String>>,
    smooth: bool,
) -> PyResult<Vec<(String, Vec<f64>)>> {
    let methods = methods
        .unwrap_or_else(|| {
            ["knn-sup", "knn-l2", "pls", "rkhs", "hmode", "rp", "mwr"]
                .iter()
                .map(|s| s.to_string())
                .collect()
        })
        .iter()
        .map(|m| MethodId::parse(m).map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    let cfg = RunConfig {
        model: ModelId::parse(model).map_err(err)?,
        runs,
        train_per_class: train,
        test_per_class: test,
        nodes,
        seed,
        methods,
        smooth,
        grids: TuningGrids::default(),
    };
    let output = bench::monte_carlo(&cfg).map_err(err)?;
    Ok(output
        .summaries
        .iter()
        .map(|(m, s)| {
            (
                m.name().to_string(),
                vec![s.min, s.q1, s.median, s.mean, s.q3, s.max, s.sd],
            )
        })
        .collect())
}

#[pymodule]
fn fdaclass_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sup_distance, m)?)?;
    m.add_function(wrap_pyfunction!(l2_distance, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_spline, m)?)?;
    m.add_function(wrap_pyfunction!(eta, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(model1_log_rn, m)?)?;
    m.add_function(wrap_pyfunction!(model1_bayes_labels, m)?)?;
    m.add_function(wrap_pyfunction!(save_csv, m)?)?;
    m.add_function(wrap_pyfunction!(load_csv, m)?)?;
    m.add_function(wrap_pyfunction!(run_benchmark, m)?)?;
    m.add_class::<Classifier>()?;
    Ok(())
}
