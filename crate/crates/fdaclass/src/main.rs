//! Command-line interface: Monte Carlo benchmarks, CSV classification,
//! plug-in Bayes labeling, leave-one-out parameter selection, and dataset
//! simulation.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fdaclass::bayes::{GeneralPair, PluginClassifier, RnPair};
use fdaclass::bench::{
    format_rates_csv, format_summary_csv, format_summary_table, load_csv, loo_cv_select,
    monte_carlo, save_csv, ModelId, RunConfig, TuningGrids,
};
use fdaclass::classifier::{FittedClassifier, MethodId};
use fdaclass::curve::{Curve, Grid, LabeledSample, MetricKind};
use fdaclass::error::{Error, Result};
use fdaclass::sim::{model1_population, model2_sample, sample_gaussian_paths, Model2Spec};

#[derive(Parser)]
#[command(
    name = "fdaclass",
    version,
    about = "Functional-data classification benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo benchmark on a simulated model; writes per-run rates
    /// (bench_rates.csv) and a summary table (bench_summary.txt).
    Bench {
        /// Data-generating model (1 or 2)
        #[arg(long)]
        model: u8,
        /// Number of Monte Carlo replications
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// Training curves per class
        #[arg(long, default_value_t = 100)]
        train: usize,
        /// Test curves per class
        #[arg(long, default_value_t = 50)]
        test: usize,
        /// Equispaced observation nodes on [0, 1]
        #[arg(long, default_value_t = 51)]
        nodes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated methods: knn-sup,knn-l2,pls,rkhs,hmode,rp,mwr,bayes
        #[arg(long, value_delimiter = ',', default_value = "knn-sup,knn-l2,pls,rkhs,hmode,rp,mwr")]
        methods: Vec<String>,
        /// Spline pre-smoothing of the curves seen by the empirical methods
        #[arg(long)]
        smooth: bool,
        /// Directory for the output artifacts
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Train on a labeled CSV and write predicted labels for every row of
    /// the test CSV (one label per line).
    Classify {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// One of knn-sup, knn-l2, pls, rkhs, hmode, rp, mwr (or `knn`
        /// with --metric)
        #[arg(long)]
        method: String,
        /// Metric override for knn/mwr: sup or l2
        #[arg(long)]
        metric: Option<String>,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plug-in Bayes labels and log likelihood-ratios for the first
    /// simulated model; one `label,log_rn` line per test row.
    Bayes {
        /// Must be 1 (the Gaussian model)
        #[arg(long)]
        model: u8,
        #[arg(long)]
        test: PathBuf,
        /// Prior P{Y = 0}
        #[arg(long, default_value_t = 0.5)]
        prior: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leave-one-out parameter selection on a labeled CSV.
    Cv {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        metric: Option<String>,
    },
    /// Simulate a labeled dataset (n curves per class) to CSV.
    Simulate {
        #[arg(long)]
        model: u8,
        /// Curves per class
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 51)]
        nodes: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fdaclass: {e}");
            ExitCode::FAILURE
        }
    }
}

fn parse_metric(metric: &Option<String>) -> Result<Option<MetricKind>> {
    match metric.as_deref() {
        None => Ok(None),
        Some("sup") => Ok(Some(MetricKind::Sup)),
        Some("l2") => Ok(Some(MetricKind::L2)),
        Some(other) => Err(Error::parameter(format!(
            "bench-cli: metric must be 'sup' or 'l2', got '{other}'"
        ))),
    }
}

/// Resolve a CLI method name, folding `knn` metric overrides into the
/// canonical ids.
fn resolve_method(
    name: &str,
    metric: Option<MetricKind>,
) -> Result<(MethodId, Option<MetricKind>)> {
    match (name, metric) {
        ("knn", m) => Ok((
            match m.unwrap_or(MetricKind::L2) {
                MetricKind::Sup => MethodId::KnnSup,
                MetricKind::L2 => MethodId::KnnL2,
            },
            None,
        )),
        ("knn-sup", Some(MetricKind::L2)) | ("knn-l2", Some(MetricKind::Sup)) => Err(
            Error::parameter("bench-cli: --metric contradicts the method id".to_string()),
        ),
        ("knn-sup", _) | ("knn-l2", _) => Ok((MethodId::parse(name)?, None)),
        (other, m) => Ok((MethodId::parse(other)?, m)),
    }
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Bench {
            model,
            runs,
            train,
            test,
            nodes,
            seed,
            methods,
            smooth,
            out_dir,
        } => {
            let methods = methods
                .iter()
                .map(|m| MethodId::parse(m))
                .collect::<Result<Vec<_>>>()?;
            let cfg = RunConfig {
                model: ModelId::parse(model)?,
                runs,
                train_per_class: train,
                test_per_class: test,
                nodes,
                seed,
                methods,
                smooth,
                grids: TuningGrids::default(),
            };
            cfg.validate()?;
            let output = monte_carlo(&cfg)?;
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(
                out_dir.join("bench_rates.csv"),
                format_rates_csv(&output.per_run),
            )?;
            std::fs::write(
                out_dir.join("bench_summary.txt"),
                format_summary_csv(&output.summaries),
            )?;
            print!("{}", format_summary_table(&output.summaries));
            Ok(())
        }
        Command::Classify {
            train,
            test,
            method,
            metric,
            out,
        } => {
            let metric = parse_metric(&metric)?;
            let (method, metric_override) = resolve_method(&method, metric)?;
            if method == MethodId::Bayes {
                return Err(Error::unsupported(
                    "bench-cli: use the `bayes` subcommand for the plug-in rule",
                ));
            }
            let train_set = load_csv(train)?.labeled()?;
            let test_set = load_csv(test)?;
            if test_set.grid != *train_set.grid() {
                return Err(Error::parameter(
                    "bench-cli: train and test grids disagree".to_string(),
                ));
            }
            let fitted = fit_tuned(&train_set, method, metric_override)?;
            let mut content = String::new();
            for x in &test_set.all_curves() {
                content.push_str(&format!("{}\n", fitted.predict(x)?));
            }
            write_out(&out, &content)
        }
        Command::Bayes {
            model,
            test,
            prior,
            out,
        } => {
            if ModelId::parse(model)? != ModelId::Model1 {
                return Err(Error::unsupported(
                    "bench-cli: the plug-in rule is available for model 1 only",
                ));
            }
            let test_set = load_csv(test)?;
            let pair = GeneralPair::new(model1_population(0), model1_population(1));
            let plugin =
                PluginClassifier::new(RnPair::General(pair), prior)?.bind(&test_set.grid)?;
            let mut content = String::from("label,log_rn\n");
            for x in &test_set.all_curves() {
                content.push_str(&format!(
                    "{},{:.16e}\n",
                    plugin.classify(x)?,
                    plugin.log_rn(x)?
                ));
            }
            write_out(&out, &content)
        }
        Command::Cv {
            train,
            method,
            metric,
        } => {
            let metric = parse_metric(&metric)?;
            let (method, metric_override) = resolve_method(&method, metric)?;
            if metric_override.is_some() && method != MethodId::Mwr {
                return Err(Error::parameter(
                    "bench-cli: --metric applies to knn and mwr only".to_string(),
                ));
            }
            let train_set = load_csv(train)?.labeled()?;
            let selected = loo_cv_select(&train_set, method, &TuningGrids::default())?;
            println!(
                "method={} {} loo-accuracy={:.4}",
                method, selected.params, selected.accuracy
            );
            Ok(())
        }
        Command::Simulate {
            model,
            n,
            seed,
            nodes,
            out,
        } => {
            use rand::SeedableRng;
            let g = Grid::equispaced(0.0, 1.0, nodes)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (class0, class1): (Vec<Curve>, Vec<Curve>) = match ModelId::parse(model)? {
                ModelId::Model1 => (
                    sample_gaussian_paths(&model1_population(0), &g, n, &mut rng)?,
                    sample_gaussian_paths(&model1_population(1), &g, n, &mut rng)?,
                ),
                ModelId::Model2 => (
                    model2_sample(Model2Spec::new(0)?, &g, n, &mut rng)?,
                    model2_sample(Model2Spec::new(1)?, &g, n, &mut rng)?,
                ),
            };
            let mut curves = class0;
            let mut labels = vec![0u8; n];
            curves.extend(class1);
            labels.extend(std::iter::repeat(1u8).take(n));
            let sample = LabeledSample::new(g, curves, labels)?;
            save_csv(&sample, out)
        }
    }
}

/// Tune where the method has a grid, then fit on the full training set.
fn fit_tuned(
    s: &LabeledSample,
    method: MethodId,
    metric_override: Option<MetricKind>,
) -> Result<FittedClassifier> {
    let selected = loo_cv_select(s, method, &TuningGrids::default())?;
    match (method, metric_override, &selected.params) {
        (MethodId::Mwr, Some(metric), fdaclass::MethodParams::Mwr { h }) => {
            Ok(FittedClassifier::fit_mwr_with_metric(s, *h, metric))
        }
        (_, Some(_), _) => Err(Error::parameter(
            "bench-cli: --metric applies to knn and mwr only".to_string(),
        )),
        _ => FittedClassifier::fit(s, method, &selected.params),
    }
}
