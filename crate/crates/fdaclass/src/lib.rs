//! Functional-data classification toolkit.
//!
//! Curves observed on a shared grid are classified by k-nearest
//! neighbors (sup or L² metric), PLS discrimination, an RKHS regression
//! rule, h-mode and random-projection depth, a moving window rule, and —
//! for Gaussian processes with triangular covariances — the exact
//! plug-in Bayes rule built from closed-form likelihood ratios between
//! the two populations. A Monte Carlo benchmark harness compares all of
//! them on simulated models, with leave-one-out tuning and CSV-based
//! dataset ingestion; see the `fdaclass` binary.

pub mod bayes;
pub mod bench;
pub mod classifier;
pub mod curve;
pub mod depth;
pub mod error;
pub mod knn;
pub mod metric;
pub mod project;
pub mod sim;
pub mod smooth;

pub use classifier::{FittedClassifier, MethodId, MethodParams};
pub use curve::{Curve, Grid, LabeledSample, MetricKind};
pub use error::{Error, Result};
