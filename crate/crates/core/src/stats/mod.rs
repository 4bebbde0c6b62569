//! Goodness-of-fit and independence tests with structured reports.

mod dcor;
mod ks;

use serde::{Deserialize, Serialize};

pub use dcor::{distance_correlation, independence_test, DcorPermutation};
pub use ks::{kolmogorov_pvalue, ks_critical_value, ks_one_sample, ks_statistic, KS_C_01};

/// Outcome of a single check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    pub n: usize,
    pub seed: Option<u64>,
}

impl TestReport {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Sample mean and its standard error.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
