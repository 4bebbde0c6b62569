use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{Mode, RunSettings};

/// One pass/fail check.
///
/// Pass rules: defects and residuals pass when `statistic <= threshold`; KS
/// distances when `statistic < threshold`; for permutation tests `statistic` is
/// the p-value, compared with the threshold in the direction the check names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `statistic <= threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic <= threshold,
        }
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        if !prefix.is_empty() {
            self.name = format!("{prefix}/{}", self.name);
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: String,
    pub params: BTreeMap<String, f64>,
    pub mode: Mode,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub n: usize,
    pub settings: RunSettings,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Pretty JSON with a trailing newline. Contains no timestamps or paths, so
    /// equal configs give equal bytes.
    pub fn to_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("reports serialize");
        bytes.push(b'\n');
        bytes
    }
}
