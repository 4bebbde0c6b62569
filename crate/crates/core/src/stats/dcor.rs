//! Sample distance correlation and its permutation test.
//!
//! With `a_ij = |x_i - x_j|`, row means `a_i.` and grand mean `a..` (likewise
//! `b` for `y`), the double-centred V-statistic is
//!
//! ```text
//! dCov^2 = (1/n^2) sum_ij a_ij b_ij - (2/n) sum_i a_i. b_i. + a.. b..
//! ```
//!
//! Relabeling `y` permutes the `b` row means along with the data, so only the
//! cross sum has to be recomputed per permutation.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::TestReport;
use crate::error::{Error, Result};
use crate::rng;

/// Row means of the pairwise distance matrix, in input order, via sorting.
fn distance_row_means(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let total: f64 = values.iter().sum();
    let mut means = vec![0.0; n];
    let mut prefix = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        let v = values[i];
        // sum_j |v - x_j| = v*rank - prefix + (total - prefix - v) - v*(n - rank - 1)
        let below = v * rank as f64 - prefix;
        let above = (total - prefix - v) - v * (n - rank - 1) as f64;
        means[i] = (below + above) / n as f64;
        prefix += v;
    }
    means
}

fn cross_sum(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut total = 0.0;
    for i in 0..n {
        let (xi, yi) = (xs[i], ys[i]);
        let row: f64 = xs[i + 1..]
            .iter()
            .zip(&ys[i + 1..])
            .map(|(&xj, &yj)| (xi - xj).abs() * (yi - yj).abs())
            .sum();
        total += row;
    }
    2.0 * total
}

/// Precomputed pieces shared by the observed statistic and every permutation.
#[derive(Debug)]
pub struct DcorPermutation {
    xs: Vec<f64>,
    ys: Vec<f64>,
    x_means: Vec<f64>,
    y_means: Vec<f64>,
    x_grand: f64,
    y_grand: f64,
    denom: f64,
}

impl DcorPermutation {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch(xs.len(), ys.len()));
        }
        if xs.len() < 4 {
            return Err(Error::InsufficientData(format!(
                "distance correlation needs n >= 4, got {}",
                xs.len()
            )));
        }
        if xs.iter().chain(ys).any(|v| !v.is_finite()) {
            return Err(Error::InsufficientData("non-finite value in input".into()));
        }
        let n = xs.len() as f64;
        let x_means = distance_row_means(xs);
        let y_means = distance_row_means(ys);
        let x_grand = x_means.iter().sum::<f64>() / n;
        let y_grand = y_means.iter().sum::<f64>() / n;
        let dvar = |v: &[f64], m: &[f64], g: f64| {
            let s = cross_sum(v, v) / (n * n);
            let r: f64 = m.iter().map(|a| a * a).sum::<f64>();
            (s - 2.0 * r / n + g * g).max(0.0)
        };
        let dvar_x = dvar(xs, &x_means, x_grand);
        let dvar_y = dvar(ys, &y_means, y_grand);
        Ok(Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            x_means,
            y_means,
            x_grand,
            y_grand,
            denom: (dvar_x * dvar_y).sqrt(),
        })
    }

    fn dcor_for(&self, ys: &[f64], y_means: &[f64]) -> f64 {
        if !(self.denom > 0.0) {
            return 0.0;
        }
        let n = self.xs.len() as f64;
        let s = cross_sum(&self.xs, ys) / (n * n);
        let r: f64 = self.x_means.iter().zip(y_means).map(|(a, b)| a * b).sum();
        let dcov2 = (s - 2.0 * r / n + self.x_grand * self.y_grand).max(0.0);
        (dcov2 / self.denom).sqrt().min(1.0)
    }

    pub fn observed(&self) -> f64 {
        self.dcor_for(&self.ys, &self.y_means)
    }

    /// Statistic after relabeling `y` with `perm`.
    pub fn permuted(&self, perm: &[usize]) -> f64 {
        let ys: Vec<f64> = perm.iter().map(|&k| self.ys[k]).collect();
        let ms: Vec<f64> = perm.iter().map(|&k| self.y_means[k]).collect();
        self.dcor_for(&ys, &ms)
    }
}

/// Sample distance correlation in `[0, 1]`; 0 when either input is constant.
pub fn distance_correlation(xs: &[f64], ys: &[f64]) -> Result<f64> {
    Ok(DcorPermutation::new(xs, ys)?.observed())
}

/// Permutation test of independence based on distance correlation.
///
/// Permutation `k` shuffles with stream `k` of `seed`, so the p-value
/// `(1 + #{perm >= observed}) / (permutations + 1)` does not depend on thread
/// scheduling. Passes iff `p >= 0.01`.
pub fn independence_test(
    xs: &[f64],
    ys: &[f64],
    permutations: usize,
    seed: u64,
) -> Result<TestReport> {
    if xs.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "independence test needs n >= 100, got {}",
            xs.len()
        )));
    }
    if permutations < 199 {
        return Err(Error::InsufficientData(format!(
            "independence test needs >= 199 permutations, got {permutations}"
        )));
    }
    let engine = DcorPermutation::new(xs, ys)?;
    let observed = engine.observed();
    let n = xs.len();
    let exceed: usize = (0..permutations as u64)
        .into_par_iter()
        .map(|k| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng::stream(seed, k));
            usize::from(engine.permuted(&perm) >= observed)
        })
        .sum();
    let p = (1 + exceed) as f64 / (permutations + 1) as f64;
    Ok(TestReport {
        name: "independence".into(),
        statistic: observed,
        p_value: Some(p),
        threshold: 0.01,
        pass: p >= 0.01,
        n,
        seed: Some(seed),
    })
}
