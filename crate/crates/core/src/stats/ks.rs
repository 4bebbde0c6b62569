use super::TestReport;
use crate::error::{Error, Result};

/// Asymptotic 1% critical value of `sqrt(n) D_n`.
pub const KS_C_01: f64 = 1.628;

pub fn ks_critical_value(n: usize) -> f64 {
    KS_C_01 / (n as f64).sqrt()
}

/// `D_n = sup |F_n - F|` against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData("KS test on empty input".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InsufficientData("KS test input contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    });
    Ok(d)
}

/// Kolmogorov survival function `P(K > z) = 2 sum (-1)^{k-1} e^{-2 k^2 z^2}`.
pub fn kolmogorov_pvalue(z: f64) -> f64 {
    if z < 0.27 {
        return 1.0;
    }
    if z < 1.0 {
        // small-z form converges faster: P(K <= z) = sqrt(2 pi)/z sum e^{-(2k-1)^2 pi^2 / (8 z^2)}
        let w = (2.0 * std::f64::consts::PI).sqrt() / z;
        let q = -std::f64::consts::PI.powi(2) / (8.0 * z * z);
        let cdf: f64 = (1..=8).map(|k| ((2 * k - 1) as f64).powi(2) * q).map(f64::exp).sum::<f64>() * w;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let s: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            let sign = if k as i64 % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * k * k * z * z).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS test at level 0.01: passes iff `D_n < 1.628 / sqrt(n)`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<TestReport> {
    if values.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "KS test needs at least 10 values, got {}",
            values.len()
        )));
    }
    let d = ks_statistic(values, cdf)?;
    let n = values.len();
    let threshold = ks_critical_value(n);
    Ok(TestReport {
        name: "ks".into(),
        statistic: d,
        p_value: Some(kolmogorov_pvalue(d * (n as f64).sqrt())),
        threshold,
        pass: d < threshold,
        n,
        seed: None,
    })
}
