use anyhow::{bail, ensure, Result};
use indepmaps_core::DistributionSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotRow {
    pub bin_center: f64,
    pub empirical_density: f64,
    pub analytic_pdf: f64,
}

/// Histogram of `values` as a density (counts over `n * width`) next to the
/// pdf of `law` at each bin centre. The range defaults to `[min, max]` of the data.
pub fn histogram(values: &[f64], law: &DistributionSpec, bins: usize, range: Option<(f64, f64)>) -> Result<Vec<PlotRow>> {
    if values.is_empty() {
        bail!("cannot build a histogram from an empty batch");
    }
    ensure!(bins >= 1, "bins must be at least 1");
    ensure!(values.iter().all(|v| v.is_finite()), "histogram input contains non-finite values");
    let (lo, hi) = match range {
        Some((lo, hi)) => {
            ensure!(lo < hi && lo.is_finite() && hi.is_finite(), "histogram range [{lo}, {hi}] is empty");
            (lo, hi)
        }
        None => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo < hi {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        }
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if v < lo || v > hi {
            continue;
        }
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let scale = 1.0 / (values.len() as f64 * width);
    Ok(counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let center = lo + (k as f64 + 0.5) * width;
            PlotRow {
                bin_center: center,
                empirical_density: c as f64 * scale,
                analytic_pdf: law.pdf(center),
            }
        })
        .collect())
}

pub fn to_csv(rows: &[PlotRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bin_center", "empirical_density", "analytic_pdf"])?;
    for r in rows {
        w.write_record([
            format!("{:?}", r.bin_center),
            format!("{:?}", r.empirical_density),
            format!("{:?}", r.analytic_pdf),
        ])?;
    }
    Ok(w.into_inner()?)
}
