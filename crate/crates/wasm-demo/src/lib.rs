//! Browser bindings. Each export returns a JSON string for `www/index.html` to draw.
//! The `*_json` functions hold the logic and run natively as well.

use std::collections::BTreeMap;

use indepmaps_core::distributions::sample;
use indepmaps_core::specfun::log_bessel_k;
use indepmaps_core::stats::distance_correlation;
use indepmaps_core::theorems::simulate_case;
use indepmaps_core::{DistributionSpec, TheoremCase};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_DRAWS: usize = 200_000;
const MAX_SCATTER: usize = 5_000;

fn parse_params(text: &str) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| format!("`{item}` is not name=value"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("`{}` is not a number", v.trim()))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Histogram {
    spec: String,
    centers: Vec<f64>,
    empirical: Vec<f64>,
    analytic: Vec<f64>,
}

/// Histogram of `n` draws over their central 99% next to the pdf.
pub fn histogram_json(family: &str, params: &str, n: usize, seed: u64, bins: usize) -> Result<String, String> {
    if !(1..=MAX_DRAWS).contains(&n) || bins == 0 {
        return Err(format!("need 1 <= n <= {MAX_DRAWS} and bins >= 1"));
    }
    let spec = DistributionSpec::from_params(family, &parse_params(params)?).map_err(|e| e.to_string())?;
    let mut values = sample(&spec, seed, n).map_err(|e| e.to_string())?.values;
    values.sort_by(f64::total_cmp);
    let lo = values[n / 200];
    let hi = values[(n - 1) - n / 200];
    let (lo, hi) = if lo < hi { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in values.iter().filter(|v| (lo..=hi).contains(*v)) {
        counts[(((v - lo) / width) as usize).min(bins - 1)] += 1;
    }
    let centers: Vec<f64> = (0..bins).map(|k| lo + (k as f64 + 0.5) * width).collect();
    to_json(&Histogram {
        spec: spec.to_string(),
        analytic: centers.iter().map(|&x| spec.pdf(x)).collect(),
        empirical: counts.iter().map(|&c| c as f64 / (n as f64 * width)).collect(),
        centers,
    })
}

#[derive(Serialize)]
struct Scatter {
    xs: Vec<f64>,
    ys: Vec<f64>,
    us: Vec<f64>,
    vs: Vec<f64>,
    dcor_xy: f64,
    dcor_uv: f64,
}

/// Independent draws `(X, Y)` for a theorem and their images `(U, V)`, with the
/// distance correlation of each pair.
pub fn scatter_json(theorem: &str, params: &str, n: usize, seed: u64) -> Result<String, String> {
    if !(2..=MAX_SCATTER).contains(&n) {
        return Err(format!("need 2 <= n <= {MAX_SCATTER}"));
    }
    let mut all = TheoremCase::default_for(theorem).map_err(|e| e.to_string())?.params();
    all.extend(parse_params(params)?);
    let case = TheoremCase::from_params(theorem, &all).map_err(|e| e.to_string())?;
    let s = simulate_case(&case, seed, n).map_err(|e| e.to_string())?;
    let dcor_xy = distance_correlation(&s.xs, &s.ys).map_err(|e| e.to_string())?;
    let dcor_uv = distance_correlation(&s.us, &s.vs).map_err(|e| e.to_string())?;
    to_json(&Scatter {
        xs: s.xs,
        ys: s.ys,
        us: s.us,
        vs: s.vs,
        dcor_xy,
        dcor_uv,
    })
}

#[derive(Serialize)]
struct Curve {
    xs: Vec<f64>,
    log_k: Vec<f64>,
}

/// `log K_nu(x)` on a log-spaced grid of `x`.
pub fn bessel_json(nu: f64, x_min: f64, x_max: f64, points: usize) -> Result<String, String> {
    if !(x_min > 0.0 && x_max > x_min && (2..=2_000).contains(&points)) {
        return Err("need 0 < x_min < x_max and 2 <= points <= 2000".into());
    }
    let step = (x_max / x_min).ln() / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|k| x_min * (k as f64 * step).exp()).collect();
    let log_k = xs
        .iter()
        .map(|&x| log_bessel_k(nu, x).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    to_json(&Curve { xs, log_k })
}

#[wasm_bindgen]
pub fn pdf_histogram(family: &str, params: &str, n: usize, seed: u64, bins: usize) -> Result<String, JsValue> {
    histogram_json(family, params, n, seed, bins).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn transform_scatter(theorem: &str, params: &str, n: usize, seed: u64) -> Result<String, JsValue> {
    scatter_json(theorem, params, n, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bessel_curve(nu: f64, x_min: f64, x_max: f64, points: usize) -> Result<String, JsValue> {
    bessel_json(nu, x_min, x_max, points).map_err(|e| JsValue::from_str(&e))
}
