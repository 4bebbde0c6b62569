use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use indepmaps_core::distributions::{sample_with_backend, Law};
use indepmaps_core::specfun::{bessel_k, log_bessel_k};
use indepmaps_core::stats::{independence_test, ks_critical_value, ks_one_sample};
use indepmaps_core::theorems::run_chains;
use indepmaps_core::transforms::{apply, jacobian_det, jacobian_matrix, region_of, Location};
use indepmaps_core::{DistributionSpec, PlanePoint, TheoremCase, TransformSpec};
use serde::Serialize;

use crate::cli::*;
use crate::config::{resolve_seed, ConfigLayer, ExperimentConfig};
use crate::experiment::{plot_series, run_experiment};
use crate::io::{emit, first_column, parse_grid_axis, parse_params, read_columns, write_atomic};
use crate::plot::{histogram, to_csv};
use crate::SEED_ENV;

/// Runs a subcommand. `Ok(true)` when every check passed (or there were none).
pub fn run(cli: Cli) -> Result<bool> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let env_seed = env_seed.as_deref();
    match cli.command {
        Command::Besselk(a) => besselk(a),
        Command::Sample(a) => sample(a, env_seed),
        Command::Transform(a) => transform(a),
        Command::Stat(StatCommand::Ks(a)) => stat_ks(a),
        Command::Stat(StatCommand::Dcor(a)) => stat_dcor(a, env_seed),
        Command::Verify(a) => verify(a, env_seed),
        Command::Chain(a) => chain(a, env_seed),
        Command::PlotData(a) => plot_data(a, env_seed),
    }
}

fn dist_spec(d: &DistArgs) -> Result<DistributionSpec> {
    Ok(DistributionSpec::from_params(&d.dist, &parse_params(&d.params)?)?)
}

fn json_line<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn besselk(a: BesselArgs) -> Result<bool> {
    if a.log {
        println!("{:e}", log_bessel_k(a.nu, a.x)?);
    } else {
        let v = bessel_k(a.nu, a.x).map_err(|e| anyhow::anyhow!("{e}; use --log for the logarithm"))?;
        println!("{v:e}");
    }
    Ok(true)
}

fn sample(a: SampleArgs, env_seed: Option<&str>) -> Result<bool> {
    let spec = dist_spec(&a.dist)?;
    let seed = resolve_seed(a.seed, env_seed)?;
    let batch = sample_with_backend(&spec, seed, a.n, a.backend.into())?;
    let mut text = format!("# spec={spec} seed={seed} n={}\nvalue\n", batch.size());
    for v in &batch.values {
        text.push_str(&format!("{v:?}\n"));
    }
    emit(a.out.as_deref(), text.as_bytes())?;
    Ok(true)
}

fn map_spec(a: &TransformArgs) -> Result<TransformSpec> {
    let need = |v: Option<f64>, name: &str| v.with_context(|| format!("--kind {:?} needs --{name}", a.kind));
    Ok(match a.kind {
        MapKind::F1 => TransformSpec::f1(need(a.alpha, "alpha")?, need(a.beta, "beta")?)?,
        MapKind::F2 => TransformSpec::f2(),
        MapKind::F3 => TransformSpec::f3(need(a.c1, "c1")?, need(a.c2, "c2")?)?,
    })
}

#[derive(Serialize)]
struct PointImage {
    u: f64,
    v: f64,
    region: String,
    jacobian: Option<[[f64; 2]; 2]>,
    det: Option<f64>,
}

fn transform(a: TransformArgs) -> Result<bool> {
    let spec = map_spec(&a)?;
    if let (Some(x), Some(y)) = (a.x, a.y) {
        let p = PlanePoint::new(x, y);
        let img = apply(&spec, p)?;
        let region = match region_of(&spec, p) {
            Location::Interior(r) => r.label().to_string(),
            Location::Boundary => "boundary".to_string(),
            Location::Outside => "outside".to_string(),
        };
        let out = PointImage {
            u: img.x,
            v: img.y,
            region,
            jacobian: jacobian_matrix(&spec, p).ok(),
            det: jacobian_det(&spec, p).ok(),
        };
        emit(None, &json_line(&out)?)?;
        return Ok(true);
    }
    let input = a.input.as_deref().expect("clap requires --input without --x");
    let cols = read_columns(input, &["x", "y"])?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["u", "v"])?;
    for (row, (&x, &y)) in cols[0].iter().zip(&cols[1]).enumerate() {
        let img = apply(&spec, PlanePoint::new(x, y)).with_context(|| format!("row {}", row + 1))?;
        w.write_record([format!("{:?}", img.x), format!("{:?}", img.y)])?;
    }
    emit(a.out.as_deref(), &w.into_inner()?)?;
    Ok(true)
}

fn column_or_first(path: &Path, column: &Option<String>) -> Result<String> {
    match column {
        Some(c) => Ok(c.clone()),
        None => first_column(path),
    }
}

fn stat_ks(a: KsArgs) -> Result<bool> {
    let spec = dist_spec(&a.dist)?;
    let col = column_or_first(&a.input, &a.column)?;
    let values = read_columns(&a.input, &[col.as_str()])?.remove(0);
    let law = spec.prepare()?;
    let r = ks_one_sample(&values, |x| law.cdf(x))?;
    emit(a.out.as_deref(), &json_line(&r)?)?;
    Ok(r.pass)
}

fn stat_dcor(a: DcorArgs, env_seed: Option<&str>) -> Result<bool> {
    let seed = resolve_seed(a.seed, env_seed)?;
    let cols = read_columns(&a.input, &[a.x_column.as_str(), a.y_column.as_str()])?;
    let r = independence_test(&cols[0], &cols[1], a.permutations, seed)?;
    emit(a.out.as_deref(), &json_line(&r)?)?;
    Ok(r.pass)
}

/// Flags of `verify` as a config layer.
pub fn verify_flags(a: &VerifyArgs) -> Result<ConfigLayer> {
    let mut grid = BTreeMap::new();
    for g in &a.grid {
        let (k, v) = parse_grid_axis(g)?;
        if grid.insert(k.clone(), v).is_some() {
            bail!("grid parameter `{k}` given twice");
        }
    }
    Ok(ConfigLayer {
        theorem: a.theorem.clone(),
        params: a.params.as_deref().map(parse_params).transpose()?.unwrap_or_default(),
        mode: a.mode,
        n: a.n,
        seed: a.seed,
        out: a.out.clone(),
        perturb: a.perturb,
        perturb_param: a.perturb_param.clone(),
        permutations: a.permutations,
        independence_n: a.independence_n,
        steps: a.steps,
        grid,
        plot_dir: a.plot_dir.clone(),
        bins: a.bins,
    })
}

fn verify(a: VerifyArgs, env_seed: Option<&str>) -> Result<bool> {
    let file = match &a.config {
        Some(p) => ConfigLayer::from_file(p)?,
        None => ConfigLayer::default(),
    };
    let cfg = ExperimentConfig::resolve(file, verify_flags(&a)?, env_seed)?;
    let report = run_experiment(&cfg)?;
    if let Some(dir) = &cfg.plot_dir {
        for (name, rows) in plot_series(&cfg)? {
            write_atomic(&dir.join(format!("{name}.csv")), &to_csv(&rows)?)?;
        }
    }
    emit(cfg.out.as_deref(), &report.to_json())?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: statistic {} vs threshold {}", c.name, c.statistic, c.threshold);
    }
    Ok(report.passed())
}

fn chain(a: ChainArgs, env_seed: Option<&str>) -> Result<bool> {
    let mut params = TheoremCase::default_for(&a.theorem)?.params();
    if let Some(p) = &a.params {
        params.extend(parse_params(p)?);
    }
    let case = TheoremCase::from_params(&a.theorem, &params)?;
    let seed = resolve_seed(a.seed, env_seed)?;
    let ensemble = run_chains(&case, a.chains, a.steps, seed)?;
    let law = case.predicted_laws()?.x_law.prepare()?;
    let crit = ks_critical_value(a.chains);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "ks_statistic", "threshold"])?;
    let mut last_pass = true;
    for step in 0..=a.steps {
        let r = ks_one_sample(ensemble.at_step(step), |x| law.cdf(x))?;
        last_pass = r.pass;
        w.write_record([step.to_string(), format!("{:?}", r.statistic), format!("{crit:?}")])?;
    }
    emit(a.out.as_deref(), &w.into_inner()?)?;
    Ok(last_pass)
}

fn plot_data(a: PlotArgs, env_seed: Option<&str>) -> Result<bool> {
    let spec = dist_spec(&a.dist)?;
    let values = match (&a.input, a.n) {
        (Some(path), _) => {
            let col = column_or_first(path, &a.column)?;
            read_columns(path, &[col.as_str()])?.remove(0)
        }
        (None, Some(n)) => sample_with_backend(&spec, resolve_seed(a.seed, env_seed)?, n, Default::default())?.values,
        (None, None) => bail!("plot-data needs --input or --n"),
    };
    let range = a.range.as_deref().map(parse_range).transpose()?;
    let rows = histogram(&values, &spec, a.bins, range)?;
    emit(a.out.as_deref(), &to_csv(&rows)?)?;
    Ok(true)
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text.split_once(',').context("--range must be `lo,hi`")?;
    Ok((lo.trim().parse().context("--range lower end")?, hi.trim().parse().context("--range upper end")?))
}
