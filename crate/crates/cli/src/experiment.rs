use anyhow::Result;
use indepmaps_core::distributions::Law;
use indepmaps_core::qmc::r2_points;
use indepmaps_core::rng::derive_seed;
use indepmaps_core::stats::{independence_test, ks_critical_value, ks_one_sample, TestReport};
use indepmaps_core::theorems::{density_transport_residual, run_chains, simulate, simulate_case, Perturbation};
use indepmaps_core::transforms::{
    f3_domain_map_check, finite_difference_jacobian, involution_defect_relative, jacobian_det,
};
use indepmaps_core::{DistributionSpec, PlanePoint, TheoremCase};

use crate::config::{ExperimentConfig, Mode, RunSettings};
use crate::plot::{histogram, PlotRow};
use crate::report::{Check, Report};

/// Stream label for the permutation test, so its shuffles never reuse the sampling streams.
const PERMUTATION_LABEL: u64 = 0x7065_726d;

/// Checkpoints of the chain drift check.
const CHAIN_CHECKPOINTS: [usize; 4] = [1, 10, 50, 100];

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let mut checks = Vec::new();
    for (label, case) in cfg.cells()? {
        let cell = match cfg.mode {
            Mode::Identity => identity_checks(&case, cfg.n)?,
            Mode::Montecarlo => montecarlo_checks(&case, cfg.n, cfg.seed, &cfg.settings)?,
            Mode::Chain => chain_checks(&case, cfg.n, cfg.settings.steps, cfg.seed)?,
            Mode::Power => power_checks(
                &case,
                cfg.n,
                cfg.seed,
                cfg.settings.permutations,
                cfg.settings.perturbation.as_ref().expect("validated"),
            )?,
        };
        checks.extend(cell.into_iter().map(|c| c.prefixed(&label)));
    }
    Ok(Report {
        theorem: cfg.case.name().to_string(),
        params: cfg.case.params(),
        mode: cfg.mode,
        checks,
        seed: cfg.seed,
        n: cfg.n,
        settings: cfg.settings.clone(),
    })
}

fn residual_tolerance(case: &TheoremCase) -> f64 {
    match case {
        TheoremCase::Gig { .. } => 1e-8,
        _ => 1e-12,
    }
}

fn identity_checks(case: &TheoremCase, n: usize) -> Result<Vec<Check>> {
    let spec = case.transform();
    let points = case.interior_points(n);
    let (mut inv, mut det, mut fd, mut res) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &p in &points {
        inv = inv.max(involution_defect_relative(&spec, p)?);
        det = det.max((jacobian_det(&spec, p)? + 1.0).abs());
        let m = finite_difference_jacobian(&spec, p, 1e-6)?;
        fd = fd.max((m[0][0] * m[1][1] - m[0][1] * m[1][0] + 1.0).abs());
        res = res.max(density_transport_residual(case, p)?);
    }
    let mut checks = vec![
        Check::at_most("involution_defect", inv, 1e-12),
        Check::at_most("jacobian_det_defect", det, 1e-12),
        Check::at_most("fd_jacobian_det_defect", fd, 1e-6),
        Check::at_most("density_transport_residual", res, residual_tolerance(case)),
    ];
    if let TheoremCase::Sexp { lambda, c1, c2 } = *case {
        checks.push(Check::at_most("f3_containment_violations", f3_violations(lambda, c1, c2, n)? as f64, 0.0));
    }
    Ok(checks)
}

/// Quasi-random points of `[-c1, c2] x [-c2, c2 + 50/lambda]` whose image leaves
/// `[-c2, c1] x [-c1, inf)`.
pub fn f3_violations(lambda: f64, c1: f64, c2: f64, n: usize) -> Result<usize> {
    let top = c2 + 50.0 / lambda;
    let mut bad = 0;
    for (a, b) in r2_points(n) {
        let p = PlanePoint::new(-c1 + (c1 + c2) * a, -c2 + (top + c2) * b);
        if !f3_domain_map_check(c1, c2, p)? {
            bad += 1;
        }
    }
    Ok(bad)
}

fn ks_check(name: &str, values: &[f64], law: &DistributionSpec) -> Result<Check> {
    let prepared = law.prepare()?;
    let r = ks_one_sample(values, |x| prepared.cdf(x))?;
    Ok(Check {
        name: name.to_string(),
        statistic: r.statistic,
        threshold: r.threshold,
        pass: r.pass,
    })
}

fn independence_check(name: &str, r: &TestReport, reject_wanted: bool) -> Check {
    let p = r.p_value.expect("permutation tests report a p-value");
    Check {
        name: name.to_string(),
        statistic: p,
        threshold: r.threshold,
        pass: if reject_wanted { p < r.threshold } else { p >= r.threshold },
    }
}

fn montecarlo_checks(case: &TheoremCase, n: usize, seed: u64, settings: &RunSettings) -> Result<Vec<Check>> {
    let laws = case.predicted_laws()?;
    let s = simulate_case(case, seed, n)?;
    let m = settings.independence_n.min(n);
    let indep = independence_test(&s.us[..m], &s.vs[..m], settings.permutations, derive_seed(seed, PERMUTATION_LABEL))?;
    Ok(vec![
        ks_check("ks_x", &s.xs, &laws.x_law)?,
        ks_check("ks_y", &s.ys, &laws.y_law)?,
        ks_check("ks_u", &s.us, &laws.u_law)?,
        ks_check("ks_v", &s.vs, &laws.v_law)?,
        independence_check("independence_uv_pvalue", &indep, false),
    ])
}

/// KS distance of `X_n` across chains at each checkpoint `<= steps`, plus `steps`.
pub fn chain_ks_trajectory(case: &TheoremCase, chains: usize, steps: usize, seed: u64) -> Result<Vec<(usize, f64)>> {
    let ensemble = run_chains(case, chains, steps, seed)?;
    let law = case.predicted_laws()?.x_law.prepare()?;
    let mut at: Vec<usize> = CHAIN_CHECKPOINTS.iter().copied().filter(|&k| k <= steps).collect();
    if at.last() != Some(&steps) {
        at.push(steps);
    }
    at.into_iter()
        .map(|k| Ok((k, ks_one_sample(ensemble.at_step(k), |x| law.cdf(x))?.statistic)))
        .collect()
}

/// Drift statistic: the rise `D_last - D_first` when the KS distances strictly
/// increase across checkpoints, else 0. Upward drift is flagged when the rise
/// exceeds the 1% critical value.
pub fn drift_statistic(trajectory: &[(usize, f64)]) -> f64 {
    let increasing = trajectory.windows(2).all(|w| w[1].1 > w[0].1);
    match (trajectory.first(), trajectory.last()) {
        (Some(a), Some(b)) if increasing && trajectory.len() > 1 => b.1 - a.1,
        _ => 0.0,
    }
}

fn chain_checks(case: &TheoremCase, chains: usize, steps: usize, seed: u64) -> Result<Vec<Check>> {
    let traj = chain_ks_trajectory(case, chains, steps, seed)?;
    let crit = ks_critical_value(chains);
    let (last_step, last) = *traj.last().expect("at least one checkpoint");
    Ok(vec![
        Check {
            name: format!("ks_x{last_step}"),
            statistic: last,
            threshold: crit,
            pass: last < crit,
        },
        Check::at_most("ks_monotone_drift", drift_statistic(&traj), crit),
    ])
}

fn power_checks(case: &TheoremCase, n: usize, seed: u64, permutations: usize, p: &Perturbation) -> Result<Vec<Check>> {
    let (x, y) = case.perturbed_inputs(p)?;
    let s = simulate(&x, &y, &case.transform(), seed, n)?;
    let r = independence_test(&s.us, &s.vs, permutations, derive_seed(seed, PERMUTATION_LABEL))?;
    Ok(vec![independence_check("independence_rejected", &r, true)])
}

/// Histograms against the relevant analytic laws for the base case: `x, y, u, v`
/// for montecarlo and power (inputs as actually drawn), the final chain state
/// for chain mode, nothing for identity mode.
pub fn plot_series(cfg: &ExperimentConfig) -> Result<Vec<(String, Vec<PlotRow>)>> {
    let case = &cfg.case;
    let laws = case.predicted_laws()?;
    let bins = cfg.bins;
    match cfg.mode {
        Mode::Identity => Ok(Vec::new()),
        Mode::Montecarlo | Mode::Power => {
            let (x_law, y_law) = match &cfg.settings.perturbation {
                Some(p) => case.perturbed_inputs(p)?,
                None => (laws.x_law, laws.y_law),
            };
            let s = simulate(&x_law, &y_law, &case.transform(), cfg.seed, cfg.n)?;
            Ok(vec![
                ("x".into(), histogram(&s.xs, &x_law, bins, None)?),
                ("y".into(), histogram(&s.ys, &y_law, bins, None)?),
                ("u".into(), histogram(&s.us, &laws.u_law, bins, None)?),
                ("v".into(), histogram(&s.vs, &laws.v_law, bins, None)?),
            ])
        }
        Mode::Chain => {
            let e = run_chains(case, cfg.n, cfg.settings.steps, cfg.seed)?;
            let name = format!("x{}", cfg.settings.steps);
            Ok(vec![(name, histogram(e.at_step(cfg.settings.steps), &laws.x_law, bins, None)?)])
        }
    }
}
