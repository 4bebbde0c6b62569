use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use indepmaps_core::theorems::Perturbation;
use indepmaps_core::TheoremCase;
use serde::{Deserialize, Serialize};

use crate::{DEFAULT_SEED, SEED_ENV};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Deterministic checks: involution, Jacobian, density transport.
    Identity,
    /// Push sampled inputs through the map; KS on all four marginals, independence of (U, V).
    Montecarlo,
    /// Fixed-point chains: stationarity of X_n.
    Chain,
    /// Negative control: a perturbed input law must make (U, V) dependent.
    Power,
}

impl Mode {
    pub fn default_n(self) -> usize {
        match self {
            Mode::Identity => 1_000,
            Mode::Montecarlo => 100_000,
            Mode::Chain => 10_000,
            Mode::Power => 5_000,
        }
    }
}

/// A config file or a set of command-line overrides. Every field is optional.
///
/// ```toml
/// theorem = "sexp"
/// mode = "montecarlo"
/// seed = 7
///
/// [params]
/// lambda = 1.0
/// c1 = 2.0
/// c2 = 3.0
/// ```
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub theorem: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub mode: Option<Mode>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub perturb: Option<f64>,
    pub perturb_param: Option<String>,
    pub permutations: Option<usize>,
    pub independence_n: Option<usize>,
    pub steps: Option<usize>,
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<f64>>,
    pub plot_dir: Option<PathBuf>,
    pub bins: Option<usize>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Run settings beyond the theorem case, embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub permutations: usize,
    /// Pairs used by the independence test in `montecarlo` mode.
    pub independence_n: usize,
    /// Chain length in `chain` mode.
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub perturbation: Option<Perturbation>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub grid: BTreeMap<String, Vec<f64>>,
}

/// A fully resolved and validated experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub case: TheoremCase,
    pub mode: Mode,
    /// Points (identity), draws (montecarlo, power) or chains (chain).
    pub n: usize,
    pub seed: u64,
    pub settings: RunSettings,
    pub out: Option<PathBuf>,
    pub plot_dir: Option<PathBuf>,
    pub bins: usize,
}

/// Seed from the flag or config, else the environment, else [`DEFAULT_SEED`].
pub fn resolve_seed(explicit: Option<u64>, env: Option<&str>) -> Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match env {
        Some(text) => text
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV}=`{text}` is not an unsigned 64-bit integer")),
        None => Ok(DEFAULT_SEED),
    }
}

impl ExperimentConfig {
    /// Layers `flags` over `file` and validates the result. `env_seed` is the
    /// value of [`SEED_ENV`], if set.
    pub fn resolve(file: ConfigLayer, flags: ConfigLayer, env_seed: Option<&str>) -> Result<Self> {
        let theorem = flags
            .theorem
            .clone()
            .or_else(|| file.theorem.clone())
            .context("no theorem given (use --theorem gig|al|sexp or `theorem = ...` in the config)")?;
        let mut params = TheoremCase::default_for(&theorem)?.params();
        if file.theorem.as_deref().is_none_or(|t| t == theorem) {
            params.extend(file.params.clone());
        }
        params.extend(flags.params.clone());
        let case = TheoremCase::from_params(&theorem, &params)?;

        let mode = flags.mode.or(file.mode).context("no mode given (use --mode)")?;
        let n = flags.n.or(file.n).unwrap_or(mode.default_n());
        let seed = resolve_seed(flags.seed.or(file.seed), env_seed)?;
        let permutations = flags.permutations.or(file.permutations).unwrap_or(200);
        let independence_n = flags.independence_n.or(file.independence_n).unwrap_or(5_000);
        let steps = flags.steps.or(file.steps).unwrap_or(100);
        let bins = flags.bins.or(file.bins).unwrap_or(50);
        let mut grid = file.grid.clone();
        grid.extend(flags.grid.clone());

        let perturbation = if mode == Mode::Power {
            let factor = flags.perturb.or(file.perturb).unwrap_or(1.5);
            ensure!(factor.is_finite() && factor > 0.0, "perturbation factor must be finite and > 0, got {factor}");
            Some(match flags.perturb_param.as_deref().or(file.perturb_param.as_deref()) {
                Some(target) => Perturbation::parse(target, factor)?,
                None => case.default_perturbation(factor),
            })
        } else {
            None
        };

        let cfg = Self {
            case,
            mode,
            n,
            seed,
            settings: RunSettings {
                permutations,
                independence_n,
                steps,
                perturbation,
                grid,
            },
            out: flags.out.or(file.out),
            plot_dir: flags.plot_dir.or(file.plot_dir),
            bins,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every case the run visits: the base case, or one per grid cell.
    pub fn cells(&self) -> Result<Vec<(String, TheoremCase)>> {
        if self.settings.grid.is_empty() {
            return Ok(vec![(String::new(), self.case)]);
        }
        let base = self.case.params();
        let mut cells: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new()];
        for (k, values) in &self.settings.grid {
            if !base.contains_key(k) {
                bail!(
                    "grid parameter `{k}` is not a parameter of {} (expected one of {})",
                    self.case.name(),
                    base.keys().cloned().collect::<Vec<_>>().join(", ")
                );
            }
            cells = cells
                .into_iter()
                .flat_map(|cell| {
                    values.iter().map(move |&v| {
                        let mut c = cell.clone();
                        c.insert(k.clone(), v);
                        c
                    })
                })
                .collect();
        }
        cells
            .into_iter()
            .map(|over| {
                let label = over.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
                let mut params = base.clone();
                params.extend(over);
                let case = TheoremCase::from_params(self.case.name(), &params)
                    .with_context(|| format!("grid cell {label}"))?;
                Ok((label, case))
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        ensure!(self.bins >= 1, "bins must be at least 1");
        let cells = self.cells()?;
        match self.mode {
            Mode::Identity => ensure!(self.n >= 1, "identity mode needs n >= 1"),
            Mode::Montecarlo => {
                ensure!(self.n >= 100, "montecarlo mode needs n >= 100, got {}", self.n);
                ensure!(self.settings.permutations >= 199, "permutations must be >= 199");
                ensure!(self.settings.independence_n >= 100, "independence_n must be >= 100");
            }
            Mode::Power => {
                ensure!(self.n >= 100, "power mode needs n >= 100, got {}", self.n);
                ensure!(self.settings.permutations >= 199, "permutations must be >= 199");
                let p = self.settings.perturbation.as_ref().expect("power mode sets a perturbation");
                for (label, case) in &cells {
                    case.perturbed_inputs(p).with_context(|| format!("perturbing {label}"))?;
                }
            }
            Mode::Chain => {
                ensure!(self.n >= 10, "chain mode needs at least 10 chains, got {}", self.n);
                ensure!(self.settings.steps >= 1, "chain mode needs steps >= 1");
                for (label, case) in &cells {
                    ensure!(
                        case.fixed_point_case().is_some(),
                        "chain mode needs a fixed-point case ({}) {label}",
                        match case {
                            TheoremCase::Al { .. } => "r = p",
                            _ => "c1 = c2",
                        }
                    );
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(theorem: &str, mode: Mode) -> ConfigLayer {
        ConfigLayer {
            theorem: Some(theorem.into()),
            mode: Some(mode),
            ..Default::default()
        }
    }

    #[test]
    fn flags_override_file() {
        let file: ConfigLayer = toml::from_str(
            "theorem = \"al\"\nmode = \"identity\"\nseed = 3\nn = 50\n[params]\np = 1.0\nq = 2.0\nr = 3.0\n",
        )
        .unwrap();
        let mut f = ConfigLayer {
            seed: Some(9),
            ..Default::default()
        };
        f.params.insert("q".into(), 5.0);
        let cfg = ExperimentConfig::resolve(file, f, Some("11")).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.n, 50);
        assert_eq!(cfg.case, TheoremCase::al(1.0, 5.0, 3.0).unwrap());
    }

    #[test]
    fn seed_fallbacks() {
        assert_eq!(resolve_seed(None, Some("42")).unwrap(), 42);
        assert_eq!(resolve_seed(Some(1), Some("42")).unwrap(), 1);
        assert_eq!(resolve_seed(None, None).unwrap(), DEFAULT_SEED);
        assert!(resolve_seed(None, Some("-3")).is_err());
    }

    #[test]
    fn defaults_and_validation() {
        let cfg = ExperimentConfig::resolve(ConfigLayer::default(), flags("gig", Mode::Power), None).unwrap();
        assert_eq!(cfg.n, 5_000);
        assert_eq!(cfg.settings.perturbation.as_ref().unwrap().target(), "y.c1");
        assert_eq!(cfg.settings.perturbation.as_ref().unwrap().factor, 1.5);

        let mut f = flags("al", Mode::Chain);
        f.params.insert("r".into(), 3.0);
        let err = ExperimentConfig::resolve(ConfigLayer::default(), f, None).unwrap_err();
        assert!(err.to_string().contains("fixed-point"));

        let mut f = flags("sexp", Mode::Identity);
        f.params.insert("c9".into(), 1.0);
        assert!(ExperimentConfig::resolve(ConfigLayer::default(), f, None).is_err());
        assert!(ExperimentConfig::resolve(ConfigLayer::default(), ConfigLayer::default(), None).is_err());
        assert!(toml::from_str::<ConfigLayer>("colour = 1").is_err());
    }

    #[test]
    fn grid_cells() {
        let mut f = flags("sexp", Mode::Identity);
        f.grid.insert("c1".into(), vec![1.0, 2.0]);
        f.grid.insert("c2".into(), vec![0.5, 3.0]);
        let cfg = ExperimentConfig::resolve(ConfigLayer::default(), f, None).unwrap();
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[1].0, "c1=1,c2=3");
        let mut f = flags("sexp", Mode::Identity);
        f.grid.insert("alpha".into(), vec![1.0]);
        assert!(ExperimentConfig::resolve(ConfigLayer::default(), f, None).is_err());
    }
}
