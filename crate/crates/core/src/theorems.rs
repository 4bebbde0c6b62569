//! Input and output laws of the three independence-preserving maps.
//!
//! | case   | map | X                  | Y               | U                  | V               |
//! |--------|-----|--------------------|-----------------|--------------------|-----------------|
//! | `Gig`  | F1  | GIG(l, c1 a, c2)   | GIG(l, c2 b, c1)| GIG(l, c2 a, c1)   | GIG(l, c1 b, c2)|
//! | `Al`   | F2  | AL(p, q)           | AL(p + q, r)    | AL(r, q)           | AL(q + r, p)    |
//! | `Sexp` | F3  | stExp(l, -c1, c2)  | sExp(l, -c2)    | stExp(l, -c2, c1)  | sExp(l, -c1)    |
//!
//! With `X`, `Y` independent and distributed as in the table, `(U, V) = F(X, Y)`
//! are independent with the listed laws. The case is a fixed point
//! (`(U, V)` has the law of `(X, Y)`) when `c1 = c2` for `Gig`/`Sexp` and `r = p`
//! for `Al`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{Distribution, DistributionSpec, Law};
use crate::error::{Error, Result};
use crate::qmc::r2_points;
use crate::rng;
use crate::transforms::{apply, region_of, Location, PlanePoint, TransformSpec};

/// A theorem together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "lowercase", try_from = "RawCase")]
pub enum TheoremCase {
    Gig {
        lambda: f64,
        c1: f64,
        c2: f64,
        alpha: f64,
        beta: f64,
    },
    Al {
        p: f64,
        q: f64,
        r: f64,
    },
    Sexp {
        lambda: f64,
        c1: f64,
        c2: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "theorem", rename_all = "lowercase")]
enum RawCase {
    Gig {
        lambda: f64,
        c1: f64,
        c2: f64,
        alpha: f64,
        beta: f64,
    },
    Al {
        p: f64,
        q: f64,
        r: f64,
    },
    Sexp {
        lambda: f64,
        c1: f64,
        c2: f64,
    },
}

impl TryFrom<RawCase> for TheoremCase {
    type Error = Error;

    fn try_from(raw: RawCase) -> Result<Self> {
        match raw {
            RawCase::Gig {
                lambda,
                c1,
                c2,
                alpha,
                beta,
            } => Self::gig(lambda, c1, c2, alpha, beta),
            RawCase::Al { p, q, r } => Self::al(p, q, r),
            RawCase::Sexp { lambda, c1, c2 } => Self::sexp(lambda, c1, c2),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

/// Which input law a perturbation modifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputLaw {
    X,
    Y,
}

/// Multiplies one parameter of one input law, breaking the characterization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub law: InputLaw,
    pub param: String,
    pub factor: f64,
}

impl Perturbation {
    /// Parses `x.<param>` or `y.<param>`.
    pub fn parse(target: &str, factor: f64) -> Result<Self> {
        let (law, param) = target.split_once('.').ok_or_else(|| {
            Error::InvalidParameter(format!("perturbation target `{target}` is not `x.<param>` or `y.<param>`"))
        })?;
        let law = match law {
            "x" | "X" => InputLaw::X,
            "y" | "Y" => InputLaw::Y,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "perturbation law `{other}` must be x or y"
                )))
            }
        };
        Ok(Self {
            law,
            param: param.to_string(),
            factor,
        })
    }

    pub fn target(&self) -> String {
        let law = match self.law {
            InputLaw::X => "x",
            InputLaw::Y => "y",
        };
        format!("{law}.{}", self.param)
    }
}

/// Predicted laws of the inputs and outputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawQuadruple {
    pub x_law: DistributionSpec,
    pub y_law: DistributionSpec,
    pub u_law: DistributionSpec,
    pub v_law: DistributionSpec,
}

impl TheoremCase {
    /// GIG case. `alpha`, `beta` must be strictly positive: with a zero rate
    /// the input law leaves the GIG parameter space.
    pub fn gig(lambda: f64, c1: f64, c2: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be finite, got {lambda}")));
        }
        positive("c1", c1)?;
        positive("c2", c2)?;
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        if alpha == beta {
            return Err(Error::InvalidParameter(format!("alpha must differ from beta, got {alpha}")));
        }
        Ok(Self::Gig {
            lambda,
            c1,
            c2,
            alpha,
            beta,
        })
    }

    pub fn al(p: f64, q: f64, r: f64) -> Result<Self> {
        positive("p", p)?;
        positive("q", q)?;
        positive("r", r)?;
        Ok(Self::Al { p, q, r })
    }

    pub fn sexp(lambda: f64, c1: f64, c2: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        positive("c1", c1)?;
        positive("c2", c2)?;
        Ok(Self::Sexp { lambda, c1, c2 })
    }

    /// Builds a case from a theorem name (`gig`, `al`, `sexp`) and named parameters.
    pub fn from_params(theorem: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let keys: &[&str] = match theorem {
            "gig" => &["lambda", "c1", "c2", "alpha", "beta"],
            "al" => &["p", "q", "r"],
            "sexp" => &["lambda", "c1", "c2"],
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown theorem `{other}` (expected gig, al or sexp)"
                )))
            }
        };
        if let Some(extra) = params.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "unexpected parameter `{extra}` for {theorem} (expected {})",
                keys.join(", ")
            )));
        }
        let get = |k: &str| {
            params
                .get(k)
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("missing parameter `{k}` for {theorem}")))
        };
        match theorem {
            "gig" => Self::gig(get("lambda")?, get("c1")?, get("c2")?, get("alpha")?, get("beta")?),
            "al" => Self::al(get("p")?, get("q")?, get("r")?),
            _ => Self::sexp(get("lambda")?, get("c1")?, get("c2")?),
        }
    }

    /// Fixed-point cell used when no parameters are given:
    /// GIG(2; 1, 1; 4, 0.25), AL(1, 2, 1), sExp(1; 1, 1).
    pub fn default_for(theorem: &str) -> Result<Self> {
        match theorem {
            "gig" => Self::gig(2.0, 1.0, 1.0, 4.0, 0.25),
            "al" => Self::al(1.0, 2.0, 1.0),
            "sexp" => Self::sexp(1.0, 1.0, 1.0),
            other => Err(Error::InvalidParameter(format!(
                "unknown theorem `{other}` (expected gig, al or sexp)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gig { .. } => "gig",
            Self::Al { .. } => "al",
            Self::Sexp { .. } => "sexp",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            Self::Gig {
                lambda,
                c1,
                c2,
                alpha,
                beta,
            } => vec![("lambda", lambda), ("c1", c1), ("c2", c2), ("alpha", alpha), ("beta", beta)],
            Self::Al { p, q, r } => vec![("p", p), ("q", q), ("r", r)],
            Self::Sexp { lambda, c1, c2 } => vec![("lambda", lambda), ("c1", c1), ("c2", c2)],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn transform(&self) -> TransformSpec {
        match *self {
            Self::Gig { alpha, beta, .. } => TransformSpec::F1 { alpha, beta },
            Self::Al { .. } => TransformSpec::F2,
            Self::Sexp { c1, c2, .. } => TransformSpec::F3 { c1, c2 },
        }
    }

    pub fn predicted_laws(&self) -> Result<LawQuadruple> {
        Ok(match *self {
            Self::Gig {
                lambda,
                c1,
                c2,
                alpha,
                beta,
            } => LawQuadruple {
                x_law: DistributionSpec::gig(lambda, c1 * alpha, c2)?,
                y_law: DistributionSpec::gig(lambda, c2 * beta, c1)?,
                u_law: DistributionSpec::gig(lambda, c2 * alpha, c1)?,
                v_law: DistributionSpec::gig(lambda, c1 * beta, c2)?,
            },
            Self::Al { p, q, r } => LawQuadruple {
                x_law: DistributionSpec::al(p, q)?,
                y_law: DistributionSpec::al(p + q, r)?,
                u_law: DistributionSpec::al(r, q)?,
                v_law: DistributionSpec::al(q + r, p)?,
            },
            Self::Sexp { lambda, c1, c2 } => LawQuadruple {
                x_law: DistributionSpec::stexp(lambda, -c1, c2)?,
                y_law: DistributionSpec::sexp(lambda, -c2)?,
                u_law: DistributionSpec::stexp(lambda, -c2, c1)?,
                v_law: DistributionSpec::sexp(lambda, -c1)?,
            },
        })
    }

    /// The case whose input laws are this case's output laws.
    pub fn dual(&self) -> Self {
        match *self {
            Self::Gig {
                lambda,
                c1,
                c2,
                alpha,
                beta,
            } => Self::Gig {
                lambda,
                c1: c2,
                c2: c1,
                alpha,
                beta,
            },
            Self::Al { p, q, r } => Self::Al { p: r, q, r: p },
            Self::Sexp { lambda, c1, c2 } => Self::Sexp {
                lambda,
                c1: c2,
                c2: c1,
            },
        }
    }

    /// `Some(self)` when `(U, V)` has the law of `(X, Y)`, `None` otherwise.
    pub fn fixed_point_case(&self) -> Option<Self> {
        let fixed = match *self {
            Self::Gig { c1, c2, .. } | Self::Sexp { c1, c2, .. } => c1 == c2,
            Self::Al { p, r, .. } => p == r,
        };
        fixed.then_some(*self)
    }

    /// Input laws with one parameter multiplied by `perturbation.factor`.
    pub fn perturbed_inputs(&self, perturbation: &Perturbation) -> Result<(DistributionSpec, DistributionSpec)> {
        let laws = self.predicted_laws()?;
        let bump = |spec: DistributionSpec| -> Result<DistributionSpec> {
            let mut params: BTreeMap<String, f64> =
                spec.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
            let slot = params.get_mut(&perturbation.param).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "{spec} has no parameter `{}`",
                    perturbation.param
                ))
            })?;
            *slot *= perturbation.factor;
            DistributionSpec::from_params(spec.family().as_str(), &params)
        };
        match perturbation.law {
            InputLaw::X => Ok((bump(laws.x_law)?, laws.y_law)),
            InputLaw::Y => Ok((laws.x_law, bump(laws.y_law)?)),
        }
    }

    /// Perturbation used by the negative-control runs unless overridden.
    pub fn default_perturbation(&self, factor: f64) -> Perturbation {
        let (law, param) = match self {
            Self::Gig { .. } => (InputLaw::Y, "c1"),
            Self::Al { .. } => (InputLaw::Y, "lambda1"),
            Self::Sexp { .. } => (InputLaw::Y, "c"),
        };
        Perturbation {
            law,
            param: param.to_string(),
            factor,
        }
    }

    /// `n` quasi-random points inside the product of the input supports and off
    /// the map's dividing lines.
    ///
    /// GIG: both coordinates log-uniform on `[e^-3, e^3]`. AL: the box `[-6, 6]^2`.
    /// sExp: `(-c1, c2) x (-c2, c2 + 50/lambda)`, truncating the unbounded `y` range.
    pub fn interior_points(&self, n: usize) -> Vec<PlanePoint> {
        let spec = self.transform();
        let mut out = Vec::with_capacity(n);
        let mut k = n;
        while out.len() < n {
            let pts = r2_points(k);
            out.clear();
            for (a, b) in pts {
                let p = match *self {
                    Self::Gig { .. } => PlanePoint::new((6.0 * a - 3.0).exp(), (6.0 * b - 3.0).exp()),
                    Self::Al { .. } => PlanePoint::new(12.0 * a - 6.0, 12.0 * b - 6.0),
                    Self::Sexp { lambda, c1, c2 } => PlanePoint::new(
                        -c1 + (c1 + c2) * a,
                        -c2 + (2.0 * c2 + 50.0 / lambda) * b,
                    ),
                };
                if matches!(region_of(&spec, p), Location::Interior(_)) {
                    out.push(p);
                }
                if out.len() == n {
                    break;
                }
            }
            k += n / 10 + 1;
        }
        out
    }
}

/// Relative mismatch `|f_U(u) f_V(v) - f_X(x) f_Y(y)| / (f_X(x) f_Y(y))` at `(u, v) = F(x, y)`.
///
/// `|J| = 1` for all three maps, so this is the density-transport identity for
/// independent outputs. Evaluated through log densities.
pub fn density_transport_residual(case: &TheoremCase, p: PlanePoint) -> Result<f64> {
    let laws = case.predicted_laws()?;
    let spec = case.transform();
    if !laws.x_law.contains_interior(p.x) || !laws.y_law.contains_interior(p.y) {
        return Err(Error::OutsideSupport(format!(
            "({}, {}) is not interior to the support of {} x {}",
            p.x, p.y, laws.x_law, laws.y_law
        )));
    }
    if !matches!(region_of(&spec, p), Location::Interior(_)) {
        return Err(Error::Boundary { x: p.x, y: p.y });
    }
    let img = apply(&spec, p)?;
    let lhs = laws.u_law.log_pdf(img.x) + laws.v_law.log_pdf(img.y);
    let rhs = laws.x_law.log_pdf(p.x) + laws.y_law.log_pdf(p.y);
    Ok((lhs - rhs).exp_m1().abs())
}

/// Prepared ingredients for running the map on random inputs.
struct Machine {
    x_law: Distribution,
    y_law: Distribution,
    spec: TransformSpec,
}

impl Machine {
    fn new(x_law: &DistributionSpec, y_law: &DistributionSpec, spec: TransformSpec) -> Result<Self> {
        Ok(Self {
            x_law: x_law.prepare()?,
            y_law: y_law.prepare()?,
            spec,
        })
    }

    fn chain(&self, x0_seed: u64, y_seed: u64, steps: usize) -> Vec<f64> {
        let mut x_rng = rng::stream(x0_seed, 0);
        let mut y_rng = rng::stream(y_seed, 0);
        let mut x = self.x_law.sample(&mut x_rng);
        let mut path = Vec::with_capacity(steps + 1);
        path.push(x);
        for _ in 0..steps {
            let y = self.y_law.sample(&mut y_rng);
            x = apply(&self.spec, PlanePoint::new(x, y))
                .expect("sampled points lie in the map's domain")
                .x;
            path.push(x);
        }
        path
    }
}

/// `X_0 ~ x_law`; `X_{n+1}` is the first coordinate of `F(X_n, Y_n)` with fresh
/// `Y_n ~ y_law`. Returns `X_0, ..., X_steps`.
pub fn iterate_chain(case: &TheoremCase, x0_seed: u64, y_seed: u64, steps: usize) -> Result<Vec<f64>> {
    let case = case.fixed_point_case().ok_or(Error::NotFixedPoint)?;
    let laws = case.predicted_laws()?;
    let m = Machine::new(&laws.x_law, &laws.y_law, case.transform())?;
    Ok(m.chain(x0_seed, y_seed, steps))
}

/// States of many independent chains; `states[n][c]` is `X_n` of chain `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainEnsemble {
    pub states: Vec<Vec<f64>>,
}

impl ChainEnsemble {
    pub fn at_step(&self, n: usize) -> &[f64] {
        &self.states[n]
    }
}

/// Runs `chains` chains of `steps` steps; chain `c` uses seeds derived from
/// `(seed, 2c)` and `(seed, 2c + 1)`.
pub fn run_chains(case: &TheoremCase, chains: usize, steps: usize, seed: u64) -> Result<ChainEnsemble> {
    let case = case.fixed_point_case().ok_or(Error::NotFixedPoint)?;
    let laws = case.predicted_laws()?;
    let m = Machine::new(&laws.x_law, &laws.y_law, case.transform())?;
    let paths: Vec<Vec<f64>> = (0..chains as u64)
        .into_par_iter()
        .map(|c| m.chain(rng::derive_seed(seed, 2 * c), rng::derive_seed(seed, 2 * c + 1), steps))
        .collect();
    let states = (0..=steps)
        .map(|n| paths.iter().map(|p| p[n]).collect())
        .collect();
    Ok(ChainEnsemble { states })
}

/// Independent draws pushed through a map.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedSample {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
}

/// Draws `n` pairs (`X` from stream 0, `Y` from stream 1 of `seed`) and applies `spec`.
pub fn simulate(
    x_law: &DistributionSpec,
    y_law: &DistributionSpec,
    spec: &TransformSpec,
    seed: u64,
    n: usize,
) -> Result<TransformedSample> {
    if n == 0 {
        return Err(Error::InsufficientData("simulation needs n >= 1".into()));
    }
    let m = Machine::new(x_law, y_law, *spec)?;
    let mut x_rng = rng::stream(seed, 0);
    let mut y_rng = rng::stream(seed, 1);
    let xs: Vec<f64> = (0..n).map(|_| m.x_law.sample(&mut x_rng)).collect();
    let ys: Vec<f64> = (0..n).map(|_| m.y_law.sample(&mut y_rng)).collect();
    let mut us = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for (&x, &y) in xs.iter().zip(&ys) {
        let img = apply(spec, PlanePoint::new(x, y))?;
        us.push(img.x);
        vs.push(img.y);
    }
    Ok(TransformedSample { xs, ys, us, vs })
}

/// [`simulate`] with the case's predicted input laws.
pub fn simulate_case(case: &TheoremCase, seed: u64, n: usize) -> Result<TransformedSample> {
    let laws = case.predicted_laws()?;
    simulate(&laws.x_law, &laws.y_law, &case.transform(), seed, n)
}
