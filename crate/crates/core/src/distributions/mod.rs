//! The four characterized law families.
//!
//! [`DistributionSpec`] is the validated, serializable description of a law.
//! Its own methods evaluate densities directly from the parameters and compute
//! the GIG CDF by adaptive quadrature. [`DistributionSpec::prepare`] produces a
//! [`Distribution`] that caches the normalizer and (for GIG) a tabulated CDF,
//! which is what samplers and goodness-of-fit tests use.

mod exponential;
mod gig;
mod laplace;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub use exponential::{SexpParams, StexpParams};
pub use gig::{Gig, GigBackend, GigParams};
pub use laplace::AlParams;

/// Common evaluation surface of a law on the real line.
pub trait Law {
    /// Log density including the log normalizer; `-inf` outside the support.
    fn log_pdf(&self, x: f64) -> f64;

    fn pdf(&self, x: f64) -> f64 {
        let l = self.log_pdf(x);
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            l.exp()
        }
    }

    fn cdf(&self, x: f64) -> f64;

    /// `log Z`, where the density is the unnormalized kernel divided by `Z`.
    fn log_normalizer(&self) -> f64;

    fn normalizer(&self) -> Result<f64> {
        let log_z = self.log_normalizer();
        let z = log_z.exp();
        if z.is_finite() && z >= f64::MIN_POSITIVE {
            Ok(z)
        } else {
            Err(Error::Range(format!(
                "normalizer exp({log_z}) is not representable; use log_normalizer"
            )))
        }
    }

    /// Closed support `[lo, hi]` (endpoints may be infinite).
    fn support(&self) -> (f64, f64);

    fn contains(&self, x: f64) -> bool;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

/// Family tag of a [`DistributionSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gig,
    Al,
    Sexp,
    Stexp,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Gig => "gig",
            Self::Al => "al",
            Self::Sexp => "sexp",
            Self::Stexp => "stexp",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "gig" => Ok(Self::Gig),
            "al" => Ok(Self::Al),
            "sexp" => Ok(Self::Sexp),
            "stexp" => Ok(Self::Stexp),
            other => Err(Error::InvalidParameter(format!(
                "unknown family `{other}` (expected gig, al, sexp or stexp)"
            ))),
        }
    }
}

/// A law from one of the four families with validated parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DistributionSpec {
    Gig(GigParams),
    Al(AlParams),
    Sexp(SexpParams),
    Stexp(StexpParams),
}

impl DistributionSpec {
    pub fn gig(lambda: f64, c1: f64, c2: f64) -> Result<Self> {
        GigParams::new(lambda, c1, c2).map(Self::Gig)
    }

    pub fn al(lambda1: f64, lambda2: f64) -> Result<Self> {
        AlParams::new(lambda1, lambda2).map(Self::Al)
    }

    pub fn sexp(lambda: f64, c: f64) -> Result<Self> {
        SexpParams::new(lambda, c).map(Self::Sexp)
    }

    pub fn stexp(lambda: f64, c1: f64, c2: f64) -> Result<Self> {
        StexpParams::new(lambda, c1, c2).map(Self::Stexp)
    }

    /// Builds a spec from a family name and `key = value` parameters.
    ///
    /// Keys: `gig` lambda, c1, c2; `al` lambda1, lambda2; `sexp` lambda, c;
    /// `stexp` lambda, c1, c2.
    pub fn from_params(family: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let family = Family::parse(family)?;
        let keys: &[&str] = match family {
            Family::Gig => &["lambda", "c1", "c2"],
            Family::Al => &["lambda1", "lambda2"],
            Family::Sexp => &["lambda", "c"],
            Family::Stexp => &["lambda", "c1", "c2"],
        };
        if let Some(extra) = params.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "unexpected parameter `{extra}` (expected {})",
                keys.join(", ")
            )));
        }
        let get = |k: &str| {
            params
                .get(k)
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("missing parameter `{k}`")))
        };
        match family {
            Family::Gig => Self::gig(get("lambda")?, get("c1")?, get("c2")?),
            Family::Al => Self::al(get("lambda1")?, get("lambda2")?),
            Family::Sexp => Self::sexp(get("lambda")?, get("c")?),
            Family::Stexp => Self::stexp(get("lambda")?, get("c1")?, get("c2")?),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Gig(_) => Family::Gig,
            Self::Al(_) => Family::Al,
            Self::Sexp(_) => Family::Sexp,
            Self::Stexp(_) => Family::Stexp,
        }
    }

    /// Caches normalizers and tables for repeated evaluation and sampling.
    pub fn prepare(&self) -> Result<Distribution> {
        Ok(match *self {
            Self::Gig(p) => Distribution::Gig(Gig::new(p)?),
            Self::Al(p) => Distribution::Al(p),
            Self::Sexp(p) => Distribution::Sexp(p),
            Self::Stexp(p) => Distribution::Stexp(p),
        })
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        match self {
            Self::Gig(p) => p.log_pdf(x),
            Self::Al(p) => p.log_pdf(x),
            Self::Sexp(p) => p.log_pdf(x),
            Self::Stexp(p) => p.log_pdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let l = self.log_pdf(x);
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            l.exp()
        }
    }

    /// CDF; the GIG branch runs adaptive quadrature on every call.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Gig(p) => p.cdf_quadrature(x),
            Self::Al(p) => p.cdf(x),
            Self::Sexp(p) => p.cdf(x),
            Self::Stexp(p) => p.cdf(x),
        }
    }

    pub fn log_normalizer(&self) -> f64 {
        match self {
            Self::Gig(p) => p.log_normalizer(),
            Self::Al(p) => p.log_normalizer(),
            Self::Sexp(p) => p.log_normalizer(),
            Self::Stexp(p) => p.log_normalizer(),
        }
    }

    pub fn normalizer(&self) -> Result<f64> {
        let log_z = self.log_normalizer();
        let z = log_z.exp();
        if z.is_finite() && z >= f64::MIN_POSITIVE {
            Ok(z)
        } else {
            Err(Error::Range(format!(
                "normalizer exp({log_z}) of {self} is not representable"
            )))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Gig(_) => (0.0, f64::INFINITY),
            Self::Al(_) => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Sexp(p) => (p.c(), f64::INFINITY),
            Self::Stexp(p) => (p.c1(), p.c2()),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            Self::Gig(p) => p.contains(x),
            Self::Al(p) => p.contains(x),
            Self::Sexp(p) => p.contains(x),
            Self::Stexp(p) => p.contains(x),
        }
    }

    /// Whether `x` lies strictly inside the support.
    pub fn contains_interior(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x > lo && x < hi
    }

    /// Parameter names and values in canonical order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self {
            Self::Gig(p) => vec![("lambda", p.lambda()), ("c1", p.c1()), ("c2", p.c2())],
            Self::Al(p) => vec![("lambda1", p.lambda1()), ("lambda2", p.lambda2())],
            Self::Sexp(p) => vec![("lambda", p.lambda()), ("c", p.c())],
            Self::Stexp(p) => vec![("lambda", p.lambda()), ("c1", p.c1()), ("c2", p.c2())],
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family() {
            Family::Gig => "GIG",
            Family::Al => "AL",
            Family::Sexp => "sExp",
            Family::Stexp => "stExp",
        };
        let args: Vec<String> = self.params().iter().map(|(_, v)| v.to_string()).collect();
        write!(f, "{name}({})", args.join(", "))
    }
}

/// A prepared law: cached normalizer and, for GIG, a tabulated CDF.
#[derive(Debug)]
pub enum Distribution {
    Gig(Gig),
    Al(AlParams),
    Sexp(SexpParams),
    Stexp(StexpParams),
}

macro_rules! dispatch {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            Distribution::Gig($p) => $e,
            Distribution::Al($p) => $e,
            Distribution::Sexp($p) => $e,
            Distribution::Stexp($p) => $e,
        }
    };
}

impl Distribution {
    pub fn spec(&self) -> DistributionSpec {
        match self {
            Self::Gig(g) => DistributionSpec::Gig(g.params()),
            Self::Al(p) => DistributionSpec::Al(*p),
            Self::Sexp(p) => DistributionSpec::Sexp(*p),
            Self::Stexp(p) => DistributionSpec::Stexp(*p),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Gig(g) => g.mean(),
            Self::Al(p) => 1.0 / p.lambda1() - 1.0 / p.lambda2(),
            Self::Sexp(p) => p.c() + 1.0 / p.lambda(),
            Self::Stexp(p) => p.mean(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Gig(g) => g.variance(),
            Self::Al(p) => {
                let (a, b) = (p.lambda1(), p.lambda2());
                let second = 2.0 * (1.0 / (a * a * a) + 1.0 / (b * b * b)) * a * b / (a + b);
                second - self.mean().powi(2)
            }
            Self::Sexp(p) => 1.0 / (p.lambda() * p.lambda()),
            Self::Stexp(p) => p.variance(),
        }
    }
}

impl Law for Distribution {
    fn log_pdf(&self, x: f64) -> f64 {
        dispatch!(self, p => p.log_pdf(x))
    }

    fn cdf(&self, x: f64) -> f64 {
        dispatch!(self, p => p.cdf(x))
    }

    fn log_normalizer(&self) -> f64 {
        dispatch!(self, p => p.log_normalizer())
    }

    fn support(&self) -> (f64, f64) {
        dispatch!(self, p => p.support())
    }

    fn contains(&self, x: f64) -> bool {
        dispatch!(self, p => p.contains(x))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        dispatch!(self, p => p.sample(rng))
    }
}

/// Seeded i.i.d. draws together with their provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub spec: DistributionSpec,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn size(&self) -> usize {
        self.values.len()
    }
}

/// Draws `n` values from `spec` using stream 0 of `seed`.
pub fn sample(spec: &DistributionSpec, seed: u64, n: usize) -> Result<SampleBatch> {
    let law = spec.prepare()?;
    sample_prepared(&law, seed, n)
}

/// As [`sample`], with an explicit GIG backend (ignored for other families).
pub fn sample_with_backend(
    spec: &DistributionSpec,
    seed: u64,
    n: usize,
    backend: GigBackend,
) -> Result<SampleBatch> {
    let law = spec.prepare()?;
    match &law {
        Distribution::Gig(g) => {
            check_size(n)?;
            let mut rng = rng::stream(seed, 0);
            let values = (0..n).map(|_| g.sample_with(backend, &mut rng)).collect();
            Ok(SampleBatch {
                spec: *spec,
                seed,
                values,
            })
        }
        _ => sample_prepared(&law, seed, n),
    }
}

pub fn sample_prepared(law: &Distribution, seed: u64, n: usize) -> Result<SampleBatch> {
    check_size(n)?;
    let mut rng = rng::stream(seed, 0);
    let values = (0..n).map(|_| law.sample(&mut rng)).collect();
    Ok(SampleBatch {
        spec: law.spec(),
        seed,
        values,
    })
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InsufficientData("sample size must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Standard exponential variate by inversion; never negative.
pub(crate) fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p()
}

pub(crate) fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

pub(crate) fn require_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}
