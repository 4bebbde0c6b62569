use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{require_positive, standard_exp, Law};
use crate::error::{Error, Result};

/// Asymmetric Laplace law: density `(e^{-lambda1 x} 1[x >= 0] + e^{lambda2 x} 1[x < 0]) / Z`
/// with `Z = 1/lambda1 + 1/lambda2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlRaw", into = "AlRaw")]
pub struct AlParams {
    lambda1: f64,
    lambda2: f64,
}

#[derive(Serialize, Deserialize)]
struct AlRaw {
    lambda1: f64,
    lambda2: f64,
}

impl TryFrom<AlRaw> for AlParams {
    type Error = Error;

    fn try_from(r: AlRaw) -> Result<Self> {
        Self::new(r.lambda1, r.lambda2)
    }
}

impl From<AlParams> for AlRaw {
    fn from(p: AlParams) -> Self {
        Self {
            lambda1: p.lambda1,
            lambda2: p.lambda2,
        }
    }
}

impl AlParams {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        require_positive("AL lambda1", lambda1)?;
        require_positive("AL lambda2", lambda2)?;
        Ok(Self { lambda1, lambda2 })
    }

    /// Rate of the right tail.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// Rate of the left tail.
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Probability of the nonnegative branch, `(1/lambda1) / Z`.
    pub fn right_mass(&self) -> f64 {
        self.lambda2 / (self.lambda1 + self.lambda2)
    }
}

impl Law for AlParams {
    fn log_pdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NEG_INFINITY;
        }
        let kernel = if x >= 0.0 {
            -self.lambda1 * x
        } else {
            self.lambda2 * x
        };
        kernel - self.log_normalizer()
    }

    fn cdf(&self, x: f64) -> f64 {
        let (a, b) = (self.lambda1, self.lambda2);
        if x < 0.0 {
            (1.0 - self.right_mass()) * (b * x).exp()
        } else {
            1.0 - self.right_mass() * (-a * x).exp()
        }
    }

    fn log_normalizer(&self) -> f64 {
        (1.0 / self.lambda1 + 1.0 / self.lambda2).ln()
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn contains(&self, x: f64) -> bool {
        x.is_finite()
    }

    /// Two-branch mixture: `Exp(lambda1)` with probability `right_mass`, else `-Exp(lambda2)`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let branch: f64 = rng.random();
        let e = standard_exp(rng);
        if branch < self.right_mass() {
            e / self.lambda1
        } else {
            -e / self.lambda2
        }
    }
}
