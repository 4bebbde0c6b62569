use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{require_finite, require_positive, standard_exp, Law};
use crate::error::{Error, Result};

/// Shifted exponential law: density `e^{-lambda x} 1[x >= c] / Z`, `Z = e^{-lambda c} / lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SexpRaw", into = "SexpRaw")]
pub struct SexpParams {
    lambda: f64,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct SexpRaw {
    lambda: f64,
    c: f64,
}

impl TryFrom<SexpRaw> for SexpParams {
    type Error = Error;

    fn try_from(r: SexpRaw) -> Result<Self> {
        Self::new(r.lambda, r.c)
    }
}

impl From<SexpParams> for SexpRaw {
    fn from(p: SexpParams) -> Self {
        Self {
            lambda: p.lambda,
            c: p.c,
        }
    }
}

impl SexpParams {
    pub fn new(lambda: f64, c: f64) -> Result<Self> {
        require_positive("sExp lambda", lambda)?;
        require_finite("sExp c", c)?;
        Ok(Self { lambda, c })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Left endpoint of the support.
    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Law for SexpParams {
    fn log_pdf(&self, x: f64) -> f64 {
        if x >= self.c && x.is_finite() {
            -self.lambda * x - self.log_normalizer()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.c {
            0.0
        } else {
            -(-self.lambda * (x - self.c)).exp_m1()
        }
    }

    fn log_normalizer(&self) -> f64 {
        -self.lambda * self.c - self.lambda.ln()
    }

    fn support(&self) -> (f64, f64) {
        (self.c, f64::INFINITY)
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.c && x.is_finite()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.c + standard_exp(rng) / self.lambda
    }
}

/// Shifted truncated exponential law on `[c1, c2]`:
/// density `e^{-lambda x} / Z`, `Z = (e^{-lambda c1} - e^{-lambda c2}) / lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StexpRaw", into = "StexpRaw")]
pub struct StexpParams {
    lambda: f64,
    c1: f64,
    c2: f64,
}

#[derive(Serialize, Deserialize)]
struct StexpRaw {
    lambda: f64,
    c1: f64,
    c2: f64,
}

impl TryFrom<StexpRaw> for StexpParams {
    type Error = Error;

    fn try_from(r: StexpRaw) -> Result<Self> {
        Self::new(r.lambda, r.c1, r.c2)
    }
}

impl From<StexpParams> for StexpRaw {
    fn from(p: StexpParams) -> Self {
        Self {
            lambda: p.lambda,
            c1: p.c1,
            c2: p.c2,
        }
    }
}

impl StexpParams {
    pub fn new(lambda: f64, c1: f64, c2: f64) -> Result<Self> {
        require_positive("stExp lambda", lambda)?;
        require_finite("stExp c1", c1)?;
        require_finite("stExp c2", c2)?;
        if c1 >= c2 {
            return Err(Error::InvalidParameter(format!(
                "stExp requires c1 < c2, got c1 = {c1}, c2 = {c2}"
            )));
        }
        Ok(Self { lambda, c1, c2 })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// `1 - e^{-lambda (c2 - c1)}`, the mass the untruncated tail would have on the support.
    fn window_mass(&self) -> f64 {
        -(-self.lambda * (self.c2 - self.c1)).exp_m1()
    }

    pub fn mean(&self) -> f64 {
        let w = self.c2 - self.c1;
        let lw = self.lambda * w;
        // mean of Exp(lambda) truncated to [0, w], shifted by c1
        self.c1 + 1.0 / self.lambda - w * (-lw).exp() / self.window_mass()
    }

    pub fn variance(&self) -> f64 {
        let w = self.c2 - self.c1;
        let lw = self.lambda * w;
        let m = self.window_mass();
        1.0 / (self.lambda * self.lambda) - w * w * (-lw).exp() / (m * m)
    }
}

impl Law for StexpParams {
    fn log_pdf(&self, x: f64) -> f64 {
        if x >= self.c1 && x <= self.c2 {
            -self.lambda * x - self.log_normalizer()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.c1 {
            0.0
        } else if x >= self.c2 {
            1.0
        } else {
            (-(-self.lambda * (x - self.c1)).exp_m1() / self.window_mass()).min(1.0)
        }
    }

    fn log_normalizer(&self) -> f64 {
        -self.lambda * self.c1 + self.window_mass().ln() - self.lambda.ln()
    }

    fn support(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.c1 && x <= self.c2
    }

    /// Closed-form inverse CDF.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let x = self.c1 - (u * (-self.lambda * (self.c2 - self.c1)).exp_m1()).ln_1p() / self.lambda;
        x.clamp(self.c1, self.c2)
    }
}
