//! Generalized inverse Gaussian law `x^{lambda-1} e^{-c1 x - c2/x} / Z` on `(0, inf)`,
//! `Z = 2 K_lambda(2 sqrt(c1 c2)) / (c1/c2)^{lambda/2}`.
//!
//! All numerical work happens in `t = ln x`, where the density becomes
//! `g(t) = exp(lambda t - c1 e^t - c2 e^{-t}) / Z`. Its log is strictly concave,
//! so it has a single mode, tails that decay at least exponentially, and
//! admits the log-concave rejection envelope used by [`GigBackend::Rejection`].

use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{require_finite, require_positive, Law};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_kronrod_15, integrate};
use crate::specfun::log_bessel_k;

/// Mass below `TAIL_DROP` nats under the mode is ignored (e^-60 ~ 1e-26).
const TAIL_DROP: f64 = 60.0;
const TABLE_CELLS: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GigRaw", into = "GigRaw")]
pub struct GigParams {
    lambda: f64,
    c1: f64,
    c2: f64,
}

#[derive(Serialize, Deserialize)]
struct GigRaw {
    lambda: f64,
    c1: f64,
    c2: f64,
}

impl TryFrom<GigRaw> for GigParams {
    type Error = Error;

    fn try_from(r: GigRaw) -> Result<Self> {
        Self::new(r.lambda, r.c1, r.c2)
    }
}

impl From<GigParams> for GigRaw {
    fn from(p: GigParams) -> Self {
        Self {
            lambda: p.lambda,
            c1: p.c1,
            c2: p.c2,
        }
    }
}

impl GigParams {
    pub fn new(lambda: f64, c1: f64, c2: f64) -> Result<Self> {
        require_finite("GIG lambda", lambda)?;
        require_positive("GIG c1", c1)?;
        require_positive("GIG c2", c2)?;
        Ok(Self { lambda, c1, c2 })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Rate on `x`.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Rate on `1/x`.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// `log Z` through the log-domain Bessel function.
    pub fn log_normalizer(&self) -> f64 {
        let arg = 2.0 * (self.c1 * self.c2).sqrt();
        let log_k = log_bessel_k(self.lambda, arg).expect("validated GIG parameters");
        std::f64::consts::LN_2 + log_k - 0.5 * self.lambda * (self.c1 / self.c2).ln()
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.log_pdf_with(x, self.log_normalizer())
    }

    fn log_pdf_with(&self, x: f64, log_z: f64) -> f64 {
        if x > 0.0 && x.is_finite() {
            (self.lambda - 1.0) * x.ln() - self.c1 * x - self.c2 / x - log_z
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > 0.0 && x.is_finite()
    }

    /// CDF by adaptive quadrature of the log-scale density, independent of any table.
    pub fn cdf_quadrature(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        let shape = LogShape::new(*self, self.log_normalizer());
        let (lo, hi) = shape.bounds();
        let t = x.ln();
        if t <= lo {
            return 0.0;
        }
        if t >= hi {
            return 1.0;
        }
        let g = |s: f64| shape.density(s);
        let v = if t <= shape.mode {
            integrate(g, lo, t, 1e-14, 1e-13).map(|r| r.value)
        } else {
            integrate(g, t, hi, 1e-14, 1e-13).map(|r| 1.0 - r.value)
        };
        v.expect("finite bounds").clamp(0.0, 1.0)
    }

    /// Returns the parameters of the law of `1/X`: `GIG(-lambda, c2, c1)`.
    pub fn reciprocal(&self) -> Self {
        Self {
            lambda: -self.lambda,
            c1: self.c2,
            c2: self.c1,
        }
    }
}

/// Density of `ln X` and its mode.
#[derive(Clone, Copy, Debug)]
struct LogShape {
    p: GigParams,
    log_z: f64,
    mode: f64,
    log_peak: f64,
}

impl LogShape {
    fn new(p: GigParams, log_z: f64) -> Self {
        // d/dt log g = lambda - c1 e^t + c2 e^-t = 0  <=>  c1 w^2 - lambda w - c2 = 0, w = e^t
        let disc = (p.lambda * p.lambda + 4.0 * p.c1 * p.c2).sqrt();
        let w = if p.lambda >= 0.0 {
            (p.lambda + disc) / (2.0 * p.c1)
        } else {
            2.0 * p.c2 / (disc - p.lambda)
        };
        let mode = w.ln();
        let mut s = Self {
            p,
            log_z,
            mode,
            log_peak: 0.0,
        };
        s.log_peak = s.log_density(mode);
        s
    }

    fn log_density(&self, t: f64) -> f64 {
        let p = &self.p;
        p.lambda * t - p.c1 * t.exp() - p.c2 * (-t).exp() - self.log_z
    }

    fn density(&self, t: f64) -> f64 {
        self.log_density(t).exp()
    }

    /// Points on either side of the mode where the log density has dropped by
    /// `TAIL_DROP`.
    fn bounds(&self) -> (f64, f64) {
        let target = self.log_peak - TAIL_DROP;
        let edge = |dir: f64| {
            let mut step = 1.0;
            while self.log_density(self.mode + dir * step) > target {
                step *= 2.0;
            }
            let (mut inside, mut outside) = (0.0, step);
            for _ in 0..60 {
                let mid = 0.5 * (inside + outside);
                if self.log_density(self.mode + dir * mid) > target {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            self.mode + dir * outside
        };
        (edge(-1.0), edge(1.0))
    }
}

/// Sampling backend for GIG variates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GigBackend {
    /// Inversion of the tabulated CDF with a Newton/bisection solve inside each cell.
    #[default]
    InverseCdf,
    /// Rejection from the envelope `M min(1, e^{1 - M |t - mode|})` on the log scale,
    /// valid for any log-concave density with peak height `M`.
    Rejection,
}

/// Cumulative mass on a uniform grid over the effective support in `t = ln x`.
#[derive(Debug)]
struct CdfTable {
    start: f64,
    step: f64,
    cumulative: Vec<f64>,
}

/// A prepared GIG law with cached normalizer and lazily built CDF table.
#[derive(Debug)]
pub struct Gig {
    params: GigParams,
    shape: LogShape,
    table: OnceLock<CdfTable>,
}

impl Gig {
    pub fn new(params: GigParams) -> Result<Self> {
        let log_z = params.log_normalizer();
        if !log_z.is_finite() {
            return Err(Error::Range(format!("log normalizer of {params:?} is {log_z}")));
        }
        Ok(Self {
            params,
            shape: LogShape::new(params, log_z),
            table: OnceLock::new(),
        })
    }

    pub fn params(&self) -> GigParams {
        self.params
    }

    fn table(&self) -> &CdfTable {
        self.table.get_or_init(|| {
            let (lo, hi) = self.shape.bounds();
            let step = (hi - lo) / TABLE_CELLS as f64;
            let g = |t: f64| self.shape.density(t);
            let mut cumulative = Vec::with_capacity(TABLE_CELLS + 1);
            let mut acc = 0.0;
            cumulative.push(0.0);
            for k in 0..TABLE_CELLS {
                let a = lo + k as f64 * step;
                acc += gauss_kronrod_15(&g, a, a + step).0;
                cumulative.push(acc);
            }
            CdfTable {
                start: lo,
                step,
                cumulative,
            }
        })
    }

    /// Total mass captured by the CDF table; equals 1 up to quadrature error
    /// when the Bessel normalizer is right.
    pub fn table_mass(&self) -> f64 {
        *self.table().cumulative.last().expect("nonempty table")
    }

    pub fn mean(&self) -> f64 {
        let p = &self.params;
        let arg = 2.0 * (p.c1 * p.c2).sqrt();
        let ratio = log_bessel_k(p.lambda + 1.0, arg).expect("valid") - log_bessel_k(p.lambda, arg).expect("valid");
        (p.c2 / p.c1).sqrt() * ratio.exp()
    }

    pub fn variance(&self) -> f64 {
        let p = &self.params;
        let arg = 2.0 * (p.c1 * p.c2).sqrt();
        let ratio = log_bessel_k(p.lambda + 2.0, arg).expect("valid") - log_bessel_k(p.lambda, arg).expect("valid");
        (p.c2 / p.c1) * ratio.exp() - self.mean().powi(2)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, backend: GigBackend, rng: &mut R) -> f64 {
        match backend {
            GigBackend::InverseCdf => self.sample_inverse(rng),
            GigBackend::Rejection => self.sample_rejection(rng),
        }
    }

    fn sample_inverse<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let table = self.table();
        let total = *table.cumulative.last().expect("nonempty table");
        let target = rng.random::<f64>() * total;
        // cell k satisfies cumulative[k] <= target < cumulative[k + 1]
        let k = (table.cumulative.partition_point(|&c| c <= target) - 1).min(TABLE_CELLS - 1);
        let a = table.start + k as f64 * table.step;
        let b = a + table.step;
        let residual = target - table.cumulative[k];
        let cell_mass = table.cumulative[k + 1] - table.cumulative[k];
        let g = |t: f64| self.shape.density(t);

        let (mut lo, mut hi) = (a, b);
        let mut t = if cell_mass > 0.0 {
            a + (residual / cell_mass).clamp(0.0, 1.0) * table.step
        } else {
            0.5 * (a + b)
        };
        for _ in 0..100 {
            let f = gauss_kronrod_15(&g, a, t).0 - residual;
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = g(t);
            let newton = t - f / d;
            let next = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - t).abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) || hi - lo <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
                t = next;
                break;
            }
            t = next;
        }
        t.exp()
    }

    fn sample_rejection<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s = &self.shape;
        let peak = s.log_peak.exp();
        let flat = 1.0 / peak;
        loop {
            // Envelope mass splits evenly between the flat core and the two tails.
            let u: f64 = rng.random();
            let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let (offset, log_env) = if u < 0.5 {
                (side * flat * rng.random::<f64>(), 0.0)
            } else {
                let e = super::standard_exp(rng);
                (side * flat * (1.0 + e), -e)
            };
            let t = s.mode + offset;
            let accept: f64 = rng.random();
            if accept.ln() + log_env <= s.log_density(t) - s.log_peak {
                return t.exp();
            }
        }
    }
}

impl Law for Gig {
    fn log_pdf(&self, x: f64) -> f64 {
        self.params.log_pdf_with(x, self.shape.log_z)
    }

    /// CDF from the cached table plus one Kronrod rule over the partial cell.
    fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let table = self.table();
        let t = x.ln();
        if t <= table.start {
            return 0.0;
        }
        let pos = (t - table.start) / table.step;
        if pos >= TABLE_CELLS as f64 {
            return table.cumulative[TABLE_CELLS].min(1.0);
        }
        let k = pos as usize;
        let a = table.start + k as f64 * table.step;
        let partial = gauss_kronrod_15(&|s| self.shape.density(s), a, t).0;
        (table.cumulative[k] + partial).clamp(0.0, 1.0)
    }

    fn log_normalizer(&self) -> f64 {
        self.shape.log_z
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn contains(&self, x: f64) -> bool {
        self.params.contains(x)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_inverse(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_density() {
        let p = GigParams::new(0.5, 1.0, 1.0).unwrap();
        assert!((p.log_pdf(1.0) + 0.5 * PI.ln()).abs() < 1e-14);
        let z = p.log_normalizer().exp();
        assert!((z - PI.sqrt() * (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(p.log_pdf(0.0), f64::NEG_INFINITY);
        assert_eq!(p.log_pdf(-1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn mode_solves_score_equation() {
        for (l, a, b) in [(-3.0, 0.1, 10.0), (0.0, 1.0, 1.0), (4.0, 10.0, 0.1), (-50.0, 1.0, 1.0)] {
            let s = LogShape::new(GigParams::new(l, a, b).unwrap(), 0.0);
            let w = s.mode.exp();
            let score = l - a * w + b / w;
            assert!(score.abs() < 1e-9 * (1.0 + l.abs()), "{l} {a} {b}: {score}");
        }
    }

    #[test]
    fn table_and_quadrature_cdf_agree() {
        let p = GigParams::new(-2.0, 1.0, 3.0).unwrap();
        let g = Gig::new(p).unwrap();
        assert!((g.table_mass() - 1.0).abs() < 1e-12);
        for &x in &[0.05, 0.3, 0.9, 1.7, 4.0, 12.0] {
            assert!((g.cdf(x) - p.cdf_quadrature(x)).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn reciprocal_parameters() {
        let p = GigParams::new(1.5, 2.0, 0.5).unwrap();
        let r = p.reciprocal();
        // f_{1/X}(y) = f_X(1/y) / y^2
        for &y in &[0.2, 1.0, 3.3] {
            let lhs = r.log_pdf(y);
            let rhs = p.log_pdf(1.0 / y) - 2.0 * y.ln();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_rates() {
        assert!(GigParams::new(1.0, 0.0, 1.0).is_err());
        assert!(GigParams::new(1.0, 1.0, 0.0).is_err());
        assert!(GigParams::new(f64::NAN, 1.0, 1.0).is_err());
    }
}
