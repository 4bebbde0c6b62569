//! The three involutions of the plane.
//!
//! * `F1(x, y) = ( y(1 + b xy)/(1 + a xy), x(1 + a xy)/(1 + b xy) )` on the open
//!   positive quadrant, with `a = alpha`, `b = beta`.
//! * `F2(x, y) = ( min{x, 0} - y, min{x, y, 0} - x - y )` on the plane.
//! * `F3(x, y) = ( min{-x, y}, y + x - min{-x, y} )` on the plane.
//!
//! `F2` and `F3` are piecewise linear; off a null set of dividing lines they
//! coincide with one linear map per open region. All three have Jacobian
//! determinant `-1` wherever they are smooth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn max_norm(&self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl From<(f64, f64)> for PlanePoint {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Which involution, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TransformSpec {
    F1 { alpha: f64, beta: f64 },
    F2,
    /// `c1`, `c2` do not enter the formula; they fix the domain
    /// `[-c1, c2] x [-c2, inf)` and codomain `[-c2, c1] x [-c1, inf)`.
    F3 { c1: f64, c2: f64 },
}

impl TransformSpec {
    pub fn f1(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "F1 needs finite alpha, beta >= 0, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if alpha == beta {
            return Err(Error::InvalidParameter(format!(
                "F1 needs alpha != beta, got {alpha}"
            )));
        }
        Ok(Self::F1 { alpha, beta })
    }

    pub fn f2() -> Self {
        Self::F2
    }

    pub fn f3(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "F3 needs finite c1, c2 > 0, got c1 = {c1}, c2 = {c2}"
            )));
        }
        Ok(Self::F3 { c1, c2 })
    }

    /// Re-checks parameter invariants (for values built by struct literal or deserialization).
    pub fn validate(&self) -> Result<Self> {
        match *self {
            Self::F1 { alpha, beta } => Self::f1(alpha, beta),
            Self::F2 => Ok(Self::F2),
            Self::F3 { c1, c2 } => Self::f3(c1, c2),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::F1 { .. } => "f1",
            Self::F2 => "f2",
            Self::F3 { .. } => "f3",
        }
    }
}

/// Open pieces of the domain partitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `x > 0, y > 0`; the whole domain of `F1`.
    PositiveQuadrant,
    /// F2: `x > 0, y > 0`. F3: `x > -y`.
    R1,
    /// F2: `x < 0, y > 0`. F3: `x < -y`.
    R2,
    /// F2: `x < y < 0`.
    R3,
    /// F2: `y < x < 0`.
    R4,
    /// F2: `x > 0, y < 0`.
    R5,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Self::PositiveQuadrant => "positive-quadrant",
            Self::R1 => "R1",
            Self::R2 => "R2",
            Self::R3 => "R3",
            Self::R4 => "R4",
            Self::R5 => "R5",
        }
    }
}

/// Where a point sits relative to a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Interior(Region),
    /// On a dividing line (a Lebesgue-null set).
    Boundary,
    /// Outside the domain of the map (F1 off the open positive quadrant).
    Outside,
}

impl Location {
    pub fn region(&self) -> Option<Region> {
        match self {
            Self::Interior(r) => Some(*r),
            _ => None,
        }
    }
}

pub fn region_of(spec: &TransformSpec, p: PlanePoint) -> Location {
    let PlanePoint { x, y } = p;
    if !p.is_finite() {
        return Location::Outside;
    }
    match spec {
        TransformSpec::F1 { .. } => {
            if x > 0.0 && y > 0.0 {
                Location::Interior(Region::PositiveQuadrant)
            } else if x >= 0.0 && y >= 0.0 {
                Location::Boundary
            } else {
                Location::Outside
            }
        }
        TransformSpec::F2 => {
            if x == 0.0 || y == 0.0 || (x < 0.0 && x == y) {
                Location::Boundary
            } else if x > 0.0 && y > 0.0 {
                Location::Interior(Region::R1)
            } else if x < 0.0 && y > 0.0 {
                Location::Interior(Region::R2)
            } else if x > 0.0 {
                Location::Interior(Region::R5)
            } else if x < y {
                Location::Interior(Region::R3)
            } else {
                Location::Interior(Region::R4)
            }
        }
        TransformSpec::F3 { .. } => {
            if x > -y {
                Location::Interior(Region::R1)
            } else if x < -y {
                Location::Interior(Region::R2)
            } else {
                Location::Boundary
            }
        }
    }
}

fn f1_domain(p: PlanePoint) -> Result<()> {
    if p.x > 0.0 && p.y > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "F1 is defined on the open positive quadrant, got ({}, {})",
            p.x, p.y
        )))
    }
}

/// Applies the involution.
pub fn apply(spec: &TransformSpec, p: PlanePoint) -> Result<PlanePoint> {
    let PlanePoint { x, y } = p;
    match *spec {
        TransformSpec::F1 { alpha, beta } => {
            f1_domain(p)?;
            let xy = x * y;
            Ok(PlanePoint {
                x: y * (1.0 + beta * xy) / (1.0 + alpha * xy),
                y: x * (1.0 + alpha * xy) / (1.0 + beta * xy),
            })
        }
        TransformSpec::F2 => {
            if !p.is_finite() {
                return Err(Error::Domain("F2 needs a finite point".into()));
            }
            let u = if x < 0.0 { x - y } else { -y };
            let m = x.min(y).min(0.0);
            let v = if m == 0.0 {
                -x - y
            } else if m == x {
                -y
            } else {
                -x
            };
            Ok(PlanePoint { x: u, y: v })
        }
        TransformSpec::F3 { .. } => {
            if !p.is_finite() {
                return Err(Error::Domain("F3 needs a finite point".into()));
            }
            if x > -y {
                Ok(PlanePoint {
                    x: -x,
                    y: y + 2.0 * x,
                })
            } else {
                Ok(PlanePoint { x: y, y: x })
            }
        }
    }
}

/// Per-region linear form `(u, v) = M (x, y)` of F2 or F3.
pub fn linear_form(spec: &TransformSpec, region: Region) -> Option<[[f64; 2]; 2]> {
    match (spec, region) {
        // (-y, -x - y)
        (TransformSpec::F2, Region::R1) => Some([[0.0, -1.0], [-1.0, -1.0]]),
        // (x - y, -y)
        (TransformSpec::F2, Region::R2 | Region::R3) => Some([[1.0, -1.0], [0.0, -1.0]]),
        // (x - y, -x)
        (TransformSpec::F2, Region::R4) => Some([[1.0, -1.0], [-1.0, 0.0]]),
        // (-y, -x)
        (TransformSpec::F2, Region::R5) => Some([[0.0, -1.0], [-1.0, 0.0]]),
        // (-x, y + 2x)
        (TransformSpec::F3 { .. }, Region::R1) => Some([[-1.0, 0.0], [2.0, 1.0]]),
        // (y, x)
        (TransformSpec::F3 { .. }, Region::R2) => Some([[0.0, 1.0], [1.0, 0.0]]),
        _ => None,
    }
}

/// First partial derivatives `[[du/dx, du/dy], [dv/dx, dv/dy]]` at an interior point.
pub fn jacobian_matrix(spec: &TransformSpec, p: PlanePoint) -> Result<[[f64; 2]; 2]> {
    match spec {
        TransformSpec::F1 { .. } => {
            let d = f1_partials(spec, p)?.xy_form;
            Ok([[d.du_dx, d.du_dy], [d.dv_dx, d.dv_dy]])
        }
        _ => match region_of(spec, p) {
            Location::Interior(r) => Ok(linear_form(spec, r).expect("region of this map")),
            _ => Err(Error::Boundary { x: p.x, y: p.y }),
        },
    }
}

/// Jacobian determinant from the analytic partials; `-1` for every map.
pub fn jacobian_det(spec: &TransformSpec, p: PlanePoint) -> Result<f64> {
    let m = jacobian_matrix(spec, p)?;
    Ok(m[0][0] * m[1][1] - m[0][1] * m[1][0])
}

/// Central-difference Jacobian matrix with step `rel_step * max(|coord|, 1)`.
pub fn finite_difference_jacobian(
    spec: &TransformSpec,
    p: PlanePoint,
    rel_step: f64,
) -> Result<[[f64; 2]; 2]> {
    let hx = rel_step * p.x.abs().max(1.0);
    let hy = rel_step * p.y.abs().max(1.0);
    let fx_plus = apply(spec, PlanePoint::new(p.x + hx, p.y))?;
    let fx_minus = apply(spec, PlanePoint::new(p.x - hx, p.y))?;
    let fy_plus = apply(spec, PlanePoint::new(p.x, p.y + hy))?;
    let fy_minus = apply(spec, PlanePoint::new(p.x, p.y - hy))?;
    Ok([
        [
            (fx_plus.x - fx_minus.x) / (2.0 * hx),
            (fy_plus.x - fy_minus.x) / (2.0 * hy),
        ],
        [
            (fx_plus.y - fx_minus.y) / (2.0 * hx),
            (fy_plus.y - fy_minus.y) / (2.0 * hy),
        ],
    ])
}

/// The six derivatives of `F1` used in the characterization argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct F1Derivatives {
    pub du_dx: f64,
    pub du_dy: f64,
    pub dv_dx: f64,
    pub dv_dy: f64,
    pub d2u_dydx: f64,
    pub d2v_dydx: f64,
}

impl F1Derivatives {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.du_dx,
            self.du_dy,
            self.dv_dx,
            self.dv_dy,
            self.d2u_dydx,
            self.d2v_dydx,
        ]
    }
}

/// The derivatives of `F1` evaluated twice: once in terms of `(x, y)` and once
/// in terms of the image `(u, v)`. Both forms use `uv = xy`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct F1Partials {
    pub xy_form: F1Derivatives,
    pub uv_form: F1Derivatives,
}

pub fn f1_partials(spec: &TransformSpec, p: PlanePoint) -> Result<F1Partials> {
    let TransformSpec::F1 { alpha: a, beta: b } = *spec else {
        return Err(Error::InvalidParameter(format!(
            "f1_partials needs an F1 spec, got {}",
            spec.name()
        )));
    };
    f1_domain(p)?;
    let PlanePoint { x, y } = p;
    let xy = x * y;
    let da = 1.0 + a * xy;
    let db = 1.0 + b * xy;
    let xy_form = F1Derivatives {
        du_dx: (b - a) * y * y / (da * da),
        du_dy: (1.0 + 2.0 * b * xy + a * b * xy * xy) / (da * da),
        dv_dx: (1.0 + 2.0 * a * xy + a * b * xy * xy) / (db * db),
        dv_dy: (a - b) * x * x / (db * db),
        d2u_dydx: 2.0 * (b - a) * y / (da * da * da),
        d2v_dydx: 2.0 * (a - b) * x / (db * db * db),
    };

    let img = apply(spec, p)?;
    let (u, v) = (img.x, img.y);
    let uv = u * v;
    let ea = 1.0 + a * uv;
    let eb = 1.0 + b * uv;
    let uv_form = F1Derivatives {
        du_dx: (b - a) * u * u / (eb * eb),
        du_dy: (1.0 + 2.0 * b * uv + a * b * uv * uv) / (ea * ea),
        dv_dx: (1.0 + 2.0 * a * uv + a * b * uv * uv) / (eb * eb),
        dv_dy: (a - b) * v * v / (ea * ea),
        d2u_dydx: 2.0 * (b - a) * u / (ea * ea * eb),
        d2v_dydx: 2.0 * (a - b) * v / (eb * eb * ea),
    };
    Ok(F1Partials { xy_form, uv_form })
}

/// `max(|F(F(p)) - p|)` coordinate-wise.
pub fn involution_defect(spec: &TransformSpec, p: PlanePoint) -> Result<f64> {
    let back = apply(spec, apply(spec, p)?)?;
    Ok((back.x - p.x).abs().max((back.y - p.y).abs()))
}

/// [`involution_defect`] divided by `max(|x|, |y|)` (norm-wise relative error).
pub fn involution_defect_relative(spec: &TransformSpec, p: PlanePoint) -> Result<f64> {
    let d = involution_defect(spec, p)?;
    let scale = p.max_norm();
    Ok(if scale > 0.0 { d / scale } else { d })
}

/// Whether `F3` sends `p` in `[-c1, c2] x [-c2, inf)` into `[-c2, c1] x [-c1, inf)`.
pub fn f3_domain_map_check(c1: f64, c2: f64, p: PlanePoint) -> Result<bool> {
    let spec = TransformSpec::f3(c1, c2)?;
    let in_domain = p.x >= -c1 && p.x <= c2 && p.y >= -c2 && p.y.is_finite();
    if !in_domain {
        return Err(Error::Precondition(format!(
            "({}, {}) is outside [-{c1}, {c2}] x [-{c2}, inf)",
            p.x, p.y
        )));
    }
    let img = apply(&spec, p)?;
    Ok(img.x >= -c2 && img.x <= c1 && img.y >= -c1)
}
