//! The triangle with one curved side.
//!
//! Legs lie on the coordinate axes: `Gamma1` along the y-axis from
//! `V3 = (0,0)` to `V1 = (0,h)`, `Gamma2` along the x-axis to `V2 = (h,0)`.
//! The hypotenuse `Gamma3` joins `V1` to `V2` and is described by a pair of
//! mutually inverse, strictly decreasing functions `y = f(x)` and `x = g(y)`
//! with `f(0) = g(0) = h` and `f(h) = g(h) = 0`.

use crate::error::{Error, Result};

/// Tolerance for accepting coordinates just outside `[0, h]`.
const COORD_TOL: f64 = 1e-12;
/// Absolute x-interval tolerance of the bisection inverse.
const BISECT_TOL: f64 = 1e-12;
const BISECT_MAX_ITER: usize = 200;
/// Grid size for the constructor's monotonicity and range checks.
const MONOTONE_GRID: usize = 1001;

/// Hypotenuse families. The line and the superellipse are self-inverse with
/// closed-form `g`; the polynomial family is inverted by bisection.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    /// `f(x) = h - x`.
    StraightLine,
    /// `f(x) = h (1 - (x/h)^p)^{1/p}`; `p = 1` is the line, `p = 2` the
    /// circular arc.
    SuperellipseArc { p: f64 },
    /// `f(x) = sum_k c_k x^k`; the constructor rejects coefficient vectors
    /// that are not strictly decreasing from `h` to `0` on `[0, h]`.
    MonotonePolynomial { coeffs: Vec<f64> },
}

/// Direction selector for node partitions and moduli.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Boundary edges of the triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// The y-axis leg, `x = 0`.
    Gamma1,
    /// The x-axis leg, `y = 0`.
    Gamma2,
    /// The curved hypotenuse `y = f(x)`.
    Gamma3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvedTriangle {
    h: f64,
    curve: CurveSpec,
}

impl CurvedTriangle {
    pub fn new(h: f64, curve: CurveSpec) -> Result<Self> {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "triangle height must be finite and positive, got {h}"
            )));
        }
        match &curve {
            CurveSpec::StraightLine => {}
            CurveSpec::SuperellipseArc { p } => {
                if !p.is_finite() || *p < 1.0 {
                    return Err(Error::InvalidCurve(format!(
                        "superellipse exponent must be at least 1, got {p}"
                    )));
                }
            }
            CurveSpec::MonotonePolynomial { coeffs } => {
                validate_monotone_polynomial(h, coeffs)?;
            }
        }
        Ok(Self { h, curve })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }

    fn curve_value(&self, x: f64) -> f64 {
        match &self.curve {
            CurveSpec::StraightLine => self.h - x,
            CurveSpec::SuperellipseArc { p } => {
                self.h * (1.0 - (x / self.h).powf(*p)).max(0.0).powf(1.0 / *p)
            }
            CurveSpec::MonotonePolynomial { coeffs } => horner(coeffs, x),
        }
    }

    /// Hypotenuse height `f(x)`, clamped into `[0, h]`.
    pub fn hyp_f(&self, x: f64) -> Result<f64> {
        let x = self.checked_coord("x", x)?;
        Ok(self.curve_value(x).clamp(0.0, self.h))
    }

    /// Hypotenuse abscissa `g(y)`, the inverse of `f`, clamped into `[0, h]`.
    pub fn hyp_g(&self, y: f64) -> Result<f64> {
        let y = self.checked_coord("y", y)?;
        match &self.curve {
            CurveSpec::StraightLine => Ok(self.h - y),
            CurveSpec::SuperellipseArc { p } => {
                // self-inverse family
                Ok(self.h * (1.0 - (y / self.h).powf(*p)).max(0.0).powf(1.0 / *p))
            }
            CurveSpec::MonotonePolynomial { .. } => self.invert_by_bisection(y),
        }
    }

    /// Bisection on the strictly decreasing `f` over `[0, h]`, converging to
    /// `sup{x : f(x) > y}`. The strict comparison matters where `f` is flat
    /// to machine precision (e.g. at an apex with `f'(0) = 0`): the left edge
    /// of the flat stretch is the true inverse there.
    fn invert_by_bisection(&self, y: f64) -> Result<f64> {
        let mut lo = 0.0_f64; // f(lo) > y, or the interval start
        let mut hi = self.h; // f(hi) <= y, or the interval end
        let mut iters = 0;
        while hi - lo > BISECT_TOL {
            iters += 1;
            if iters > BISECT_MAX_ITER {
                return Err(Error::NonConvergence(BISECT_MAX_ITER));
            }
            let mid = 0.5 * (lo + hi);
            if self.curve_value(mid) > y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Membership test: `x >= -tol`, `y >= -tol`, `y <= f(x) + tol`.
    pub fn contains(&self, x: f64, y: f64, tol: f64) -> bool {
        if !(x.is_finite() && y.is_finite()) {
            return false;
        }
        if x < -tol || y < -tol || x > self.h + tol {
            return false;
        }
        y <= self.curve_value(x.clamp(0.0, self.h)).clamp(0.0, self.h) + tol
    }

    /// Uniform operator partition along one axis: `count + 1` nodes spanning
    /// `[0, g(y)]` (X at fixed `y`) or `[0, f(x)]` (Y at fixed `x`).
    pub fn nodes_along(&self, count: usize, fixed_coord: f64, axis: Axis) -> Result<Vec<f64>> {
        if count < 1 {
            return Err(Error::InvalidParameter(
                "node count must be positive".into(),
            ));
        }
        let span = match axis {
            Axis::X => self.hyp_g(fixed_coord)?,
            Axis::Y => self.hyp_f(fixed_coord)?,
        };
        Ok((0..=count)
            .map(|i| i as f64 * span / count as f64)
            .collect())
    }

    /// Equispaced parameter samples of one boundary edge, endpoints included.
    pub fn boundary_sample(&self, edge: Edge, count: usize) -> Result<Vec<(f64, f64)>> {
        if count < 2 {
            return Err(Error::InvalidParameter(
                "boundary sample needs at least 2 points".into(),
            ));
        }
        let step = self.h / (count - 1) as f64;
        let pts = (0..count)
            .map(|k| {
                let u = (k as f64 * step).min(self.h);
                match edge {
                    Edge::Gamma1 => (0.0, u),
                    Edge::Gamma2 => (u, 0.0),
                    Edge::Gamma3 => (u, self.curve_value(u).clamp(0.0, self.h)),
                }
            })
            .collect();
        Ok(pts)
    }

    fn checked_coord(&self, name: &'static str, v: f64) -> Result<f64> {
        if !v.is_finite() || v < -COORD_TOL || v > self.h + COORD_TOL {
            return Err(Error::OutOfRange {
                name,
                value: v,
                lo: 0.0,
                hi: self.h,
            });
        }
        Ok(v.clamp(0.0, self.h))
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn validate_monotone_polynomial(h: f64, coeffs: &[f64]) -> Result<()> {
    if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidCurve(
            "polynomial needs at least one finite coefficient".into(),
        ));
    }
    let f0 = horner(coeffs, 0.0);
    if (f0 - h).abs() > 1e-12 {
        return Err(Error::InvalidCurve(format!(
            "f(0) = {f0} does not meet the apex height {h}"
        )));
    }
    let fh = horner(coeffs, h);
    if fh.abs() > 1e-12 {
        return Err(Error::InvalidCurve(format!(
            "f(h) = {fh} does not reach the x-axis"
        )));
    }
    let mut prev = f0;
    for k in 1..MONOTONE_GRID {
        let x = h * k as f64 / (MONOTONE_GRID - 1) as f64;
        let v = horner(coeffs, x);
        if v >= prev {
            return Err(Error::InvalidCurve(format!(
                "polynomial is not strictly decreasing near x = {x}"
            )));
        }
        if v < -COORD_TOL || v > h + COORD_TOL {
            return Err(Error::InvalidCurve(format!(
                "polynomial leaves [0, h] at x = {x} (value {v})"
            )));
        }
        prev = v;
    }
    Ok(())
}
