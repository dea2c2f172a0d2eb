//! The six bivariate operators on the curved triangle.
//!
//! `Qx` sums basis weights in the normalized abscissa `x / g(y)` against
//! field values on the uniform partition of `[0, g(y)]`; it interpolates on
//! `Gamma1` and `Gamma3` and reproduces `x^i y^j` for `i <= 1`. `Qy` is its
//! mirror. `P1 = Qx Qy` and `P2 = Qy Qx` interpolate at the vertices and on
//! `Gamma3`; the Boolean sums `S1 = Qx + Qy - P1` and `S2 = Qy + Qx - P2`
//! interpolate on the whole boundary.

use std::fmt;
use std::str::FromStr;

use crate::basis::{basis_weights, CheneySharmaParams};
use crate::domain::CurvedTriangle;
use crate::error::{Error, Result};
use crate::fields::ScalarField;

/// Domain-membership tolerance for operator evaluation points.
pub const DOMAIN_TOL: f64 = 1e-9;
/// Below this span the partition interval has collapsed to a vertex.
pub(crate) const COLLAPSE_EPS: f64 = 1e-12;

/// Directional parameter pair: `(m, beta)` for the x-direction and `(n, b)`
/// for the y-direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateParams {
    x_dir: CheneySharmaParams,
    y_dir: CheneySharmaParams,
}

impl BivariateParams {
    pub fn new(m: usize, beta: f64, n: usize, b: f64) -> Result<Self> {
        Ok(Self {
            x_dir: CheneySharmaParams::new(m, beta)?,
            y_dir: CheneySharmaParams::new(n, b)?,
        })
    }

    pub fn from_parts(x_dir: CheneySharmaParams, y_dir: CheneySharmaParams) -> Self {
        Self { x_dir, y_dir }
    }

    pub fn x_dir(&self) -> &CheneySharmaParams {
        &self.x_dir
    }

    pub fn y_dir(&self) -> &CheneySharmaParams {
        &self.y_dir
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Qx,
    Qy,
    P1,
    P2,
    S1,
    S2,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 6] = [
        OperatorKind::Qx,
        OperatorKind::Qy,
        OperatorKind::P1,
        OperatorKind::P2,
        OperatorKind::S1,
        OperatorKind::S2,
    ];
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorKind::Qx => "qx",
            OperatorKind::Qy => "qy",
            OperatorKind::P1 => "p1",
            OperatorKind::P2 => "p2",
            OperatorKind::S1 => "s1",
            OperatorKind::S2 => "s2",
        };
        f.write_str(s)
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qx" => Ok(OperatorKind::Qx),
            "qy" => Ok(OperatorKind::Qy),
            "p1" => Ok(OperatorKind::P1),
            "p2" => Ok(OperatorKind::P2),
            "s1" => Ok(OperatorKind::S1),
            "s2" => Ok(OperatorKind::S2),
            other => Err(Error::InvalidParameter(format!(
                "unknown operator '{other}'"
            ))),
        }
    }
}

pub(crate) fn ensure_inside(tri: &CurvedTriangle, x: f64, y: f64) -> Result<()> {
    if tri.contains(x, y, DOMAIN_TOL) {
        Ok(())
    } else {
        Err(Error::OutsideDomain { x, y })
    }
}

/// Weighted node row for one direction: `None` when the partition interval
/// has collapsed to a vertex (the `g(y) = 0` row or `f(x) = 0` column).
type Row = Option<(Vec<f64>, Vec<f64>)>;

/// X-direction row at height `y`: basis weights at `x / g(y)` and the
/// uniform nodes of `[0, g(y)]`.
fn x_row(tri: &CurvedTriangle, p: &CheneySharmaParams, x: f64, y: f64) -> Result<Row> {
    let span = tri.hyp_g(y.clamp(0.0, tri.h()))?;
    if span <= COLLAPSE_EPS {
        return Ok(None);
    }
    let t = (x / span).clamp(0.0, 1.0);
    let weights = basis_weights(p, t)?.into_weights();
    let m = p.m();
    let nodes = (0..=m).map(|i| i as f64 * span / m as f64).collect();
    Ok(Some((weights, nodes)))
}

/// Y-direction row at abscissa `x`: basis weights at `y / f(x)` and the
/// uniform nodes of `[0, f(x)]`.
fn y_row(tri: &CurvedTriangle, p: &CheneySharmaParams, x: f64, y: f64) -> Result<Row> {
    let span = tri.hyp_f(x.clamp(0.0, tri.h()))?;
    if span <= COLLAPSE_EPS {
        return Ok(None);
    }
    let t = (y / span).clamp(0.0, 1.0);
    let weights = basis_weights(p, t)?.into_weights();
    let n = p.m();
    let nodes = (0..=n).map(|j| j as f64 * span / n as f64).collect();
    Ok(Some((weights, nodes)))
}

fn qx_at(
    tri: &CurvedTriangle,
    p: &CheneySharmaParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    match x_row(tri, p, x, y)? {
        None => Ok(field.eval(0.0, y)),
        Some((w, nodes)) => Ok(w
            .iter()
            .zip(&nodes)
            .map(|(wi, xi)| wi * field.eval(*xi, y))
            .sum()),
    }
}

fn qy_at(
    tri: &CurvedTriangle,
    p: &CheneySharmaParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    match y_row(tri, p, x, y)? {
        None => Ok(field.eval(x, 0.0)),
        Some((v, nodes)) => Ok(v
            .iter()
            .zip(&nodes)
            .map(|(vj, yj)| vj * field.eval(x, *yj))
            .sum()),
    }
}

/// `(Qx F)(x, y)`: the x-direction operator along the row at height `y`.
pub fn apply_qx(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    ensure_inside(tri, x, y)?;
    qx_at(tri, &params.x_dir, field, x, y)
}

/// `(Qy F)(x, y)`: the y-direction operator along the column at `x`.
pub fn apply_qy(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    ensure_inside(tri, x, y)?;
    qy_at(tri, &params.y_dir, field, x, y)
}

/// `(P1 F)(x, y) = (Qx Qy F)(x, y)` as the explicit double sum over the
/// x-row nodes and, per node, the y-column nodes hanging from it.
pub fn apply_p1(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    ensure_inside(tri, x, y)?;
    match x_row(tri, &params.x_dir, x, y)? {
        None => qy_at(tri, &params.y_dir, field, 0.0, y),
        Some((w, nodes)) => {
            let mut acc = 0.0;
            for (wi, xi) in w.iter().zip(&nodes) {
                acc += wi * qy_at(tri, &params.y_dir, field, *xi, y)?;
            }
            Ok(acc)
        }
    }
}

/// `(P2 F)(x, y) = (Qy Qx F)(x, y)`, the mirror double sum.
pub fn apply_p2(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    ensure_inside(tri, x, y)?;
    match y_row(tri, &params.y_dir, x, y)? {
        None => qx_at(tri, &params.x_dir, field, x, 0.0),
        Some((v, nodes)) => {
            let mut acc = 0.0;
            for (vj, yj) in v.iter().zip(&nodes) {
                acc += vj * qx_at(tri, &params.x_dir, field, x, *yj)?;
            }
            Ok(acc)
        }
    }
}

/// Boolean sum `S1 = Qx + Qy - P1`; interpolates on the whole boundary.
pub fn apply_s1(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    Ok(
        apply_qx(tri, params, field, x, y)? + apply_qy(tri, params, field, x, y)?
            - apply_p1(tri, params, field, x, y)?,
    )
}

/// Boolean sum `S2 = Qy + Qx - P2`.
pub fn apply_s2(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    Ok(
        apply_qy(tri, params, field, x, y)? + apply_qx(tri, params, field, x, y)?
            - apply_p2(tri, params, field, x, y)?,
    )
}

/// Dispatches on the operator tag.
pub fn apply(
    kind: OperatorKind,
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    match kind {
        OperatorKind::Qx => apply_qx(tri, params, field, x, y),
        OperatorKind::Qy => apply_qy(tri, params, field, x, y),
        OperatorKind::P1 => apply_p1(tri, params, field, x, y),
        OperatorKind::P2 => apply_p2(tri, params, field, x, y),
        OperatorKind::S1 => apply_s1(tri, params, field, x, y),
        OperatorKind::S2 => apply_s2(tri, params, field, x, y),
    }
}

/// Pointwise remainder `F(x, y) - (operator F)(x, y)`.
pub fn remainder(
    kind: OperatorKind,
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
) -> Result<f64> {
    Ok(field.eval(x, y) - apply(kind, tri, params, field, x, y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::CurveSpec;

    fn line() -> CurvedTriangle {
        CurvedTriangle::new(1.0, CurveSpec::StraightLine).unwrap()
    }

    fn circle() -> CurvedTriangle {
        CurvedTriangle::new(1.0, CurveSpec::SuperellipseArc { p: 2.0 }).unwrap()
    }

    fn params() -> BivariateParams {
        BivariateParams::new(5, 1.0, 6, 1.0).unwrap()
    }

    #[test]
    fn qx_interpolates_on_gamma1_and_gamma3() {
        let tri = circle();
        let f = ScalarField::gentle();
        let v = apply_qx(&tri, &params(), &f, 0.0, 0.4).unwrap();
        assert!((v - f.eval(0.0, 0.4)).abs() < 1e-12);

        let gx = tri.hyp_g(0.4).unwrap();
        let v = apply_qx(&tri, &params(), &f, gx, 0.4).unwrap();
        assert!((v - f.eval(gx, 0.4)).abs() < 1e-12);
    }

    #[test]
    fn qy_interpolates_on_gamma2_and_gamma3() {
        let tri = circle();
        let f = ScalarField::gentle();
        let v = apply_qy(&tri, &params(), &f, 0.4, 0.0).unwrap();
        assert!((v - f.eval(0.4, 0.0)).abs() < 1e-12);

        let fx = tri.hyp_f(0.4).unwrap();
        let v = apply_qy(&tri, &params(), &f, 0.4, fx).unwrap();
        assert!((v - f.eval(0.4, fx)).abs() < 1e-12);
    }

    #[test]
    fn qx_reproduces_low_x_degree_monomials() {
        let tri = line();
        let f = ScalarField::monomial(1, 3);
        let v = apply_qx(&tri, &params(), &f, 0.3, 0.2).unwrap();
        assert!((v - 0.3 * 0.2_f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn qy_reproduces_low_y_degree_monomials() {
        let tri = line();
        let f = ScalarField::monomial(3, 1);
        let v = apply_qy(&tri, &params(), &f, 0.3, 0.2).unwrap();
        assert!((v - 0.027 * 0.2).abs() < 1e-12);
    }

    #[test]
    fn products_interpolate_vertices() {
        for tri in [line(), circle()] {
            let f = ScalarField::gentle();
            let h = tri.h();
            for (x, y) in [(0.0, 0.0), (h, 0.0), (0.0, h)] {
                let v = apply_p1(&tri, &params(), &f, x, y).unwrap();
                assert!((v - f.eval(x, y)).abs() < 1e-10, "p1 at ({x},{y})");
                let v = apply_p2(&tri, &params(), &f, x, y).unwrap();
                assert!((v - f.eval(x, y)).abs() < 1e-10, "p2 at ({x},{y})");
            }
        }
    }

    #[test]
    fn products_interpolate_hypotenuse() {
        let tri = circle();
        let f = ScalarField::gentle();
        let x = 0.45;
        let fx = tri.hyp_f(x).unwrap();
        let v = apply_p1(&tri, &params(), &f, x, fx).unwrap();
        assert!((v - f.eval(x, fx)).abs() < 1e-10);

        let y = 0.35;
        let gy = tri.hyp_g(y).unwrap();
        let v = apply_p2(&tri, &params(), &f, gy, y).unwrap();
        assert!((v - f.eval(gy, y)).abs() < 1e-10);
    }

    #[test]
    fn p2_reproduces_linears() {
        let tri = line();
        let f = ScalarField::monomial(1, 0);
        let v = apply_p2(&tri, &params(), &f, 0.3, 0.25).unwrap();
        assert!((v - 0.3).abs() < 1e-12);
    }

    #[test]
    fn product_matches_nested_composition() {
        let tri = line();
        let prm = params();
        let f = ScalarField::gentle();
        let (x, y) = (0.25, 0.25);

        let direct = apply_p1(&tri, &prm, &f, x, y).unwrap();
        // independent oracle: outer Qx applied to the field (x,y) -> (Qy F)(x,y)
        let tri2 = tri.clone();
        let prm2 = prm;
        let f2 = f.clone();
        let inner = ScalarField::new("qy_of_gentle", move |u, v| {
            apply_qy(&tri2, &prm2, &f2, u, v).unwrap()
        });
        let nested = apply_qx(&tri, &prm, &inner, x, y).unwrap();
        assert!((direct - nested).abs() < 1e-12, "{direct} vs {nested}");
    }

    #[test]
    fn boolean_sums_interpolate_entire_boundary() {
        let tri = circle();
        let prm = params();
        let f = ScalarField::gentle();
        for edge in [
            crate::domain::Edge::Gamma1,
            crate::domain::Edge::Gamma2,
            crate::domain::Edge::Gamma3,
        ] {
            for (x, y) in tri.boundary_sample(edge, 9).unwrap() {
                let v = apply_s1(&tri, &prm, &f, x, y).unwrap();
                assert!((v - f.eval(x, y)).abs() < 1e-9, "s1 at ({x},{y})");
                let v = apply_s2(&tri, &prm, &f, x, y).unwrap();
                assert!((v - f.eval(x, y)).abs() < 1e-9, "s2 at ({x},{y})");
            }
        }
    }

    #[test]
    fn boolean_sum_of_constant_is_constant() {
        let tri = line();
        let f = ScalarField::monomial(0, 0);
        let v = apply_s1(&tri, &params(), &f, 0.3, 0.3).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn remainder_vanishes_under_exactness() {
        let tri = line();
        let f = ScalarField::monomial(1, 0);
        let r = remainder(OperatorKind::Qx, &tri, &params(), &f, 0.5, 0.25).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn remainder_against_direct_summation() {
        // e20 at (0.5, 0.25): Qx e20 = sum w_i (i g(y)/m)^2 with t = x/g(y)
        let tri = line();
        let prm = params();
        let f = ScalarField::monomial(2, 0);
        let (x, y) = (0.5, 0.25);
        let gy = tri.hyp_g(y).unwrap();
        let w = basis_weights(prm.x_dir(), x / gy).unwrap();
        let direct: f64 = w
            .weights()
            .iter()
            .enumerate()
            .map(|(i, wi)| wi * (i as f64 * gy / 5.0).powi(2))
            .sum();
        let r = remainder(OperatorKind::Qx, &tri, &prm, &f, x, y).unwrap();
        assert!((r - (x * x - direct)).abs() < 1e-14);
    }

    #[test]
    fn evaluation_outside_domain_is_rejected() {
        let tri = line();
        let f = ScalarField::gentle();
        let r = apply_qx(&tri, &params(), &f, 0.7, 0.7);
        assert!(matches!(r, Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn degenerate_row_and_column_hit_the_vertices() {
        let tri = line();
        let prm = params();
        let f = ScalarField::gentle();
        // apex row: g(h) = 0
        let v = apply_qx(&tri, &prm, &f, 0.0, 1.0).unwrap();
        assert!((v - f.eval(0.0, 1.0)).abs() < 1e-15);
        // right vertex column: f(h) = 0
        let v = apply_qy(&tri, &prm, &f, 1.0, 0.0).unwrap();
        assert!((v - f.eval(1.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn operator_kind_round_trips_through_strings() {
        for kind in OperatorKind::ALL {
            assert_eq!(kind.to_string().parse::<OperatorKind>().unwrap(), kind);
        }
        assert!("zz".parse::<OperatorKind>().is_err());
    }
}
