//! The full invariant suite must pass for every curve family at the default
//! operator parameters, and for a spread of non-default parameters on the
//! straight-hypotenuse triangle.

use cstri::domain::{CurveSpec, CurvedTriangle};
use cstri::operators::BivariateParams;
use cstri::verify;

fn assert_all_pass(tri: &CurvedTriangle, params: &BivariateParams, label: &str) {
    let reports = verify::run_all(tri, params);
    let failures: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| {
            format!(
                "{} (defect {:.3e}, tol {:.0e})",
                r.name, r.max_defect, r.tolerance
            )
        })
        .collect();
    assert!(
        failures.is_empty(),
        "{label}: failing properties: {failures:?}"
    );
}

#[test]
fn straight_hypotenuse_default_params() {
    let tri = CurvedTriangle::new(1.0, CurveSpec::StraightLine).unwrap();
    let params = BivariateParams::new(5, 1.0, 6, 1.0).unwrap();
    assert_all_pass(&tri, &params, "line");
}

#[test]
fn circular_arc_default_params() {
    let tri = CurvedTriangle::new(1.0, CurveSpec::SuperellipseArc { p: 2.0 }).unwrap();
    let params = BivariateParams::new(5, 1.0, 6, 1.0).unwrap();
    assert_all_pass(&tri, &params, "circle");
}

#[test]
fn cubic_superellipse_default_params() {
    let tri = CurvedTriangle::new(1.0, CurveSpec::SuperellipseArc { p: 3.0 }).unwrap();
    let params = BivariateParams::new(5, 1.0, 6, 1.0).unwrap();
    assert_all_pass(&tri, &params, "superellipse p=3");
}

#[test]
fn parabolic_hypotenuse_default_params() {
    let tri = CurvedTriangle::new(
        1.0,
        CurveSpec::MonotonePolynomial {
            coeffs: vec![1.0, 0.0, -1.0],
        },
    )
    .unwrap();
    let params = BivariateParams::new(5, 1.0, 6, 1.0).unwrap();
    assert_all_pass(&tri, &params, "parabola");
}

#[test]
fn zero_abel_parameter_runs_the_bernstein_path() {
    let tri = CurvedTriangle::new(1.0, CurveSpec::StraightLine).unwrap();
    let params = BivariateParams::new(5, 0.0, 6, 0.0).unwrap();
    assert_all_pass(&tri, &params, "beta = 0");
}

#[test]
fn scaled_triangle_and_uneven_degrees() {
    let tri = CurvedTriangle::new(2.5, CurveSpec::SuperellipseArc { p: 2.0 }).unwrap();
    let params = BivariateParams::new(8, 0.3, 3, 2.0).unwrap();
    assert_all_pass(&tri, &params, "h = 2.5, m = 8, n = 3");
}
