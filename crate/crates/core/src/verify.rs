//! Named property suites over the library invariants.
//!
//! Each check sweeps a canonical parameter range merged with the caller's
//! configured parameters, reports the maximum observed defect, and passes
//! iff the defect stays within the property's tolerance. The `verify` CLI
//! command prints one line per report; the test suite asserts them.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::analysis::{
    bound_boolean, bound_directional, bound_product, modulus_1d, moment_gap_x, moment_gap_y,
    peano_kernel_profile, peano_remainder, ModulusSource,
};
use crate::basis::{apply_univariate, basis_weights, second_moment, CheneySharmaParams};
use crate::domain::{Axis, CurveSpec, CurvedTriangle, Edge};
use crate::fields::ScalarField;
use crate::operators::{
    apply_p1, apply_p2, apply_qx, apply_qy, apply_s1, apply_s2, remainder, BivariateParams,
    OperatorKind,
};

#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: String,
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl PropertyReport {
    fn new(name: impl Into<String>, max_defect: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_defect,
            tolerance,
            pass: max_defect.is_finite() && max_defect <= tolerance,
        }
    }
}

/// Deterministic interior sample with a margin from every edge.
pub fn interior_points(tri: &CurvedTriangle, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let h = tri.h();
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let v: f64 = rng.gen();
            let x = h * (0.02 + 0.96 * u);
            let fx = tri.hyp_f(x).unwrap();
            let y = fx * (0.02 + 0.96 * v);
            (x, y)
        })
        .collect()
}

fn merge_usize(base: &[usize], extra: &[usize]) -> Vec<usize> {
    let mut v = base.to_vec();
    for &e in extra {
        if !v.contains(&e) {
            v.push(e);
        }
    }
    v
}

fn merge_f64(base: &[f64], extra: &[f64]) -> Vec<f64> {
    let mut v = base.to_vec();
    for &e in extra {
        if !v.iter().any(|x| x == &e) {
            v.push(e);
        }
    }
    v
}

/// Univariate basis invariants.
pub fn basis_properties(params: &BivariateParams) -> Vec<PropertyReport> {
    let configured_m = [params.x_dir().m(), params.y_dir().m()];
    let configured_beta = [params.x_dir().beta(), params.y_dir().beta()];
    let ms = merge_usize(&(1..=20).collect::<Vec<_>>(), &configured_m);
    let betas = merge_f64(&[0.0, 0.1, 1.0, 2.0], &configured_beta);

    let mut partition: f64 = 0.0;
    let mut linear: f64 = 0.0;
    let mut negative: f64 = 0.0;
    for &m in &ms {
        for &beta in &betas {
            let p = CheneySharmaParams::new(m, beta).unwrap();
            for k in 0..=100 {
                let t = k as f64 / 100.0;
                let row = basis_weights(&p, t).unwrap();
                let sum: f64 = row.weights().iter().sum();
                partition = partition.max((sum - 1.0).abs());
                let first: f64 = row
                    .weights()
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * i as f64 / m as f64)
                    .sum();
                linear = linear.max((first - t).abs());
                for &w in row.weights() {
                    negative = negative.max(-w);
                }
            }
        }
    }

    let mut bernstein: f64 = 0.0;
    for &m in &merge_usize(&[5, 10], &configured_m) {
        let p = CheneySharmaParams::new(m, 0.0).unwrap();
        for k in 0..=100 {
            let t = k as f64 / 100.0;
            let row = basis_weights(&p, t).unwrap();
            for (i, &w) in row.weights().iter().enumerate() {
                let reference = binomial(m, i) * t.powi(i as i32) * (1.0 - t).powi((m - i) as i32);
                bernstein = bernstein.max((w - reference).abs());
            }
        }
    }

    let moment_ms = merge_usize(
        &(2..=15).collect::<Vec<_>>(),
        &configured_m
            .iter()
            .copied()
            .filter(|&m| m >= 2)
            .collect::<Vec<_>>(),
    );
    let moment_betas = merge_f64(&[0.1, 1.0], &configured_beta);
    let mut moment: f64 = 0.0;
    for &m in &moment_ms {
        for &beta in &moment_betas {
            let p = CheneySharmaParams::new(m, beta).unwrap();
            for k in 0..=50 {
                let t = k as f64 / 50.0;
                let closed = second_moment(&p, t).unwrap();
                let row = basis_weights(&p, t).unwrap();
                let direct: f64 = row
                    .weights()
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * (i as f64 / m as f64).powi(2))
                    .sum();
                let scale = closed.abs().max(direct.abs());
                if scale > 0.0 {
                    moment = moment.max((closed - direct).abs() / scale);
                }
            }
        }
    }

    let mut endpoint: f64 = 0.0;
    for &m in &ms {
        for &beta in &betas {
            let p = CheneySharmaParams::new(m, beta).unwrap();
            let nodal: Vec<f64> = (0..=m).map(|i| (i as f64 * 0.7).sin() + 2.0).collect();
            endpoint = endpoint.max((apply_univariate(&p, &nodal, 0.0).unwrap() - nodal[0]).abs());
            endpoint = endpoint.max((apply_univariate(&p, &nodal, 1.0).unwrap() - nodal[m]).abs());
        }
    }

    vec![
        PropertyReport::new("basis_partition_of_unity", partition, 1e-10),
        PropertyReport::new("basis_linear_reproduction", linear, 1e-10),
        PropertyReport::new("basis_nonnegativity", negative, 1e-15),
        PropertyReport::new("basis_bernstein_reduction", bernstein, 1e-12),
        PropertyReport::new("second_moment_closed_form", moment, 1e-10),
        PropertyReport::new("endpoint_interpolation_exact", endpoint, 0.0),
    ]
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 1..=k {
        acc = acc * (n - k + i) as f64 / i as f64;
    }
    acc
}

/// Triangle-domain invariants.
pub fn domain_properties(tri: &CurvedTriangle) -> Vec<PropertyReport> {
    let h = tri.h();

    let mut inverse: f64 = 0.0;
    for k in 0..=100 {
        let x = h * k as f64 / 100.0;
        let y = tri.hyp_f(x).unwrap();
        inverse = inverse.max((tri.hyp_g(y).unwrap() - x).abs());
        let y = h * k as f64 / 100.0;
        let x = tri.hyp_g(y).unwrap();
        inverse = inverse.max((tri.hyp_f(x).unwrap() - y).abs());
    }

    let mut containment: f64 = 0.0;
    let mut uniformity: f64 = 0.0;
    for &count in &[2usize, 5, 8] {
        for k in 0..=4 {
            let fixed = h * k as f64 / 4.0;
            for axis in [Axis::X, Axis::Y] {
                let nodes = tri.nodes_along(count, fixed, axis).unwrap();
                let span = nodes[count];
                for pair in nodes.windows(2) {
                    uniformity = uniformity.max(((pair[1] - pair[0]) - span / count as f64).abs());
                }
                for &u in &nodes {
                    let (x, y) = match axis {
                        Axis::X => (u, fixed),
                        Axis::Y => (fixed, u),
                    };
                    let viol = (-x).max(-y).max(y - tri.hyp_f(x.min(h)).unwrap()).max(0.0);
                    containment = containment.max(viol);
                }
            }
        }
    }

    // a spec that rises on part of [0, 1] must be rejected at construction
    let rejected = CurvedTriangle::new(
        1.0,
        CurveSpec::MonotonePolynomial {
            coeffs: vec![1.0, 1.0, -2.0],
        },
    )
    .is_err();

    vec![
        PropertyReport::new("curve_inverse_consistency", inverse, 1e-10),
        PropertyReport::new("node_containment", containment, 1e-12),
        PropertyReport::new("node_uniformity", uniformity, 1e-12),
        PropertyReport::new(
            "monotone_spec_rejection",
            if rejected { 0.0 } else { 1.0 },
            0.0,
        ),
    ]
}

fn test_fields() -> Vec<ScalarField> {
    vec![
        ScalarField::gentle(),
        ScalarField::monomial(2, 1),
        ScalarField::sin_pi_x_cos_pi_y(),
    ]
}

/// Bivariate-operator invariants.
pub fn operator_properties(tri: &CurvedTriangle, params: &BivariateParams) -> Vec<PropertyReport> {
    let fields = test_fields();
    let h = tri.h();

    let mut qx_boundary: f64 = 0.0;
    let mut qy_boundary: f64 = 0.0;
    let mut product_boundary: f64 = 0.0;
    let mut boolean_boundary: f64 = 0.0;
    for field in &fields {
        for (x, y) in tri
            .boundary_sample(Edge::Gamma1, 21)
            .unwrap()
            .into_iter()
            .chain(tri.boundary_sample(Edge::Gamma3, 21).unwrap())
        {
            let v = apply_qx(tri, params, field, x, y).unwrap();
            qx_boundary = qx_boundary.max((v - field.eval(x, y)).abs());
        }
        for (x, y) in tri
            .boundary_sample(Edge::Gamma2, 21)
            .unwrap()
            .into_iter()
            .chain(tri.boundary_sample(Edge::Gamma3, 21).unwrap())
        {
            let v = apply_qy(tri, params, field, x, y).unwrap();
            qy_boundary = qy_boundary.max((v - field.eval(x, y)).abs());
        }
        let vertices = [(0.0, 0.0), (h, 0.0), (0.0, h)];
        for (x, y) in tri
            .boundary_sample(Edge::Gamma3, 21)
            .unwrap()
            .into_iter()
            .chain(vertices)
        {
            let target = field.eval(x, y);
            let v = apply_p1(tri, params, field, x, y).unwrap();
            product_boundary = product_boundary.max((v - target).abs());
            let v = apply_p2(tri, params, field, x, y).unwrap();
            product_boundary = product_boundary.max((v - target).abs());
        }
        for edge in [Edge::Gamma1, Edge::Gamma2, Edge::Gamma3] {
            for (x, y) in tri.boundary_sample(edge, 21).unwrap() {
                let target = field.eval(x, y);
                let v = apply_s1(tri, params, field, x, y).unwrap();
                boolean_boundary = boolean_boundary.max((v - target).abs());
                let v = apply_s2(tri, params, field, x, y).unwrap();
                boolean_boundary = boolean_boundary.max((v - target).abs());
            }
        }
    }

    let points = interior_points(tri, 50, 42);
    let mut exactness: f64 = 0.0;
    for &(x, y) in &points {
        for i in 0..=1u32 {
            for j in 0..=3u32 {
                let f = ScalarField::monomial(i, j);
                let v = apply_qx(tri, params, &f, x, y).unwrap();
                exactness = exactness.max((v - f.eval(x, y)).abs());
                let f = ScalarField::monomial(j, i);
                let v = apply_qy(tri, params, &f, x, y).unwrap();
                exactness = exactness.max((v - f.eval(x, y)).abs());
            }
        }
    }

    let sample = interior_points(tri, 25, 7);
    let gentle = ScalarField::gentle();
    let mut factorization: f64 = 0.0;
    let mut boolean_identity: f64 = 0.0;
    {
        let (t1, p1c, g1) = (tri.clone(), *params, gentle.clone());
        let qy_field = ScalarField::new("qy_nested", move |u, v| {
            apply_qy(&t1, &p1c, &g1, u, v).unwrap()
        });
        let (t2, p2c, g2) = (tri.clone(), *params, gentle.clone());
        let qx_field = ScalarField::new("qx_nested", move |u, v| {
            apply_qx(&t2, &p2c, &g2, u, v).unwrap()
        });
        for &(x, y) in &sample {
            let p1v = apply_p1(tri, params, &gentle, x, y).unwrap();
            let nested = apply_qx(tri, params, &qy_field, x, y).unwrap();
            factorization = factorization.max((p1v - nested).abs());
            let p2v = apply_p2(tri, params, &gentle, x, y).unwrap();
            let nested = apply_qy(tri, params, &qx_field, x, y).unwrap();
            factorization = factorization.max((p2v - nested).abs());

            let qx = apply_qx(tri, params, &gentle, x, y).unwrap();
            let qy = apply_qy(tri, params, &gentle, x, y).unwrap();
            let s1 = apply_s1(tri, params, &gentle, x, y).unwrap();
            boolean_identity = boolean_identity.max(((s1 + p1v) - (qx + qy)).abs());
        }
    }

    let mut restriction: f64 = 0.0;
    for field in &fields {
        for (x, _) in tri.boundary_sample(Edge::Gamma2, 21).unwrap() {
            let p1v = apply_p1(tri, params, field, x, 0.0).unwrap();
            let qxv = apply_qx(tri, params, field, x, 0.0).unwrap();
            restriction = restriction.max((p1v - qxv).abs());
        }
        for (_, y) in tri.boundary_sample(Edge::Gamma1, 21).unwrap() {
            let p1v = apply_p1(tri, params, field, 0.0, y).unwrap();
            let qyv = apply_qy(tri, params, field, 0.0, y).unwrap();
            restriction = restriction.max((p1v - qyv).abs());
        }
    }

    vec![
        PropertyReport::new("qx_boundary_interpolation", qx_boundary, 1e-9),
        PropertyReport::new("qy_boundary_interpolation", qy_boundary, 1e-9),
        PropertyReport::new(
            "product_vertex_hypotenuse_interpolation",
            product_boundary,
            1e-9,
        ),
        PropertyReport::new(
            "boolean_full_boundary_interpolation",
            boolean_boundary,
            1e-9,
        ),
        PropertyReport::new("directional_degree_of_exactness", exactness, 1e-10),
        PropertyReport::new("product_factorization", factorization, 1e-12),
        PropertyReport::new("boolean_sum_identity", boolean_identity, 1e-13),
        PropertyReport::new("product_axis_restrictions", restriction, 1e-10),
    ]
}

/// Error-analysis invariants.
pub fn analysis_properties(tri: &CurvedTriangle, params: &BivariateParams) -> Vec<PropertyReport> {
    let points = interior_points(tri, 25, 11);

    let kernel_ms = merge_usize(&[3, 5, 8], &[params.x_dir().m()]);
    let kernel_betas = merge_f64(&[0.5, 1.0], &[params.x_dir().beta()]);
    let mut kernel_sign = f64::NEG_INFINITY;
    for &m in &kernel_ms {
        for &beta in &kernel_betas {
            let prm = BivariateParams::new(m, beta, m, beta).unwrap();
            for &(x, y) in &points {
                for pt in peano_kernel_profile(tri, &prm, x, y, 101).unwrap() {
                    kernel_sign = kernel_sign.max(pt.value);
                }
            }
        }
    }

    let e20 = ScalarField::monomial(2, 0);
    let e02 = ScalarField::monomial(0, 2);
    let mut mean_value: f64 = 0.0;
    let mut gap_negativity: f64 = 0.0;
    for &(x, y) in &points {
        let gap_x = moment_gap_x(tri, params, x, y).unwrap();
        let gap_y = moment_gap_y(tri, params, x, y).unwrap();
        gap_negativity = gap_negativity.max(-gap_x).max(-gap_y);
        let r = remainder(OperatorKind::Qx, tri, params, &e20, x, y).unwrap();
        mean_value = mean_value.max((r + gap_x).abs());
        let r = remainder(OperatorKind::Qy, tri, params, &e02, x, y).unwrap();
        mean_value = mean_value.max((r + gap_y).abs());
    }

    let mut peano_vs_direct: f64 = 0.0;
    let e30 = ScalarField::monomial(3, 0);
    let e03 = ScalarField::monomial(0, 3);
    for &(x, y) in points.iter().take(10) {
        let via_kernel = peano_remainder(tri, params, &e30, x, y, Axis::X).unwrap();
        let direct = remainder(OperatorKind::Qx, tri, params, &e30, x, y).unwrap();
        peano_vs_direct = peano_vs_direct.max((via_kernel - direct).abs());
        let via_kernel = peano_remainder(tri, params, &e03, x, y, Axis::Y).unwrap();
        let direct = remainder(OperatorKind::Qy, tri, params, &e03, x, y).unwrap();
        peano_vs_direct = peano_vs_direct.max((via_kernel - direct).abs());
    }

    let sin_x = ScalarField::sin_pi_x();
    let sin_y = {
        use std::f64::consts::PI;
        ScalarField::new("sinpiy", |_, y: f64| (PI * y).sin())
            .with_dxx(|_, _| 0.0)
            .with_dyy(|_, y| -PI * PI * (PI * y).sin())
            .with_lipschitz(PI)
    };
    let certified = interior_points(tri, 100, 23);
    let mut directional_violation: f64 = 0.0;
    let mut product_violation: f64 = 0.0;
    let mut boolean_violation: f64 = 0.0;
    for &(x, y) in &certified {
        let lx = ModulusSource::Lipschitz(sin_x.lipschitz().unwrap());
        let gap = moment_gap_x(tri, params, x, y).unwrap().max(0.0);
        if gap > 0.0 {
            let b = bound_directional(tri, params, &sin_x, x, y, gap.sqrt(), Axis::X, &lx).unwrap();
            let r = remainder(OperatorKind::Qx, tri, params, &sin_x, x, y).unwrap();
            directional_violation = directional_violation.max(r.abs() - b);
        }
        let ly = ModulusSource::Lipschitz(sin_y.lipschitz().unwrap());
        let gap = moment_gap_y(tri, params, x, y).unwrap().max(0.0);
        if gap > 0.0 {
            let b = bound_directional(tri, params, &sin_y, x, y, gap.sqrt(), Axis::Y, &ly).unwrap();
            let r = remainder(OperatorKind::Qy, tri, params, &sin_y, x, y).unwrap();
            directional_violation = directional_violation.max(r.abs() - b);
        }

        let b = bound_product(tri, params, &sin_x, x, y, &lx).unwrap();
        let r = remainder(OperatorKind::P1, tri, params, &sin_x, x, y).unwrap();
        product_violation = product_violation.max(r.abs() - b);

        let b = bound_boolean(tri, params, &sin_x, x, y, &lx).unwrap();
        let r = remainder(OperatorKind::S1, tri, params, &sin_x, x, y).unwrap();
        boolean_violation = boolean_violation.max(r.abs() - b);
    }

    let gentle = ScalarField::gentle();
    let mut monotonicity_drop: f64 = 0.0;
    for axis in [Axis::X, Axis::Y] {
        let fixed = tri.h() / 2.0;
        let mut prev = 0.0;
        for &delta in &[0.05, 0.1, 0.2, 0.4] {
            let est = modulus_1d(tri, &gentle, fixed, axis, delta, 501).unwrap();
            monotonicity_drop = monotonicity_drop.max(prev - est.value);
            prev = est.value;
        }
    }

    vec![
        PropertyReport::new("peano_kernel_nonpositive", kernel_sign, 1e-12),
        PropertyReport::new("second_moment_mean_value", mean_value, 1e-10),
        PropertyReport::new("moment_gap_nonnegative", gap_negativity, 1e-12),
        PropertyReport::new("peano_integral_vs_direct_remainder", peano_vs_direct, 1e-8),
        PropertyReport::new(
            "certified_directional_bound",
            directional_violation.max(0.0),
            0.0,
        ),
        PropertyReport::new("certified_product_bound", product_violation.max(0.0), 0.0),
        PropertyReport::new("certified_boolean_bound", boolean_violation.max(0.0), 0.0),
        PropertyReport::new("modulus_monotone_in_delta", monotonicity_drop, 0.0),
    ]
}

/// The full suite, in module order.
pub fn run_all(tri: &CurvedTriangle, params: &BivariateParams) -> Vec<PropertyReport> {
    let mut reports = basis_properties(params);
    reports.extend(domain_properties(tri));
    reports.extend(operator_properties(tri, params));
    reports.extend(analysis_properties(tri, params));
    reports
}
