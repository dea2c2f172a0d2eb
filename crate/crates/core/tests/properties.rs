//! Property tests over the core algebraic invariants.

use proptest::prelude::*;

use cstri::basis::{abel_sum, basis_weights, second_moment, CheneySharmaParams};
use cstri::domain::{CurveSpec, CurvedTriangle};
use cstri::fields::ScalarField;
use cstri::operators::{apply_p1, apply_qx, apply_qy, apply_s1, BivariateParams};

proptest! {
    /// The basis is a nonnegative partition of unity that reproduces linears.
    #[test]
    fn basis_partition_and_linear_reproduction(
        m in 1usize..=20,
        beta in 0.0f64..2.0,
        t in 0.0f64..=1.0,
    ) {
        let p = CheneySharmaParams::new(m, beta).unwrap();
        let row = basis_weights(&p, t).unwrap();
        let sum: f64 = row.weights().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-10);
        let first: f64 = row.weights().iter().enumerate()
            .map(|(i, w)| w * i as f64 / m as f64)
            .sum();
        prop_assert!((first - t).abs() < 1e-10);
        prop_assert!(row.weights().iter().all(|&w| w >= -1e-15));
    }

    /// At beta = 0 the Abel-Jensen sum collapses to the binomial theorem:
    /// S(j, M, x, y) = x^{j-1} (x + y)^M.
    #[test]
    fn abel_sum_binomial_collapse(
        j in 1u32..4,
        m_terms in 0i64..12,
        x in 0.01f64..3.0,
        y in 0.0f64..3.0,
    ) {
        let s = abel_sum(j, m_terms, x, y, 0.0).unwrap();
        let reference = x.powi(j as i32 - 1) * (x + y).powi(m_terms as i32);
        let scale = s.abs().max(reference.abs()).max(1e-300);
        prop_assert!((s - reference).abs() / scale < 1e-12);
    }

    /// The closed-form second moment agrees with direct summation.
    #[test]
    fn second_moment_closed_form_vs_direct(
        m in 2usize..=15,
        beta in 0.0f64..2.0,
        t in 0.0f64..=1.0,
    ) {
        let p = CheneySharmaParams::new(m, beta).unwrap();
        let closed = second_moment(&p, t).unwrap();
        let direct: f64 = basis_weights(&p, t).unwrap().weights().iter().enumerate()
            .map(|(i, w)| w * (i as f64 / m as f64).powi(2))
            .sum();
        let scale = closed.abs().max(direct.abs());
        prop_assert!(scale == 0.0 || (closed - direct).abs() / scale < 1e-10);
    }

    /// Self-inverse superellipse hypotenuses invert consistently. Abscissae
    /// stay at grid granularity away from the apex, where f flattens and the
    /// round trip through a rounded y cannot recover x (|g'| blows up).
    #[test]
    fn superellipse_inverse_consistency(
        h in 0.1f64..10.0,
        p in 1.0f64..3.5,
        u in 0.01f64..=1.0,
    ) {
        let tri = CurvedTriangle::new(h, CurveSpec::SuperellipseArc { p }).unwrap();
        let x = u * h;
        let y = tri.hyp_f(x).unwrap();
        prop_assert!((tri.hyp_g(y).unwrap() - x).abs() < 1e-10 * h.max(1.0));
    }

    /// The Boolean-sum identity S1 + P1 = Qx + Qy holds pointwise.
    #[test]
    fn boolean_sum_identity(
        m in 1usize..=8,
        n in 1usize..=8,
        beta in 0.0f64..2.0,
        b in 0.0f64..2.0,
        u in 0.0f64..=1.0,
        v in 0.0f64..=1.0,
    ) {
        let tri = CurvedTriangle::new(1.0, CurveSpec::StraightLine).unwrap();
        let params = BivariateParams::new(m, beta, n, b).unwrap();
        let field = ScalarField::gentle();
        let x = 0.02 + 0.96 * u;
        let y = (0.02 + 0.96 * v) * tri.hyp_f(x).unwrap();
        let s1 = apply_s1(&tri, &params, &field, x, y).unwrap();
        let p1 = apply_p1(&tri, &params, &field, x, y).unwrap();
        let qx = apply_qx(&tri, &params, &field, x, y).unwrap();
        let qy = apply_qy(&tri, &params, &field, x, y).unwrap();
        prop_assert!(((s1 + p1) - (qx + qy)).abs() < 1e-13);
    }

    /// Lattice masking never emits a point outside the closed triangle.
    #[test]
    fn lattice_mask_correctness(p in 1.0f64..4.0, grid in 2usize..40) {
        let tri = CurvedTriangle::new(1.0, CurveSpec::SuperellipseArc { p }).unwrap();
        for (x, y) in cstri::cli::lattice_points(&tri, grid) {
            prop_assert!(tri.contains(x, y, 0.0));
        }
    }
}
