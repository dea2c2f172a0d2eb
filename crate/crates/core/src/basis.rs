//! Univariate Cheney-Sharma second-kind basis and its moment machinery.
//!
//! The basis on `[0, 1]` is
//!
//! ```text
//! q_{m,i}(t) = C(m,i) t (t + i b)^{i-1} (1 - t) [1 - t + (m - i) b]^{m-i-1} / (1 + m b)^{m-1}
//! ```
//!
//! a nonnegative partition of unity that reduces to the Bernstein basis at
//! `b = 0` and reproduces linear functions for every `b >= 0`. The `i = 0`
//! and `i = m` terms are evaluated in grouped form, which removes the
//! `0 * inf` indeterminacy at the endpoints and makes endpoint interpolation
//! exact. Products of powers are accumulated as sums of logarithms (every
//! factor is nonnegative on the admissible domain), so `(1 + m b)^{m-1}`
//! never overflows intermediate arithmetic.

use crate::error::{Error, Result};

/// Tolerance for accepting an abscissa just outside `[0, 1]`.
const T_TOL: f64 = 1e-12;

/// Degree and Abel parameter of one directional operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheneySharmaParams {
    m: usize,
    beta: f64,
}

impl CheneySharmaParams {
    /// Requires `m >= 1` and finite `beta >= 0`.
    pub fn new(m: usize, beta: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParameter(
                "operator degree m must be at least 1".into(),
            ));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Abel parameter must be finite and nonnegative, got {beta}"
            )));
        }
        Ok(Self { m, beta })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// One basis row `q_{m,0..=m}(t)`.
#[derive(Debug, Clone)]
pub struct BasisWeights {
    params: CheneySharmaParams,
    t: f64,
    w: Vec<f64>,
}

impl BasisWeights {
    pub fn params(&self) -> &CheneySharmaParams {
        &self.params
    }

    /// The normalized abscissa the row was evaluated at, clamped to `[0, 1]`.
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.w
    }
}

/// `ln(k!)` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0; n + 1];
    for k in 2..=n {
        lf[k] = lf[k - 1] + (k as f64).ln();
    }
    lf
}

/// Evaluates the full basis row at `t`.
///
/// Endpoint rows are exact: `t = 0` yields `(1, 0, ..., 0)` and `t = 1`
/// yields `(0, ..., 0, 1)` with no rounding.
pub fn basis_weights(params: &CheneySharmaParams, t: f64) -> Result<BasisWeights> {
    if !t.is_finite() || !(-T_TOL..=1.0 + T_TOL).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let t = t.clamp(0.0, 1.0);
    let m = params.m;
    let beta = params.beta;
    let mut w = vec![0.0; m + 1];

    if t == 0.0 {
        w[0] = 1.0;
        return Ok(BasisWeights {
            params: *params,
            t,
            w,
        });
    }
    if t == 1.0 {
        w[m] = 1.0;
        return Ok(BasisWeights {
            params: *params,
            t,
            w,
        });
    }

    let mf = m as f64;
    let ln_denom = (mf - 1.0) * (mf * beta).ln_1p();

    // Grouped endpoint terms: (1-t)[1-t+mb]^{m-1} and t[t+mb]^{m-1}.
    w[0] = ((1.0 - t).ln() + (mf - 1.0) * (1.0 - t + mf * beta).ln() - ln_denom).exp();
    w[m] = (t.ln() + (mf - 1.0) * (t + mf * beta).ln() - ln_denom).exp();

    let lf = ln_factorials(m);
    for i in 1..m {
        let mut s = lf[m] - lf[i] - lf[m - i] + t.ln() + (1.0 - t).ln() - ln_denom;
        let e_lo = i as f64 - 1.0;
        if e_lo > 0.0 {
            s += e_lo * (t + i as f64 * beta).ln();
        }
        let e_hi = (m - i) as f64 - 1.0;
        if e_hi > 0.0 {
            s += e_hi * (1.0 - t + (m - i) as f64 * beta).ln();
        }
        w[i] = s.exp();
    }

    Ok(BasisWeights {
        params: *params,
        t,
        w,
    })
}

/// Abel-Jensen combinatorial sum
///
/// ```text
/// S(j, M, x, y) = sum_{k=0}^{M} C(M,k) (x + k b)^{k+j-1} [y + (M - k) b]^{M-k}
/// ```
///
/// with the conventions `0^0 = 1` and `S = 0` for `M < 0` (the negative-`M`
/// value only ever appears multiplied by a zero coefficient). Each term is
/// accumulated in logarithm space.
pub fn abel_sum(j: u32, m_terms: i64, x: f64, y: f64, beta: f64) -> Result<f64> {
    if m_terms < 0 {
        return Ok(0.0);
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if !y.is_finite() || y < 0.0 {
        return Err(Error::OutOfRange {
            name: "y",
            value: y,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Abel parameter must be finite and nonnegative, got {beta}"
        )));
    }

    let m = m_terms as usize;
    let lf = ln_factorials(m);
    let mut total = 0.0;
    for k in 0..=m {
        let e_lo = k as i64 + j as i64 - 1;
        let b_lo = x + k as f64 * beta;
        let e_hi = (m - k) as i64;
        let b_hi = y + (m - k) as f64 * beta;

        let mut s = lf[m] - lf[k] - lf[m - k];
        if e_lo != 0 {
            if b_lo == 0.0 {
                if e_lo < 0 {
                    return Err(Error::UndefinedSum);
                }
                continue;
            }
            s += e_lo as f64 * b_lo.ln();
        }
        if e_hi != 0 {
            if b_hi == 0.0 {
                continue;
            }
            s += e_hi as f64 * b_hi.ln();
        }
        total += s.exp();
    }
    Ok(total)
}

/// Closed-form second moment `sum_i q_{m,i}(t) (i/m)^2`, via Abel-Jensen sums:
///
/// ```text
/// t/m + (m-1)/m * t * (1 + m b)^{1-m}
///     * [ S(2, m-2, t + 2b, 1 - t) - (m-2) b S(2, m-3, t + 2b, 1 - t + b) ]
/// ```
///
/// Requires `m >= 2`; callers fall back to direct summation for `m = 1`.
/// At `m = 2` the `S(2, m-3, ...)` term carries the coefficient
/// `(m-2) b = 0`, so the negative-`M` convention of [`abel_sum`] keeps the
/// expression total.
pub fn second_moment(params: &CheneySharmaParams, t: f64) -> Result<f64> {
    let m = params.m;
    let beta = params.beta;
    if m < 2 {
        return Err(Error::InvalidParameter(
            "closed-form second moment requires m >= 2".into(),
        ));
    }
    if !t.is_finite() || !(-T_TOL..=1.0 + T_TOL).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let t = t.clamp(0.0, 1.0);
    let mf = m as f64;

    let s_main = abel_sum(2, m as i64 - 2, t + 2.0 * beta, 1.0 - t, beta)?;
    let s_shift = abel_sum(2, m as i64 - 3, t + 2.0 * beta, 1.0 - t + beta, beta)?;
    let bracket = s_main - (mf - 2.0) * beta * s_shift;
    let scale = ((1.0 - mf) * (mf * beta).ln_1p()).exp();

    Ok(t / mf + (mf - 1.0) / mf * t * scale * bracket)
}

/// Applies the univariate operator to sampled nodal values:
/// `sum_i q_{m,i}(t) v[i]` with `v[i]` the value at node `i/m`.
pub fn apply_univariate(params: &CheneySharmaParams, nodal_values: &[f64], t: f64) -> Result<f64> {
    let expected = params.m + 1;
    if nodal_values.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: nodal_values.len(),
        });
    }
    let row = basis_weights(params, t)?;
    Ok(row
        .weights()
        .iter()
        .zip(nodal_values)
        .map(|(w, v)| w * v)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, beta: f64) -> CheneySharmaParams {
        CheneySharmaParams::new(m, beta).unwrap()
    }

    /// Direct-summation oracle for the second moment.
    fn second_moment_direct(p: &CheneySharmaParams, t: f64) -> f64 {
        let row = basis_weights(p, t).unwrap();
        let m = p.m() as f64;
        row.weights()
            .iter()
            .enumerate()
            .map(|(i, w)| w * (i as f64 / m).powi(2))
            .sum()
    }

    #[test]
    fn degree_one_is_linear_interpolation() {
        let row = basis_weights(&params(1, 0.7), 0.3).unwrap();
        assert!((row.weights()[0] - 0.7).abs() < 1e-15);
        assert!((row.weights()[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn endpoint_rows_are_exact() {
        let row = basis_weights(&params(5, 1.0), 0.0).unwrap();
        assert_eq!(row.weights(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let row = basis_weights(&params(5, 1.0), 1.0).unwrap();
        assert_eq!(row.weights(), &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_abel_parameter_reduces_to_bernstein() {
        // C(5,2) 0.4^2 0.6^3 = 0.3456
        let row = basis_weights(&params(5, 0.0), 0.4).unwrap();
        assert!((row.weights()[2] - 0.3456).abs() < 1e-12);
    }

    #[test]
    fn rejects_degree_zero_and_negative_beta() {
        assert!(CheneySharmaParams::new(0, 1.0).is_err());
        assert!(CheneySharmaParams::new(3, -0.1).is_err());
    }

    #[test]
    fn rejects_abscissa_outside_unit_interval() {
        let p = params(4, 1.0);
        assert!(basis_weights(&p, -1e-6).is_err());
        assert!(basis_weights(&p, 1.0 + 1e-6).is_err());
        // within tolerance: clamped, not rejected
        assert!(basis_weights(&p, -1e-13).is_ok());
        assert!(basis_weights(&p, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn abel_sum_single_term() {
        // j=2, M=0: single k=0 term x^{j-1} y^0 = x
        let s = abel_sum(2, 0, 0.3, 0.9, 1.0).unwrap();
        assert!((s - 0.3).abs() < 1e-15);
    }

    #[test]
    fn abel_sum_binomial_theorem_at_zero_beta() {
        // j=1, b=0: sum C(M,k) x^k y^{M-k} = (x+y)^M
        let s = abel_sum(1, 4, 0.2, 0.5, 0.0).unwrap();
        assert!((s - 0.7f64.powi(4)).abs() < 1e-15);
    }

    #[test]
    fn abel_sum_two_term_expansion() {
        // j=2, M=1: x(y+b) + (x+b)^2 = 0.3*0.9 + 0.8^2 = 0.91
        let s = abel_sum(2, 1, 0.3, 0.4, 0.5).unwrap();
        assert!((s - 0.91).abs() < 1e-15);
    }

    #[test]
    fn abel_sum_negative_term_count_is_zero() {
        assert_eq!(abel_sum(2, -1, 0.3, 0.4, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn abel_sum_zero_to_negative_power_is_rejected() {
        assert!(matches!(
            abel_sum(0, 2, 0.0, 0.5, 0.0),
            Err(Error::UndefinedSum)
        ));
        // j=0 with x > 0 is fine (negative exponent, positive base)
        assert!(abel_sum(0, 2, 0.5, 0.5, 0.0).is_ok());
    }

    #[test]
    fn second_moment_bernstein_case() {
        // b=0: t^2 + t(1-t)/m
        let v = second_moment(&params(5, 0.0), 0.4).unwrap();
        assert!((v - 0.208).abs() < 1e-14);
    }

    #[test]
    fn second_moment_matches_direct_summation_small() {
        let p = params(2, 1.0);
        let closed = second_moment(&p, 0.5).unwrap();
        let direct = second_moment_direct(&p, 0.5);
        assert!((closed - direct).abs() < 1e-14, "{closed} vs {direct}");
    }

    #[test]
    fn second_moment_matches_direct_summation_mid_degree() {
        let p = params(10, 0.5);
        let closed = second_moment(&p, 0.25).unwrap();
        let direct = second_moment_direct(&p, 0.25);
        let rel = (closed - direct).abs() / direct.abs();
        assert!(rel < 1e-10, "rel = {rel}");
    }

    #[test]
    fn second_moment_rejects_degree_one() {
        assert!(second_moment(&params(1, 1.0), 0.5).is_err());
    }

    #[test]
    fn no_overflow_at_large_degree_and_parameter() {
        let p = params(60, 4.0);
        let row = basis_weights(&p, 0.3).unwrap();
        let sum: f64 = row.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
        let closed = second_moment(&p, 0.3).unwrap();
        let direct = second_moment_direct(&p, 0.3);
        assert!(((closed - direct) / direct).abs() < 1e-10);
    }

    #[test]
    fn univariate_reproduces_constants_and_linears() {
        let p = params(4, 1.0);
        let constants = [2.5; 5];
        let v = apply_univariate(&p, &constants, 0.37).unwrap();
        assert!((v - 2.5).abs() < 1e-12);

        let linear = [0.0, 0.25, 0.5, 0.75, 1.0];
        let v = apply_univariate(&p, &linear, 0.37).unwrap();
        assert!((v - 0.37).abs() < 1e-12);
    }

    #[test]
    fn univariate_interpolates_endpoints_exactly() {
        let p = params(3, 0.5);
        let vals = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(apply_univariate(&p, &vals, 0.0).unwrap(), 1.0);
        let vals = [0.0, 0.0, 0.0, 7.0];
        assert_eq!(apply_univariate(&p, &vals, 1.0).unwrap(), 7.0);
    }

    #[test]
    fn univariate_rejects_length_mismatch() {
        let p = params(4, 1.0);
        assert!(matches!(
            apply_univariate(&p, &[1.0, 2.0], 0.5),
            Err(Error::LengthMismatch {
                expected: 5,
                got: 2
            })
        ));
    }
}
