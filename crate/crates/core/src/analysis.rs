//! Error analysis: moduli of continuity, second-moment gaps, remainder
//! bounds, and the Peano-kernel representation of the directional remainder.
//!
//! The moment gap `(Qx e20)(x,y) - x^2` is the operator's second-moment
//! excess; its square root scales every bound. Brute-force moduli are lower
//! estimates of the true modulus, so certified bound checks must use an
//! analytic source (e.g. a Lipschitz constant); the brute-force path powers
//! reporting only.

use std::collections::VecDeque;
use std::sync::OnceLock;

use crate::basis::{basis_weights, second_moment, CheneySharmaParams};
use crate::domain::{Axis, CurvedTriangle};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::operators::{ensure_inside, BivariateParams, COLLAPSE_EPS};

/// Tolerance below which a negative moment gap is treated as rounding.
const GAP_TOL: f64 = 1e-12;

/// A sampled modulus-of-continuity value. A lower estimate of the true
/// modulus, nondecreasing in both `delta` and `resolution`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    pub delta: f64,
    /// Second radius for the bivariate modulus.
    pub delta2: Option<f64>,
    pub value: f64,
    pub resolution: usize,
}

/// How bound routines obtain their moduli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModulusSource {
    /// Grid scan via [`modulus_1d`] / [`modulus_2d`]; estimate mode.
    BruteForce { resolution: usize },
    /// `omega(d) = L d` and `omega(d1, d2) = L (d1 + d2)` for a field whose
    /// partials are bounded by `L`; certified mode.
    Lipschitz(f64),
}

impl ModulusSource {
    fn omega_1d(
        &self,
        tri: &CurvedTriangle,
        field: &ScalarField,
        fixed: f64,
        axis: Axis,
        delta: f64,
    ) -> Result<f64> {
        match self {
            ModulusSource::Lipschitz(l) => Ok(l * delta),
            ModulusSource::BruteForce { resolution } => {
                Ok(modulus_1d(tri, field, fixed, axis, delta, *resolution)?.value)
            }
        }
    }

    fn omega_2d(
        &self,
        tri: &CurvedTriangle,
        field: &ScalarField,
        delta1: f64,
        delta2: f64,
    ) -> Result<f64> {
        match self {
            ModulusSource::Lipschitz(l) => Ok(l * (delta1 + delta2)),
            ModulusSource::BruteForce { resolution } => {
                Ok(modulus_2d(tri, field, delta1, delta2, *resolution)?.value)
            }
        }
    }
}

/// Sliding-window extreme over the centered window `[i-half, i+half]`,
/// computed with a monotonic deque in O(n). `NaN` entries are masked out;
/// an all-masked window yields the neutral sentinel.
fn sliding_extreme(vals: &[f64], half: usize, maximize: bool) -> Vec<f64> {
    let n = vals.len();
    let sentinel = if maximize {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    let mut out = vec![sentinel; n];
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next_in = 0usize;
    for (i, slot) in out.iter_mut().enumerate() {
        let hi = (i + half).min(n - 1);
        while next_in <= hi {
            let v = vals[next_in];
            if !v.is_nan() {
                while let Some(&back) = dq.back() {
                    let dominated = if maximize {
                        vals[back] <= v
                    } else {
                        vals[back] >= v
                    };
                    if dominated {
                        dq.pop_back();
                    } else {
                        break;
                    }
                }
                dq.push_back(next_in);
            }
            next_in += 1;
        }
        let lo = i.saturating_sub(half);
        while let Some(&front) = dq.front() {
            if front < lo {
                dq.pop_front();
            } else {
                break;
            }
        }
        if let Some(&front) = dq.front() {
            *slot = vals[front];
        }
    }
    out
}

/// Window half-width in grid steps for radius `delta` on spacing `gap`.
fn window_steps(delta: f64, gap: f64, resolution: usize) -> usize {
    let cap = (resolution - 1) as f64;
    (delta / gap + 1e-9).min(cap).floor() as usize
}

fn check_delta(name: &'static str, delta: f64) -> Result<()> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {delta}"
        )));
    }
    Ok(())
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(
            "modulus resolution must be at least 2".into(),
        ));
    }
    Ok(())
}

/// Directional modulus of continuity: sup of `|F(u1,.) - F(u2,.)|` over grid
/// pairs with `|u1 - u2| <= delta` on a `resolution`-point grid of
/// `[0, g(y)]` (X at fixed `y`) or `[0, f(x)]` (Y at fixed `x`).
pub fn modulus_1d(
    tri: &CurvedTriangle,
    field: &ScalarField,
    fixed: f64,
    axis: Axis,
    delta: f64,
    resolution: usize,
) -> Result<ModulusEstimate> {
    check_delta("delta", delta)?;
    check_resolution(resolution)?;
    let span = match axis {
        Axis::X => tri.hyp_g(fixed)?,
        Axis::Y => tri.hyp_f(fixed)?,
    };
    let mut estimate = ModulusEstimate {
        delta,
        delta2: None,
        value: 0.0,
        resolution,
    };
    if span <= COLLAPSE_EPS {
        return Ok(estimate);
    }
    let gap = span / (resolution - 1) as f64;
    let vals: Vec<f64> = (0..resolution)
        .map(|k| {
            let u = (k as f64 * gap).min(span);
            match axis {
                Axis::X => field.eval(u, fixed),
                Axis::Y => field.eval(fixed, u),
            }
        })
        .collect();
    let half = window_steps(delta, gap, resolution);
    let wmax = sliding_extreme(&vals, half, true);
    let wmin = sliding_extreme(&vals, half, false);
    let mut best: f64 = 0.0;
    for (i, v) in vals.iter().enumerate() {
        best = best.max(wmax[i] - v).max(v - wmin[i]);
    }
    estimate.value = best;
    Ok(estimate)
}

/// Bivariate modulus of continuity: sup of `|F(p) - F(q)|` over lattice
/// point pairs inside the triangle with `|dx| <= delta1`, `|dy| <= delta2`.
pub fn modulus_2d(
    tri: &CurvedTriangle,
    field: &ScalarField,
    delta1: f64,
    delta2: f64,
    resolution: usize,
) -> Result<ModulusEstimate> {
    check_delta("delta1", delta1)?;
    check_delta("delta2", delta2)?;
    check_resolution(resolution)?;
    let n = resolution;
    let h = tri.h();
    let gap = h / (n - 1) as f64;

    let mut vals = vec![f64::NAN; n * n];
    for iy in 0..n {
        let y = (iy as f64 * gap).min(h);
        for ix in 0..n {
            let x = (ix as f64 * gap).min(h);
            if tri.contains(x, y, 0.0) {
                vals[iy * n + ix] = field.eval(x, y);
            }
        }
    }

    let wx = window_steps(delta1, gap, n);
    let wy = window_steps(delta2, gap, n);

    // separable rectangular window: rows first, then columns
    let mut rmax = vec![f64::NEG_INFINITY; n * n];
    let mut rmin = vec![f64::INFINITY; n * n];
    for iy in 0..n {
        let row = &vals[iy * n..(iy + 1) * n];
        rmax[iy * n..(iy + 1) * n].copy_from_slice(&sliding_extreme(row, wx, true));
        rmin[iy * n..(iy + 1) * n].copy_from_slice(&sliding_extreme(row, wx, false));
    }

    let mut best: f64 = 0.0;
    let mut col_max = vec![0.0; n];
    let mut col_min = vec![0.0; n];
    for ix in 0..n {
        for iy in 0..n {
            col_max[iy] = rmax[iy * n + ix];
            col_min[iy] = rmin[iy * n + ix];
        }
        let cmax = sliding_extreme(&col_max, wy, true);
        let cmin = sliding_extreme(&col_min, wy, false);
        for iy in 0..n {
            let v = vals[iy * n + ix];
            if v.is_nan() {
                continue;
            }
            best = best.max(cmax[iy] - v).max(v - cmin[iy]);
        }
    }

    Ok(ModulusEstimate {
        delta: delta1,
        delta2: Some(delta2),
        value: best,
        resolution,
    })
}

/// `(Qx e20)(x, y) - x^2 = g(y)^2 E2(x / g(y)) - x^2`, with `E2` the
/// closed-form univariate second moment. Nonnegative up to rounding; zero on
/// `Gamma1` and `Gamma3`. Falls back to direct summation for `m = 1`.
pub fn moment_gap_x(tri: &CurvedTriangle, params: &BivariateParams, x: f64, y: f64) -> Result<f64> {
    ensure_inside(tri, x, y)?;
    let span = tri.hyp_g(y.clamp(0.0, tri.h()))?;
    if span <= COLLAPSE_EPS {
        return Ok(0.0);
    }
    let t = (x / span).clamp(0.0, 1.0);
    Ok(span * span * directional_second_moment(params.x_dir(), t)? - x * x)
}

/// `(Qy e02)(x, y) - y^2`, the y-direction mirror of [`moment_gap_x`].
pub fn moment_gap_y(tri: &CurvedTriangle, params: &BivariateParams, x: f64, y: f64) -> Result<f64> {
    ensure_inside(tri, x, y)?;
    let span = tri.hyp_f(x.clamp(0.0, tri.h()))?;
    if span <= COLLAPSE_EPS {
        return Ok(0.0);
    }
    let t = (y / span).clamp(0.0, 1.0);
    Ok(span * span * directional_second_moment(params.y_dir(), t)? - y * y)
}

fn directional_second_moment(p: &CheneySharmaParams, t: f64) -> Result<f64> {
    if p.m() >= 2 {
        second_moment(p, t)
    } else {
        let row = basis_weights(p, t)?;
        Ok(row
            .weights()
            .iter()
            .enumerate()
            .map(|(i, wi)| wi * (i as f64 / p.m() as f64).powi(2))
            .sum())
    }
}

fn checked_gap(gap: f64) -> Result<f64> {
    if gap < -GAP_TOL {
        Err(Error::NegativeGap(gap))
    } else {
        Ok(gap.max(0.0))
    }
}

/// Directional remainder bound `(1 + sqrt(gap)/delta) omega(delta)` for the
/// chosen axis. With an exact modulus upper bound this certifies
/// `|F - Q F|` at `(x, y)`.
#[allow(clippy::too_many_arguments)]
pub fn bound_directional(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
    delta: f64,
    axis: Axis,
    source: &ModulusSource,
) -> Result<f64> {
    check_delta("delta", delta)?;
    let gap = checked_gap(match axis {
        Axis::X => moment_gap_x(tri, params, x, y)?,
        Axis::Y => moment_gap_y(tri, params, x, y)?,
    })?;
    let omega = match axis {
        Axis::X => source.omega_1d(tri, field, y, Axis::X, delta)?,
        Axis::Y => source.omega_1d(tri, field, x, Axis::Y, delta)?,
    };
    Ok((1.0 + gap.sqrt() / delta) * omega)
}

/// Product remainder bound
/// `(gap_x + gap_y + 1) omega(1/sqrt(gap_x), 1/sqrt(gap_y))`.
///
/// Where either gap vanishes the radii degenerate and the bound is returned
/// as 0; meaningful as a certified bound on interior points.
pub fn bound_product(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
    source: &ModulusSource,
) -> Result<f64> {
    let gx = checked_gap(moment_gap_x(tri, params, x, y)?)?;
    let gy = checked_gap(moment_gap_y(tri, params, x, y)?)?;
    if gx == 0.0 || gy == 0.0 {
        return Ok(0.0);
    }
    let d1 = 1.0 / gx.sqrt();
    let d2 = 1.0 / gy.sqrt();
    Ok((gx + gy + 1.0) * source.omega_2d(tri, field, d1, d2)?)
}

/// Boolean-sum remainder bound: the three-term sum of the two directional
/// bounds at radii `1/sqrt(gap)` plus the product bound. Follows from the
/// identity `F - S1 F = (F - Qx F) + (F - Qy F) - (F - P1 F)`.
pub fn bound_boolean(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
    source: &ModulusSource,
) -> Result<f64> {
    let gx = checked_gap(moment_gap_x(tri, params, x, y)?)?;
    let gy = checked_gap(moment_gap_y(tri, params, x, y)?)?;
    if gx == 0.0 || gy == 0.0 {
        return Ok(0.0);
    }
    let d1 = 1.0 / gx.sqrt();
    let d2 = 1.0 / gy.sqrt();
    let t1 = (1.0 + gx) * source.omega_1d(tri, field, y, Axis::X, d1)?;
    let t2 = (1.0 + gy) * source.omega_1d(tri, field, x, Axis::Y, d2)?;
    let t3 = (gx + gy + 1.0) * source.omega_2d(tri, field, d1, d2)?;
    Ok(t1 + t2 + t3)
}

fn kernel_value(point: f64, s: f64, weights: &[f64], span: f64, m: usize) -> f64 {
    let lead = (point - s).max(0.0);
    let sum: f64 = weights
        .iter()
        .enumerate()
        .map(|(i, wi)| wi * (i as f64 * span / m as f64 - s).max(0.0))
        .sum();
    lead - sum
}

/// One sampled x-direction kernel value at `(x, y; s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeanoKernelPoint {
    pub x: f64,
    pub y: f64,
    /// Integration variable in `[0, g(y)]`.
    pub s: f64,
    /// Nonpositive up to rounding.
    pub value: f64,
}

/// Samples the x-direction Peano kernel on a `count`-point equispaced
/// `s`-grid of `[0, g(y)]`, with the basis row computed once.
pub fn peano_kernel_profile(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    x: f64,
    y: f64,
    count: usize,
) -> Result<Vec<PeanoKernelPoint>> {
    check_resolution(count)?;
    ensure_inside(tri, x, y)?;
    let span = tri.hyp_g(y.clamp(0.0, tri.h()))?;
    if span <= COLLAPSE_EPS {
        return Ok((0..count)
            .map(|_| PeanoKernelPoint {
                x,
                y,
                s: 0.0,
                value: 0.0,
            })
            .collect());
    }
    let p = params.x_dir();
    let t = (x / span).clamp(0.0, 1.0);
    let row = basis_weights(p, t)?;
    Ok((0..count)
        .map(|k| {
            let s = span * k as f64 / (count - 1) as f64;
            PeanoKernelPoint {
                x,
                y,
                s,
                value: kernel_value(x, s, row.weights(), span, p.m()),
            }
        })
        .collect())
}

/// X-direction Peano kernel
/// `K(x, y; s) = (x - s)_+ - sum_i q_{m,i}(x,y) (i g(y)/m - s)_+`
/// for `s` in `[0, g(y)]`. Nonpositive everywhere on the admissible range.
pub fn peano_kernel(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    x: f64,
    y: f64,
    s: f64,
) -> Result<f64> {
    ensure_inside(tri, x, y)?;
    let span = tri.hyp_g(y.clamp(0.0, tri.h()))?;
    if s < -1e-12 || s > span + 1e-12 || !s.is_finite() {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            lo: 0.0,
            hi: span,
        });
    }
    if span <= COLLAPSE_EPS {
        return Ok(0.0);
    }
    let s = s.clamp(0.0, span);
    let p = params.x_dir();
    let t = (x / span).clamp(0.0, 1.0);
    let row = basis_weights(p, t)?;
    Ok(kernel_value(x, s, row.weights(), span, p.m()))
}

/// Directional remainder through the Peano representation:
/// `(R F)(x, y) = integral of K(x, y; s) d2F(s) ds` over the partition
/// interval, for fields with the matching analytic second partial.
///
/// The kernel is piecewise linear with kinks at the partition nodes and at
/// the evaluation point, so the quadrature panels are split there; each
/// smooth piece gets a 32-point Gauss-Legendre rule.
pub fn peano_remainder(
    tri: &CurvedTriangle,
    params: &BivariateParams,
    field: &ScalarField,
    x: f64,
    y: f64,
    axis: Axis,
) -> Result<f64> {
    ensure_inside(tri, x, y)?;
    let h = tri.h();
    match axis {
        Axis::X => {
            if field.dxx(0.0, 0.0).is_none() {
                return Err(Error::MissingDerivative {
                    field: field.name().to_string(),
                    which: "second x-derivative",
                });
            }
            let span = tri.hyp_g(y.clamp(0.0, h))?;
            if span <= COLLAPSE_EPS {
                return Ok(0.0);
            }
            let p = params.x_dir();
            let t = (x / span).clamp(0.0, 1.0);
            let row = basis_weights(p, t)?;
            Ok(integrate_kernel(row.weights(), span, p.m(), x, |s| {
                field.dxx(s, y).unwrap()
            }))
        }
        Axis::Y => {
            if field.dyy(0.0, 0.0).is_none() {
                return Err(Error::MissingDerivative {
                    field: field.name().to_string(),
                    which: "second y-derivative",
                });
            }
            let span = tri.hyp_f(x.clamp(0.0, h))?;
            if span <= COLLAPSE_EPS {
                return Ok(0.0);
            }
            let p = params.y_dir();
            let t = (y / span).clamp(0.0, 1.0);
            let row = basis_weights(p, t)?;
            Ok(integrate_kernel(row.weights(), span, p.m(), y, |s| {
                field.dyy(x, s).unwrap()
            }))
        }
    }
}

fn integrate_kernel(
    weights: &[f64],
    span: f64,
    m: usize,
    point: f64,
    d2: impl Fn(f64) -> f64,
) -> f64 {
    let mut cuts: Vec<f64> = (0..=m).map(|i| i as f64 * span / m as f64).collect();
    cuts.push(point.clamp(0.0, span));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * span.max(1.0));

    let (nodes, gauss_w) = gauss_legendre_32();
    let mut acc = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let center = 0.5 * (a + b);
        let radius = 0.5 * (b - a);
        let mut piece = 0.0;
        for (xi, wi) in nodes.iter().zip(gauss_w) {
            let s = center + radius * xi;
            piece += wi * kernel_value(point, s, weights, span, m) * d2(s);
        }
        acc += radius * piece;
    }
    acc
}

static GL32: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();

fn gauss_legendre_32() -> &'static (Vec<f64>, Vec<f64>) {
    GL32.get_or_init(|| gauss_legendre(32))
}

/// Nodes and weights of the n-point Gauss-Legendre rule on `[-1, 1]`,
/// via Newton iteration on the Legendre three-term recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let mut p_cur = 1.0;
            let mut p_prev = 0.0;
            for j in 1..=n {
                let p_old = p_prev;
                p_prev = p_cur;
                p_cur = ((2 * j - 1) as f64 * z * p_prev - (j - 1) as f64 * p_old) / j as f64;
            }
            deriv = n as f64 * (z * p_cur - p_prev) / (z * z - 1.0);
            let step = p_cur / deriv;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * deriv * deriv);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
