//! The impartial-culture constant
//! `C_k = ∫_{[0,∞)^(2k-1)} exp(-σ_k(x)) dx` and the large-`n` / large-`k`
//! formulas.
//!
//! `C_k` is computed on a truncated cube `[0, a]^(2k-1)`. The truncation
//! error is bounded rigorously by
//! `m (m-1) ((m-1)!)^2 a^(-(m-ℓ)/(ℓ-1))` (here `ℓ = k`, `m = 2k - 1`, so the
//! exponent is `-1`); the quadrature error is an empirical estimate from
//! doubling the number of graded cells. Both are reported.
//!
//! The last coordinate is integrated analytically: `σ_ℓ` is affine in
//! `x_m`, `σ_ℓ(x) = σ_ℓ(x') + x_m σ_(ℓ-1)(x')`, so
//! `∫_0^∞ exp(-σ_ℓ(x)) dx_m = exp(-σ_ℓ(x')) / σ_(ℓ-1)(x')`.
//! Leaving `x_m` untruncated only removes part of the tail, so the same
//! bound still applies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_symmetric, symmetric_evaluations, GradedRule};
use crate::special::{binomial_f64, elementary_symmetric_all};

#[derive(Clone, Debug)]
pub struct QuadratureConfig {
    /// Largest `k` accepted by [`estimate_c_k`].
    pub max_k: usize,
    /// Budget on integrand calls for a single refinement level.
    pub max_evaluations: f64,
    pub points_per_cell: usize,
    pub initial_cells: usize,
    /// Width of the first cell `[0, first_cell]`.
    pub first_cell: f64,
    pub workers: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            max_k: 3,
            max_evaluations: 2e9,
            points_per_cell: 6,
            initial_cells: 12,
            first_cell: 1e-10,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedIntegral {
    pub value: f64,
    /// `|I(2c) - I(c)|` between the last two refinement levels.
    pub quadrature_error: f64,
    pub cells: usize,
    pub evaluations: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CkEstimate {
    pub k: usize,
    pub value: f64,
    pub quadrature_error: f64,
    pub truncation_bound: f64,
    pub truncation_a: f64,
    pub cells: usize,
}

impl CkEstimate {
    pub fn total_error(&self) -> f64 {
        self.quadrature_error + self.truncation_bound
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Tail bound for `∫ exp(-σ_ℓ)` over `[0,∞)^m` minus `[0,a]^m`, `2 <= ℓ < m`.
pub fn orthant_tail_bound(order: usize, m: usize, a: f64) -> Result<f64> {
    if order < 2 || order >= m || a < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "tail bound needs 2 <= ℓ < m and a >= 1 (ℓ = {order}, m = {m}, a = {a})"
        )));
    }
    let exponent = (m - order) as f64 / (order - 1) as f64;
    Ok(m as f64 * (m - 1) as f64 * factorial(m - 1).powi(2) * a.powf(-exponent))
}

/// Smallest `a >= 1` whose tail bound is at most `target`.
pub fn truncation_for(order: usize, m: usize, target: f64) -> Result<f64> {
    let at_one = orthant_tail_bound(order, m, 1.0)?;
    let exponent = (m - order) as f64 / (order - 1) as f64;
    Ok((at_one / target).powf(1.0 / exponent).max(1.0))
}

fn refine<F>(
    dim: usize,
    a: f64,
    f: &F,
    target: f64,
    cfg: &QuadratureConfig,
) -> Result<TruncatedIntegral>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let first = cfg.first_cell.min(a);
    let level = |cells: usize| -> Result<f64> {
        let rule = GradedRule::new(a, cells, cfg.points_per_cell, first)?;
        integrate_symmetric(&rule, dim, f, cfg.workers)
    };
    let evals = |cells: usize| symmetric_evaluations(cells * cfg.points_per_cell, dim);
    let mut cells = cfg.initial_cells.max(1);
    let mut previous = level(cells)?;
    loop {
        let next_cells = cells * 2;
        if evals(next_cells) > cfg.max_evaluations {
            return Err(Error::Unattainable {
                target,
                budget: cfg.max_evaluations as u64,
                reached: f64::INFINITY,
            });
        }
        let current = level(next_cells)?;
        let error = (current - previous).abs();
        if error <= target {
            return Ok(TruncatedIntegral {
                value: current,
                quadrature_error: error,
                cells: next_cells,
                evaluations: evals(next_cells),
            });
        }
        if evals(next_cells * 2) > cfg.max_evaluations {
            return Err(Error::Unattainable {
                target,
                budget: cfg.max_evaluations as u64,
                reached: error,
            });
        }
        previous = current;
        cells = next_cells;
    }
}

fn check_orders(order: usize, m: usize) -> Result<()> {
    if order == 0 || order >= m || m > 5 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= ℓ < m <= 5, got ℓ = {order}, m = {m}"
        )));
    }
    Ok(())
}

/// `∫_{[0,a]^m} exp(-σ_ℓ(x)) dx`, quadrature refined to `target`.
pub fn integrate_full(
    order: usize,
    m: usize,
    a: f64,
    target: f64,
    cfg: &QuadratureConfig,
) -> Result<TruncatedIntegral> {
    check_orders(order, m)?;
    let f = move |x: &[f64]| (-elementary_symmetric_all(x)[order]).exp();
    refine(m, a, &f, target, cfg)
}

/// `∫_{[0,a]^(m-1)} exp(-σ_ℓ(x')) / σ_(ℓ-1)(x') dx'`: the last coordinate
/// integrated over `[0, ∞)` in closed form.
pub fn integrate_reduced(
    order: usize,
    m: usize,
    a: f64,
    target: f64,
    cfg: &QuadratureConfig,
) -> Result<TruncatedIntegral> {
    check_orders(order, m)?;
    let f = move |x: &[f64]| {
        let e = elementary_symmetric_all(x);
        (-e[order]).exp() / e[order - 1]
    };
    refine(m - 1, a, &f, target, cfg)
}

/// Estimate `C_k` with total reported error at most `target_error`.
pub fn estimate_c_k(k: usize, target_error: f64, cfg: &QuadratureConfig) -> Result<CkEstimate> {
    if k == 0 || k > cfg.max_k {
        return Err(Error::InvalidArgument(format!(
            "C_k supported for 1 <= k <= {}, got {k}",
            cfg.max_k
        )));
    }
    if target_error.is_nan() || target_error <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "target error must be positive, got {target_error}"
        )));
    }
    let half = target_error / 2.0;
    if k == 1 {
        // ∫_0^∞ e^{-x} dx: the tail beyond a is exactly e^{-a}
        let a = (1.0 / half).ln().max(1.0);
        let f = |x: &[f64]| (-x[0]).exp();
        let r = refine(1, a, &f, half, cfg)?;
        return Ok(CkEstimate {
            k,
            value: r.value,
            quadrature_error: r.quadrature_error,
            truncation_bound: (-a).exp(),
            truncation_a: a,
            cells: r.cells,
        });
    }
    let m = 2 * k - 1;
    let a = truncation_for(k, m, half)?;
    let r = integrate_reduced(k, m, a, half, cfg)?;
    Ok(CkEstimate {
        k,
        value: r.value,
        quadrature_error: r.quadrature_error,
        truncation_bound: orthant_tail_bound(k, m, a)?,
        truncation_a: a,
        cells: r.cells,
    })
}

/// Leading impartial-culture term `C_k · n^(-(k-1)/k)`. The true
/// probability differs from it by `O_k((ln n)^(1/k) / n)` with an
/// unquantified constant.
pub fn impartial_asymptotic(n: u64, k: u64, ck: f64) -> Result<f64> {
    if n == 0 || k == 0 || ck.is_nan() || ck <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1, k >= 1, C_k > 0 (n = {n}, k = {k}, C_k = {ck})"
        )));
    }
    Ok(ck * (n as f64).powf(-((k - 1) as f64) / k as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinProbAsymptotics {
    /// `C(2k-1, k) · n^(-(k-1))`
    pub large_n_leading: f64,
    /// `ln(n^2 / (4(n-1)))`, present for `n >= 3`.
    pub large_k_rate: Option<f64>,
}

/// Exponential decay rate in `k` of the minimum probability for fixed `n >= 3`.
pub fn large_k_rate(n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "large-k rate needs n >= 3, got {n}"
        )));
    }
    let n = n as f64;
    Ok((n * n / (4.0 * (n - 1.0))).ln())
}

pub fn min_prob_asymptotics(n: u64, k: u64) -> Result<MinProbAsymptotics> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and k >= 1 (n = {n}, k = {k})"
        )));
    }
    Ok(MinProbAsymptotics {
        large_n_leading: binomial_f64(2 * k - 1, k) * (n as f64).powi(-((k - 1) as i32)),
        large_k_rate: large_k_rate(n).ok(),
    })
}
