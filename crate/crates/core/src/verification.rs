//! Executable checks of the inequalities behind the probability bounds.
//!
//! Every check produces a [`CheckReport`]. The margin of a trial is
//! `right side - left side` of the inequality being tested, so negative
//! margins are violations once they drop below the tolerance, and the
//! worst witness can be replayed through the matching `*_margin` function.

use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::asymptotics::{
    integrate_full, integrate_reduced, orthant_tail_bound, truncation_for, QuadratureConfig,
};
use crate::cultures::{mix_seed, SeededSampler};
use crate::error::{Error, Result};
use crate::model::Rational;
use crate::special::{
    binomial_f64, elementary_symmetric, p_k, p_k_complement, p_k_derivative, p_k_exact,
    poisson_binomial_tail,
};

pub const IDENTITY_TOLERANCE: f64 = 1e-12;
pub const OPTIMIZER_TOLERANCE: f64 = 1e-9;
pub const DERIVATIVE_TOLERANCE: f64 = 1e-6;
const TAYLOR_TOLERANCE: f64 = 1e-15;

/// Values of `n` used for the small-`Q` bound; each has `2 ln n / (n-1) <= 1/3`.
pub const SMALL_Q_NS: [u64; 6] = [20, 50, 100, 1_000, 10_000, 1_000_000];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub input: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: u64,
    pub violations: u64,
    pub worst_margin: f64,
    pub worst_witness: Option<Witness>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            trials: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            worst_witness: None,
        }
    }

    pub fn record(&mut self, input: &[f64], margin: f64, tolerance: f64) {
        self.record_exact(input, margin, margin < -tolerance || margin.is_nan());
    }

    /// Record a trial whose pass/fail verdict was decided elsewhere
    /// (e.g. in exact arithmetic); `margin` is informational.
    pub fn record_exact(&mut self, input: &[f64], margin: f64, violated: bool) {
        self.trials += 1;
        if violated {
            self.violations += 1;
        }
        if margin < self.worst_margin || self.worst_witness.is_none() || margin.is_nan() {
            self.worst_margin = margin;
            self.worst_witness = Some(Witness {
                input: input.to_vec(),
                margin,
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// `min(1 - t - e^(-t-t^2), e^(-t) - (1 - t))`.
pub fn taylor_margin(t: f64) -> Result<f64> {
    if !(0.0..=1.0 / 3.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("{t} is outside [0, 1/3]")));
    }
    let lower = (-t - t * t).exp();
    Ok((1.0 - t - lower).min((-t).exp() - (1.0 - t)))
}

/// `points` evenly spaced values covering `[0, 1/3]`.
pub fn taylor_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| i as f64 / (3 * (points - 1)) as f64)
            .map(|t| t.min(1.0 / 3.0))
            .collect(),
    }
}

pub fn check_taylor_bounds(grid: &[f64]) -> Result<CheckReport> {
    let mut report = CheckReport::new("taylor_bounds");
    for &t in grid {
        report.record(&[t], taylor_margin(t)?, TAYLOR_TOLERANCE);
    }
    Ok(report)
}

/// Smallest margin over the three `Q` / `σ_k` inequalities and, for each
/// `n` whose hypothesis `Q <= 2 ln n / (n-1)` holds, the sharper small-`Q` bound.
pub fn q_sigma_margin(k: usize, xs: &[f64], small_q_ns: &[u64]) -> Result<f64> {
    let q = poisson_binomial_tail(xs, k)?;
    let sigma = elementary_symmetric(k, xs)?;
    let kf = k as f64;
    let lower = 2f64.powi(1 - 2 * k as i32) * sigma;
    let second = sigma - 2f64.powi(4 * k as i32 - 2) * sigma.powf((kf + 1.0) / kf);
    let mut margin = (q - lower).min(sigma - q).min(q - second);
    if k >= 2 {
        for &n in small_q_ns {
            let ratio = (n as f64).ln() / (n - 1) as f64;
            if q <= 2.0 * ratio {
                let bound = (1.0 - 2f64.powi(4 * k as i32) * ratio.powf(1.0 / kf)) * sigma;
                margin = margin.min(q - bound);
            }
        }
    }
    Ok(margin)
}

fn corner_cases(m: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut cases = vec![vec![0.0; m], vec![1.0; m]];
    for x in [1e-9, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.75, 0.99] {
        cases.push(vec![x; m]);
    }
    for i in 0..m {
        let mut hot = vec![0.0; m];
        hot[i] = 1.0;
        cases.push(hot);
        let mut dropped: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
        dropped[i] = 0.0;
        cases.push(dropped);
    }
    for scale in [1e-2, 1e-4, 1e-8] {
        for _ in 0..20 {
            cases.push((0..m).map(|_| scale * rng.gen::<f64>()).collect());
        }
    }
    cases
}

/// Uniform random points of `[0,1]^(2k-1)` plus all-equal, one-hot,
/// one-zero and near-zero corners.
pub fn check_q_sigma_bounds(k: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let m = 2 * k - 1;
    let mut sampler = SeededSampler::new(seed, mix_seed(seed, &[0x51, k as u64]));
    let mut report = CheckReport::new(format!("q_sigma_bounds_k{k}"));
    for xs in corner_cases(m, sampler.rng()) {
        report.record(
            &xs,
            q_sigma_margin(k, &xs, &SMALL_Q_NS)?,
            IDENTITY_TOLERANCE,
        );
    }
    let mut xs = vec![0.0; m];
    for _ in 0..trials {
        for x in xs.iter_mut() {
            *x = sampler.rng().gen::<f64>();
        }
        report.record(
            &xs,
            q_sigma_margin(k, &xs, &SMALL_Q_NS)?,
            IDENTITY_TOLERANCE,
        );
    }
    Ok(report)
}

/// `p_k(x) + p_k(1 - x) = 1`, exactly on `x = i/200` and in floating point
/// on a fine grid.
pub fn check_pk_reflection(max_k: u64) -> Result<Vec<CheckReport>> {
    let mut exact = CheckReport::new("pk_reflection_exact");
    let mut float = CheckReport::new("pk_reflection_float");
    for k in 1..=max_k {
        for i in 0..=200u64 {
            let x = Rational::new(i.into(), 200u64.into());
            let sum = p_k_exact(k, &x)? + p_k_exact(k, &(Rational::one() - &x))?;
            let deviation = crate::model::rational_to_f64(&(sum.clone() - Rational::one())).abs();
            exact.record_exact(
                &[k as f64, i as f64 / 200.0],
                0.0 - deviation,
                sum != Rational::one(),
            );
        }
        for i in 0..=10_000u32 {
            let x = f64::from(i) / 10_000.0;
            let deviation = (p_k(k, x)? + p_k(k, 1.0 - x)? - 1.0).abs();
            float.record(&[k as f64, x], 0.0 - deviation, IDENTITY_TOLERANCE);
        }
    }
    Ok(vec![exact, float])
}

/// Relative error of the closed-form derivative against a central
/// difference. Differences are taken on whichever of `p_k` and `1 - p_k` is
/// smaller, which keeps the subtraction free of cancellation near `x = 1`.
pub fn derivative_relative_error(k: u64, x: f64, h: f64) -> Result<f64> {
    let analytic = p_k_derivative(k, x)?;
    let lower_half = p_k(k, x)? <= 0.5;
    let numeric = if lower_half {
        (p_k(k, x + h)? - p_k(k, x - h)?) / (2.0 * h)
    } else {
        (p_k_complement(k, x - h)? - p_k_complement(k, x + h)?) / (2.0 * h)
    };
    Ok((numeric - analytic).abs() / analytic.abs())
}

pub fn check_pk_derivative(max_k: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("pk_derivative");
    for k in 1..=max_k {
        for i in 1..=99u32 {
            let x = f64::from(i) / 100.0;
            let err = derivative_relative_error(k, x, 1e-6)?;
            report.record(&[k as f64, x], DERIVATIVE_TOLERANCE - err, 0.0);
        }
    }
    Ok(report)
}

/// `p_k'` non-decreasing on `[0, 1/2]` and midpoint convexity there.
pub fn check_pk_convexity(max_k: u64) -> Result<Vec<CheckReport>> {
    let mut monotone = CheckReport::new("pk_derivative_monotone");
    let mut midpoint = CheckReport::new("pk_midpoint_convexity");
    for k in 1..=max_k {
        let fine: Vec<f64> = (0..=1000u32).map(|i| f64::from(i) / 2000.0).collect();
        for pair in fine.windows(2) {
            let margin = p_k_derivative(k, pair[1])? - p_k_derivative(k, pair[0])?;
            monotone.record(&[k as f64, pair[0], pair[1]], margin, IDENTITY_TOLERANCE);
        }
        let coarse: Vec<f64> = (0..=100u32).map(|i| f64::from(i) / 200.0).collect();
        for (i, &a) in coarse.iter().enumerate() {
            for &b in &coarse[i + 1..] {
                let margin = (p_k(k, a)? + p_k(k, b)?) / 2.0 - p_k(k, (a + b) / 2.0)?;
                midpoint.record(&[k as f64, a, b], margin, IDENTITY_TOLERANCE);
            }
        }
    }
    Ok(vec![monotone, midpoint])
}

/// `n · p_k(1/n) <= 1` in exact arithmetic.
pub fn check_pk_sum_at_most_one(max_n: u64, max_k: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("pk_uniform_sum_at_most_one");
    for k in 1..=max_k {
        for n in 1..=max_n {
            let value = p_k_exact(k, &Rational::new(1.into(), n.into()))?
                * Rational::from_integer(n.into());
            let margin = crate::model::rational_to_f64(&(Rational::one() - &value));
            report.record_exact(&[n as f64, k as f64], margin, value > Rational::one());
        }
    }
    Ok(report)
}

/// Euclidean projection onto `{x >= 0, Σ x = 1}` by sorting.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentRun {
    pub value: f64,
    pub point: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Minimum {
    pub value: f64,
    pub argmin: Vec<f64>,
    /// Whether the run that produced `value` met the stationarity tolerance.
    pub converged: bool,
    pub runs: Vec<DescentRun>,
}

const MAX_ITERATIONS: usize = 20_000;
const STATIONARITY: f64 = 1e-12;

fn pk_sum(k: u64, x: &[f64]) -> f64 {
    x.iter()
        .map(|&xi| p_k(k, xi.clamp(0.0, 1.0)).expect("k >= 1 and x in [0, 1]"))
        .sum()
}

fn gradient(k: u64, x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&xi| p_k_derivative(k, xi.clamp(0.0, 1.0)).expect("k >= 1 and x in [0, 1]"))
        .collect()
}

fn stationarity(x: &[f64], g: &[f64]) -> f64 {
    let shifted: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
    project_to_simplex(&shifted)
        .iter()
        .zip(x)
        .map(|(p, a)| (p - a).abs())
        .fold(0.0, f64::max)
}

/// An upper bound on `|p_k''|` over `[0, 1]`, padded by 10% over a fine grid.
fn gradient_lipschitz(k: u64) -> f64 {
    if k == 1 {
        return 0.0;
    }
    let c = k as f64 * binomial_f64(2 * k - 1, k) * (k - 1) as f64;
    let sup = (0..=10_000u32)
        .map(|i| f64::from(i) / 10_000.0)
        .map(|x| (c * (x * (1.0 - x)).powi(k as i32 - 2) * (1.0 - 2.0 * x)).abs())
        .fold(0.0, f64::max);
    1.1 * sup
}

/// Projected gradient descent from `start`. Steps start large and are
/// halved until the quadratic model bounds the new value, but never below
/// `1 / L`, which always decreases the objective; that floor keeps the
/// iteration moving once value differences fall under rounding noise.
pub fn descend(k: u64, start: &[f64]) -> DescentRun {
    let safe = 1.0 / gradient_lipschitz(k).max(1e-6);
    let mut x = project_to_simplex(start);
    let mut fx = pk_sum(k, &x);
    let mut step: f64 = safe;
    for iteration in 0..MAX_ITERATIONS {
        let g = gradient(k, &x);
        if stationarity(&x, &g) <= STATIONARITY {
            return DescentRun {
                value: fx,
                point: x,
                converged: true,
                iterations: iteration,
            };
        }
        step = (step * 2.0).min(1e6);
        loop {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let next = project_to_simplex(&trial);
            let diff: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
            let linear: f64 = diff.iter().zip(&g).map(|(d, gi)| d * gi).sum();
            let quad: f64 = diff.iter().map(|d| d * d).sum::<f64>() / (2.0 * step);
            let f_next = pk_sum(k, &next);
            if f_next <= fx + linear + quad || step <= safe {
                x = next;
                fx = f_next;
                break;
            }
            step = (step / 2.0).max(safe);
        }
    }
    DescentRun {
        value: fx,
        point: x,
        converged: false,
        iterations: MAX_ITERATIONS,
    }
}

/// Multi-start minimisation of `Σ p_k(x_i)` over the simplex; starting
/// points are Dirichlet(1) draws from stream `(seed, n, k, start)`.
pub fn minimize_pk_sum(n: usize, k: u64, starts: usize, seed: u64, tol: f64) -> Result<Minimum> {
    if n == 0 || k == 0 || starts == 0 || tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1, k >= 1, starts >= 1, tol > 0 (n = {n}, k = {k}, starts = {starts}, tol = {tol})"
        )));
    }
    let runs: Vec<DescentRun> = (0..starts)
        .map(|s| {
            let mut sampler = SeededSampler::new(seed, mix_seed(seed, &[n as u64, k, s as u64]));
            let raw: Vec<f64> = (0..n)
                .map(|_| -(1.0 - sampler.rng().gen::<f64>()).ln())
                .collect();
            let total: f64 = raw.iter().sum();
            let start: Vec<f64> = raw.iter().map(|r| r / total).collect();
            descend(k, &start)
        })
        .collect();
    let best = runs
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one start");
    Ok(Minimum {
        value: best.value,
        argmin: best.point.clone(),
        converged: best.converged,
        runs: runs.clone(),
    })
}

fn uniform_value(n: usize, k: u64) -> f64 {
    n as f64 * p_k(k, 1.0 / n as f64).expect("k >= 1")
}

/// Relative spread of `x(1-x)` over the coordinates `>= 0.05` of a
/// stationary point whose largest coordinate lies in `(1/2, 1)`.
pub fn first_order_margin(point: &[f64]) -> Option<f64> {
    let top = point.iter().cloned().fold(0.0, f64::max);
    if !(top > 0.5 && top < 1.0) {
        return None;
    }
    let reference = top * (1.0 - top);
    Some(
        point
            .iter()
            .filter(|&&x| x >= 0.05)
            .map(|&x| (x * (1.0 - x) - reference).abs() / reference)
            .fold(0.0, f64::max),
    )
}

/// For every `n <= max_n` and `k <= max_k`: no descent run ends below
/// `n p_k(1/n)`, and converged runs with a coordinate above `1/2` satisfy
/// the first-order condition.
pub fn check_optimizer(
    max_n: usize,
    max_k: u64,
    starts: usize,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let mut lower = CheckReport::new("optimizer_lower_bound");
    let mut first_order = CheckReport::new("optimizer_first_order");
    for n in 1..=max_n {
        for k in 1..=max_k {
            let min = minimize_pk_sum(n, k, starts, seed, OPTIMIZER_TOLERANCE)?;
            let floor = uniform_value(n, k);
            for run in &min.runs {
                let mut input = vec![n as f64, k as f64];
                input.extend(&run.point);
                lower.record(&input, run.value - floor, OPTIMIZER_TOLERANCE);
                if k >= 2 && run.converged {
                    if let Some(spread) = first_order_margin(&run.point) {
                        first_order.record(&input, DERIVATIVE_TOLERANCE - spread, 0.0);
                    }
                }
            }
        }
    }
    Ok(vec![lower, first_order])
}

/// Truncated `∫_{[0,a]^m} exp(-σ_ℓ)`: at most `(m!)^2`, and for `ℓ >= 2` at
/// least the full integral minus the tail bound. The full integral is
/// estimated with the last coordinate integrated out analytically on a
/// cube large enough that its own tail is negligible; all quadrature
/// errors are credited to the inequality.
pub fn check_integral_bounds(
    order: usize,
    m: usize,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<CheckReport> {
    if m > 5 || order == 0 || order >= m || a < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= ℓ < m <= 5 and a >= 1 (ℓ = {order}, m = {m}, a = {a})"
        )));
    }
    let mut report = CheckReport::new(format!("integral_bounds_l{order}_m{m}"));
    let target = 1e-3;
    let truncated = integrate_full(order, m, a, target, cfg)?;
    let factorial: f64 = (1..=m).map(|i| i as f64).product();
    report.record(
        &[order as f64, m as f64, a],
        factorial * factorial - truncated.value,
        IDENTITY_TOLERANCE,
    );
    if order == 1 {
        // ∫_{[0,∞)^m} e^{-Σx} = 1 and the tail is 1 - (1 - e^{-a})^m
        let tail = 1.0 - (1.0 - (-a).exp()).powi(m as i32);
        let margin = truncated.value + tail + truncated.quadrature_error - 1.0;
        report.record(&[order as f64, m as f64, a], margin, IDENTITY_TOLERANCE);
        let upper = 1.0 + truncated.quadrature_error - truncated.value;
        report.record(&[order as f64, m as f64, a], upper, IDENTITY_TOLERANCE);
    } else {
        let big = truncation_for(order, m, target)?.max(a);
        let full = integrate_reduced(order, m, big, target, cfg)?;
        let full_error = full.quadrature_error + orthant_tail_bound(order, m, big)?;
        let bound = orthant_tail_bound(order, m, a)?;
        let margin = truncated.value + bound + truncated.quadrature_error + full_error - full.value;
        report.record(&[order as f64, m as f64, a], margin, IDENTITY_TOLERANCE);
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Taylor,
    QSigma,
    Pk,
    Optimizer,
    Integral,
}

impl Suite {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text {
            "all" => Suite::All,
            "taylor" => Suite::Taylor,
            "qsigma" => Suite::QSigma,
            "pk" => Suite::Pk,
            "optimizer" => Suite::Optimizer,
            "integral" => Suite::Integral,
            other => {
                return Err(Error::InvalidArgument(format!(
                "unknown suite {other:?} (expected all, taylor, qsigma, pk, optimizer or integral)"
            )))
            }
        })
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    if suite.includes(Suite::Taylor) {
        reports.push(check_taylor_bounds(&taylor_grid(10_000))?);
    }
    if suite.includes(Suite::QSigma) {
        for k in 1..=4 {
            reports.push(check_q_sigma_bounds(k, 10_000, seed)?);
        }
    }
    if suite.includes(Suite::Pk) {
        reports.extend(check_pk_reflection(6)?);
        reports.push(check_pk_derivative(6)?);
        reports.extend(check_pk_convexity(6)?);
        reports.push(check_pk_sum_at_most_one(1000, 10)?);
    }
    if suite.includes(Suite::Optimizer) {
        reports.extend(check_optimizer(8, 4, 100, seed)?);
    }
    if suite.includes(Suite::Integral) {
        let cfg = QuadratureConfig::default();
        reports.push(check_integral_bounds(1, 2, 10.0, &cfg)?);
        reports.push(check_integral_bounds(1, 3, 10.0, &cfg)?);
        reports.push(check_integral_bounds(2, 3, 40.0, &cfg)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_examples() {
        assert_eq!(taylor_margin(0.0).unwrap(), 0.0);
        let t: f64 = 1.0 / 3.0;
        let (lo, mid, hi) = ((-t - t * t).exp(), 1.0 - t, (-t).exp());
        assert!((lo - 0.6412).abs() < 1e-4 && (hi - 0.7165).abs() < 1e-4);
        assert!(lo <= mid && mid <= hi);
        let t: f64 = 0.2;
        let (lo, hi) = ((-t - t * t).exp(), (-t).exp());
        assert!((lo - 0.7866).abs() < 1e-4 && (hi - 0.8187).abs() < 1e-4);
        assert!(taylor_margin(0.34).is_err());
        assert!(check_taylor_bounds(&[0.5]).is_err());
        let grid = taylor_grid(10_000);
        assert_eq!(grid.len(), 10_000);
        assert_eq!(*grid.last().unwrap(), 1.0 / 3.0);
        let report = check_taylor_bounds(&grid).unwrap();
        assert!(report.passed(), "{report:?}");
        let w = report.worst_witness.unwrap();
        assert_eq!(taylor_margin(w.input[0]).unwrap(), w.margin);
    }

    #[test]
    fn small_q_ns_satisfy_hypothesis() {
        for n in SMALL_Q_NS {
            assert!(2.0 * (n as f64).ln() / (n - 1) as f64 <= 1.0 / 3.0);
        }
    }

    #[test]
    fn q_sigma_suite_and_replay() {
        for k in 1..=4 {
            let report = check_q_sigma_bounds(k, 2_000, 11).unwrap();
            assert!(report.passed(), "{report:?}");
            let w = report.worst_witness.unwrap();
            assert_eq!(q_sigma_margin(k, &w.input, &SMALL_Q_NS).unwrap(), w.margin);
            assert_eq!(
                check_q_sigma_bounds(k, 2_000, 11).unwrap().worst_margin,
                report.worst_margin
            );
        }
        // one vanished coordinate
        assert!(q_sigma_margin(2, &[0.0, 0.4, 0.7], &SMALL_Q_NS).unwrap() >= -1e-12);
        // equal coordinates: Q = p_k(x) <= C(2k-1, k) x^k
        let x = 0.3;
        let q = poisson_binomial_tail(&[x; 5], 3).unwrap();
        assert!((q - p_k(3, x).unwrap()).abs() < 1e-15);
        assert!(q <= 10.0 * x.powi(3));
    }

    #[test]
    fn pk_checks_pass() {
        for r in check_pk_reflection(4).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
        let d = check_pk_derivative(6).unwrap();
        assert!(d.passed(), "{d:?}");
        for r in check_pk_convexity(4).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
        assert!(check_pk_sum_at_most_one(60, 5).unwrap().passed());
        assert!(derivative_relative_error(6, 0.99, 1e-6).unwrap() < 1e-6);
    }

    #[test]
    fn projection_onto_simplex() {
        assert_eq!(project_to_simplex(&[0.2, 0.3, 0.5]), vec![0.2, 0.3, 0.5]);
        assert_eq!(project_to_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_to_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        let p = project_to_simplex(&[-1.0, 3.0, 0.2, 0.9]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(p.iter().all(|&x| x >= 0.0));
    }

    /// Oracle: grid search over the 2-simplex at resolution 1e-3.
    fn grid_minimum_n3(k: u64) -> (f64, [f64; 3]) {
        let steps = 1000;
        let mut best = (f64::INFINITY, [0.0; 3]);
        for i in 0..=steps {
            for j in 0..=steps - i {
                let x = [
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    (steps - i - j) as f64 / steps as f64,
                ];
                let v = pk_sum(k, &x);
                if v < best.0 {
                    best = (v, x);
                }
            }
        }
        best
    }

    #[test]
    fn optimizer_three_alternatives() {
        let min = minimize_pk_sum(3, 2, 50, 5, OPTIMIZER_TOLERANCE).unwrap();
        let (grid_value, grid_point) = grid_minimum_n3(2);
        assert!((min.value - 7.0 / 9.0).abs() < 1e-9, "{}", min.value);
        assert!(min.value <= grid_value + 1e-12);
        for (x, g) in min.argmin.iter().zip(grid_point) {
            assert!((x - 1.0 / 3.0).abs() < 1e-3);
            assert!((x - g).abs() <= 1e-3 + 1e-12);
        }
        assert!(min.converged);
    }

    #[test]
    fn optimizer_constant_objectives() {
        let m = minimize_pk_sum(2, 3, 10, 1, OPTIMIZER_TOLERANCE).unwrap();
        assert!(m.runs.iter().all(|r| (r.value - 1.0).abs() < 1e-12));
        let m = minimize_pk_sum(6, 1, 10, 1, OPTIMIZER_TOLERANCE).unwrap();
        assert!(m.runs.iter().all(|r| (r.value - 1.0).abs() < 1e-12));
        assert!(minimize_pk_sum(0, 2, 10, 1, 1e-9).is_err());
        assert!(minimize_pk_sum(3, 2, 10, 1, 0.0).is_err());
    }

    #[test]
    fn optimizer_small_grid() {
        for r in check_optimizer(5, 3, 20, 3).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn integral_bound_examples() {
        let cfg = QuadratureConfig::default();
        let r = check_integral_bounds(1, 2, 10.0, &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_integral_bounds(2, 3, 40.0, &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        let t = integrate_full(2, 3, 40.0, 1e-3, &cfg).unwrap();
        assert!(t.value <= 36.0);
        let reference = std::f64::consts::PI.powf(1.5) / 2.0;
        assert!(t.value <= reference && reference - t.value <= 0.6, "{t:?}");
        assert!(check_integral_bounds(2, 6, 40.0, &cfg).is_err());
        assert!(check_integral_bounds(3, 3, 40.0, &cfg).is_err());
        assert!(check_integral_bounds(2, 3, 0.5, &cfg).is_err());
    }

    #[test]
    fn suite_names() {
        assert_eq!(Suite::parse("all").unwrap(), Suite::All);
        assert!(Suite::parse("everything").is_err());
        let reports = run_suite(Suite::Taylor, 1).unwrap();
        assert_eq!(reports.len(), 1);
    }
}
