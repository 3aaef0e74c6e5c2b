//! Tensor-product Gauss–Legendre rules on geometrically graded meshes.
//!
//! The integrands here live on `[0, a]^d`, are symmetric under permuting
//! coordinates, and keep their size along the coordinate axes, so cells are
//! spaced geometrically from a tiny first cell up to `a`, and the tensor sum
//! visits only sorted index tuples, each weighted by its number of
//! distinct permutations.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    let n = points;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A composite 1-D rule on `[0, a]` with geometrically growing cells.
#[derive(Clone, Debug)]
pub struct GradedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GradedRule {
    /// `cells` cells: `[0, first]`, then geometric steps from `first` to `a`.
    pub fn new(a: f64, cells: usize, points_per_cell: usize, first: f64) -> Result<Self> {
        if a.is_nan()
            || a <= 0.0
            || cells == 0
            || points_per_cell == 0
            || first.is_nan()
            || first <= 0.0
            || first > a
        {
            return Err(Error::InvalidArgument(format!(
                "graded rule needs 0 < first <= a, cells >= 1, points >= 1 (a = {a}, first = {first}, cells = {cells})"
            )));
        }
        let mut breaks = vec![0.0];
        if cells == 1 {
            breaks.push(a);
        } else {
            let ratio = (a / first).powf(1.0 / (cells - 1) as f64);
            breaks.extend((0..cells).map(|j| first * ratio.powi(j as i32)));
            *breaks.last_mut().expect("non-empty") = a;
        }
        let (gx, gw) = gauss_legendre(points_per_cell);
        let mut nodes = Vec::with_capacity(cells * points_per_cell);
        let mut weights = Vec::with_capacity(cells * points_per_cell);
        for cell in breaks.windows(2) {
            let (lo, hi) = (cell[0], cell[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Number of sorted `dim`-tuples over `len` nodes, i.e. integrand calls.
pub fn symmetric_evaluations(len: usize, dim: usize) -> f64 {
    (0..dim).fold(1.0, |acc, i| acc * (len + i) as f64 / (i + 1) as f64)
}

/// `∫_{[0,a]^dim} f` for a permutation-symmetric `f`, using the tensor
/// product of `rule` with itself. The summation order is fixed, so the
/// result is identical for any `workers`.
pub fn integrate_symmetric<F>(rule: &GradedRule, dim: usize, f: &F, workers: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if dim == 0 {
        return Ok(f(&[]));
    }
    let factorials: Vec<f64> = (0..=dim)
        .scan(1.0, |acc, i| {
            if i > 0 {
                *acc *= i as f64;
            }
            Some(*acc)
        })
        .collect();
    let job = |first: usize| {
        let mut point = vec![0.0; dim];
        let mut index = vec![0usize; dim];
        point[0] = rule.nodes[first];
        index[0] = first;
        let mut acc = 0.0;
        walk(
            rule,
            f,
            &factorials,
            1,
            rule.weights[first],
            &mut point,
            &mut index,
            &mut acc,
        );
        acc
    };
    let partials: Vec<f64> = if workers <= 1 {
        (0..rule.len()).map(job).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| (0..rule.len()).into_par_iter().map(job).collect())
    };
    Ok(partials.iter().sum())
}

#[allow(clippy::too_many_arguments)]
fn walk<F: Fn(&[f64]) -> f64>(
    rule: &GradedRule,
    f: &F,
    factorials: &[f64],
    depth: usize,
    weight: f64,
    point: &mut [f64],
    index: &mut [usize],
    acc: &mut f64,
) {
    let dim = point.len();
    if depth == dim {
        let mut denom = 1.0;
        let mut run = 1;
        for pair in index.windows(2) {
            if pair[0] == pair[1] {
                run += 1;
            } else {
                denom *= factorials[run];
                run = 1;
            }
        }
        denom *= factorials[run];
        *acc += weight * (factorials[dim] / denom) * f(point);
        return;
    }
    for j in index[depth - 1]..rule.len() {
        index[depth] = j;
        point[depth] = rule.nodes[j];
        walk(
            rule,
            f,
            factorials,
            depth + 1,
            weight * rule.weights[j],
            point,
            index,
            acc,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_known_rules() {
        let (x, w) = gauss_legendre(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-14);
        let (_, w) = gauss_legendre(1);
        assert!((w[0] - 2.0).abs() < 1e-15);
        for n in 1..=20 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact for degree 2n - 1
            let deg = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((q - 2.0 / (deg + 1) as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn graded_rule_integrates_exponential_and_power() {
        let rule = GradedRule::new(30.0, 40, 8, 1e-8).unwrap();
        let e: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * (-x).exp())
            .sum();
        assert!((e - (1.0 - (-30f64).exp())).abs() < 1e-13);
        let sq: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.sqrt())
            .sum();
        assert!((sq - 2.0 / 3.0 * 30f64.powf(1.5)).abs() < 1e-9);
        assert!(GradedRule::new(1.0, 0, 4, 0.1).is_err());
        assert!(GradedRule::new(1.0, 3, 4, 2.0).is_err());
    }

    #[test]
    fn symmetric_sum_matches_full_tensor() {
        let rule = GradedRule::new(3.0, 5, 4, 0.01).unwrap();
        let f = |x: &[f64]| (-(x[0] * x[1] + x[1] * x[2] + x[0] * x[2])).exp();
        let sym = integrate_symmetric(&rule, 3, &f, 1).unwrap();
        let mut full = 0.0;
        for (xi, wi) in rule.nodes.iter().zip(&rule.weights) {
            for (xj, wj) in rule.nodes.iter().zip(&rule.weights) {
                for (xk, wk) in rule.nodes.iter().zip(&rule.weights) {
                    full += wi * wj * wk * f(&[*xi, *xj, *xk]);
                }
            }
        }
        assert!((sym - full).abs() < 1e-12 * full);
        assert_eq!(integrate_symmetric(&rule, 3, &f, 4).unwrap(), sym);
    }

    #[test]
    fn separable_product() {
        let rule = GradedRule::new(20.0, 30, 8, 1e-6).unwrap();
        let f = |x: &[f64]| (-x.iter().sum::<f64>()).exp();
        let v = integrate_symmetric(&rule, 3, &f, 1).unwrap();
        assert!((v - (1.0 - (-20f64).exp()).powi(3)).abs() < 1e-12, "{v}");
        assert_eq!(symmetric_evaluations(10, 2), 55.0);
    }
}
