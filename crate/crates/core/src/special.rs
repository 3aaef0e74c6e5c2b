//! Elementary symmetric polynomials, the Poisson-binomial upper tail `Q`,
//! and the binomial majority tail `p_k` with its derivative.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::Rational;

/// Largest `n` for which [`binomial_f64`] uses exact integer arithmetic
/// (covers every `p_k` with `k <= 32`).
pub const EXACT_BINOMIAL_MAX_N: u64 = 63;

/// Largest `k` whose `p_k'` coefficient is formed directly; log space above.
const DIRECT_DERIVATIVE_MAX_K: u64 = 20;

pub fn binomial_exact(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn binomial_u128(n: u64, r: u64) -> u128 {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r as u128 {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// `ln C(n, r)` as a sum of logarithms of the factorial ratio.
pub fn ln_binomial(n: u64, r: u64) -> f64 {
    if r > n {
        return f64::NEG_INFINITY;
    }
    let r = r.min(n - r);
    (0..r).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

pub fn binomial_f64(n: u64, r: u64) -> f64 {
    if r > n {
        0.0
    } else if n <= EXACT_BINOMIAL_MAX_N {
        binomial_u128(n, r) as f64
    } else {
        ln_binomial(n, r).exp()
    }
}

fn check_probability(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{x} is not a probability in [0, 1]"
        )))
    }
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(())
}

/// `[σ_0, σ_1, …, σ_m]` of `xs` by the prefix-polynomial recurrence.
pub fn elementary_symmetric_all(xs: &[f64]) -> Vec<f64> {
    elementary_symmetric_upto(xs.len(), xs)
}

fn elementary_symmetric_upto(order: usize, xs: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; order + 1];
    e[0] = 1.0;
    for (i, &x) in xs.iter().enumerate() {
        for j in (1..=order.min(i + 1)).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `σ_ℓ(xs)`: sum of products over all `ℓ`-subsets, in `O(m ℓ)`.
pub fn elementary_symmetric(order: usize, xs: &[f64]) -> Result<f64> {
    if order == 0 || order > xs.len() {
        return Err(Error::InvalidArgument(format!(
            "order {order} outside 1..={}",
            xs.len()
        )));
    }
    Ok(elementary_symmetric_upto(order, xs)[order])
}

/// Distribution of the number of successes among independent Bernoulli(`x_i`).
pub fn success_count_distribution(xs: &[f64]) -> Vec<f64> {
    let mut dist = vec![0.0; xs.len() + 1];
    dist[0] = 1.0;
    for (i, &x) in xs.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            dist[j] = dist[j] * (1.0 - x) + dist[j - 1] * x;
        }
        dist[0] *= 1.0 - x;
    }
    dist
}

/// `Q(xs)`: probability of at least `k` successes among the `2k - 1`
/// independent Bernoulli(`x_i`) trials.
pub fn poisson_binomial_tail(xs: &[f64], k: usize) -> Result<f64> {
    if k == 0 || xs.len() != 2 * k - 1 {
        return Err(Error::InvalidArgument(format!(
            "Q needs 2k - 1 coordinates; got {} for k = {k}",
            xs.len()
        )));
    }
    for &x in xs {
        check_probability(x)?;
    }
    let dist = success_count_distribution(xs);
    Ok(dist[k..].iter().sum())
}

// C(m, j) x^j (1 - x)^(m - j)
fn binomial_term(m: u64, j: u64, x: f64) -> f64 {
    let y = 1.0 - x;
    if m <= EXACT_BINOMIAL_MAX_N {
        return binomial_f64(m, j) * x.powi(j as i32) * y.powi((m - j) as i32);
    }
    if (x == 0.0 && j > 0) || (y == 0.0 && j < m) {
        return 0.0;
    }
    let mut log = ln_binomial(m, j);
    if j > 0 {
        log += j as f64 * x.ln();
    }
    if j < m {
        log += (m - j) as f64 * y.ln();
    }
    log.exp()
}

/// `p_k(x)`: probability of at least `k` heads in `2k - 1` tosses of a coin
/// showing heads with probability `x`.
pub fn p_k(k: u64, x: f64) -> Result<f64> {
    check_k(k)?;
    check_probability(x)?;
    let m = 2 * k - 1;
    Ok((0..k).map(|tails| binomial_term(m, m - tails, x)).sum())
}

/// `1 - p_k(x)` summed directly over the lower tail, without cancellation.
pub fn p_k_complement(k: u64, x: f64) -> Result<f64> {
    check_k(k)?;
    check_probability(x)?;
    let m = 2 * k - 1;
    Ok((0..k).map(|heads| binomial_term(m, heads, x)).sum())
}

/// Exact `p_k(x)` for rational `x` in `[0, 1]`.
pub fn p_k_exact(k: u64, x: &Rational) -> Result<Rational> {
    check_k(k)?;
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "{x} is not a probability in [0, 1]"
        )));
    }
    let m = 2 * k - 1;
    let a = x.numer();
    let b = x.denom();
    let c = b - a;
    // p_k(a/b) = Σ C(m, ℓ) a^(m-ℓ) (b-a)^ℓ / b^m
    let mut numer = BigInt::zero();
    for tails in 0..k {
        let coeff = BigInt::from(binomial_exact(m, tails));
        numer += coeff
            * num_traits::pow(a.clone(), (m - tails) as usize)
            * num_traits::pow(c.clone(), tails as usize);
    }
    Ok(Rational::new(numer, num_traits::pow(b.clone(), m as usize)))
}

/// `p_k'(x) = (2k-1)! / ((k-1)!)^2 · x^(k-1) (1-x)^(k-1)`.
pub fn p_k_derivative(k: u64, x: f64) -> Result<f64> {
    check_k(k)?;
    check_probability(x)?;
    // (2k-1)! / ((k-1)!)^2 = k · C(2k-1, k)
    let base = x * (1.0 - x);
    if k <= DIRECT_DERIVATIVE_MAX_K {
        let coeff = k as f64 * binomial_f64(2 * k - 1, k);
        return Ok(coeff * base.powi(k as i32 - 1));
    }
    if base == 0.0 {
        return Ok(0.0);
    }
    let log = (k as f64).ln() + ln_binomial(2 * k - 1, k) + (k - 1) as f64 * base.ln();
    Ok(log.exp())
}
