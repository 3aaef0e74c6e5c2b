//! Exact Condorcet-winner probabilities.
//!
//! [`exact_cw_probability`] enumerates unordered voter multisets over the
//! culture's support, weighting each by its multinomial coefficient. All
//! weights are rescaled to integers over a common denominator so the inner
//! loop only multiplies and adds big integers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::model::{Culture, Ranking, Rational};
use crate::special::{binomial_exact, p_k_exact};

/// Resource limits for exact enumeration.
#[derive(Clone, Debug)]
pub struct ExactConfig {
    /// Maximum number of multisets (one winner check each).
    pub max_winner_checks: u64,
    /// Maximum support size materialized from a symbolic culture.
    pub max_support: usize,
    /// Threads for the enumeration; the result does not depend on it.
    pub workers: usize,
    pub engine: Engine,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            max_winner_checks: 100_000_000,
            max_support: 1_000_000,
            workers: 1,
            engine: Engine::Elimination,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactMethod {
    Enumeration,
    ClosedForm,
    PkBound,
}

impl ExactMethod {
    pub fn name(self) -> &'static str {
        match self {
            ExactMethod::Enumeration => "enumeration",
            ExactMethod::ClosedForm => "closed_form",
            ExactMethod::PkBound => "pk_bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactProbability {
    pub value: Rational,
    pub method: ExactMethod,
    /// For enumeration: `P(alternative j is the Condorcet winner)`.
    /// For the bound: the `p_k(x_j)` summands.
    pub per_alternative: Option<Vec<Rational>>,
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(())
}

/// Number of multisets of size `m` from `s` kinds: `C(s + m - 1, m)`.
pub fn multiset_count(s: u64, m: u64) -> BigUint {
    if s == 0 {
        return BigUint::zero();
    }
    binomial_exact(s + m - 1, m)
}

/// Exact probability that `2k - 1` voters drawing from `culture` produce a
/// Condorcet winner.
pub fn exact_cw_probability(
    culture: &Culture,
    k: usize,
    config: &ExactConfig,
) -> Result<ExactProbability> {
    check_k(k)?;
    let n = culture.n();
    let support: Vec<(Ranking, Rational)> = culture
        .expand(config.max_support)?
        .into_iter()
        .filter(|(_, w)| !w.is_zero())
        .collect();
    let voters = 2 * k - 1;
    let checks = multiset_count(support.len() as u64, voters as u64);
    if checks > BigUint::from(config.max_winner_checks) {
        return Err(Error::CapExceeded {
            cap: "max_winner_checks",
            limit: config.max_winner_checks,
            needed: checks.to_string(),
        });
    }

    let denominator = support
        .iter()
        .fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
    let scaled: Vec<BigInt> = support
        .iter()
        .map(|(_, w)| w.numer() * (&denominator / w.denom()))
        .collect();
    let rankings: Vec<&Ranking> = support.iter().map(|(r, _)| r).collect();
    let factorials: Vec<BigInt> = (0..=voters)
        .scan(BigInt::one(), |acc, i| {
            if i > 0 {
                *acc *= i;
            }
            Some(acc.clone())
        })
        .collect();

    let job = Enumeration {
        n,
        voters,
        rankings: &rankings,
        scaled: &scaled,
        factorials: &factorials,
        engine: config.engine,
    };
    let first_indices = 0..rankings.len();
    let partials: Vec<Vec<BigInt>> = if config.workers <= 1 {
        first_indices.map(|first| job.run_from(first)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| {
            first_indices
                .into_par_iter()
                .map(|first| job.run_from(first))
                .collect()
        })
    };

    let mut totals = vec![BigInt::zero(); n];
    for part in partials {
        for (t, p) in totals.iter_mut().zip(part) {
            *t += p;
        }
    }
    let scale = num_traits::pow(denominator, voters);
    let per_alternative: Vec<Rational> = totals
        .into_iter()
        .map(|t| Rational::new(t, scale.clone()))
        .collect();
    let value = per_alternative.iter().sum();
    Ok(ExactProbability {
        value,
        method: ExactMethod::Enumeration,
        per_alternative: Some(per_alternative),
    })
}

struct Enumeration<'a> {
    n: usize,
    voters: usize,
    rankings: &'a [&'a Ranking],
    scaled: &'a [BigInt],
    factorials: &'a [BigInt],
    engine: Engine,
}

impl Enumeration<'_> {
    /// Winner weights (times `D^m`) of all multisets whose smallest
    /// support index is `first`.
    fn run_from(&self, first: usize) -> Vec<BigInt> {
        let mut totals = vec![BigInt::zero(); self.n];
        let mut chosen = Vec::with_capacity(self.voters);
        chosen.push(first);
        self.descend(&mut chosen, &self.scaled[first], &mut totals);
        totals
    }

    fn descend(&self, chosen: &mut Vec<usize>, product: &BigInt, totals: &mut [BigInt]) {
        if chosen.len() == self.voters {
            let profile: Vec<&Ranking> = chosen.iter().map(|&i| self.rankings[i]).collect();
            if let Some(w) = self.engine.winner_of(&profile, self.n).winner {
                totals[w] += product * self.multinomial(chosen);
            }
            return;
        }
        let last = *chosen.last().expect("non-empty");
        for next in last..self.rankings.len() {
            chosen.push(next);
            self.descend(chosen, &(product * &self.scaled[next]), totals);
            chosen.pop();
        }
    }

    // m! / Π c_i! for the run lengths of the sorted index sequence
    fn multinomial(&self, sorted: &[usize]) -> BigInt {
        let mut denom = BigInt::one();
        let mut run = 1;
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                run += 1;
            } else {
                denom *= &self.factorials[run];
                run = 1;
            }
        }
        denom *= &self.factorials[run];
        &self.factorials[self.voters] / denom
    }
}

/// Minimum over all cultures: `n^-(2k-2) · Σ_{ℓ<k} C(2k-1, ℓ) (n-1)^ℓ`.
pub fn min_prob_closed_form(n: u64, k: u64) -> Result<Rational> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and k >= 1, got n = {n}, k = {k}"
        )));
    }
    let m = 2 * k - 1;
    let sum: BigInt = (0..k)
        .map(|l| {
            BigInt::from(binomial_exact(m, l)) * num_traits::pow(BigInt::from(n - 1), l as usize)
        })
        .sum();
    Ok(Rational::new(
        sum,
        num_traits::pow(BigInt::from(n), (2 * k - 2) as usize),
    ))
}

/// `Σ_j p_k(x_j)` over the top-choice marginals: alternative `j` wins
/// whenever at least `k` voters put it first, so this bounds the exact
/// probability from below.
pub fn pk_lower_bound(culture: &Culture, k: usize) -> Result<ExactProbability> {
    check_k(k)?;
    let terms = culture
        .top_marginals()
        .iter()
        .map(|x| p_k_exact(k as u64, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExactProbability {
        value: terms.iter().sum(),
        method: ExactMethod::PkBound,
        per_alternative: Some(terms),
    })
}

/// The closed form packaged like the other exact results.
pub fn min_prob(n: u64, k: u64) -> Result<ExactProbability> {
    Ok(ExactProbability {
        value: min_prob_closed_form(n, k)?,
        method: ExactMethod::ClosedForm,
        per_alternative: None,
    })
}

pub fn exact_to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
