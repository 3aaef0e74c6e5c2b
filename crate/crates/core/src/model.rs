//! Rankings, cultures and profiles.
//!
//! Everything here is validated at construction and immutable afterwards.
//! Weights of explicit cultures are exact rationals.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact probability arithmetic.
pub type Rational = BigRational;

/// Parse `"3/8"`, `"0.25"`, `"1"` or `"-2/5"` into an exact rational.
///
/// Decimals become `digits / 10^scale`, so `"0.1"` is exactly `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let fail = || Error::ParseRational(text.to_string());
    if s.is_empty() {
        return Err(fail());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| fail())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| fail())?;
        if den.is_zero() {
            return Err(fail());
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(fail());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(fail());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(&digits).map_err(|_| fail())?;
    if negative {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(Rational::new(num, den))
}

/// `"num/den"`, or just `"num"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A strict preference order, most-preferred alternative first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ranking {
    order: Vec<usize>,
    // position[a] = rank index of alternative a
    position: Vec<usize>,
}

impl Ranking {
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::EmptyRanking);
        }
        let mut position = vec![usize::MAX; n];
        for (rank, &alt) in order.iter().enumerate() {
            if alt >= n || position[alt] != usize::MAX {
                return Err(Error::NotAPermutation { n, order });
            }
            position[alt] = rank;
        }
        Ok(Self { order, position })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_order((0..n).collect())
    }

    /// The rotation `(s, s+1, …, n-1, 0, …, s-1)`.
    pub fn rotation(n: usize, start: usize) -> Result<Self> {
        if start >= n {
            return Err(Error::InvalidArgument(format!(
                "rotation start {start} out of range for n = {n}"
            )));
        }
        Self::from_order((0..n).map(|i| (start + i) % n).collect())
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn top(&self) -> usize {
        self.order[0]
    }

    /// Rank index of `alt` (0 = most preferred).
    #[inline]
    pub fn position(&self, alt: usize) -> usize {
        self.position[alt]
    }

    #[inline]
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    /// Mutable access for samplers that permute in place; callers must
    /// leave a permutation behind and call [`Ranking::refresh_positions`].
    pub(crate) fn order_mut(&mut self) -> &mut [usize] {
        &mut self.order
    }

    pub(crate) fn refresh_positions(&mut self) {
        for (rank, &alt) in self.order.iter().enumerate() {
            self.position[alt] = rank;
        }
    }
}

impl fmt::Debug for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ranking{:?}", self.order)
    }
}

/// How a culture is represented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CultureKind {
    /// Finite support with exact weights summing to one.
    Explicit(Vec<(Ranking, Rational)>),
    /// Uniform over all `n!` rankings, never materialized unless asked.
    Impartial,
    /// The `n` rotations of `(0, 1, …, n-1)`, each with weight `1/n`.
    Cyclic,
}

/// A probability distribution over rankings of `n` alternatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Culture {
    n: usize,
    kind: CultureKind,
}

impl Culture {
    pub fn explicit(n: usize, entries: Vec<(Ranking, Rational)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRanking);
        }
        let mut seen = HashSet::with_capacity(entries.len());
        let mut total = Rational::zero();
        for (ranking, weight) in &entries {
            if ranking.n() != n {
                return Err(Error::RankingLength {
                    expected: n,
                    got: ranking.n(),
                });
            }
            if weight.is_negative() {
                return Err(Error::NegativeWeight(format_rational(weight)));
            }
            if !seen.insert(ranking.order()) {
                return Err(Error::DuplicateRanking(ranking.order().to_vec()));
            }
            total += weight;
        }
        if !total.is_one() {
            return Err(Error::WeightSum(format_rational(&total)));
        }
        Ok(Self {
            n,
            kind: CultureKind::Explicit(entries),
        })
    }

    /// Build from raw orders and weight strings (`"1/6"`, `"0.25"`).
    pub fn from_entries<S: AsRef<str>>(n: usize, entries: &[(Vec<usize>, S)]) -> Result<Self> {
        let parsed = entries
            .iter()
            .map(|(order, p)| {
                Ok((
                    Ranking::from_order(order.clone())?,
                    parse_rational(p.as_ref())?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::explicit(n, parsed)
    }

    pub fn impartial(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRanking);
        }
        Ok(Self {
            n,
            kind: CultureKind::Impartial,
        })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRanking);
        }
        Ok(Self {
            n,
            kind: CultureKind::Cyclic,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &CultureKind {
        &self.kind
    }

    /// Number of rankings with positive or listed weight (`n!` for impartial).
    pub fn support_size(&self) -> BigUint {
        match &self.kind {
            CultureKind::Explicit(entries) => BigUint::from(entries.len()),
            CultureKind::Impartial => (1..=self.n).map(BigUint::from).product(),
            CultureKind::Cyclic => BigUint::from(self.n),
        }
    }

    /// Materialize the support, refusing when it exceeds `max_support`.
    pub fn expand(&self, max_support: usize) -> Result<Vec<(Ranking, Rational)>> {
        let size = self.support_size();
        if size > BigUint::from(max_support) {
            return Err(Error::SupportTooLarge {
                size: size.to_string(),
                cap: max_support,
            });
        }
        let n = self.n;
        Ok(match &self.kind {
            CultureKind::Explicit(entries) => entries.clone(),
            CultureKind::Cyclic => {
                let w = Rational::new(BigInt::one(), BigInt::from(n));
                (0..n)
                    .map(|s| (Ranking::rotation(n, s).expect("start < n"), w.clone()))
                    .collect()
            }
            CultureKind::Impartial => {
                let count = size.to_usize().expect("bounded by max_support");
                let w = Rational::new(BigInt::one(), BigInt::from(count));
                let mut out = Vec::with_capacity(count);
                let mut order: Vec<usize> = (0..n).collect();
                loop {
                    out.push((Ranking::from_order(order.clone())?, w.clone()));
                    if !next_permutation(&mut order) {
                        break;
                    }
                }
                out
            }
        })
    }

    /// The explicit form of this culture (same distribution).
    pub fn to_explicit(&self, max_support: usize) -> Result<Culture> {
        let entries = self.expand(max_support)?;
        Ok(Culture {
            n: self.n,
            kind: CultureKind::Explicit(entries),
        })
    }

    /// `x_j`: probability that a drawn ranking puts alternative `j` first.
    pub fn top_marginals(&self) -> Vec<Rational> {
        match &self.kind {
            CultureKind::Explicit(entries) => {
                let mut x = vec![Rational::zero(); self.n];
                for (ranking, w) in entries {
                    x[ranking.top()] += w;
                }
                x
            }
            CultureKind::Impartial | CultureKind::Cyclic => {
                vec![Rational::new(BigInt::one(), BigInt::from(self.n)); self.n]
            }
        }
    }

    pub fn to_file(&self, max_support: usize) -> Result<CultureFile> {
        let entries = self
            .expand(max_support)?
            .into_iter()
            .map(|(r, p)| CultureFileEntry {
                ranking: r.order().to_vec(),
                p: format_rational(&p),
            })
            .collect();
        Ok(CultureFile { n: self.n, entries })
    }

    pub fn to_json(&self, max_support: usize) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file(max_support)?)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CultureFile = serde_json::from_str(text)?;
        file.into_culture()
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk culture: `{"n": 3, "entries": [{"ranking": [0,1,2], "p": "1/2"}, …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CultureFile {
    pub n: usize,
    pub entries: Vec<CultureFileEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CultureFileEntry {
    pub ranking: Vec<usize>,
    pub p: String,
}

impl CultureFile {
    pub fn into_culture(self) -> Result<Culture> {
        let entries: Vec<(Vec<usize>, String)> =
            self.entries.into_iter().map(|e| (e.ranking, e.p)).collect();
        Culture::from_entries(self.n, &entries)
    }
}

/// One election: `2k - 1` rankings over the same alternatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    n: usize,
    k: usize,
    voters: Vec<Ranking>,
}

impl Profile {
    pub fn new(voters: Vec<Ranking>) -> Result<Self> {
        let count = voters.len();
        if count.is_multiple_of(2) {
            return Err(Error::VoterCount(count));
        }
        let n = voters[0].n();
        if voters.iter().any(|v| v.n() != n) {
            return Err(Error::MixedProfile);
        }
        Ok(Self {
            n,
            k: count.div_ceil(2),
            voters,
        })
    }

    pub fn from_orders(orders: &[Vec<usize>]) -> Result<Self> {
        Self::new(
            orders
                .iter()
                .map(|o| Ranking::from_order(o.clone()))
                .collect::<Result<_>>()?,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Majority threshold; there are `2k - 1` voters.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn voters(&self) -> &[Ranking] {
        &self.voters
    }

    pub(crate) fn voters_mut(&mut self) -> &mut [Ranking] {
        &mut self.voters
    }
}

/// Lexicographic successor; `false` once `order` is the last permutation.
pub(crate) fn next_permutation(order: &mut [usize]) -> bool {
    let len = order.len();
    if len < 2 {
        return false;
    }
    let mut i = len - 1;
    while i > 0 && order[i - 1] >= order[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = len - 1;
    while order[j] <= order[i - 1] {
        j -= 1;
    }
    order.swap(i - 1, j);
    order[i..].reverse();
    true
}
