//! Pairwise majority and Condorcet winner detection.

use std::borrow::Borrow;

use crate::error::{Error, Result};
use crate::model::{Profile, Ranking};

/// The Condorcet winner of a profile, if there is one. At most one
/// alternative can beat every other alternative with an odd electorate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CondorcetOutcome {
    pub winner: Option<usize>,
}

/// Which winner search to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// Champion scan plus one verification pass, `O(n k)`.
    #[default]
    Elimination,
    /// All ordered pairs, `O(n^2 k)`; kept as an oracle.
    Naive,
}

impl Engine {
    pub fn find_winner(self, profile: &Profile) -> CondorcetOutcome {
        self.winner_of(profile.voters(), profile.n())
    }

    pub(crate) fn winner_of<R: Borrow<Ranking>>(self, voters: &[R], n: usize) -> CondorcetOutcome {
        let winner = match self {
            Engine::Elimination => elimination_winner(voters, n),
            Engine::Naive => naive_winner(voters, n),
        };
        CondorcetOutcome { winner }
    }
}

/// True iff at least `k` of the `2k - 1` voters rank `a` above `b`.
pub fn majority_prefers(profile: &Profile, a: usize, b: usize) -> Result<bool> {
    let n = profile.n();
    if a >= n || b >= n {
        return Err(Error::InvalidArgument(format!(
            "alternative out of range for n = {n}: ({a}, {b})"
        )));
    }
    if a == b {
        return Err(Error::InvalidArgument(format!(
            "majority comparison needs two distinct alternatives, got {a} twice"
        )));
    }
    Ok(beats(profile.voters(), a, b))
}

pub fn find_condorcet_winner(profile: &Profile) -> CondorcetOutcome {
    Engine::Elimination.find_winner(profile)
}

pub fn find_condorcet_winner_naive(profile: &Profile) -> CondorcetOutcome {
    Engine::Naive.find_winner(profile)
}

// voters.len() is odd, so the majority threshold is a strict half.
#[inline]
fn beats<R: Borrow<Ranking>>(voters: &[R], a: usize, b: usize) -> bool {
    let needed = voters.len() / 2 + 1;
    let mut votes = 0;
    let mut remaining = voters.len();
    for v in voters {
        if v.borrow().prefers(a, b) {
            votes += 1;
            if votes == needed {
                return true;
            }
        }
        remaining -= 1;
        if votes + remaining < needed {
            return false;
        }
    }
    false
}

fn elimination_winner<R: Borrow<Ranking>>(voters: &[R], n: usize) -> Option<usize> {
    let mut champion = 0;
    for challenger in 1..n {
        if beats(voters, challenger, champion) {
            champion = challenger;
        }
    }
    // Alternatives scanned before the final champion were never compared to it.
    (0..n)
        .filter(|&b| b != champion)
        .all(|b| beats(voters, champion, b))
        .then_some(champion)
}

fn naive_winner<R: Borrow<Ranking>>(voters: &[R], n: usize) -> Option<usize> {
    let winners: Vec<usize> = (0..n)
        .filter(|&a| (0..n).filter(|&b| b != a).all(|b| beats(voters, a, b)))
        .collect();
    debug_assert!(winners.len() <= 1);
    winners.first().copied()
}
