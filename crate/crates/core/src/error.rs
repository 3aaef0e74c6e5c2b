use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a permutation of 0..{n}: {order:?}")]
    NotAPermutation { n: usize, order: Vec<usize> },
    #[error("a ranking needs at least one alternative")]
    EmptyRanking,
    #[error("ranking has length {got}, expected {expected}")]
    RankingLength { expected: usize, got: usize },
    #[error("duplicate ranking {0:?} in culture entries")]
    DuplicateRanking(Vec<usize>),
    #[error("negative weight {0}")]
    NegativeWeight(String),
    #[error("weights sum to {0} ≠ 1")]
    WeightSum(String),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("voter count {0} is not odd and positive")]
    VoterCount(usize),
    #[error("profile mixes rankings over different numbers of alternatives")]
    MixedProfile,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("support too large: {size} rankings exceeds cap {cap}")]
    SupportTooLarge { size: String, cap: usize },
    #[error("cap exceeded: {cap} = {limit} but {needed} required")]
    CapExceeded {
        cap: &'static str,
        limit: u64,
        needed: String,
    },
    #[error("target error {target} unattainable within {budget} evaluations (reached {reached})")]
    Unattainable {
        target: f64,
        budget: u64,
        reached: f64,
    },
    #[error("culture file: {0}")]
    CultureFile(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
