//! Monte Carlo estimation of the Condorcet-winner probability.
//!
//! Samples are split into fixed blocks of [`BLOCK_SAMPLES`]. Block `b` draws
//! from `SeededSampler::new(seed, mix_seed(seed, &[n, k, b]))`, and the
//! winner counts are summed as integers, so the estimate depends only on
//! `(seed, n, k, samples)` and the sampler version, never on `workers`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cultures::{mix_seed, RankingDrawer, SeededSampler};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::model::Culture;

pub const BLOCK_SAMPLES: u64 = 4096;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub samples: u64,
    pub hits: u64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
}

impl Estimate {
    /// Binomial standard error and clamped normal 95% interval.
    pub fn from_counts(hits: u64, samples: u64, seed: u64) -> Self {
        let p_hat = hits as f64 / samples as f64;
        let std_error = (p_hat * (1.0 - p_hat) / samples as f64).sqrt();
        let half = Z95 * std_error;
        Self {
            p_hat,
            samples,
            hits,
            std_error,
            ci95: ((p_hat - half).max(0.0), (p_hat + half).min(1.0)),
            seed,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci95.0 <= value && value <= self.ci95.1
    }
}

#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub engine: Engine,
}

impl SimulationConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            workers: 1,
            engine: Engine::Elimination,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

fn count_block(
    drawer: &RankingDrawer,
    k: usize,
    engine: Engine,
    seed: u64,
    block: u64,
    len: u64,
) -> Result<u64> {
    let n = drawer.n() as u64;
    let mut sampler = SeededSampler::new(seed, mix_seed(seed, &[n, k as u64, block]));
    let mut profile = drawer.blank_profile(k)?;
    let mut hits = 0;
    for _ in 0..len {
        drawer.fill(&mut profile, sampler.rng());
        if engine.find_winner(&profile).winner.is_some() {
            hits += 1;
        }
    }
    Ok(hits)
}

pub fn estimate_cw_probability(
    culture: &Culture,
    k: usize,
    config: &SimulationConfig,
) -> Result<Estimate> {
    if config.samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let drawer = RankingDrawer::new(culture);
    let blocks = config.samples.div_ceil(BLOCK_SAMPLES);
    let block_len = |b: u64| BLOCK_SAMPLES.min(config.samples - b * BLOCK_SAMPLES);
    let run = |b: u64| count_block(&drawer, k, config.engine, config.seed, b, block_len(b));

    let hits: u64 = if config.workers <= 1 {
        (0..blocks).map(run).sum::<Result<u64>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(run)
                .collect::<Result<Vec<u64>>>()
        })?
        .into_iter()
        .sum()
    };
    Ok(Estimate::from_counts(hits, config.samples, config.seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CultureFamily {
    Impartial,
    Cyclic,
}

impl CultureFamily {
    pub fn culture(self, n: usize) -> Result<Culture> {
        match self {
            CultureFamily::Impartial => Culture::impartial(n),
            CultureFamily::Cyclic => Culture::cyclic(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CultureFamily::Impartial => "impartial",
            CultureFamily::Cyclic => "cyclic",
        }
    }
}

/// Seed of sweep cell `n`: `mix_seed(master, &[n, k])`.
pub fn cell_seed(master: u64, n: usize, k: usize) -> u64 {
    mix_seed(master, &[n as u64, k as u64])
}

/// One estimate per `n`, each with its own derived seed.
pub fn sweep(
    family: CultureFamily,
    k: usize,
    n_values: &[usize],
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<(usize, Estimate)>> {
    n_values
        .iter()
        .map(|&n| {
            let config = SimulationConfig::new(samples, cell_seed(seed, n, k)).workers(workers);
            Ok((n, estimate_cw_probability(&family.culture(n)?, k, &config)?))
        })
        .collect()
}
