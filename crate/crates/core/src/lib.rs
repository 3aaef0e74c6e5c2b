//! Probability that a Condorcet winner exists when `2k - 1` voters draw
//! rankings of `n` alternatives independently from a culture.
//!
//! The crate covers four routes to that quantity and cross-checks them:
//!
//! * [`exact`]: rational enumeration over voter multisets, the closed-form
//!   minimum over all cultures, and the top-choice lower bound.
//! * [`monte_carlo`]: seeded, partition-independent parallel estimation.
//! * [`asymptotics`]: the impartial-culture constant `C_k` by truncated
//!   graded quadrature, plus the large-`n` / large-`k` formulas.
//! * [`verification`]: numeric checkers for the supporting inequalities.

pub mod asymptotics;
pub mod cli;
pub mod cultures;
pub mod engine;
pub mod error;
pub mod exact;
pub mod model;
pub mod monte_carlo;
pub mod quadrature;
pub mod special;
pub mod verification;

pub use error::{Error, Result};
pub use model::{Culture, CultureKind, Profile, Ranking, Rational};
