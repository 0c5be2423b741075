//! Longest common substring with shifts in b-ary expansions.
//!
//! The crate computes the aligned and shifted longest-common-substring
//! statistics `L_n` and `S_n` of two digit sequences, builds the digit-level
//! constructions that realise a prescribed growth rate of `S_n`, evaluates the
//! transfer-matrix spectra of the subshift forbidding `0^{p+1}`, and runs
//! seeded desk-scale experiments around all of these.
//!
//! Indexing: mathematical positions are 1-based (`x_1, x_2, ...`). In-memory
//! slices and every serialized array are 0-based, so position `i` lives at
//! slice index `i - 1`.

pub mod cli;
pub mod digits;
pub mod dimension;
pub mod error;
pub mod harness;
pub mod matcher;
pub mod rng;
pub mod sft;

pub use digits::{Alpha, ConstructionSchedule, DigitSeq, SetDescriptor};
pub use error::{Error, Result};
pub use matcher::{GrowthCurve, MatchResult};
pub use sft::{SpectralResult, TransferMatrix};

/// Default resource budget (element count) used by every capped operation.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "SHIFTLCS_BUDGET";

/// Resource cap in effect, honouring `SHIFTLCS_BUDGET` when it parses.
pub fn resource_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .unwrap_or(DEFAULT_BUDGET)
}
