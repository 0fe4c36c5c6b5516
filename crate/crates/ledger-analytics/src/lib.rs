//! Measurements over payment event streams and finished contract states:
//! per-address profit and loss with fees, levels and referrer
//! distributions, spillover statistics, and top-k earner tables.
//!
//! Everything here is a pure function over immutable inputs.

mod distributions;
mod fees;
mod profit;

pub use distributions::{
    levels_distribution, referrer_distribution, spillover_stats, LevelsBucket, LevelsHistogram,
    ReferrerBucket, ReferrerCount, ReferrerHistogram, SpilloverStats,
};
pub use fees::{
    fee_stats, FeeModel, FeeStats, PAPER_FEE_SD, PAPER_MEAN_FEE, PAPER_MEDIAN_FEE,
};
pub use profit::{
    full_report, profit_loss, top_k, Aggregates, ProfitReport, ProfitRow, TopEntry, DEFAULT_TOP_K,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("event references transaction ordinal {0} missing from the log")]
    InconsistentInputs(u64),

    #[error("fee statistics need a non-empty transaction log")]
    EmptyLog,

    #[error("lognormal fee model requires mean >= median > 0")]
    BadFeeModel,
}
