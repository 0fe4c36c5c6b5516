//! Transaction fee models and fee statistics.
//!
//! Defaults come from the measured chain-wide figures: mean 0.0116 ETH,
//! median 0.00883 ETH (standard deviation 0.0108 ETH observed). The
//! lognormal model reproduces the configured mean/median pair via
//! `mu = ln(median)` and `sigma = sqrt(2 ln(mean/median))`.

use num_bigint::BigUint;
use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use matrix_core::{TxRecord, Wei};

use crate::AnalyticsError;

/// Measured mean fee per transaction: 0.0116 ETH.
pub const PAPER_MEAN_FEE: Wei = Wei(11_600_000_000_000_000);
/// Measured median fee per transaction: 0.00883 ETH.
pub const PAPER_MEDIAN_FEE: Wei = Wei(8_830_000_000_000_000);
/// Measured standard deviation of fees: 0.0108 ETH. Documentation value;
/// the lognormal model is parameterized by mean and median only.
pub const PAPER_FEE_SD: Wei = Wei(10_800_000_000_000_000);

/// A synthetic per-transaction fee model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeeModel {
    /// Every transaction pays the same fee.
    Constant { fee: Wei },
    /// Lognormal fees with the given mean and median.
    LogNormal { mean: Wei, median: Wei },
}

impl FeeModel {
    /// Constant model at the measured mean fee.
    pub fn default_constant() -> Self {
        FeeModel::Constant {
            fee: PAPER_MEAN_FEE,
        }
    }

    /// Lognormal model at the measured mean/median pair.
    pub fn default_lognormal() -> Self {
        FeeModel::LogNormal {
            mean: PAPER_MEAN_FEE,
            median: PAPER_MEDIAN_FEE,
        }
    }

    pub fn validate(&self) -> Result<(), AnalyticsError> {
        match *self {
            FeeModel::Constant { .. } => Ok(()),
            FeeModel::LogNormal { mean, median } => {
                if median > Wei::ZERO && mean >= median {
                    Ok(())
                } else {
                    Err(AnalyticsError::BadFeeModel)
                }
            }
        }
    }

    /// The model's expected fee, used when a log row carries no fee.
    pub fn expected_fee(&self) -> Wei {
        match *self {
            FeeModel::Constant { fee } => fee,
            FeeModel::LogNormal { mean, .. } => mean,
        }
    }

    /// Draw one fee. Lognormal draws round to the nearest wei.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Wei {
        match *self {
            FeeModel::Constant { fee } => fee,
            FeeModel::LogNormal { mean, median } => {
                let mu = (median.as_u128() as f64).ln();
                let sigma = (2.0 * (mean.as_u128() as f64 / median.as_u128() as f64).ln()).sqrt();
                let dist = LogNormal::new(mu, sigma).expect("validated parameters");
                Wei(dist.sample(rng).round().max(1.0) as u128)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FeeModel::Constant { .. } => "constant",
            FeeModel::LogNormal { .. } => "lognormal",
        }
    }
}

/// Exact-wei fee statistics over a transaction log. Mean and standard
/// deviation round down to whole wei; the median of an even count is the
/// floor of the average of the two middle values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeeStats {
    pub count: u64,
    pub mean: Wei,
    pub median: Wei,
    pub sd: Wei,
}

pub fn fee_stats(txlog: &[TxRecord]) -> Result<FeeStats, AnalyticsError> {
    if txlog.is_empty() {
        return Err(AnalyticsError::EmptyLog);
    }
    let n = txlog.len() as u128;
    let mut fees: Vec<u128> = txlog.iter().map(|tx| tx.fee.as_u128()).collect();
    fees.sort_unstable();

    let total: BigUint = fees.iter().map(|&f| BigUint::from(f)).sum();
    let mean = &total / n;

    let median = if fees.len() % 2 == 1 {
        fees[fees.len() / 2]
    } else {
        let lo = fees[fees.len() / 2 - 1];
        let hi = fees[fees.len() / 2];
        lo / 2 + hi / 2 + (lo % 2 + hi % 2) / 2
    };

    // population variance, exactly: n * sum(x^2) - (sum x)^2 over n^2
    let sum_sq: BigUint = fees
        .iter()
        .map(|&f| BigUint::from(f) * BigUint::from(f))
        .sum();
    let var_numerator = BigUint::from(n) * sum_sq - &total * &total;
    let sd = var_numerator.sqrt() / n;

    Ok(FeeStats {
        count: txlog.len() as u64,
        mean: Wei(to_u128(&mean)),
        median: Wei(median),
        sd: Wei(to_u128(&sd)),
    })
}

fn to_u128(v: &BigUint) -> u128 {
    u128::try_from(v).expect("fee statistic exceeds u128")
}
