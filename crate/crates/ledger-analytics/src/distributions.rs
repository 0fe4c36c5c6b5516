//! Structural distributions over a finished state: levels purchased per
//! user, slot-referrer counts, and spillover statistics over event streams.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use matrix_core::{Address, ContractState, Level, MatrixKind, PaymentEvent, SignedWei};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelsBucket {
    /// Number of levels active beyond the two opened by registration.
    pub purchased_levels: u64,
    pub user_count: u64,
    /// Combined transfer net (received minus paid in, fees excluded) of the
    /// users in this bucket.
    pub collective_net: SignedWei,
}

/// Distribution of how many levels users unlocked.
///
/// Both counting conventions are exposed: `*_purchased` excludes the two
/// free registration slots, `*_unlocked` includes them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelsHistogram {
    pub buckets: Vec<LevelsBucket>,
    pub mean_purchased: f64,
    pub median_purchased: f64,
    pub sd_purchased: f64,
    pub mean_unlocked: f64,
    pub median_unlocked: f64,
}

/// Per-user count of active levels beyond the two registration slots, plus
/// per-bucket collective transfer nets from the state ledger.
///
/// Every user lands in a bucket, the owner included (its pre-opened slots
/// put it in the 22-levels bucket). The purchase statistics cover non-owner
/// users only, since the owner never paid for a slot.
pub fn levels_distribution(state: &ContractState) -> LevelsHistogram {
    let mut buckets: BTreeMap<u64, LevelsBucket> = BTreeMap::new();
    let mut purchased_counts: Vec<u64> = Vec::with_capacity(state.user_count());

    for user in state.users() {
        let unlocked = user.active_level_count() as u64;
        let purchased = unlocked.saturating_sub(2);
        if user.address != *state.owner() {
            purchased_counts.push(purchased);
        }
        let entry = state.ledger_entry(&user.address);
        let bucket = buckets.entry(purchased).or_insert_with(|| LevelsBucket {
            purchased_levels: purchased,
            ..Default::default()
        });
        bucket.user_count += 1;
        bucket.collective_net += entry.received.signed() - entry.sent.signed();
    }

    purchased_counts.sort_unstable();
    let (mean_purchased, median_purchased, sd_purchased) = summarize(&purchased_counts);
    let unlocked: Vec<u64> = purchased_counts.iter().map(|p| p + 2).collect();
    let (mean_unlocked, median_unlocked, _) = summarize(&unlocked);

    LevelsHistogram {
        buckets: buckets.into_values().collect(),
        mean_purchased,
        median_purchased,
        sd_purchased,
        mean_unlocked,
        median_unlocked,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferrerCount {
    pub address: Address,
    /// Number of slots (over all users, matrices and levels) whose slot
    /// referrer points at this address.
    pub count: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReferrerBucket {
    pub referral_count: u64,
    pub user_count: u64,
}

/// Who acts as slot referrer for how many slots.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReferrerHistogram {
    /// Every registered user with its referrer count, in address order.
    pub per_user: Vec<ReferrerCount>,
    pub buckets: Vec<ReferrerBucket>,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    /// The user with the highest count, ties broken toward the lower
    /// address.
    pub max: Option<ReferrerCount>,
}

/// Count, for each user, the slots whose `slot_referrer` points at them.
pub fn referrer_distribution(state: &ContractState) -> ReferrerHistogram {
    let mut counts: BTreeMap<Address, u64> = state
        .users()
        .map(|user| (user.address.clone(), 0))
        .collect();
    for user in state.users() {
        for level in Level::all() {
            if let Some(referrer) = &user.x3(level).slot_referrer {
                *counts.entry(referrer.clone()).or_default() += 1;
            }
            if let Some(referrer) = &user.x4(level).slot_referrer {
                *counts.entry(referrer.clone()).or_default() += 1;
            }
        }
    }

    let per_user: Vec<ReferrerCount> = counts
        .into_iter()
        .map(|(address, count)| ReferrerCount { address, count })
        .collect();

    let mut buckets: BTreeMap<u64, u64> = BTreeMap::new();
    for entry in &per_user {
        *buckets.entry(entry.count).or_default() += 1;
    }
    let mut sorted: Vec<u64> = per_user.iter().map(|e| e.count).collect();
    sorted.sort_unstable();
    let (mean, median, sd) = summarize(&sorted);
    let max = per_user
        .iter()
        .max_by(|a, b| a.count.cmp(&b.count).then(b.address.cmp(&a.address)))
        .cloned();

    ReferrerHistogram {
        per_user,
        buckets: buckets
            .into_iter()
            .map(|(referral_count, user_count)| ReferrerBucket {
                referral_count,
                user_count,
            })
            .collect(),
        mean,
        median,
        sd,
        max,
    }
}

/// Spillover and skip counters over a classified event stream.
///
/// A transaction is counted as a registration when its events span both
/// matrices: registrations route one half through each matrix, while level
/// purchases route through exactly one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpilloverStats {
    pub tx_count: u64,
    pub spillover_tx_count: u64,
    pub spillover_fraction: f64,
    /// Among transactions containing spillover, the share that were
    /// registrations.
    pub spillover_registration_share: f64,
    pub spillover_event_count: u64,
    pub skip_tx_count: u64,
    pub skip_event_count: u64,
}

pub fn spillover_stats(events: &[PaymentEvent]) -> SpilloverStats {
    use matrix_core::Classification::{Skip, Spillover};

    #[derive(Default)]
    struct TxFlags {
        spillover: bool,
        skip: bool,
        saw_x3: bool,
        saw_x4: bool,
    }

    let mut by_tx: BTreeMap<u64, TxFlags> = BTreeMap::new();
    let mut spillover_events = 0u64;
    let mut skip_events = 0u64;
    for event in events {
        let flags = by_tx.entry(event.tx_ordinal).or_default();
        match event.matrix {
            MatrixKind::X3 => flags.saw_x3 = true,
            MatrixKind::X4 => flags.saw_x4 = true,
        }
        match event.classification {
            Spillover => {
                flags.spillover = true;
                spillover_events += 1;
            }
            Skip => {
                flags.skip = true;
                skip_events += 1;
            }
            _ => {}
        }
    }

    let tx_count = by_tx.len() as u64;
    let spillover_txs: Vec<&TxFlags> = by_tx.values().filter(|f| f.spillover).collect();
    let spillover_tx_count = spillover_txs.len() as u64;
    let registration_share = if spillover_txs.is_empty() {
        0.0
    } else {
        let regs = spillover_txs.iter().filter(|f| f.saw_x3 && f.saw_x4).count();
        regs as f64 / spillover_txs.len() as f64
    };

    SpilloverStats {
        tx_count,
        spillover_tx_count,
        spillover_fraction: if tx_count == 0 {
            0.0
        } else {
            spillover_tx_count as f64 / tx_count as f64
        },
        spillover_registration_share: registration_share,
        spillover_event_count: spillover_events,
        skip_tx_count: by_tx.values().filter(|f| f.skip).count() as u64,
        skip_event_count: skip_events,
    }
}

/// Mean, median (floor convention for even counts) and population standard
/// deviation of a sorted slice, as floats.
fn summarize(sorted: &[u64]) -> (f64, f64, f64) {
    if sorted.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let n = sorted.len() as f64;
    let mean = sorted.iter().map(|&v| v as f64).sum::<f64>() / n;
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2] as f64
    } else {
        (sorted[sorted.len() / 2 - 1] as f64 + sorted[sorted.len() / 2] as f64) / 2.0
    };
    let var = sorted
        .iter()
        .map(|&v| {
            let d = v as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    (mean, median, var.sqrt())
}
