//! Seeded synthetic populations for the matrix state machine.
//!
//! A [`RecruitmentModel`] describes how arrivals pick their upline and how
//! eagerly users buy the next level once a slot fills. [`build_schedule`]
//! turns a model into a totally ordered, replayable transaction schedule by
//! actually simulating it; [`run`] replays any schedule and collects the
//! final state, the full event stream and the log. A fixed seed fully
//! determines schedule, events and final state digest.

use std::collections::VecDeque;

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use ledger_analytics::FeeModel;
use matrix_core::{
    apply_tx_traced, new_state, slot_price, Address, ContractState, Level, PaymentEvent,
    TxFunction, TxRecord, REGISTRATION_COST,
};

/// Stable name of the generator behind every simulation, recorded in
/// [`SimResult`] for reproducibility.
pub const RNG_ALGORITHM: &str = "chacha20";

/// Conventional owner address for simulated populations: synthetic user 0.
pub fn default_owner() -> Address {
    Address::synthetic(0)
}

/// How each arrival picks the upline it registers under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecruitKind {
    /// Uniformly among all registered users (owner included).
    UniformUpline,
    /// Weighted by `1 + partners_count`: heavier recruiters attract more.
    PreferentialByPartners,
    /// Always the previously registered user.
    Chain,
}

impl RecruitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RecruitKind::UniformUpline => "uniform",
            RecruitKind::PreferentialByPartners => "preferential",
            RecruitKind::Chain => "chain",
        }
    }
}

/// A synthetic population model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecruitmentModel {
    pub kind: RecruitKind,
    /// Number of registrations to generate.
    pub arrivals: u32,
    /// Probability of buying the next level immediately after a slot fills.
    pub purchase_prob: f64,
    /// Highest level the purchase policy will buy.
    pub max_level: Level,
    pub seed: u64,
}

impl RecruitmentModel {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.purchase_prob) {
            return Err(SimError::BadModel(format!(
                "purchase probability {} outside [0, 1]",
                self.purchase_prob
            )));
        }
        Ok(())
    }
}

/// Everything one simulation produced.
#[derive(Clone, Debug)]
pub struct SimResult {
    pub state: ContractState,
    pub events: Vec<PaymentEvent>,
    pub log: Vec<TxRecord>,
    pub seed: u64,
    pub rng_algorithm: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("invalid model: {0}")]
    BadModel(String),

    #[error("transaction {ordinal} failed: {source}")]
    Tx {
        ordinal: u64,
        source: matrix_core::Error,
    },
}

/// Generate a replayable schedule for `model`, drawing per-transaction fees
/// from `fees`. Registrations are interleaved with the purchases the policy
/// triggers; every referenced upline registered earlier by construction.
pub fn build_schedule(
    model: &RecruitmentModel,
    fees: &FeeModel,
) -> Result<Vec<TxRecord>, SimError> {
    model.validate()?;
    fees.validate()
        .map_err(|e| SimError::BadModel(e.to_string()))?;

    let owner = default_owner();
    let mut state = new_state(owner.clone());
    let mut rng = ChaCha20Rng::seed_from_u64(model.seed);
    let mut registered: Vec<Address> = vec![owner.clone()];
    let mut schedule: Vec<TxRecord> = Vec::new();
    let mut next_ordinal = 1u64;

    for arrival in 0..model.arrivals {
        let sender = Address::synthetic(u128::from(arrival) + 1);
        let upline = pick_upline(model.kind, &registered, &state, &mut rng);
        let tx = TxRecord {
            ordinal: next_ordinal,
            sender: sender.clone(),
            function: TxFunction::Register,
            referrer: Some(upline),
            matrix: None,
            level: None,
            value: REGISTRATION_COST,
            fee: fees.sample(&mut rng),
        };
        next_ordinal += 1;
        let effects = apply_tx_traced(&mut state, &tx).map_err(|source| SimError::Tx {
            ordinal: tx.ordinal,
            source,
        })?;
        schedule.push(tx);
        registered.push(sender);

        // eager purchases: every fill may trigger buying the next level,
        // and a purchase can trigger further fills
        let mut pending: VecDeque<matrix_core::SlotFill> = effects.fills.into();
        while let Some(fill) = pending.pop_front() {
            if fill.user == owner {
                continue;
            }
            let Some(next) = fill.level.next() else {
                continue;
            };
            if next > model.max_level {
                continue;
            }
            if state
                .user(&fill.user)
                .map_err(|source| SimError::Tx { ordinal: next_ordinal, source })?
                .is_active(fill.matrix, next)
            {
                continue;
            }
            if !rng.random_bool(model.purchase_prob) {
                continue;
            }
            let tx = TxRecord {
                ordinal: next_ordinal,
                sender: fill.user.clone(),
                function: TxFunction::BuyNewLevel,
                referrer: None,
                matrix: Some(fill.matrix),
                level: Some(next),
                value: slot_price(next),
                fee: fees.sample(&mut rng),
            };
            next_ordinal += 1;
            let effects = apply_tx_traced(&mut state, &tx).map_err(|source| SimError::Tx {
                ordinal: tx.ordinal,
                source,
            })?;
            schedule.push(tx);
            pending.extend(effects.fills);
        }
    }
    Ok(schedule)
}

fn pick_upline(
    kind: RecruitKind,
    registered: &[Address],
    state: &ContractState,
    rng: &mut ChaCha20Rng,
) -> Address {
    match kind {
        RecruitKind::Chain => registered.last().expect("owner present").clone(),
        RecruitKind::UniformUpline => registered[rng.random_range(0..registered.len())].clone(),
        RecruitKind::PreferentialByPartners => {
            let weights: Vec<u64> = registered
                .iter()
                .map(|a| 1 + state.user(a).map(|u| u.partners_count).unwrap_or(0))
                .collect();
            let dist = rand::distr::weighted::WeightedIndex::new(&weights)
                .expect("weights are positive");
            registered[dist.sample(rng)].clone()
        }
    }
}

/// Replay a schedule against a fresh state owned by [`default_owner`].
pub fn run(schedule: &[TxRecord]) -> Result<SimResult, SimError> {
    run_with_owner(default_owner(), schedule)
}

/// Replay a schedule against a fresh state owned by `owner`.
pub fn run_with_owner(owner: Address, schedule: &[TxRecord]) -> Result<SimResult, SimError> {
    let mut state = new_state(owner);
    let mut events = Vec::new();
    for tx in schedule {
        let batch = apply_tx_traced(&mut state, tx).map_err(|source| SimError::Tx {
            ordinal: tx.ordinal,
            source,
        })?;
        events.extend(batch.payments);
    }
    Ok(SimResult {
        state,
        events,
        log: schedule.to_vec(),
        seed: 0,
        rng_algorithm: RNG_ALGORITHM,
    })
}

/// Build a schedule for `model` and run it.
pub fn simulate(model: &RecruitmentModel, fees: &FeeModel) -> Result<SimResult, SimError> {
    let schedule = build_schedule(model, fees)?;
    let mut result = run(&schedule)?;
    result.seed = model.seed;
    Ok(result)
}
