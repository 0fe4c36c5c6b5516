//! Per-address profit and loss, aggregates, and the top-k earner table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use matrix_core::{Address, ContractState, PaymentEvent, SignedWei, TxRecord, Wei};

use crate::distributions::{
    levels_distribution, referrer_distribution, spillover_stats, LevelsHistogram,
    ReferrerHistogram, SpilloverStats,
};
use crate::fees::{fee_stats, FeeModel, FeeStats};
use crate::AnalyticsError;

/// Money flow of one address: dividends received, transaction value paid in,
/// fees spent, and the resulting net position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfitRow {
    pub address: Address,
    pub received: Wei,
    pub paid_in: Wei,
    pub fees: Wei,
    pub net: SignedWei,
}

/// One row of the top-earner table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopEntry {
    pub address: Address,
    pub net: SignedWei,
    pub net_eth: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub address_count: u64,
    pub winner_count: u64,
    pub loser_count: u64,
    /// Addresses with net exactly zero, reported as their own class.
    pub break_even_count: u64,
    pub winners_net: SignedWei,
    pub losers_net: SignedWei,
    /// Mean absolute loss over losing addresses, floor wei.
    pub mean_loss: Wei,
    pub total_received: Wei,
    pub total_paid_in: Wei,
    pub total_fees: Wei,
    pub top_earners: Vec<TopEntry>,
    pub levels: LevelsHistogram,
    pub referrers: ReferrerHistogram,
    pub spillover: SpilloverStats,
    pub fees_summary: Option<FeeStats>,
}

/// Per-address rows plus aggregate measurements.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfitReport {
    pub addresses: Vec<ProfitRow>,
    pub aggregates: Aggregates,
}

/// How many top earners the report table carries by default.
pub const DEFAULT_TOP_K: usize = 5;

/// Compute per-address profit/loss from an event stream and its transaction
/// log.
///
/// `net = received - paid_in - fees`. Fees come from the log; a zero fee
/// falls back to the model's expected fee when a model is given. Every
/// event must reference a transaction present in the log. The structural
/// histograms need the final state and stay empty here; see [`full_report`].
pub fn profit_loss(
    events: &[PaymentEvent],
    txlog: &[TxRecord],
    fee_model: Option<&FeeModel>,
) -> Result<ProfitReport, AnalyticsError> {
    let by_ordinal: BTreeMap<u64, &TxRecord> =
        txlog.iter().map(|tx| (tx.ordinal, tx)).collect();
    for event in events {
        if !by_ordinal.contains_key(&event.tx_ordinal) {
            return Err(AnalyticsError::InconsistentInputs(event.tx_ordinal));
        }
    }

    #[derive(Default)]
    struct Flow {
        received: Wei,
        paid_in: Wei,
        fees: Wei,
    }
    let mut flows: BTreeMap<Address, Flow> = BTreeMap::new();
    for tx in txlog {
        let flow = flows.entry(tx.sender.clone()).or_default();
        flow.paid_in += tx.value;
        let fee = if tx.fee.is_zero() {
            fee_model.map(|m| m.expected_fee()).unwrap_or(Wei::ZERO)
        } else {
            tx.fee
        };
        flow.fees += fee;
    }
    for event in events {
        flows.entry(event.to.clone()).or_default().received += event.amount;
    }

    let addresses: Vec<ProfitRow> = flows
        .into_iter()
        .map(|(address, flow)| {
            let net = flow.received.signed() - flow.paid_in.signed() - flow.fees.signed();
            ProfitRow {
                address,
                received: flow.received,
                paid_in: flow.paid_in,
                fees: flow.fees,
                net,
            }
        })
        .collect();

    let mut aggregates = Aggregates {
        address_count: addresses.len() as u64,
        spillover: spillover_stats(events),
        fees_summary: fee_stats(txlog).ok(),
        ..Default::default()
    };
    let mut loss_total = Wei::ZERO;
    for row in &addresses {
        aggregates.total_received += row.received;
        aggregates.total_paid_in += row.paid_in;
        aggregates.total_fees += row.fees;
        if row.net.is_positive() {
            aggregates.winner_count += 1;
            aggregates.winners_net += row.net;
        } else if row.net.is_negative() {
            aggregates.loser_count += 1;
            aggregates.losers_net += row.net;
            loss_total += row.net.abs();
        } else {
            aggregates.break_even_count += 1;
        }
    }
    if aggregates.loser_count > 0 {
        aggregates.mean_loss = Wei(loss_total.as_u128() / u128::from(aggregates.loser_count));
    }

    let mut report = ProfitReport {
        addresses,
        aggregates,
    };
    report.aggregates.top_earners = top_k(&report, DEFAULT_TOP_K);
    Ok(report)
}

/// [`profit_loss`] plus the structural histograms that need the final state.
pub fn full_report(
    state: &ContractState,
    events: &[PaymentEvent],
    txlog: &[TxRecord],
    fee_model: Option<&FeeModel>,
    top: usize,
) -> Result<ProfitReport, AnalyticsError> {
    let mut report = profit_loss(events, txlog, fee_model)?;
    report.aggregates.levels = levels_distribution(state);
    report.aggregates.referrers = referrer_distribution(state);
    report.aggregates.top_earners = top_k(&report, top.max(1));
    Ok(report)
}

/// Top `k` rows by net position, descending, ties broken toward the lower
/// address. `k` larger than the population returns every row.
pub fn top_k(report: &ProfitReport, k: usize) -> Vec<TopEntry> {
    let mut rows: Vec<&ProfitRow> = report.addresses.iter().collect();
    rows.sort_by(|a, b| b.net.cmp(&a.net).then_with(|| a.address.cmp(&b.address)));
    rows.into_iter()
        .take(k)
        .map(|row| TopEntry {
            address: row.address.clone(),
            net: row.net,
            net_eth: row.net.to_eth_string(),
        })
        .collect()
}
