//! Drive a contract state through a transaction log.
//!
//! Strict mode halts on the first failing transaction. Lenient mode exists
//! because real chain exports contain failed transactions: failing records
//! are skipped and collected for a sidecar log, and everything else applies
//! as usual. Ordinal-order violations are log corruption and abort either
//! way.

use matrix_core::{apply_tx, ContractState, PaymentEvent, TxRecord};
use thiserror::Error;

use crate::csvlog::TXLOG_HEADER;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ReplayMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("transaction {ordinal}: {source}")]
    Tx {
        ordinal: u64,
        source: matrix_core::Error,
    },

    #[error("ordinal {ordinal} does not increase over {previous}")]
    NonMonotonicOrdinal { ordinal: u64, previous: u64 },
}

/// A record lenient replay refused to apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedTx {
    pub record: TxRecord,
    pub error: matrix_core::Error,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplayOutcome {
    pub events: Vec<PaymentEvent>,
    /// Records that were actually applied, in order. Analytics should run
    /// over these, not the raw input, so that events and log stay
    /// consistent when lenient replay skipped records.
    pub applied: Vec<TxRecord>,
    pub skipped: Vec<SkippedTx>,
}

/// Apply `records` to `state` in ordinal order.
pub fn replay(
    state: &mut ContractState,
    records: &[TxRecord],
    mode: ReplayMode,
) -> Result<ReplayOutcome, ReplayError> {
    let mut outcome = ReplayOutcome::default();
    let mut previous: Option<u64> = None;
    for record in records {
        if let Some(previous) = previous {
            if record.ordinal <= previous {
                return Err(ReplayError::NonMonotonicOrdinal {
                    ordinal: record.ordinal,
                    previous,
                });
            }
        }
        previous = Some(record.ordinal);

        match apply_tx(state, record) {
            Ok(events) => {
                outcome.events.extend(events);
                outcome.applied.push(record.clone());
            }
            Err(source) => match mode {
                ReplayMode::Strict => {
                    return Err(ReplayError::Tx {
                        ordinal: record.ordinal,
                        source,
                    })
                }
                ReplayMode::Lenient => outcome.skipped.push(SkippedTx {
                    record: record.clone(),
                    error: source,
                }),
            },
        }
    }
    Ok(outcome)
}

/// Sidecar log for skipped records: the transaction-log schema plus an
/// `error` column carrying the machine-readable code.
pub fn write_skipped(skipped: &[SkippedTx]) -> String {
    let mut out = String::from(TXLOG_HEADER);
    out.push_str(",error\n");
    for skip in skipped {
        let tx = &skip.record;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            tx.ordinal,
            tx.sender,
            tx.function.as_str(),
            tx.referrer.as_ref().map(|a| a.as_str()).unwrap_or(""),
            tx.matrix.map(|m| m.as_str()).unwrap_or(""),
            tx.level.map(|l| l.get().to_string()).unwrap_or_default(),
            tx.value,
            tx.fee,
            skip.error.code(),
        ));
    }
    out
}
