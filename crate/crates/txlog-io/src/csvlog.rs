//! The transaction-log and event CSV formats.
//!
//! Transaction logs are UTF-8 comma-separated text with the header
//! `ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei`.
//! Optional fields are empty columns; wei values are decimal strings. The
//! schema is an abstraction of calldata: replaying never needs nonces or
//! signatures, and block-explorer exports convert to it with one pass.

use std::str::FromStr;

use matrix_core::{
    Address, Classification, Level, MatrixKind, PaymentEvent, TxFunction, TxRecord, Wei,
};

use crate::IoError;

pub const TXLOG_HEADER: &str = "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei";
pub const EVENTS_HEADER: &str = "tx_ordinal,from,to,amount_wei,matrix,level,classification";

/// Parse a transaction log. Reports the first problem with its 1-based line
/// number; ordinals must be strictly increasing.
pub fn parse_txlog(text: &str) -> Result<Vec<TxRecord>, IoError> {
    let mut lines = numbered_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| IoError::MalformedRow {
            line: 1,
            message: "missing header".into(),
        })?;
    if header != TXLOG_HEADER {
        return Err(IoError::MalformedRow {
            line: header_line,
            message: format!("expected header {TXLOG_HEADER:?}"),
        });
    }

    let mut records = Vec::new();
    let mut previous: Option<u64> = None;
    for (line, row) in lines {
        let record = parse_txlog_row(line, row)?;
        if let Some(previous) = previous {
            if record.ordinal <= previous {
                return Err(IoError::NonMonotonicOrdinal {
                    line,
                    ordinal: record.ordinal,
                    previous,
                });
            }
        }
        previous = Some(record.ordinal);
        records.push(record);
    }
    Ok(records)
}

fn parse_txlog_row(line: usize, row: &str) -> Result<TxRecord, IoError> {
    let fields: Vec<&str> = row.split(',').collect();
    if fields.len() != 8 {
        return Err(IoError::MalformedRow {
            line,
            message: format!("expected 8 columns, found {}", fields.len()),
        });
    }
    let malformed = |message: String| IoError::MalformedRow { line, message };

    let ordinal: u64 = fields[0]
        .parse()
        .map_err(|_| malformed(format!("bad ordinal {:?}", fields[0])))?;
    let sender = Address::new(fields[1])
        .map_err(|e| malformed(format!("bad sender: {e}")))?;
    let function = match TxFunction::from_str(fields[2]) {
        Ok(f) => f,
        Err(_) => {
            return Err(IoError::UnknownFunction {
                line,
                name: fields[2].to_string(),
            })
        }
    };
    let referrer = opt_field(fields[3])
        .map(Address::new)
        .transpose()
        .map_err(|e| malformed(format!("bad referrer: {e}")))?;
    let matrix = opt_field(fields[4])
        .map(MatrixKind::from_str)
        .transpose()
        .map_err(|e| malformed(format!("bad matrix: {e}")))?;
    let level = opt_field(fields[5])
        .map(Level::from_str)
        .transpose()
        .map_err(|e| malformed(format!("bad level: {e}")))?;
    let value: Wei = fields[6]
        .parse()
        .map_err(|_| malformed(format!("bad value_wei {:?}", fields[6])))?;
    let fee: Wei = fields[7]
        .parse()
        .map_err(|_| malformed(format!("bad fee_wei {:?}", fields[7])))?;

    match function {
        TxFunction::Register => {
            if matrix.is_some() || level.is_some() {
                return Err(malformed("register rows must leave matrix and level empty".into()));
            }
        }
        TxFunction::BuyNewLevel => {
            if matrix.is_none() || level.is_none() {
                return Err(malformed("buyNewLevel rows require matrix and level".into()));
            }
            if referrer.is_some() {
                return Err(malformed("buyNewLevel rows must leave referrer empty".into()));
            }
        }
        TxFunction::Fallback => {
            if referrer.is_some() || matrix.is_some() || level.is_some() {
                return Err(malformed(
                    "fallback rows must leave referrer, matrix and level empty".into(),
                ));
            }
        }
    }

    Ok(TxRecord {
        ordinal,
        sender,
        function,
        referrer,
        matrix,
        level,
        value,
        fee,
    })
}

/// Render a transaction log, byte-deterministic.
pub fn write_txlog(records: &[TxRecord]) -> String {
    let mut out = String::from(TXLOG_HEADER);
    out.push('\n');
    for tx in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            tx.ordinal,
            tx.sender,
            tx.function.as_str(),
            tx.referrer.as_ref().map(|a| a.as_str()).unwrap_or(""),
            tx.matrix.map(|m| m.as_str()).unwrap_or(""),
            tx.level.map(|l| l.get().to_string()).unwrap_or_default(),
            tx.value,
            tx.fee,
        ));
    }
    out
}

/// Render a payment event stream, byte-deterministic.
pub fn write_events(events: &[PaymentEvent]) -> String {
    let mut out = String::from(EVENTS_HEADER);
    out.push('\n');
    for event in events {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            event.tx_ordinal,
            event.from,
            event.to,
            event.amount,
            event.matrix.as_str(),
            event.level,
            event.classification.as_str(),
        ));
    }
    out
}

/// Parse an event stream produced by [`write_events`].
pub fn parse_events(text: &str) -> Result<Vec<PaymentEvent>, IoError> {
    let mut lines = numbered_lines(text);
    let (header_line, header) = lines.next().ok_or_else(|| IoError::MalformedRow {
        line: 1,
        message: "missing header".into(),
    })?;
    if header != EVENTS_HEADER {
        return Err(IoError::MalformedRow {
            line: header_line,
            message: format!("expected header {EVENTS_HEADER:?}"),
        });
    }
    let mut events = Vec::new();
    for (line, row) in lines {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 7 {
            return Err(IoError::MalformedRow {
                line,
                message: format!("expected 7 columns, found {}", fields.len()),
            });
        }
        let malformed = |message: String| IoError::MalformedRow { line, message };
        events.push(PaymentEvent {
            tx_ordinal: fields[0]
                .parse()
                .map_err(|_| malformed(format!("bad tx_ordinal {:?}", fields[0])))?,
            from: Address::new(fields[1]).map_err(|e| malformed(format!("bad from: {e}")))?,
            to: Address::new(fields[2]).map_err(|e| malformed(format!("bad to: {e}")))?,
            amount: fields[3]
                .parse()
                .map_err(|_| malformed(format!("bad amount_wei {:?}", fields[3])))?,
            matrix: MatrixKind::from_str(fields[4])
                .map_err(|e| malformed(format!("bad matrix: {e}")))?,
            level: Level::from_str(fields[5])
                .map_err(|e| malformed(format!("bad level: {e}")))?,
            classification: Classification::from_str(fields[6])
                .map_err(|e| malformed(format!("bad classification: {e}")))?,
        });
    }
    Ok(events)
}

fn opt_field(field: &str) -> Option<&str> {
    if field.is_empty() {
        None
    } else {
        Some(field)
    }
}

/// 1-based, trailing-`\r` tolerant, blank lines skipped.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.strip_suffix('\r').unwrap_or(line)))
        .filter(|(_, line)| !line.is_empty())
}
