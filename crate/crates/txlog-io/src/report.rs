//! JSON report serialization.
//!
//! Key order is the struct declaration order and therefore stable; every
//! wei amount serializes as a decimal string so downstream tooling with
//! 53-bit integers cannot truncate it.

use ledger_analytics::ProfitReport;

use crate::IoError;

pub fn export_report(report: &ProfitReport) -> String {
    let mut text =
        serde_json::to_string_pretty(report).expect("profit report always serializes");
    text.push('\n');
    text
}

pub fn parse_report(text: &str) -> Result<ProfitReport, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::BadReport(e.to_string()))
}
