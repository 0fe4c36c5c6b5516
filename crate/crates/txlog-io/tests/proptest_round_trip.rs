//! Property: serialize-then-parse is the identity for transaction logs.

use proptest::prelude::*;

use matrix_core::{Address, Level, MatrixKind, TxFunction, TxRecord, Wei};
use txlog_io::{parse_txlog, write_txlog};

fn address_strategy() -> impl Strategy<Value = Address> {
    "[a-f0-9]{6,40}".prop_map(|hex| Address::new(format!("0x{hex}")).unwrap())
}

fn record_strategy() -> impl Strategy<Value = (Address, u8, Option<Address>, u8, u128, u128)> {
    (
        address_strategy(),
        0u8..3,
        proptest::option::of(address_strategy()),
        1u8..=12,
        0u128..10u128.pow(20),
        0u128..10u128.pow(18),
    )
}

proptest! {
    #[test]
    fn txlog_round_trip(rows in proptest::collection::vec(record_strategy(), 0..40)) {
        let mut records = Vec::new();
        for (i, (sender, func, referrer, level, value, fee)) in rows.into_iter().enumerate() {
            let function = match func {
                0 => TxFunction::Register,
                1 => TxFunction::BuyNewLevel,
                _ => TxFunction::Fallback,
            };
            let (referrer, matrix, level) = match function {
                TxFunction::Register => (referrer, None, None),
                TxFunction::BuyNewLevel => (
                    None,
                    Some(if level % 2 == 0 { MatrixKind::X3 } else { MatrixKind::X4 }),
                    Some(Level::new(level).unwrap()),
                ),
                TxFunction::Fallback => (None, None, None),
            };
            records.push(TxRecord {
                ordinal: (i as u64 + 1) * 3, // gaps are legal, order must hold
                sender,
                function,
                referrer,
                matrix,
                level,
                value: Wei(value),
                fee: Wei(fee),
            });
        }
        let parsed = parse_txlog(&write_txlog(&records)).unwrap();
        prop_assert_eq!(parsed, records);
    }
}
