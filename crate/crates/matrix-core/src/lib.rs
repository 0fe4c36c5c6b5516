//! Deterministic reimplementation of the Forsage ETH "Matrix" contract
//! semantics as a pure state machine.
//!
//! One [`ContractState`] is mutated by applying totally ordered
//! transactions ([`register`], [`buy_new_level`], or [`apply_tx`] for
//! records). Each applied transaction emits [`PaymentEvent`]s whose amounts
//! exhaust the transaction value exactly, in integer wei. There is no I/O
//! here; file formats, replay and analytics live in the sibling crates.

mod digest;
mod error;
mod ops;
mod pricing;
mod routing;
mod state;
mod types;
mod wei;

pub use digest::state_digest;
pub use error::Error;
pub use ops::{
    apply_tx, apply_tx_traced, buy_new_level, buy_new_level_traced, register, register_traced,
    TxFunction, TxRecord,
};
pub use pricing::{slot_price, BASE_SLOT_PRICE, REGISTRATION_COST};
pub use routing::{
    classify_payment, route_x3, route_x4, Classification, PaymentEvent, RoutingTrace, SlotFill,
    TxEffects,
};
pub use state::{ContractState, LedgerEntry, UserRecord, X3Slot, X4Slot};
pub use types::{Address, Level, MatrixKind};
pub use wei::{SignedWei, Wei, WEI_PER_ETH};

/// Create a fresh contract state owned by `owner`.
pub fn new_state(owner: Address) -> ContractState {
    ContractState::new(owner)
}
