//! Canonical state digest.
//!
//! The digest is SHA-256 over a canonical byte encoding of the full state:
//! every field in a fixed order, maps in key order, strings length-prefixed.
//! Equal states produce equal digests on every platform, which is what
//! replay-determinism checks compare.

use sha2::{Digest, Sha256};

use crate::state::{ContractState, X3Slot, X4Slot};
use crate::types::{Address, Level};
use crate::wei::Wei;

/// Hex-encoded SHA-256 of the canonical state encoding.
pub fn state_digest(state: &ContractState) -> String {
    let mut enc = Encoder::new();
    enc.bytes(b"matrix-state-v1");
    enc.address(state.owner());
    enc.u64(state.next_ordinal());

    enc.u64(state.user_count() as u64);
    for user in state.users() {
        enc.address(&user.address);
        enc.address(&user.upline);
        enc.u64(user.partners_count);
        enc.u64(user.registration_ordinal);
        for level in Level::all() {
            enc.x3_slot(user.x3(level));
        }
        for level in Level::all() {
            enc.x4_slot(user.x4(level));
        }
    }

    enc.u64(state.ledger().count() as u64);
    for (addr, entry) in state.ledger() {
        enc.address(addr);
        enc.wei(entry.received);
        enc.wei(entry.sent);
    }

    let mut out = String::with_capacity(64);
    for byte in enc.finalize() {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

struct Encoder {
    hasher: Sha256,
}

impl Encoder {
    fn new() -> Self {
        Encoder {
            hasher: Sha256::new(),
        }
    }

    fn bytes(&mut self, bytes: &[u8]) {
        self.hasher.update(bytes);
    }

    fn u64(&mut self, v: u64) {
        self.hasher.update(v.to_le_bytes());
    }

    fn bool(&mut self, v: bool) {
        self.hasher.update([u8::from(v)]);
    }

    fn wei(&mut self, v: Wei) {
        self.hasher.update(v.as_u128().to_le_bytes());
    }

    fn address(&mut self, a: &Address) {
        let bytes = a.as_str().as_bytes();
        self.u64(bytes.len() as u64);
        self.hasher.update(bytes);
    }

    fn opt_address(&mut self, a: &Option<Address>) {
        match a {
            Some(addr) => {
                self.bool(true);
                self.address(addr);
            }
            None => self.bool(false),
        }
    }

    fn address_list(&mut self, list: &[Address]) {
        self.u64(list.len() as u64);
        for a in list {
            self.address(a);
        }
    }

    fn x3_slot(&mut self, slot: &X3Slot) {
        self.bool(slot.active);
        self.opt_address(&slot.slot_referrer);
        self.address_list(&slot.referrals);
        self.bool(slot.blocked);
        self.bool(slot.never_block);
        self.u64(slot.reinvest_count);
    }

    fn x4_slot(&mut self, slot: &X4Slot) {
        self.bool(slot.active);
        self.opt_address(&slot.slot_referrer);
        self.address_list(&slot.first_level);
        self.address_list(&slot.second_level);
        self.bool(slot.blocked);
        self.bool(slot.never_block);
        self.u64(slot.reinvest_count);
        self.opt_address(&slot.closed_part);
    }

    fn finalize(self) -> [u8; 32] {
        self.hasher.finalize().into()
    }
}
