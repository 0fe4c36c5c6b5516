//! Contract state: per-user records, per-slot matrix state, cumulative ledger.
//!
//! The state is a faithful off-chain model of what the contract keeps on
//! chain for each user: the upline link, a partner counter, and twelve slots
//! per matrix. Slot state evolves only through the routing operations in
//! [`crate::routing`] and the public entry points in [`crate::ops`].

use std::collections::BTreeMap;

use crate::error::Error;
use crate::types::{Address, Level, MatrixKind};
use crate::wei::Wei;

/// One X3 slot of one user at one level.
///
/// `referrals` holds the members currently counted toward the three-in-a-row
/// fill; it is cleared on every third placement. `slot_referrer` is the
/// payment-graph parent, initialized from the upline and re-pointed whenever
/// the holder is re-placed upstream on a reinvest.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct X3Slot {
    pub active: bool,
    pub slot_referrer: Option<Address>,
    pub referrals: Vec<Address>,
    pub blocked: bool,
    /// Set once the next level has been bought; the slot can then never
    /// block again, even if the fill conditions recur.
    pub never_block: bool,
    pub reinvest_count: u64,
}

/// One X4 slot of one user at one level.
///
/// The X4 matrix is two rows deep: two first-level seats and four
/// second-level seats. `closed_part` marks a first-level child whose own
/// matrix just filled, which biases subsequent second-row placements away
/// from it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct X4Slot {
    pub active: bool,
    pub slot_referrer: Option<Address>,
    pub first_level: Vec<Address>,
    pub second_level: Vec<Address>,
    pub blocked: bool,
    pub never_block: bool,
    pub reinvest_count: u64,
    pub closed_part: Option<Address>,
}

/// Everything the contract stores for one user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserRecord {
    pub address: Address,
    /// The account whose referral code this user registered under. The owner
    /// is its own upline.
    pub upline: Address,
    /// Number of registrations that named this user as upline.
    pub partners_count: u64,
    /// Position in registration order; the owner is 0.
    pub registration_ordinal: u64,
    x3: [X3Slot; Level::COUNT],
    x4: [X4Slot; Level::COUNT],
}

impl UserRecord {
    fn new(address: Address, upline: Address, registration_ordinal: u64) -> Self {
        UserRecord {
            address,
            upline,
            partners_count: 0,
            registration_ordinal,
            x3: Default::default(),
            x4: Default::default(),
        }
    }

    pub fn x3(&self, level: Level) -> &X3Slot {
        &self.x3[level.index()]
    }

    pub fn x3_mut(&mut self, level: Level) -> &mut X3Slot {
        &mut self.x3[level.index()]
    }

    pub fn x4(&self, level: Level) -> &X4Slot {
        &self.x4[level.index()]
    }

    pub fn x4_mut(&mut self, level: Level) -> &mut X4Slot {
        &mut self.x4[level.index()]
    }

    pub fn is_active(&self, matrix: MatrixKind, level: Level) -> bool {
        match matrix {
            MatrixKind::X3 => self.x3(level).active,
            MatrixKind::X4 => self.x4(level).active,
        }
    }

    /// Count of active levels in both matrices (includes the two slots
    /// opened by registration).
    pub fn active_level_count(&self) -> usize {
        self.x3.iter().filter(|s| s.active).count() + self.x4.iter().filter(|s| s.active).count()
    }
}

/// Cumulative money flow for one address, in wei.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LedgerEntry {
    /// Dividends received.
    pub received: Wei,
    /// Transaction value paid into the contract.
    pub sent: Wei,
}

/// The full contract state.
///
/// A single logical writer mutates a `ContractState`; analytics over a
/// finished state are read-only. All maps are ordered so that iteration, and
/// therefore every derived artifact, is deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractState {
    owner: Address,
    users: BTreeMap<Address, UserRecord>,
    next_ordinal: u64,
    ledger: BTreeMap<Address, LedgerEntry>,
}

impl ContractState {
    /// Initialize the contract: the owner exists from the start with all 24
    /// slots open for free, is its own upline, and can never be blocked.
    pub fn new(owner: Address) -> Self {
        let mut record = UserRecord::new(owner.clone(), owner.clone(), 0);
        for level in Level::all() {
            record.x3_mut(level).active = true;
            record.x3_mut(level).never_block = true;
            record.x4_mut(level).active = true;
            record.x4_mut(level).never_block = true;
        }
        let mut users = BTreeMap::new();
        users.insert(owner.clone(), record);
        ContractState {
            owner,
            users,
            next_ordinal: 1,
            ledger: BTreeMap::new(),
        }
    }

    pub fn owner(&self) -> &Address {
        &self.owner
    }

    pub fn is_owner(&self, addr: &Address) -> bool {
        *addr == self.owner
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn is_registered(&self, addr: &Address) -> bool {
        self.users.contains_key(addr)
    }

    pub fn user(&self, addr: &Address) -> Result<&UserRecord, Error> {
        self.users
            .get(addr)
            .ok_or_else(|| Error::NotRegistered(addr.clone()))
    }

    pub fn user_mut(&mut self, addr: &Address) -> Result<&mut UserRecord, Error> {
        self.users
            .get_mut(addr)
            .ok_or_else(|| Error::NotRegistered(addr.clone()))
    }

    /// Users in address order.
    pub fn users(&self) -> impl Iterator<Item = &UserRecord> {
        self.users.values()
    }

    pub(crate) fn insert_user(&mut self, address: Address, upline: Address) -> &mut UserRecord {
        let ordinal = self.next_ordinal;
        self.next_ordinal += 1;
        self.users
            .entry(address.clone())
            .or_insert_with(|| UserRecord::new(address, upline, ordinal))
    }

    pub fn next_ordinal(&self) -> u64 {
        self.next_ordinal
    }

    /// Cumulative flows per address, in address order. Addresses that never
    /// moved money are absent.
    pub fn ledger(&self) -> impl Iterator<Item = (&Address, &LedgerEntry)> {
        self.ledger.iter()
    }

    pub fn ledger_entry(&self, addr: &Address) -> LedgerEntry {
        self.ledger.get(addr).copied().unwrap_or_default()
    }

    pub(crate) fn credit(&mut self, addr: &Address, amount: Wei) {
        self.ledger.entry(addr.clone()).or_default().received += amount;
    }

    pub(crate) fn debit(&mut self, addr: &Address, amount: Wei) {
        self.ledger.entry(addr.clone()).or_default().sent += amount;
    }

    /// Walk the upline chain starting at `user`'s upline and return the
    /// nearest ancestor whose `(matrix, level)` slot is active. The owner has
    /// every level active and is its own upline, so the walk always
    /// terminates there at the latest.
    pub fn find_free_referrer(
        &self,
        user: &Address,
        matrix: MatrixKind,
        level: Level,
    ) -> Result<Address, Error> {
        let mut current = self.user(user)?;
        for _ in 0..=self.users.len() {
            let upline = self.user(&current.upline)?;
            if upline.is_active(matrix, level) {
                return Ok(upline.address.clone());
            }
            if upline.address == self.owner {
                // unreachable while the owner invariant holds
                break;
            }
            current = upline;
        }
        Err(Error::InternalRouting(format!(
            "upline chain of {user} did not reach an active {matrix} level {level} slot"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(s: &str) -> Address {
        Address::new(s).unwrap()
    }

    #[test]
    fn new_state_opens_all_owner_slots() {
        let owner = addr("0xowner");
        let state = ContractState::new(owner.clone());
        assert_eq!(state.user_count(), 1);
        let record = state.user(&owner).unwrap();
        for level in Level::all() {
            assert!(record.x3(level).active);
            assert!(record.x4(level).active);
            assert!(!record.x3(level).blocked);
            assert!(!record.x4(level).blocked);
        }
        assert_eq!(record.upline, owner);
        assert_eq!(record.registration_ordinal, 0);
        assert_eq!(state.ledger().count(), 0);
    }

    #[test]
    fn state_transfers_between_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<ContractState>();
    }

    #[test]
    fn find_free_referrer_returns_direct_upline_when_active() {
        let owner = addr("0xowner");
        let mut state = ContractState::new(owner.clone());
        let a = addr("0xa");
        state.insert_user(a.clone(), owner.clone());
        state
            .user_mut(&a)
            .unwrap()
            .x3_mut(Level::new(1).unwrap())
            .active = true;
        let b = addr("0xb");
        state.insert_user(b.clone(), a.clone());

        let free = state
            .find_free_referrer(&b, MatrixKind::X3, Level::new(1).unwrap())
            .unwrap();
        assert_eq!(free, a);
        // level 2 is inactive for `a`, so the walk continues to the owner
        let free = state
            .find_free_referrer(&b, MatrixKind::X3, Level::new(2).unwrap())
            .unwrap();
        assert_eq!(free, owner);
    }
}
