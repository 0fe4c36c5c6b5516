//! Transaction-level operations: registration, level purchase, and the
//! generic transaction dispatcher used by replay and simulation.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pricing::{slot_price, REGISTRATION_COST};
use crate::routing::{Router, TxEffects};
use crate::state::ContractState;
use crate::types::{Address, Level, MatrixKind};
use crate::wei::Wei;

/// The contract function a transaction invokes.
///
/// `Fallback` models a transfer of exactly the registration cost with a
/// missing or unknown function selector; the contract reroutes it to
/// registration with the owner as upline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TxFunction {
    Register,
    BuyNewLevel,
    Fallback,
}

impl TxFunction {
    pub fn as_str(self) -> &'static str {
        match self {
            TxFunction::Register => "register",
            TxFunction::BuyNewLevel => "buyNewLevel",
            TxFunction::Fallback => "fallback",
        }
    }

    /// Both explicit and fallback registrations create a user.
    pub fn is_registration(self) -> bool {
        matches!(self, TxFunction::Register | TxFunction::Fallback)
    }
}

impl std::str::FromStr for TxFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "register" => Ok(TxFunction::Register),
            "buyNewLevel" => Ok(TxFunction::BuyNewLevel),
            "fallback" => Ok(TxFunction::Fallback),
            other => Err(Error::MalformedTx(format!("unknown function {other:?}"))),
        }
    }
}

/// One transaction, as ingested from a log or produced by the simulator.
///
/// Field presence depends on the function: `register` may carry a referrer,
/// `buyNewLevel` requires matrix and level, `fallback` carries neither.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TxRecord {
    pub ordinal: u64,
    pub sender: Address,
    pub function: TxFunction,
    pub referrer: Option<Address>,
    pub matrix: Option<MatrixKind>,
    pub level: Option<Level>,
    pub value: Wei,
    pub fee: Wei,
}

/// Register `new_user` under `referrer` (the owner when absent).
///
/// The value must be exactly the registration cost. It is split into two
/// equal halves, one routed through the X3 matrix and one through the X4
/// matrix, both at level 1.
pub fn register(
    state: &mut ContractState,
    new_user: &Address,
    referrer: Option<&Address>,
    value: Wei,
    tx_ordinal: u64,
) -> Result<Vec<crate::routing::PaymentEvent>, Error> {
    register_traced(state, new_user, referrer, value, tx_ordinal).map(|fx| fx.payments)
}

/// [`register`] variant that also reports which slots filled, for callers
/// that react to fills (e.g. the purchase policy of a simulator).
pub fn register_traced(
    state: &mut ContractState,
    new_user: &Address,
    referrer: Option<&Address>,
    value: Wei,
    tx_ordinal: u64,
) -> Result<TxEffects, Error> {
    if value != REGISTRATION_COST {
        return Err(Error::BadValue {
            want: REGISTRATION_COST,
            got: value,
        });
    }
    if state.is_registered(new_user) {
        return Err(Error::DuplicateRegistration(new_user.clone()));
    }
    let upline = match referrer {
        Some(r) if r == new_user => return Err(Error::SelfReferral(new_user.clone())),
        Some(r) if !state.is_registered(r) => return Err(Error::UnknownReferrer(r.clone())),
        Some(r) => r.clone(),
        None => state.owner().clone(),
    };

    let level1 = Level::MIN;
    {
        let record = state.insert_user(new_user.clone(), upline.clone());
        record.x3_mut(level1).active = true;
        record.x4_mut(level1).active = true;
    }
    state.user_mut(&upline)?.partners_count += 1;
    state.debit(new_user, value);

    let half = slot_price(level1);
    let free_x3 = state.find_free_referrer(new_user, MatrixKind::X3, level1)?;
    state.user_mut(new_user)?.x3_mut(level1).slot_referrer = Some(free_x3.clone());
    let mut router = Router::new(state, new_user.clone(), tx_ordinal);
    router.route_x3(new_user.clone(), free_x3, level1, half)?;
    let free_x4 = router
        .state()
        .find_free_referrer(new_user, MatrixKind::X4, level1)?;
    router.route_x4(new_user.clone(), free_x4, level1, half)?;
    let effects = router.finish();

    check_conservation(&effects, value)?;
    Ok(effects)
}

/// Buy the next slot for `user` in `matrix` at `level`.
///
/// Requires the previous level to be active and the target inactive, and
/// value equal to the slot price. A blocked previous-level slot is unblocked
/// and can never block again. The full value routes through the purchased
/// matrix at the purchased level.
pub fn buy_new_level(
    state: &mut ContractState,
    user: &Address,
    matrix: MatrixKind,
    level: Level,
    value: Wei,
    tx_ordinal: u64,
) -> Result<Vec<crate::routing::PaymentEvent>, Error> {
    buy_new_level_traced(state, user, matrix, level, value, tx_ordinal).map(|fx| fx.payments)
}

/// [`buy_new_level`] variant that also reports slot fills.
pub fn buy_new_level_traced(
    state: &mut ContractState,
    user: &Address,
    matrix: MatrixKind,
    level: Level,
    value: Wei,
    tx_ordinal: u64,
) -> Result<TxEffects, Error> {
    let record = state.user(user)?;
    let want = slot_price(level);
    if value != want {
        return Err(Error::BadValue { want, got: value });
    }
    if record.is_active(matrix, level) {
        return Err(Error::LevelAlreadyActive {
            user: user.clone(),
            matrix,
            level,
        });
    }
    // level 1 is always active for registered users, so reaching this point
    // means level >= 2 and a previous level exists
    let prev = level.prev().ok_or_else(|| Error::LevelAlreadyActive {
        user: user.clone(),
        matrix,
        level,
    })?;
    if !record.is_active(matrix, prev) {
        return Err(Error::PreviousLevelInactive {
            user: user.clone(),
            matrix,
            level,
        });
    }

    // owning this level permanently protects the previous one
    {
        let record = state.user_mut(user)?;
        match matrix {
            MatrixKind::X3 => {
                let slot = record.x3_mut(prev);
                slot.blocked = false;
                slot.never_block = true;
            }
            MatrixKind::X4 => {
                let slot = record.x4_mut(prev);
                slot.blocked = false;
                slot.never_block = true;
            }
        }
    }
    state.debit(user, value);

    let free = state.find_free_referrer(user, matrix, level)?;
    let effects = match matrix {
        MatrixKind::X3 => {
            let record = state.user_mut(user)?;
            record.x3_mut(level).slot_referrer = Some(free.clone());
            record.x3_mut(level).active = true;
            let mut router = Router::new(state, user.clone(), tx_ordinal);
            router.route_x3(user.clone(), free, level, value)?;
            router.finish()
        }
        MatrixKind::X4 => {
            state.user_mut(user)?.x4_mut(level).active = true;
            let mut router = Router::new(state, user.clone(), tx_ordinal);
            router.route_x4(user.clone(), free, level, value)?;
            router.finish()
        }
    };

    check_conservation(&effects, value)?;
    Ok(effects)
}

/// Apply one transaction record to the state, dispatching on its function.
pub fn apply_tx(
    state: &mut ContractState,
    tx: &TxRecord,
) -> Result<Vec<crate::routing::PaymentEvent>, Error> {
    apply_tx_traced(state, tx).map(|fx| fx.payments)
}

/// [`apply_tx`] variant that also reports slot fills.
pub fn apply_tx_traced(state: &mut ContractState, tx: &TxRecord) -> Result<TxEffects, Error> {
    match tx.function {
        TxFunction::Register => {
            if tx.matrix.is_some() || tx.level.is_some() {
                return Err(Error::MalformedTx(
                    "register carries no matrix or level".into(),
                ));
            }
            register_traced(state, &tx.sender, tx.referrer.as_ref(), tx.value, tx.ordinal)
        }
        TxFunction::Fallback => {
            if tx.referrer.is_some() || tx.matrix.is_some() || tx.level.is_some() {
                return Err(Error::MalformedTx(
                    "fallback carries no referrer, matrix or level".into(),
                ));
            }
            register_traced(state, &tx.sender, None, tx.value, tx.ordinal)
        }
        TxFunction::BuyNewLevel => {
            if tx.referrer.is_some() {
                return Err(Error::MalformedTx("buyNewLevel carries no referrer".into()));
            }
            let matrix = tx
                .matrix
                .ok_or_else(|| Error::MalformedTx("buyNewLevel requires a matrix".into()))?;
            let level = tx
                .level
                .ok_or_else(|| Error::MalformedTx("buyNewLevel requires a level".into()))?;
            buy_new_level_traced(state, &tx.sender, matrix, level, tx.value, tx.ordinal)
        }
    }
}

fn check_conservation(effects: &TxEffects, value: Wei) -> Result<(), Error> {
    let paid = effects.total_paid();
    if paid != value {
        return Err(Error::InternalRouting(format!(
            "routing paid {paid} wei for a {value} wei transaction"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::Classification;

    fn addr(s: &str) -> Address {
        Address::new(s).unwrap()
    }

    fn setup() -> (ContractState, Address) {
        let owner = addr("0xowner");
        (ContractState::new(owner.clone()), owner)
    }

    #[test]
    fn register_under_owner_pays_owner_both_halves() {
        let (mut state, owner) = setup();
        let a = addr("0xa");
        let events = register(&mut state, &a, Some(&owner), REGISTRATION_COST, 1).unwrap();
        assert_eq!(events.len(), 2);
        for event in &events {
            assert_eq!(event.to, owner);
            assert_eq!(event.amount, Wei::from_milli_eth(25));
            assert_eq!(event.classification, Classification::Direct);
        }
        let record = state.user(&a).unwrap();
        assert!(record.x3(Level::MIN).active);
        assert!(record.x4(Level::MIN).active);
        assert_eq!(record.upline, owner);
        assert_eq!(state.user(&owner).unwrap().partners_count, 1);
        assert_eq!(state.ledger_entry(&a).sent, REGISTRATION_COST);
        assert_eq!(state.ledger_entry(&owner).received, REGISTRATION_COST);
    }

    #[test]
    fn register_rejects_wrong_value() {
        let (mut state, owner) = setup();
        let err = register(
            &mut state,
            &addr("0xa"),
            Some(&owner),
            Wei::from_milli_eth(40),
            1,
        )
        .unwrap_err();
        assert_eq!(err.code(), "bad-value");
        assert!(!state.is_registered(&addr("0xa")));
    }

    #[test]
    fn register_rejects_duplicates_and_bad_referrers() {
        let (mut state, owner) = setup();
        let a = addr("0xa");
        register(&mut state, &a, Some(&owner), REGISTRATION_COST, 1).unwrap();

        let dup = register(&mut state, &a, Some(&owner), REGISTRATION_COST, 2).unwrap_err();
        assert_eq!(dup.code(), "duplicate-registration");

        let unknown =
            register(&mut state, &addr("0xb"), Some(&addr("0xzz")), REGISTRATION_COST, 2)
                .unwrap_err();
        assert_eq!(unknown.code(), "unknown-referrer");

        let selfref =
            register(&mut state, &addr("0xb"), Some(&addr("0xb")), REGISTRATION_COST, 2)
                .unwrap_err();
        assert_eq!(selfref.code(), "self-referral");
    }

    #[test]
    fn missing_referrer_defaults_to_owner() {
        let (mut state, owner) = setup();
        let a = addr("0xa");
        register(&mut state, &a, None, REGISTRATION_COST, 1).unwrap();
        assert_eq!(state.user(&a).unwrap().upline, owner);
        assert_eq!(state.user(&owner).unwrap().partners_count, 1);
    }

    #[test]
    fn buy_new_level_routes_full_value_at_that_level() {
        let (mut state, owner) = setup();
        let a = addr("0xa");
        register(&mut state, &a, Some(&owner), REGISTRATION_COST, 1).unwrap();
        let l2 = Level::new(2).unwrap();
        let events =
            buy_new_level(&mut state, &a, MatrixKind::X3, l2, slot_price(l2), 2).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].level, l2);
        assert_eq!(events[0].amount, slot_price(l2));
        assert_eq!(events[0].to, owner);
        assert!(state.user(&a).unwrap().x3(l2).active);
    }

    #[test]
    fn buy_new_level_error_codes() {
        let (mut state, owner) = setup();
        let a = addr("0xa");
        register(&mut state, &a, Some(&owner), REGISTRATION_COST, 1).unwrap();
        let l2 = Level::new(2).unwrap();
        let l3 = Level::new(3).unwrap();

        let err = buy_new_level(&mut state, &addr("0xzz"), MatrixKind::X3, l2, slot_price(l2), 2)
            .unwrap_err();
        assert_eq!(err.code(), "not-registered");

        let err =
            buy_new_level(&mut state, &a, MatrixKind::X3, l2, Wei::from_milli_eth(25), 2)
                .unwrap_err();
        assert_eq!(err.code(), "bad-value");

        let err =
            buy_new_level(&mut state, &a, MatrixKind::X3, l3, slot_price(l3), 2).unwrap_err();
        assert_eq!(err.code(), "previous-level-inactive");

        buy_new_level(&mut state, &a, MatrixKind::X3, l2, slot_price(l2), 2).unwrap();
        let err =
            buy_new_level(&mut state, &a, MatrixKind::X3, l2, slot_price(l2), 3).unwrap_err();
        assert_eq!(err.code(), "level-already-active");

        let err = buy_new_level(
            &mut state,
            &a,
            MatrixKind::X3,
            Level::MIN,
            slot_price(Level::MIN),
            4,
        )
        .unwrap_err();
        assert_eq!(err.code(), "level-already-active");
    }

    #[test]
    fn fallback_registers_under_owner() {
        let (mut state, owner) = setup();
        let tx = TxRecord {
            ordinal: 1,
            sender: addr("0xa"),
            function: TxFunction::Fallback,
            referrer: None,
            matrix: None,
            level: None,
            value: REGISTRATION_COST,
            fee: Wei::ZERO,
        };
        let events = apply_tx(&mut state, &tx).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(state.user(&addr("0xa")).unwrap().upline, owner);
        assert_eq!(state.user(&owner).unwrap().partners_count, 1);
    }

    #[test]
    fn apply_tx_rejects_incomplete_purchases() {
        let (mut state, _) = setup();
        let tx = TxRecord {
            ordinal: 1,
            sender: addr("0xa"),
            function: TxFunction::BuyNewLevel,
            referrer: None,
            matrix: Some(MatrixKind::X3),
            level: None,
            value: slot_price(Level::MIN),
            fee: Wei::ZERO,
        };
        assert_eq!(apply_tx(&mut state, &tx).unwrap_err().code(), "malformed-tx");
    }
}
