//! Slot pricing: level 1 costs 0.025 ETH and every level doubles.

use crate::types::Level;
use crate::wei::Wei;

/// Price of the slot at level 1, in wei (0.025 ETH).
pub const BASE_SLOT_PRICE: Wei = Wei::from_milli_eth(25);

/// Registration opens the level-1 slot in both matrices and costs exactly
/// twice the base slot price (0.05 ETH).
pub const REGISTRATION_COST: Wei = Wei(BASE_SLOT_PRICE.0 * 2);

/// Exact price of a slot: `0.025 ETH * 2^(level-1)`.
pub fn slot_price(level: Level) -> Wei {
    Wei(BASE_SLOT_PRICE.0 << (level.get() - 1))
}
