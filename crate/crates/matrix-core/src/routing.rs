//! Payment routing through the X3 and X4 matrices.
//!
//! Every incoming transaction value is routed to exactly one recipient per
//! matrix half: the slot holder if their slot still has room, otherwise the
//! routing reinvests the filled slot and re-places its holder upstream,
//! carrying the payment along. Dividend delivery skips blocked slots by
//! walking the per-slot referrer chain. The emitted [`PaymentEvent`]s for a
//! transaction always sum to the transaction value exactly.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pricing::slot_price;
use crate::state::ContractState;
use crate::types::{Address, Level, MatrixKind};
use crate::wei::Wei;

/// How a dividend reached its final recipient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Paid to the slot holder the routing first targeted.
    Direct,
    /// An X4 blocked slot redirected the dividend to a higher ancestor.
    Spillover,
    /// An X3 blocked slot was skipped over. Tracked separately from
    /// spillover so both can be reported.
    Skip,
    /// The payment passed through one or more reinvest re-placements before
    /// landing.
    ReinvestPassthrough,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Direct => "direct",
            Classification::Spillover => "spillover",
            Classification::Skip => "skip",
            Classification::ReinvestPassthrough => "reinvest-passthrough",
        }
    }
}

impl std::str::FromStr for Classification {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Classification::Direct),
            "spillover" => Ok(Classification::Spillover),
            "skip" => Ok(Classification::Skip),
            "reinvest-passthrough" => Ok(Classification::ReinvestPassthrough),
            other => Err(Error::MalformedTx(format!("unknown classification {other:?}"))),
        }
    }
}

/// One atomic dividend transfer.
///
/// `from` is always the transaction sender (the source of the funds), never
/// an intermediate hop; intermediate hops are summarized by the
/// classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaymentEvent {
    pub from: Address,
    pub to: Address,
    pub amount: Wei,
    pub matrix: MatrixKind,
    pub level: Level,
    pub classification: Classification,
    pub tx_ordinal: u64,
}

/// A slot that filled (and reinvested) while a transaction was routed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotFill {
    pub user: Address,
    pub matrix: MatrixKind,
    pub level: Level,
    /// Value of the slot's reinvest counter after this fill.
    pub reinvest_count: u64,
}

/// Payments plus fill notifications for one applied transaction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TxEffects {
    pub payments: Vec<PaymentEvent>,
    pub fills: Vec<SlotFill>,
}

impl TxEffects {
    pub fn total_paid(&self) -> Wei {
        self.payments.iter().map(|p| p.amount).sum()
    }
}

/// A completed routing trace: who the dividend was aimed at once placement
/// settled, who finally got it, and what happened in between.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutingTrace {
    /// The recipient the flowchart selected; differs from the final
    /// recipient only when blocked slots redirected the dividend.
    pub intended: Address,
    pub final_recipient: Address,
    pub matrix: MatrixKind,
    /// The dividend walk stepped over at least one blocked slot.
    pub blocked_redirect: bool,
    /// Number of reinvest re-placements the routing performed before the
    /// dividend was dispatched.
    pub reinvest_hops: u32,
}

/// Classify a completed routing trace.
///
/// A blocked-slot redirect determines the class (spillover in X4, skip in
/// X3) even when reinvest hops also occurred, because the redirect is what
/// moved the money away from its last intended recipient.
pub fn classify_payment(trace: &RoutingTrace) -> Classification {
    if trace.blocked_redirect {
        match trace.matrix {
            MatrixKind::X4 => Classification::Spillover,
            MatrixKind::X3 => Classification::Skip,
        }
    } else if trace.reinvest_hops > 0 {
        Classification::ReinvestPassthrough
    } else {
        debug_assert_eq!(trace.intended, trace.final_recipient);
        Classification::Direct
    }
}

/// Routes payments for a single transaction and records their effects.
pub(crate) struct Router<'a> {
    state: &'a mut ContractState,
    funder: Address,
    tx_ordinal: u64,
    reinvest_hops: u32,
    effects: TxEffects,
}

impl<'a> Router<'a> {
    pub fn new(state: &'a mut ContractState, funder: Address, tx_ordinal: u64) -> Self {
        Router {
            state,
            funder,
            tx_ordinal,
            reinvest_hops: 0,
            effects: TxEffects::default(),
        }
    }

    pub fn state(&self) -> &ContractState {
        self.state
    }

    pub fn finish(self) -> TxEffects {
        self.effects
    }

    /// Route one X3 half/amount toward `holder`'s slot at `level`.
    pub fn route_x3(
        &mut self,
        placed: Address,
        holder: Address,
        level: Level,
        amount: Wei,
    ) -> Result<(), Error> {
        self.reinvest_hops = 0;
        self.update_x3(placed, holder, level, amount)
    }

    /// Route one X4 half/amount toward `holder`'s slot at `level`.
    pub fn route_x4(
        &mut self,
        placed: Address,
        holder: Address,
        level: Level,
        amount: Wei,
    ) -> Result<(), Error> {
        self.reinvest_hops = 0;
        self.update_x4(placed, holder, level, amount)
    }

    /// X3 placement loop. Each iteration either pays out and stops, or fills
    /// the slot (clear, maybe block, count the reinvest) and continues with
    /// the holder re-placed under its nearest free upline.
    fn update_x3(
        &mut self,
        mut placed: Address,
        mut holder: Address,
        level: Level,
        amount: Wei,
    ) -> Result<(), Error> {
        loop {
            if !self.state.user(&holder)?.x3(level).active {
                return Err(Error::InactiveSlot {
                    user: holder,
                    matrix: MatrixKind::X3,
                    level,
                });
            }
            let filled = {
                let slot = self.state.user_mut(&holder)?.x3_mut(level);
                slot.referrals.push(placed.clone());
                slot.referrals.len() >= 3
            };
            if !filled {
                return self.dispatch(&holder, MatrixKind::X3, level, amount);
            }

            let next_level_active = match level.next() {
                Some(next) => self.state.user(&holder)?.x3(next).active,
                // level 12 has no next level to buy and never blocks
                None => true,
            };
            let reinvest_count = {
                let slot = self.state.user_mut(&holder)?.x3_mut(level);
                slot.referrals.clear();
                if !next_level_active && !slot.never_block {
                    slot.blocked = true;
                }
                slot.reinvest_count += 1;
                slot.reinvest_count
            };
            self.effects.fills.push(SlotFill {
                user: holder.clone(),
                matrix: MatrixKind::X3,
                level,
                reinvest_count,
            });

            if self.state.is_owner(&holder) {
                return self.dispatch(&holder, MatrixKind::X3, level, amount);
            }
            let free = self
                .state
                .find_free_referrer(&holder, MatrixKind::X3, level)?;
            self.state.user_mut(&holder)?.x3_mut(level).slot_referrer = Some(free.clone());
            self.reinvest_hops += 1;
            placed = holder;
            holder = free;
        }
    }

    /// X4 placement loop, following the two-row flowchart: a placement lands
    /// in a first-row seat (and simultaneously in the seat owner's
    /// referrer's second row) or, when the first row is full, in the second
    /// row plus a first-row seat of one of the two children. The second-row
    /// owner is paid; a sixth member triggers reinvest.
    fn update_x4(
        &mut self,
        mut placed: Address,
        mut holder: Address,
        level: Level,
        amount: Wei,
    ) -> Result<(), Error> {
        loop {
            if !self.state.user(&holder)?.x4(level).active {
                return Err(Error::InactiveSlot {
                    user: holder,
                    matrix: MatrixKind::X4,
                    level,
                });
            }

            let first_len = self.state.user(&holder)?.x4(level).first_level.len();
            let fill_holder: Address;
            if first_len < 2 {
                self.state
                    .user_mut(&holder)?
                    .x4_mut(level)
                    .first_level
                    .push(placed.clone());
                self.state.user_mut(&placed)?.x4_mut(level).slot_referrer = Some(holder.clone());
                if self.state.is_owner(&holder) {
                    return self.dispatch(&holder, MatrixKind::X4, level, amount);
                }
                let parent = self
                    .state
                    .user(&holder)?
                    .x4(level)
                    .slot_referrer
                    .clone()
                    .ok_or_else(|| {
                        Error::InternalRouting(format!(
                            "active x4 level {level} slot of non-owner {holder} has no referrer"
                        ))
                    })?;
                self.state
                    .user_mut(&parent)?
                    .x4_mut(level)
                    .second_level
                    .push(placed.clone());
                fill_holder = parent;
            } else {
                self.state
                    .user_mut(&holder)?
                    .x4_mut(level)
                    .second_level
                    .push(placed.clone());
                let seat = self.pick_first_row_seat(&holder, &placed, level)?;
                self.state
                    .user_mut(&seat)?
                    .x4_mut(level)
                    .first_level
                    .push(placed.clone());
                self.state.user_mut(&placed)?.x4_mut(level).slot_referrer = Some(seat);
                fill_holder = holder.clone();
            }

            if self.state.user(&fill_holder)?.x4(level).second_level.len() < 4 {
                return self.dispatch(&fill_holder, MatrixKind::X4, level, amount);
            }

            // six members: reinvest the filled slot
            let parent = self
                .state
                .user(&fill_holder)?
                .x4(level)
                .slot_referrer
                .clone();
            if let Some(parent) = parent {
                let closes_seat = {
                    let pslot = self.state.user(&parent)?.x4(level);
                    pslot.first_level.len() == 2
                        && (pslot.first_level[0] == fill_holder
                            || pslot.first_level[1] == fill_holder)
                };
                if closes_seat {
                    self.state.user_mut(&parent)?.x4_mut(level).closed_part =
                        Some(fill_holder.clone());
                }
            }
            let next_level_active = match level.next() {
                Some(next) => self.state.user(&fill_holder)?.x4(next).active,
                None => true,
            };
            let reinvest_count = {
                let slot = self.state.user_mut(&fill_holder)?.x4_mut(level);
                slot.first_level.clear();
                slot.second_level.clear();
                slot.closed_part = None;
                if !next_level_active && !slot.never_block {
                    slot.blocked = true;
                }
                slot.reinvest_count += 1;
                slot.reinvest_count
            };
            self.effects.fills.push(SlotFill {
                user: fill_holder.clone(),
                matrix: MatrixKind::X4,
                level,
                reinvest_count,
            });

            if self.state.is_owner(&fill_holder) {
                return self.dispatch(&fill_holder, MatrixKind::X4, level, amount);
            }
            let free = self
                .state
                .find_free_referrer(&fill_holder, MatrixKind::X4, level)?;
            self.reinvest_hops += 1;
            placed = fill_holder;
            holder = free;
        }
    }

    /// Pick which of the holder's two first-row children receives the new
    /// member when the first row is full. The closed-part mark steers
    /// placements away from a child whose matrix just filled; otherwise the
    /// child with the lower first-row fill count wins, ties toward the
    /// earlier-seated child.
    fn pick_first_row_seat(
        &self,
        holder: &Address,
        placed: &Address,
        level: Level,
    ) -> Result<Address, Error> {
        let slot = self.state.user(holder)?.x4(level);
        let first = &slot.first_level;
        debug_assert_eq!(first.len(), 2);
        let (f0, f1) = (first[0].clone(), first[1].clone());
        let index = if let Some(closed) = &slot.closed_part {
            if (f0 == f1 && f0 == *closed) || f0 == *closed {
                1
            } else {
                0
            }
        } else if f1 == *placed {
            0
        } else if f0 == *placed {
            1
        } else {
            let len0 = self.state.user(&f0)?.x4(level).first_level.len();
            let len1 = self.state.user(&f1)?.x4(level).first_level.len();
            if len0 <= len1 {
                0
            } else {
                1
            }
        };
        Ok(if index == 0 { f0 } else { f1 })
    }

    /// Deliver `amount` to `intended`, skipping blocked slots along the
    /// per-slot referrer chain. The owner is never blocked, so the walk
    /// terminates; if scrambling ever produced a referrer cycle among
    /// blocked slots the payment falls through to the owner, the universal
    /// terminal payee.
    fn dispatch(
        &mut self,
        intended: &Address,
        matrix: MatrixKind,
        level: Level,
        amount: Wei,
    ) -> Result<(), Error> {
        let mut recipient = intended.clone();
        let mut redirected = false;
        let mut resolved = false;
        for _ in 0..=self.state.user_count() {
            let user = self.state.user(&recipient)?;
            let (blocked, next) = match matrix {
                MatrixKind::X3 => {
                    let s = user.x3(level);
                    (s.blocked, s.slot_referrer.clone())
                }
                MatrixKind::X4 => {
                    let s = user.x4(level);
                    (s.blocked, s.slot_referrer.clone())
                }
            };
            if !blocked {
                resolved = true;
                break;
            }
            redirected = true;
            match next {
                Some(next) => recipient = next,
                None => break,
            }
        }
        if !resolved {
            recipient = self.state.owner().clone();
        }

        let trace = RoutingTrace {
            intended: intended.clone(),
            final_recipient: recipient.clone(),
            matrix,
            blocked_redirect: redirected,
            reinvest_hops: self.reinvest_hops,
        };
        let classification = classify_payment(&trace);
        self.state.credit(&recipient, amount);
        self.effects.payments.push(PaymentEvent {
            from: self.funder.clone(),
            to: recipient,
            amount,
            matrix,
            level,
            classification,
            tx_ordinal: self.tx_ordinal,
        });
        Ok(())
    }
}

/// Route an X3 payment directly at a slot. Low-level entry point used by the
/// transaction operations; the payer must be registered, the amount must be
/// the slot price, and the holder's slot must be active.
pub fn route_x3(
    state: &mut ContractState,
    payer: &Address,
    slot_holder: &Address,
    level: Level,
    amount: Wei,
    tx_ordinal: u64,
) -> Result<Vec<PaymentEvent>, Error> {
    let want = slot_price(level);
    if amount != want {
        return Err(Error::BadValue { want, got: amount });
    }
    state.user(payer)?;
    let mut router = Router::new(state, payer.clone(), tx_ordinal);
    router.route_x3(payer.clone(), slot_holder.clone(), level, amount)?;
    Ok(router.finish().payments)
}

/// Route an X4 payment directly at a slot. Same contract as [`route_x3`].
pub fn route_x4(
    state: &mut ContractState,
    payer: &Address,
    slot_holder: &Address,
    level: Level,
    amount: Wei,
    tx_ordinal: u64,
) -> Result<Vec<PaymentEvent>, Error> {
    let want = slot_price(level);
    if amount != want {
        return Err(Error::BadValue { want, got: amount });
    }
    state.user(payer)?;
    let mut router = Router::new(state, payer.clone(), tx_ordinal);
    router.route_x4(payer.clone(), slot_holder.clone(), level, amount)?;
    Ok(router.finish().payments)
}
