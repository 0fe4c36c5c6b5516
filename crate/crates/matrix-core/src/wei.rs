//! Exact integer wei arithmetic.
//!
//! Every amount in the system is an integer number of wei (1 ETH = 10^18 wei).
//! Floating point never touches money: conservation checks demand bit-exact
//! sums, so all arithmetic is checked integer math on `u128`/`i128`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of wei in one ether.
pub const WEI_PER_ETH: u128 = 1_000_000_000_000_000_000;

/// An unsigned amount of wei.
///
/// `u128` comfortably holds the 2^96 range the contract needs. Overflow in
/// addition or multiplication is a program bug, not a data condition, and
/// panics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wei(pub u128);

impl Wei {
    pub const ZERO: Wei = Wei(0);

    pub const fn from_wei(amount: u128) -> Self {
        Wei(amount)
    }

    /// Whole ether to wei.
    pub const fn from_eth(eth: u128) -> Self {
        Wei(eth * WEI_PER_ETH)
    }

    /// Thousandths of an ether to wei (0.025 ETH == `from_milli_eth(25)`).
    pub const fn from_milli_eth(milli: u128) -> Self {
        Wei(milli * (WEI_PER_ETH / 1000))
    }

    pub const fn as_u128(self) -> u128 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn checked_sub(self, rhs: Wei) -> Option<Wei> {
        self.0.checked_sub(rhs.0).map(Wei)
    }

    /// Signed view for net-position arithmetic.
    pub fn signed(self) -> SignedWei {
        SignedWei(i128::try_from(self.0).expect("wei amount exceeds i128 range"))
    }

    /// Render as a decimal ETH string with trailing zeros trimmed,
    /// e.g. 25_000_000_000_000_000 wei -> "0.025".
    pub fn to_eth_string(self) -> String {
        let whole = self.0 / WEI_PER_ETH;
        let frac = self.0 % WEI_PER_ETH;
        if frac == 0 {
            return format!("{whole}");
        }
        let mut frac = format!("{frac:018}");
        while frac.ends_with('0') {
            frac.pop();
        }
        format!("{whole}.{frac}")
    }
}

impl Add for Wei {
    type Output = Wei;
    fn add(self, rhs: Wei) -> Wei {
        Wei(self.0.checked_add(rhs.0).expect("wei addition overflow"))
    }
}

impl AddAssign for Wei {
    fn add_assign(&mut self, rhs: Wei) {
        *self = *self + rhs;
    }
}

impl Sub for Wei {
    type Output = Wei;
    fn sub(self, rhs: Wei) -> Wei {
        Wei(self.0.checked_sub(rhs.0).expect("wei subtraction underflow"))
    }
}

impl Mul<u128> for Wei {
    type Output = Wei;
    fn mul(self, rhs: u128) -> Wei {
        Wei(self.0.checked_mul(rhs).expect("wei multiplication overflow"))
    }
}

impl Sum for Wei {
    fn sum<I: Iterator<Item = Wei>>(iter: I) -> Wei {
        iter.fold(Wei::ZERO, |acc, w| acc + w)
    }
}

impl fmt::Display for Wei {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Wei {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<u128>().map(Wei)
    }
}

// Wei serializes as a decimal string: JSON numbers silently lose precision
// past 2^53 in common tooling.
impl Serialize for Wei {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Wei {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A signed amount of wei, for net positions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedWei(pub i128);

impl SignedWei {
    pub const ZERO: SignedWei = SignedWei(0);

    pub const fn as_i128(self) -> i128 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Magnitude as unsigned wei.
    pub fn abs(self) -> Wei {
        Wei(self.0.unsigned_abs())
    }

    pub fn to_eth_string(self) -> String {
        if self.0 < 0 {
            format!("-{}", self.abs().to_eth_string())
        } else {
            self.abs().to_eth_string()
        }
    }
}

impl Add for SignedWei {
    type Output = SignedWei;
    fn add(self, rhs: SignedWei) -> SignedWei {
        SignedWei(self.0.checked_add(rhs.0).expect("signed wei overflow"))
    }
}

impl AddAssign for SignedWei {
    fn add_assign(&mut self, rhs: SignedWei) {
        *self = *self + rhs;
    }
}

impl Sub for SignedWei {
    type Output = SignedWei;
    fn sub(self, rhs: SignedWei) -> SignedWei {
        SignedWei(self.0.checked_sub(rhs.0).expect("signed wei overflow"))
    }
}

impl Sum for SignedWei {
    fn sum<I: Iterator<Item = SignedWei>>(iter: I) -> SignedWei {
        iter.fold(SignedWei::ZERO, |acc, w| acc + w)
    }
}

impl fmt::Display for SignedWei {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for SignedWei {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<i128>().map(SignedWei)
    }
}

impl Serialize for SignedWei {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for SignedWei {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
