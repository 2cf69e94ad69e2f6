//! Spectral indices too large for a machine word, stored as sparse base-`a`
//! digit lists.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::walsh::{base_digits, AdicPoint, UnitPhase};

/// `Σ d·a^p` over the stored `(p, d)` pairs; positions ascending, digits nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WalshIndex {
    order: u32,
    digits: Vec<(u64, u32)>,
}

impl WalshIndex {
    pub fn zero(order: u32) -> Self {
        WalshIndex {
            order,
            digits: Vec::new(),
        }
    }

    pub fn from_u64(order: u32, n: u64) -> Self {
        let digits = base_digits(order, n)
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| d != 0)
            .map(|(p, d)| (p as u64, d))
            .collect();
        WalshIndex { order, digits }
    }

    /// From arbitrary `(position, digit)` pairs; positions must be distinct.
    pub fn from_digits(order: u32, mut digits: Vec<(u64, u32)>) -> Result<Self> {
        digits.retain(|&(_, d)| d != 0);
        digits.sort_unstable();
        if digits.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("repeated digit position".into()));
        }
        if let Some(&(_, d)) = digits.iter().find(|&&(_, d)| d >= order) {
            return Err(Error::InvalidArgument(format!("digit {d} not below {order}")));
        }
        Ok(WalshIndex { order, digits })
    }

    /// `high·a^shift + low` where `low < a^shift`.
    pub fn compose(order: u32, high: u64, shift: u64, low: u64) -> Self {
        let mut digits: Vec<(u64, u32)> = WalshIndex::from_u64(order, low).digits;
        digits.extend(
            WalshIndex::from_u64(order, high)
                .digits
                .into_iter()
                .map(|(p, d)| (p + shift, d)),
        );
        WalshIndex { order, digits }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn digits(&self) -> &[(u64, u32)] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// `⌊log_a n⌋`, i.e. the highest occupied position.
    pub fn floor_log(&self) -> Option<u64> {
        self.digits.last().map(|&(p, _)| p)
    }

    pub fn to_u64(&self) -> Option<u64> {
        let a = self.order as u64;
        self.digits.iter().try_fold(0u64, |acc, &(p, d)| {
            let p = u32::try_from(p).ok()?;
            acc.checked_add((d as u64).checked_mul(a.checked_pow(p)?)?)
        })
    }

    pub fn to_biguint(&self) -> BigUint {
        let a = BigUint::from(self.order);
        self.digits.iter().fold(BigUint::zero(), |acc, &(p, d)| {
            acc + BigUint::from(d) * a.pow(p as u32)
        })
    }

    pub fn add_one(&self) -> WalshIndex {
        let mut digits = self.digits.clone();
        let mut pos = 0u64;
        let i = 0usize;
        loop {
            match digits.get(i) {
                Some(&(p, d)) if p == pos => {
                    if d + 1 < self.order {
                        digits[i].1 = d + 1;
                        break;
                    }
                    digits.remove(i);
                    pos += 1;
                }
                _ => {
                    digits.insert(i, (pos, 1));
                    break;
                }
            }
        }
        WalshIndex {
            order: self.order,
            digits,
        }
    }

    /// `ψ_n(x)`: only the occupied digit positions of `n` are read from `x`.
    pub fn eval(&self, x: &AdicPoint) -> UnitPhase {
        let positions: Vec<u64> = self.digits.iter().map(|&(p, _)| p + 1).collect();
        let xi = x.digits_at(&positions);
        let e: u64 = self
            .digits
            .iter()
            .zip(xi)
            .map(|(&(_, d), x)| d as u64 * x as u64)
            .sum();
        UnitPhase::new(self.order, e)
    }
}

impl Ord for WalshIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        for (x, y) in self.digits.iter().rev().zip(other.digits.iter().rev()) {
            match x.0.cmp(&y.0).then(x.1.cmp(&y.1)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.digits.len().cmp(&other.digits.len())
    }
}

impl PartialOrd for WalshIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for WalshIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.to_u64() {
            return write!(f, "{n}");
        }
        let terms: Vec<String> = self
            .digits
            .iter()
            .rev()
            .map(|&(p, d)| format!("{d}*{}^{p}", self.order))
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl WalshIndex {
    /// Parses either a decimal integer or the `d*a^p+…` form of [`fmt::Display`].
    pub fn parse(order: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(n) = u64::from_str(s) {
            return Ok(WalshIndex::from_u64(order, n));
        }
        let bad = || Error::Format(format!("bad spectral index '{s}'"));
        let mut digits = Vec::new();
        for term in s.split('+') {
            let (d, rest) = term.split_once('*').ok_or_else(bad)?;
            let (base, p) = rest.split_once('^').ok_or_else(bad)?;
            if base.trim().parse::<u32>().map_err(|_| bad())? != order {
                return Err(bad());
            }
            digits.push((
                p.trim().parse::<u64>().map_err(|_| bad())?,
                d.trim().parse::<u32>().map_err(|_| bad())?,
            ));
        }
        WalshIndex::from_digits(order, digits)
    }
}

/// Serialized as a plain number when it fits, otherwise as the digit string.
impl Serialize for WalshIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.to_u64() {
            Some(n) => s.serialize_u64(n),
            None => s.serialize_str(&self.to_string()),
        }
    }
}

impl WalshIndex {
    pub fn to_f64_lossy(&self) -> f64 {
        self.to_biguint().to_f64().unwrap_or(f64::INFINITY)
    }
}
