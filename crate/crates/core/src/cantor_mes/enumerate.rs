//! A fixed bijection between positive integers and open rational intervals.
//!
//! Positive rationals are indexed by the Calkin–Wilf tree, all rationals by
//! interleaving signs, and pairs `(left, length)` by the Cantor pairing.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::{rat_to_string, Rat};

/// Open interval `(left, right)` with rational endpoints, `left < right`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    left: Rat,
    right: Rat,
}

impl RationalInterval {
    pub fn new(left: Rat, right: Rat) -> Result<Self> {
        if left >= right {
            return Err(Error::invalid(format!(
                "interval endpoints must satisfy left < right, got ({}, {})",
                rat_to_string(&left),
                rat_to_string(&right)
            )));
        }
        Ok(RationalInterval { left, right })
    }

    pub fn left(&self) -> &Rat {
        &self.left
    }

    pub fn right(&self) -> &Rat {
        &self.right
    }

    pub fn length(&self) -> Rat {
        &self.right - &self.left
    }

    pub fn contains_point(&self, x: &Rat) -> bool {
        &self.left < x && x < &self.right
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &RationalInterval) -> bool {
        other.left <= self.left && self.right <= other.right
    }

    /// Parses `a,b`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::invalid(format!("expected `left,right`, got `{s}`")))?;
        Self::new(crate::numkernel::parse_rat(a)?, crate::numkernel::parse_rat(b)?)
    }
}

impl std::fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", rat_to_string(&self.left), rat_to_string(&self.right))
    }
}

impl Serialize for RationalInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [rat_to_string(&self.left), rat_to_string(&self.right)].serialize(s)
    }
}

/// The `m`-th positive rational in Calkin–Wilf breadth-first order (`m ≥ 1`).
pub fn calkin_wilf(m: u64) -> (u64, u64) {
    assert!(m >= 1, "Calkin–Wilf index starts at 1");
    let (mut a, mut b) = (1u64, 1u64);
    let bits = 64 - m.leading_zeros();
    for k in (0..bits - 1).rev() {
        if (m >> k) & 1 == 0 {
            b += a;
        } else {
            a += b;
        }
    }
    (a, b)
}

/// Inverse of [`calkin_wilf`]; `None` when the index overflows `u64`.
pub fn calkin_wilf_index(q: &Rat) -> Option<u64> {
    if !q.is_positive() {
        return None;
    }
    let mut a: BigInt = q.numer().clone();
    let mut b: BigInt = q.denom().clone();
    let mut path: Vec<bool> = Vec::new();
    while a != b {
        if a < b {
            path.push(false);
            b -= &a;
        } else {
            path.push(true);
            a -= &b;
        }
        if path.len() > 63 {
            return None;
        }
    }
    let mut m = 1u64;
    for bit in path.into_iter().rev() {
        m = (m << 1) | bit as u64;
    }
    Some(m)
}

fn cw_rat(m: u64) -> Rat {
    let (a, b) = calkin_wilf(m);
    Rat::new(a.into(), b.into())
}

/// All rationals: `1 ↦ 0`, `2m ↦ cw(m)`, `2m+1 ↦ −cw(m)`.
pub fn rational_by_index(i: u64) -> Rat {
    assert!(i >= 1);
    if i == 1 {
        Rat::zero()
    } else if i % 2 == 0 {
        cw_rat(i / 2)
    } else {
        -cw_rat(i / 2)
    }
}

pub fn rational_index(q: &Rat) -> Option<u64> {
    if q.is_zero() {
        return Some(1);
    }
    let m = calkin_wilf_index(&q.abs())?;
    let i = m.checked_mul(2)?;
    if q.is_negative() {
        i.checked_add(1)
    } else {
        Some(i)
    }
}

fn unpair(z: u64) -> (u64, u64) {
    // largest w with w(w+1)/2 ≤ z
    let mut w = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let b = z - w * (w + 1) / 2;
    (w - b, b)
}

fn pair(a: u64, b: u64) -> Option<u64> {
    let s = a.checked_add(b)?;
    s.checked_mul(s + 1)?.checked_div(2)?.checked_add(b)
}

/// Index pair `(i, j)` of the `n`-th interval: left endpoint is rational
/// number `i`, length is positive rational `j`.
pub fn interval_indices(n: u64) -> (u64, u64) {
    let (a, b) = unpair(n - 1);
    (a + 1, b + 1)
}

/// The `n`-th open rational interval (`n ≥ 1`).
pub fn enumerate_interval(n: u64) -> Result<RationalInterval> {
    if n == 0 {
        return Err(Error::invalid("interval enumeration starts at 1"));
    }
    let (i, j) = interval_indices(n);
    let left = rational_by_index(i);
    let right = &left + cw_rat(j);
    RationalInterval::new(left, right)
}

/// Position of an interval in the enumeration, when it fits in `u64`.
pub fn interval_index(iv: &RationalInterval) -> Option<u64> {
    let i = rational_index(iv.left())?;
    let j = calkin_wilf_index(&iv.length())?;
    pair(i - 1, j - 1)?.checked_add(1)
}
