use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::{
    enclose_atan, enclose_pi, pow2, rat, rat_to_string, simplest_between, tan_pi_rat, Enclosure, Rat,
};

/// A point of the Cantor set `C_set`, named by its infinite binary path
/// (`false` = left third, `true` = right third) written as
/// `prefix · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CantorAddress {
    set: u64,
    prefix: Vec<bool>,
    period: Vec<bool>,
}

impl CantorAddress {
    /// Builds the canonical (shortest) representation. `period` must be nonempty.
    pub fn new(set: u64, prefix: Vec<bool>, period: Vec<bool>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::invalid("address period must be nonempty"));
        }
        let (prefix, period) = canonicalize(prefix, period);
        Ok(CantorAddress {
            set,
            prefix,
            period,
        })
    }

    pub fn set(&self) -> u64 {
        self.set
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn with_set(mut self, set: u64) -> Self {
        self.set = set;
        self
    }

    /// True when `(prefix, period)` is already the shortest representation.
    pub fn is_canonical(&self) -> bool {
        let (p, q) = canonicalize(self.prefix.clone(), self.period.clone());
        p == self.prefix && q == self.period
    }

    /// Digit `k` (0-based) of the infinite stream.
    pub fn digit(&self, k: usize) -> bool {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.period[(k - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn digits(&self, n: usize) -> Vec<bool> {
        (0..n).map(|k| self.digit(k)).collect()
    }

    /// `Σ dₖ·w_k` in radix `radix` with digit weights `scale · bit`.
    fn radix_value(&self, radix: i64, scale: i64) -> Rat {
        let digits_value = |bits: &[bool]| -> BigInt {
            bits.iter().fold(BigInt::zero(), |acc, &b| {
                acc * radix + if b { scale } else { 0 }
            })
        };
        let r = BigInt::from(radix);
        let m = self.prefix.len();
        let l = self.period.len();
        let rm = num_traits::pow::pow(r.clone(), m);
        let rl = num_traits::pow::pow(r, l);
        let p = Rat::new(digits_value(&self.prefix), rm.clone());
        let q = Rat::new(digits_value(&self.period), (rl - 1) * rm);
        p + q
    }

    /// Value of the stream read as a binary fraction, in `[0, 1]`.
    pub fn binary_value(&self) -> Rat {
        self.radix_value(2, 1)
    }

    /// Value of the stream read as a ternary fraction with digits `0`/`2`.
    pub fn ternary_value(&self) -> Rat {
        self.radix_value(3, 2)
    }

    /// The binary code of a rational `t ∈ [0, 1]`, using the `0^∞` tail for
    /// dyadic rationals (except `t = 1`, which is `1^∞`).
    pub fn from_binary_value(set: u64, t: &Rat) -> Result<Self> {
        if t.is_negative() || *t > Rat::one() {
            return Err(Error::invalid("binary value must lie in [0, 1]"));
        }
        if t.is_one() {
            return Self::new(set, vec![], vec![true]);
        }
        let (prefix, period) = expand_periodic(t, 2, 1);
        Self::new(set, prefix, period)
    }

    /// Address of a point of the standard Cantor set on `[0, 1]`, or `None`
    /// when `s` is not in it.
    pub fn from_ternary_value(set: u64, s: &Rat) -> Option<Self> {
        if s.is_negative() || *s > Rat::one() {
            return None;
        }
        let third = rat(1, 3);
        let two_thirds = rat(2, 3);
        let three = Rat::from_integer(3.into());
        let two = Rat::from_integer(2.into());
        let mut seen: HashMap<Rat, usize> = HashMap::new();
        let mut digits = Vec::new();
        let mut cur = s.clone();
        loop {
            if let Some(&start) = seen.get(&cur) {
                let period = digits.split_off(start);
                return Self::new(set, digits, period).ok();
            }
            seen.insert(cur.clone(), digits.len());
            if cur <= third {
                digits.push(false);
                cur = &cur * &three;
            } else if cur >= two_thirds {
                digits.push(true);
                cur = &cur * &three - &two;
            } else {
                return None;
            }
        }
    }

    /// Renders as `0110(01)`.
    pub fn code_string(&self) -> String {
        let s = |bits: &[bool]| bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        format!("{}({})", s(&self.prefix), s(&self.period))
    }

    pub fn parse(set: u64, s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("cannot parse address `{s}`; expected e.g. `01(10)`"));
        let (pre, rest) = s.split_once('(').ok_or_else(bad)?;
        let per = rest.strip_suffix(')').ok_or_else(bad)?;
        let bits = |t: &str| -> Result<Vec<bool>> {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(bad()),
                })
                .collect()
        };
        Self::new(set, bits(pre)?, bits(per)?)
    }

    fn is_constant_tail(&self, bit: bool) -> bool {
        self.period == [bit]
    }
}

impl fmt::Display for CantorAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}:{}", self.set, self.code_string())
    }
}

impl Serialize for CantorAddress {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CantorAddress", 2)?;
        st.serialize_field("set", &self.set)?;
        st.serialize_field("code", &self.code_string())?;
        st.end()
    }
}

fn canonicalize(mut prefix: Vec<bool>, mut period: Vec<bool>) -> (Vec<bool>, Vec<bool>) {
    let l = period.len();
    for p in 1..=l {
        if l % p == 0 && (0..l).all(|k| period[k] == period[k % p]) {
            period.truncate(p);
            break;
        }
    }
    while let (Some(&a), Some(&b)) = (prefix.last(), period.last()) {
        if a != b {
            break;
        }
        prefix.pop();
        period.rotate_right(1);
    }
    (prefix, period)
}

/// Eventually periodic radix expansion of `t ∈ [0, 1)` with digits `0` or
/// `hi` (the caller guarantees only those occur).
fn expand_periodic(t: &Rat, radix: i64, hi: i64) -> (Vec<bool>, Vec<bool>) {
    let r = Rat::from_integer(radix.into());
    let mut seen: HashMap<Rat, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut cur = t.clone();
    loop {
        if let Some(&start) = seen.get(&cur) {
            let period = digits.split_off(start);
            return (digits, period);
        }
        seen.insert(cur.clone(), digits.len());
        let scaled = &cur * &r;
        let d = scaled.floor();
        let bit = d == Rat::from_integer(hi.into());
        digits.push(bit);
        cur = scaled - d;
    }
}

// ---------------------------------------------------------------- bijection

fn split_index(i: &BigInt) -> (u64, BigInt) {
    let k = i.bits() - 1;
    (k, i - (BigInt::one() << k))
}

/// The `m`-th dyadic rational of `(0, 1)`: `m = 2^k + j ↦ (2j+1)/2^(k+1)`.
fn dyadic_by_index(m: &BigInt) -> Rat {
    let (k, j) = split_index(m);
    Rat::new(2 * j + 1, BigInt::one() << (k + 1))
}

fn dyadic_index(d: &Rat) -> Option<BigInt> {
    let den = d.denom();
    let e = den.bits() - 1;
    if e == 0 || den != &(BigInt::one() << e) {
        return None;
    }
    Some((BigInt::one() << (e - 1)) + (d.numer() - 1) / 2)
}

/// The `i`-th target value `(12j+5)/(3·2^(k+2))` for `i = 2^k + j ≥ 1`.
///
/// Its bit size grows like `log i`, and its code has a `(01)` or `(10)`
/// tail, so it never collides with an exceptional code.
fn target_by_index(i: &BigInt) -> Rat {
    let (k, j) = split_index(i);
    Rat::new(12 * j + 5, BigInt::from(3) << (k + 2))
}

fn target_index(t: &Rat) -> Option<BigInt> {
    let den = t.denom();
    if (den % 3u32) != BigInt::zero() {
        return None;
    }
    let p: BigInt = den / 3u32;
    let e = p.bits().checked_sub(1)?;
    if e < 2 || p != (BigInt::one() << e) {
        return None;
    }
    let n = t.numer();
    if (n % 12u32) != BigInt::from(5) {
        return None;
    }
    Some((BigInt::one() << (e - 2)) + (n - 5) / 12)
}

/// The `r`-th exceptional code: `0^∞`, `1^∞`, then the `…01^∞` codes of
/// the dyadic rationals in order.
fn exceptional_code(r: &BigInt) -> (Vec<bool>, Vec<bool>) {
    if r.is_zero() {
        return (vec![], vec![false]);
    }
    if r.is_one() {
        return (vec![], vec![true]);
    }
    let d = dyadic_by_index(&(r - 1));
    let (mut prefix, _) = expand_periodic(&d, 2, 1);
    // …1 0^∞ becomes …0 1^∞
    prefix.pop();
    prefix.push(false);
    (prefix, vec![true])
}

/// Position in the merged list `[E₀, T₁, E₁, T₂, …]` of exceptional codes
/// `E` and target codes `T`, if any.
fn hotel_slot(a: &CantorAddress) -> Option<BigInt> {
    if a.prefix.is_empty() && a.is_constant_tail(false) {
        return Some(BigInt::zero());
    }
    if a.prefix.is_empty() && a.is_constant_tail(true) {
        return Some(BigInt::from(2));
    }
    let t = a.binary_value();
    if a.is_constant_tail(true) {
        let m = dyadic_index(&t)?;
        return Some(2 * (m + 1));
    }
    let s = target_index(&t)?;
    Some(2 * s - 1)
}

/// The binary value attached to an address by the bijection: identity off
/// the merged list, and `T_(i+1)` for the `i`-th list entry.
pub fn reindexed_value(a: &CantorAddress) -> Rat {
    match hotel_slot(a) {
        Some(i) => target_by_index(&(i + 1)),
        None => a.binary_value(),
    }
}

/// Inverse of [`reindexed_value`] on `(0, 1)`.
pub fn address_of_value(set: u64, t: &Rat) -> Result<CantorAddress> {
    if !t.is_positive() || *t >= Rat::one() {
        return Err(Error::invalid("reindexed value must lie in (0, 1)"));
    }
    if let Some(s) = target_index(t) {
        let slot: BigInt = s - 1;
        if slot.is_even() {
            let (prefix, period) = exceptional_code(&(slot / 2));
            return CantorAddress::new(set, prefix, period);
        }
        return CantorAddress::from_binary_value(set, &target_by_index(&((slot + 1) / 2)));
    }
    CantorAddress::from_binary_value(set, t)
}

/// `φ(a) = tan(π(t − ½))` where `t` is the reindexed binary value.
pub fn phi_map(a: &CantorAddress, prec: u32) -> Result<Enclosure> {
    tan_pi_rat(&reindexed_value(a), prec)
}

/// Simplest preimages are used only when their binary period is short.
const MAX_ODD_BITS: u64 = 16;

/// An address whose image under [`phi_map`] lies within `2^-prec` of `y`.
///
/// Prefers the simplest rational `t` in a window around `½ + atan(y)/π`,
/// which makes round trips exact for addresses with short periods.
pub fn phi_inverse(set: u64, y: &Rat, prec: u32) -> Result<CantorAddress> {
    if y.is_zero() {
        return address_of_value(set, &rat(1, 2));
    }
    if y.abs().is_one() {
        let t = if y.is_positive() { rat(3, 4) } else { rat(1, 4) };
        return address_of_value(set, &t);
    }
    // dy/dt = π(1+y²); a t-window of 2^-d keeps y within 2^-prec
    let growth = (y * y + Rat::one()).ceil().to_integer().bits() as u32;
    let d = prec + growth + 4;
    let eps = pow2(-(d as i64) - 1);
    let mut w = d + 32;
    let cap = 4 * d + 256;
    loop {
        let t = enclose_atan(&Enclosure::from_rat(y, w), w)
            .div(&enclose_pi(w))?
            .add_rat(&rat(1, 2));
        if t.rad_rat() <= eps {
            let (tl, th) = (t.lower_rat(), t.upper_rat());
            let two = Rat::from_integer(2.into());
            let lo = (&tl - &eps).max(&tl / &two);
            let hi = (&th + &eps).min((&th + Rat::one()) / &two);
            let simple = simplest_between(&lo, &hi);
            let den = simple.denom();
            let odd = den >> den.trailing_zeros().unwrap_or(0) as usize;
            if odd.bits() <= MAX_ODD_BITS {
                return address_of_value(set, &simple);
            }
            // d digits of the midpoint, then a (001) tail that stays off the
            // reindexed list
            let digits = (t.mid_rat() * pow2(d as i64)).floor().to_integer();
            let prefix = (0..d).rev().map(|k| digits.bit(k as u64)).collect();
            return CantorAddress::new(set, prefix, vec![false, false, true]);
        }
        if w >= cap {
            return Err(Error::precision(format!(
                "cannot pin the preimage of {} to 2^-{d}",
                rat_to_string(y)
            )));
        }
        w *= 2;
    }
}
