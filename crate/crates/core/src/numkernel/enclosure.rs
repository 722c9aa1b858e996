use std::fmt;

use serde::{Serialize, Serializer};

use super::dyadic::{Dyadic, Round};
use super::rat::{rat_to_decimal, Rat};
use crate::error::{Error, Result};

/// Significant bits kept in a radius (always rounded up).
pub(crate) const RAD_BITS: u32 = 30;

/// Midpoint–radius real interval `[mid − rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

/// Outcome of [`compare`]. `Overlap` means "not decided", never a wrong order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ordering3 {
    CertainlyLess,
    CertainlyGreater,
    Overlap,
}

fn rad_up(d: &Dyadic) -> Dyadic {
    d.round(RAD_BITS, Round::Up)
}

impl Enclosure {
    pub fn exact(d: Dyadic, prec: u32) -> Self {
        Enclosure {
            mid: d,
            rad: Dyadic::zero(),
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::exact(Dyadic::one(), prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::exact(Dyadic::from_i64(v), prec)
    }

    /// Tightest enclosure of a rational at `prec` bits (exact when dyadic).
    pub fn from_rat(q: &Rat, prec: u32) -> Self {
        let lo = Dyadic::from_rat(q, prec, Round::Down);
        let hi = Dyadic::from_rat(q, prec, Round::Up);
        if lo == hi {
            return Self::exact(lo, prec);
        }
        Self::from_bounds(&lo, &hi, prec)
    }

    /// `mid ± rad` with an explicitly given radius (rounded up).
    pub fn with_radius(mid: Dyadic, rad: &Dyadic, prec: u32) -> Self {
        Enclosure {
            mid,
            rad: rad_up(&rad.abs()),
            prec,
        }
    }

    /// Smallest representable enclosure containing `[lo, hi]` (`lo ≤ hi`).
    pub fn from_bounds(lo: &Dyadic, hi: &Dyadic, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        if lo == hi {
            return Self::exact(lo.clone(), prec);
        }
        let mid = (lo + hi).mul_pow2(-1).round(prec, Round::Nearest);
        let r1 = hi - &mid;
        let r2 = &mid - lo;
        let rad = rad_up(&Dyadic::max(&r1, &r2));
        Enclosure { mid, rad, prec }
    }

    /// Hull of two enclosures.
    pub fn hull(a: &Enclosure, b: &Enclosure) -> Self {
        let lo = Dyadic::min(&a.lower(), &b.lower());
        let hi = Dyadic::max(&a.upper(), &b.upper());
        Self::from_bounds(&lo, &hi, a.prec.max(b.prec))
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(mut self, prec: u32) -> Self {
        self.prec = prec;
        self
    }

    pub fn lower(&self) -> Dyadic {
        &self.mid - &self.rad
    }

    pub fn upper(&self) -> Dyadic {
        &self.mid + &self.rad
    }

    pub fn lower_rat(&self) -> Rat {
        self.lower().to_rat()
    }

    pub fn upper_rat(&self) -> Rat {
        self.upper().to_rat()
    }

    pub fn mid_rat(&self) -> Rat {
        self.mid.to_rat()
    }

    pub fn rad_rat(&self) -> Rat {
        self.rad.to_rat()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_rat(&self, q: &Rat) -> bool {
        &self.lower_rat() <= q && q <= &self.upper_rat()
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        &self.lower() <= d && d <= &self.upper()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains_dyadic(&Dyadic::zero())
    }

    /// True if `other ⊆ self`.
    pub fn contains(&self, other: &Enclosure) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        compare(self, other) == Ordering3::Overlap
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    /// `-1`, `0` (undecided) or `1`.
    pub fn certain_sign(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }

    fn finish(exact_mid: Dyadic, rad: Dyadic, prec: u32) -> Self {
        let mid = exact_mid.round(prec, Round::Nearest);
        let err = (&exact_mid - &mid).abs();
        Enclosure {
            mid,
            rad: rad_up(&(&rad + &err)),
            prec,
        }
    }

    pub fn add(&self, o: &Enclosure) -> Self {
        let p = self.prec.max(o.prec);
        Self::finish(&self.mid + &o.mid, &self.rad + &o.rad, p)
    }

    pub fn sub(&self, o: &Enclosure) -> Self {
        let p = self.prec.max(o.prec);
        Self::finish(&self.mid - &o.mid, &self.rad + &o.rad, p)
    }

    pub fn neg(&self) -> Self {
        Enclosure {
            mid: -&self.mid,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        if self.mid.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
        .clamp_nonneg()
    }

    fn clamp_nonneg(self) -> Self {
        if self.lower().is_negative() {
            let hi = self.upper();
            Self::from_bounds(&Dyadic::zero(), &hi, self.prec)
        } else {
            self
        }
    }

    pub fn mul(&self, o: &Enclosure) -> Self {
        let p = self.prec.max(o.prec);
        let rad = &(&(&self.mid.abs() * &o.rad) + &(&o.mid.abs() * &self.rad)) + &(&self.rad * &o.rad);
        Self::finish(&self.mid * &o.mid, rad, p)
    }

    pub fn sqr(&self) -> Self {
        let s = self.mul(self);
        s.clamp_nonneg()
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Enclosure {
            mid: self.mid.mul_pow2(k),
            rad: self.rad.mul_pow2(k),
            prec: self.prec,
        }
    }

    pub fn add_rat(&self, q: &Rat) -> Self {
        self.add(&Self::from_rat(q, self.prec))
    }

    pub fn mul_rat(&self, q: &Rat) -> Self {
        self.mul(&Self::from_rat(q, self.prec))
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(k, self.prec))
    }

    /// Division by a nonzero integer, rounded outward.
    pub fn div_i64(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        let kd = Dyadic::from_i64(k);
        let (a, b) = if k > 0 {
            (self.lower(), self.upper())
        } else {
            (self.upper(), self.lower())
        };
        let lo = Dyadic::div(&a, &kd, self.prec, Round::Down);
        let hi = Dyadic::div(&b, &kd, self.prec, Round::Up);
        Self::from_bounds(&lo, &hi, self.prec)
    }

    /// `1/x`; fails when the enclosure contains zero.
    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_exact() {
            let one = Dyadic::one();
            let lo = Dyadic::div(&one, &self.mid, self.prec, Round::Down);
            let hi = Dyadic::div(&one, &self.mid, self.prec, Round::Up);
            return Ok(Self::from_bounds(&lo, &hi, self.prec));
        }
        let (l, u) = (self.lower(), self.upper());
        let one = Dyadic::one();
        // 1/x is decreasing on each sign component
        let lo = Dyadic::div(&one, &u, self.prec, Round::Down);
        let hi = Dyadic::div(&one, &l, self.prec, Round::Up);
        Ok(Self::from_bounds(&lo, &hi, self.prec))
    }

    pub fn div(&self, o: &Enclosure) -> Result<Self> {
        if o.is_exact() && self.is_exact() {
            let p = self.prec.max(o.prec);
            if o.mid.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let lo = Dyadic::div(&self.mid, &o.mid, p, Round::Down);
            let hi = Dyadic::div(&self.mid, &o.mid, p, Round::Up);
            return Ok(Self::from_bounds(&lo, &hi, p));
        }
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one(self.prec);
        let mut base = self.clone();
        let mut k = n;
        let even = n % 2 == 0;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.sqr();
            k >>= 1;
        }
        if even {
            acc.clamp_nonneg()
        } else {
            acc
        }
    }

    /// Rounds the midpoint to `prec` bits, absorbing the error in the radius.
    pub fn round_to(&self, prec: u32) -> Self {
        Self::finish(self.mid.clone(), self.rad.clone(), prec)
    }

    /// `⌊log₂ rad⌋`-style accuracy: bits of absolute accuracy, or `None` if exact.
    pub fn accuracy_bits(&self) -> Option<i64> {
        if self.rad.is_zero() {
            None
        } else {
            Some(-(self.rad.magnitude()))
        }
    }

    /// Midpoint in fixed-point decimal.
    pub fn mid_decimal(&self, digits: usize) -> String {
        rat_to_decimal(&self.mid.to_rat(), digits)
    }
}

/// Certified order of two enclosures.
pub fn compare(a: &Enclosure, b: &Enclosure) -> Ordering3 {
    if a.upper() < b.lower() {
        Ordering3::CertainlyLess
    } else if a.lower() > b.upper() {
        Ordering3::CertainlyGreater
    } else {
        Ordering3::Overlap
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec as f64) * std::f64::consts::LOG10_2).ceil() as usize;
        let digits = digits.clamp(1, 40);
        write!(f, "[{} ± {:.3e}]", self.mid_decimal(digits), self.rad_f64())
    }
}

impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let digits = ((self.prec as f64) * std::f64::consts::LOG10_2).ceil() as usize;
        let mut st = s.serialize_struct("Enclosure", 2)?;
        st.serialize_field("mid", &self.mid_decimal(digits.clamp(1, 40)))?;
        st.serialize_field("rad", &format!("{:.3e}", self.rad_f64()))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::rat;

    fn pm(m: Rat, r: Rat) -> Enclosure {
        Enclosure::from_bounds(
            &Dyadic::from_rat(&(&m - &r), 64, Round::Down),
            &Dyadic::from_rat(&(&m + &r), 64, Round::Up),
            64,
        )
    }

    #[test]
    fn compare_examples() {
        let a = pm(rat(1, 1), rat(1, 10));
        let b = pm(rat(2, 1), rat(1, 10));
        assert_eq!(compare(&a, &b), Ordering3::CertainlyLess);
        assert_eq!(compare(&b, &a), Ordering3::CertainlyGreater);
        let c = pm(rat(1, 1), rat(1, 2));
        let d = pm(rat(6, 5), rat(1, 2));
        assert_eq!(compare(&c, &d), Ordering3::Overlap);
    }

    #[test]
    fn third_is_contained() {
        let t = Enclosure::from_rat(&rat(1, 3), 60);
        assert!(t.contains_rat(&rat(1, 3)));
        assert!(t.rad_rat() <= rat(1, 1) / Rat::from_integer(num_bigint::BigInt::from(1u64 << 59)));
        let q = t.mul_i64(3);
        assert!(q.contains_rat(&rat(1, 1)));
    }

    #[test]
    fn division_and_recip() {
        let a = Enclosure::from_i64(1, 80);
        let b = Enclosure::from_i64(7, 80);
        let q = a.div(&b).unwrap();
        assert!(q.contains_rat(&rat(1, 7)));
        assert!(Enclosure::zero(10).recip().is_err());
        let r = pm(rat(2, 1), rat(1, 100)).recip().unwrap();
        assert!(r.contains_rat(&rat(100, 201)) && r.contains_rat(&rat(100, 199)));
    }

    #[test]
    fn even_power_nonnegative() {
        let x = pm(rat(0, 1), rat(1, 2));
        let y = x.powi(2);
        assert!(!y.lower().is_negative());
        assert!(y.contains_rat(&rat(1, 4)));
    }
}
