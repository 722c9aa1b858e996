use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

use super::Rat;

/// Rounding direction for [`Dyadic::round`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    /// Toward −∞.
    Down,
    /// Toward +∞.
    Up,
    /// To nearest, ties away from zero. Symmetric under negation.
    Nearest,
}

/// Exact binary floating value `mantissa · 2^exponent`.
///
/// Normalized so that the mantissa is odd (or the value is zero with
/// exponent 0); equality is therefore structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

fn shift_floor(u: &BigUint, s: u64) -> BigUint {
    u >> s
}

fn shift_ceil(u: &BigUint, s: u64) -> BigUint {
    let q = u >> s;
    if (&q << s) == *u {
        q
    } else {
        q + 1u32
    }
}

fn shift_nearest(u: &BigUint, s: u64) -> BigUint {
    if s == 0 {
        return u.clone();
    }
    (u + (BigUint::one() << (s - 1))) >> s
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Dyadic {
                man,
                exp: 0,
            };
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { man, exp }
        } else {
            Dyadic {
                man: man >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: k,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// `m` with `2^(m-1) ≤ |x| < 2^m`; `i64::MIN` for zero.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.man.bits() as i64 + self.exp
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    pub fn to_rat(&self) -> Rat {
        if self.exp >= 0 {
            Rat::from_integer(&self.man << (self.exp as u64))
        } else {
            Rat::new(self.man.clone(), BigInt::one() << ((-self.exp) as u64))
        }
    }

    /// Nearest `f64` (saturating to ±∞ / 0 outside the double range).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            (&self.man >> s, self.exp + s as i64)
        } else {
            (self.man.clone(), self.exp)
        };
        let mf: f64 = num_traits::ToPrimitive::to_f64(&m).unwrap_or(0.0);
        if e > 2000 {
            return mf.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        mf * 2f64.powi(e as i32)
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn min(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Rounds to at most `prec` significant bits.
    pub fn round(&self, prec: u32, mode: Round) -> Dyadic {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        let mag = self.man.magnitude();
        let neg = self.man.is_negative();
        let m = match (mode, neg) {
            (Round::Nearest, _) => shift_nearest(mag, s),
            (Round::Down, false) | (Round::Up, true) => shift_floor(mag, s),
            (Round::Up, false) | (Round::Down, true) => shift_ceil(mag, s),
        };
        let m = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, m);
        Dyadic::new(m, self.exp + s as i64)
    }

    /// Rounds `(n / d) · 2^shift` to `prec` significant bits (`d ≠ 0`).
    pub fn from_ratio(n: &BigInt, d: &BigInt, shift: i64, prec: u32, mode: Round) -> Dyadic {
        assert!(!d.is_zero(), "zero denominator");
        if n.is_zero() {
            return Dyadic::zero();
        }
        let neg = n.is_negative() != d.is_negative();
        let na = n.magnitude();
        let da = d.magnitude();
        // scale so that the integer quotient has at least prec + 2 bits
        let s = prec as i64 + 2 + da.bits() as i64 - na.bits() as i64;
        let (num, den) = if s >= 0 {
            (na << (s as u64), da.clone())
        } else {
            (na.clone(), da << ((-s) as u64))
        };
        let q = &num / &den;
        let r = &num - &q * &den;
        let exact = r.is_zero();
        let up_mag = if exact { q.clone() } else { &q + 1u32 };
        let m = match (mode, neg) {
            (Round::Nearest, _) => {
                if (&r << 1u32) >= den {
                    up_mag
                } else {
                    q
                }
            }
            (Round::Down, false) | (Round::Up, true) => q,
            (Round::Up, false) | (Round::Down, true) => up_mag,
        };
        let m = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, m);
        Dyadic::new(m, shift - s).round(prec, mode)
    }

    pub fn from_rat(q: &Rat, prec: u32, mode: Round) -> Dyadic {
        Dyadic::from_ratio(q.numer(), q.denom(), 0, prec, mode)
    }

    /// `a / b` rounded to `prec` bits.
    pub fn div(a: &Dyadic, b: &Dyadic, prec: u32, mode: Round) -> Dyadic {
        Dyadic::from_ratio(&a.man, &b.man, a.exp - b.exp, prec, mode)
    }

    /// `⌊x⌋` as an integer.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << (self.exp as u64)
        } else {
            let s = (-self.exp) as u64;
            let mag = self.man.magnitude();
            if self.man.is_negative() {
                -BigInt::from(shift_ceil(mag, s))
            } else {
                BigInt::from(shift_floor(mag, s))
            }
        }
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.man << ((self.exp - e) as u64);
        let b = &other.man << ((other.exp - e) as u64);
        (a, b, e)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same sign: compare magnitudes first, cheap
        let (ma, mb) = (self.magnitude(), other.magnitude());
        if ma != mb {
            let o = ma.cmp(&mb);
            return if sa > 0 { o } else { o.reverse() };
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &rhs.man, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}
