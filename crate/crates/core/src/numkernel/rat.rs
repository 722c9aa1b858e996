use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number. Always in lowest terms with a positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `2^k` as an exact rational, for any sign of `k`.
pub fn pow2(k: i64) -> Rat {
    if k >= 0 {
        Rat::from_integer(BigInt::one() << (k as u64))
    } else {
        Rat::new(BigInt::one(), BigInt::one() << ((-k) as u64))
    }
}

pub fn rat_abs(q: &Rat) -> Rat {
    q.abs()
}

/// Integer power with negative exponents allowed (`q ≠ 0` when `e < 0`).
pub fn rat_powi(q: &Rat, e: i64) -> Rat {
    let (num, den) = (q.numer(), q.denom());
    let k = e.unsigned_abs();
    let n = num_traits::pow::pow(num.clone(), k as usize);
    let d = num_traits::pow::pow(den.clone(), k as usize);
    if e >= 0 {
        Rat::new(n, d)
    } else {
        Rat::new(d, n)
    }
}

/// `⌊log₂ |q|⌋` for `q ≠ 0`.
pub fn floor_log2(q: &Rat) -> i64 {
    let n = q.numer().abs();
    let d = q.denom();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // 2^e ≤ |q| < 2^(e+1) after correction
    let probe = pow2(e);
    if q.abs() < probe {
        e -= 1;
    }
    e
}

/// The rational with the smallest denominator in `[lo, hi]`, found by
/// continued fractions.
pub fn simplest_between(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo <= hi, "empty interval");
    if lo.is_positive() {
        simplest_positive(lo.clone(), hi.clone())
    } else if hi.is_negative() {
        -simplest_positive(-hi.clone(), -lo.clone())
    } else {
        Rat::zero()
    }
}

fn simplest_positive(mut lo: Rat, mut hi: Rat) -> Rat {
    // partial quotients, then fold back
    let mut quotients: Vec<BigInt> = Vec::new();
    let tail = loop {
        let fl = lo.floor();
        if fl == lo {
            break fl;
        }
        if fl < hi.floor() {
            break fl + Rat::one();
        }
        quotients.push(fl.to_integer());
        let frac_lo = &lo - &fl;
        let frac_hi = &hi - &fl;
        lo = frac_hi.recip();
        hi = frac_lo.recip();
    };
    quotients
        .into_iter()
        .rev()
        .fold(tail, |acc, q| Rat::from_integer(q) + acc.recip())
}

/// Renders `a` or `a/b`.
pub fn rat_to_string(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Fixed-point decimal with `digits` fractional digits, truncated toward zero.
pub fn rat_to_decimal(q: &Rat, digits: usize) -> String {
    let neg = q.is_negative();
    let scale = num_traits::pow::pow(BigInt::from(10), digits);
    let t = (q.abs() * Rat::from_integer(scale)).to_integer();
    let mut s = t.to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        s.insert(s.len() - digits, '.');
    }
    if neg && !t.is_zero() {
        s.insert(0, '-');
    }
    s
}

/// Parses `a`, `a/b`, or a finite decimal such as `-0.125` / `1e-3`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::invalid(format!("cannot parse rational `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        return Ok(Rat::new(n, d));
    }
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp10 - fp.len() as i64;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        Rat::from_integer(n * num_traits::pow::pow(ten, scale as usize))
    } else {
        Rat::new(n, num_traits::pow::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Serde helpers that render rationals as `"a/b"` strings.
pub mod serde_rat {
    use super::{parse_rat, rat_to_string, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rat_vec {
    use super::{parse_rat, rat_to_string, Rat};
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&rat_to_string(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
