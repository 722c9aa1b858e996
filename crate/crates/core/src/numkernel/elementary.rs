use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::enclosure::Enclosure;
use super::rat::{floor_log2, pow2, rat, Rat};
use crate::error::{Error, Result};

/// `|x|` is below `2^-k` for every point of the enclosure.
fn below_pow2(x: &Enclosure, k: i64) -> bool {
    let m = Dyadic::max(&x.lower().abs(), &x.upper().abs());
    m.is_zero() || m.magnitude() <= -k
}

fn tail(bound: &Enclosure) -> Enclosure {
    let m = Dyadic::max(&bound.lower().abs(), &bound.upper().abs());
    Enclosure::with_radius(Dyadic::zero(), &m, bound.precision())
}

// ---------------------------------------------------------------- exp

fn exp_point(d: &Dyadic, prec: u32) -> Result<Enclosure> {
    if d.is_zero() {
        return Ok(Enclosure::one(prec));
    }
    let mag = d.magnitude();
    if mag > 48 {
        return Err(Error::invalid("exponential argument too large"));
    }
    let s = (mag + 4).max(0);
    let w = prec + s as u32 + 20;
    let y = Enclosure::exact(d.mul_pow2(-s), w);
    let mut sum = Enclosure::one(w);
    let mut term = Enclosure::one(w);
    let mut k = 1i64;
    loop {
        term = term.mul(&y).div_i64(k);
        sum = sum.add(&term);
        // remainder after term k is at most |term| because |y| ≤ 1/16
        if below_pow2(&term, w as i64 + 2) {
            break;
        }
        k += 1;
    }
    sum = sum.add(&tail(&term));
    for _ in 0..s {
        sum = sum.sqr();
    }
    Ok(sum)
}

/// Enclosure of `e^t` for every `t` in `x`.
pub fn enclose_exp(x: &Enclosure, prec: u32) -> Result<Enclosure> {
    if prec == 0 {
        return Err(Error::invalid("precision must be positive"));
    }
    if x.is_exact() {
        let e = exp_point(x.mid(), prec)?;
        if e.is_exact() {
            return Ok(e.with_precision(prec));
        }
        return Ok(Enclosure::from_bounds(&e.lower(), &e.upper(), prec));
    }
    let lo = exp_point(&x.lower(), prec)?.lower();
    let hi = exp_point(&x.upper(), prec)?.upper();
    let lo = if lo.is_negative() { Dyadic::zero() } else { lo };
    Ok(Enclosure::from_bounds(&lo, &hi, prec))
}

// ---------------------------------------------------------------- roots

/// Bracket `[lo, hi]` of `q^(1/n)` for `q ≥ 0`, with about `prec` bits.
fn root_point(q: &Rat, n: u32, prec: u32) -> (Dyadic, Dyadic) {
    if q.is_zero() {
        return (Dyadic::zero(), Dyadic::zero());
    }
    let nn = n as i64;
    let w = prec as i64 + 4 - Integer::div_floor(&floor_log2(q), &nn);
    let scaled = q * pow2(nn * w);
    let big_n = scaled.floor().to_integer();
    let r = big_n.nth_root(n);
    let lo = Dyadic::new(r.clone(), -w);
    if scaled.is_integer() && num_traits::pow::pow(r.clone(), n as usize) == big_n {
        return (lo.clone(), lo);
    }
    (lo, Dyadic::new(r + BigInt::one(), -w))
}

fn signed_root_point(q: &Rat, n: u32, prec: u32) -> (Dyadic, Dyadic) {
    if q.is_negative() {
        let (lo, hi) = root_point(&-q, n, prec);
        (-hi, -lo)
    } else {
        root_point(q, n, prec)
    }
}

/// Enclosure of `t^(1/n)`. Odd `n` accepts any sign; even `n` requires
/// the enclosure to reach into `[0, ∞)` (negative parts are clipped).
pub fn enclose_root(x: &Enclosure, n: u32, prec: u32) -> Result<Enclosure> {
    if n == 0 {
        return Err(Error::invalid("root index must be positive"));
    }
    if n == 1 {
        return Ok(x.round_to(prec));
    }
    let (l, u) = (x.lower_rat(), x.upper_rat());
    if n % 2 == 0 {
        if u.is_negative() {
            return Err(Error::invalid("even root of a negative number"));
        }
        let l = if l.is_negative() { Rat::zero() } else { l };
        let lo = root_point(&l, n, prec).0;
        let hi = root_point(&u, n, prec).1;
        return Ok(Enclosure::from_bounds(&lo, &hi, prec));
    }
    let lo = signed_root_point(&l, n, prec).0;
    let hi = signed_root_point(&u, n, prec).1;
    Ok(Enclosure::from_bounds(&lo, &hi, prec))
}

/// Real cube root; odd-symmetric at the enclosure level.
pub fn enclose_cbrt(x: &Enclosure, prec: u32) -> Enclosure {
    enclose_root(x, 3, prec).expect("cube root is total")
}

/// Cube root of an exact rational; one integer root instead of two.
pub fn cbrt_rat(q: &Rat, prec: u32) -> Enclosure {
    let (lo, hi) = signed_root_point(q, 3, prec);
    Enclosure::from_bounds(&lo, &hi, prec)
}

pub fn enclose_sqrt(x: &Enclosure, prec: u32) -> Result<Enclosure> {
    enclose_root(x, 2, prec)
}

/// `x^p` for rational `p`. Requires `x > 0` unless `p` is a nonnegative integer.
pub fn enclose_pow_rat(x: &Enclosure, p: &Rat, prec: u32) -> Result<Enclosure> {
    let num = p.numer();
    let den = p.denom();
    let e: u32 = num
        .abs()
        .try_into()
        .map_err(|_| Error::invalid("exponent numerator too large"))?;
    if p.is_integer() && !p.is_negative() {
        return Ok(x.powi(e).round_to(prec));
    }
    if !x.is_positive() {
        return Err(Error::invalid("fractional power of a non-positive enclosure"));
    }
    let d: u32 = den
        .try_into()
        .map_err(|_| Error::invalid("exponent denominator too large"))?;
    let w = prec + 16 + 2 * (e.max(1).ilog2() + 1);
    let r = if x.is_exact() {
        // exact rational power keeps perfect powers exact
        let q = num_traits::pow::pow(x.mid_rat(), e as usize);
        let (lo, hi) = root_point(&q, d, w);
        Enclosure::from_bounds(&lo, &hi, w)
    } else {
        enclose_root(&x.clone().with_precision(w).powi(e), d, w)?
    };
    finish_pow(r, p, prec)
}

fn finish_pow(r: Enclosure, p: &Rat, prec: u32) -> Result<Enclosure> {
    if p.is_negative() {
        Ok(r.recip()?.round_to(prec))
    } else {
        Ok(r.round_to(prec))
    }
}

// ---------------------------------------------------------------- atan / pi

/// Alternating series for `atan(y)` with `|y| ≤ 1/2`.
fn atan_series(y: &Enclosure, w: u32) -> Enclosure {
    let y2 = y.sqr();
    let mut pw = y.clone();
    let mut sum = Enclosure::zero(w);
    let mut k = 0i64;
    loop {
        let t = pw.div_i64(2 * k + 1);
        sum = if k % 2 == 0 { sum.add(&t) } else { sum.sub(&t) };
        pw = pw.mul(&y2);
        if below_pow2(&pw, w as i64 + 4) {
            break;
        }
        k += 1;
    }
    sum.add(&tail(&pw))
}

fn pi_cache() -> &'static Mutex<HashMap<u32, Enclosure>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Enclosure>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosure of π with at least `prec` bits.
pub fn enclose_pi(prec: u32) -> Enclosure {
    if let Some(p) = pi_cache().lock().unwrap().get(&prec) {
        return p.clone();
    }
    let w = prec + 16;
    let a = atan_series(&Enclosure::from_rat(&rat(1, 5), w), w);
    let b = atan_series(&Enclosure::from_rat(&rat(1, 239), w), w);
    let pi = a.mul_i64(16).sub(&b.mul_i64(4));
    let pi = Enclosure::from_bounds(&pi.lower(), &pi.upper(), prec);
    pi_cache().lock().unwrap().insert(prec, pi.clone());
    pi
}

fn atan_point(q: &Rat, w: u32) -> Enclosure {
    if q.is_zero() {
        return Enclosure::zero(w);
    }
    if q.is_negative() {
        return atan_point(&-q, w).neg();
    }
    let one = Rat::one();
    let half = rat(1, 2);
    if *q > one {
        let inv = q.recip();
        return enclose_pi(w).mul_pow2(-1).sub(&atan_point(&inv, w));
    }
    if *q > half {
        let r = (q - &half) / (&one + q / Rat::from_integer(BigInt::from(2)));
        return atan_point(&half, w).add(&atan_point(&r, w));
    }
    atan_series(&Enclosure::from_rat(q, w + 8), w + 8)
}

/// Enclosure of `arctan t` for every `t` in `x`.
pub fn enclose_atan(x: &Enclosure, prec: u32) -> Enclosure {
    let w = prec + 12;
    if x.is_exact() {
        let a = atan_point(&x.mid_rat(), w);
        return Enclosure::from_bounds(&a.lower(), &a.upper(), prec);
    }
    let lo = atan_point(&x.lower_rat(), w).lower();
    let hi = atan_point(&x.upper_rat(), w).upper();
    Enclosure::from_bounds(&lo, &hi, prec)
}

// ---------------------------------------------------------------- sin / cos

/// Shared Taylor loop: `first` is the leading term, successive terms
/// are multiplied by `-z²/((k)(k+1))` with `k` stepping by two.
fn trig_series(z: &Enclosure, first: Enclosure, start: i64, w: u32) -> Enclosure {
    let z2 = z.sqr();
    let z2_hi = z2.upper();
    let mut term = first;
    let mut sum = Enclosure::zero(w);
    let mut k = start;
    loop {
        sum = sum.add(&term);
        term = term.mul(&z2).div_i64(k * (k + 1)).neg();
        k += 2;
        // terms shrink geometrically once (k)(k+1) > 2 z²
        let decreasing = Dyadic::from_i64(k * (k + 1)) > z2_hi.mul_pow2(1);
        if decreasing && below_pow2(&term, w as i64 + 4) {
            break;
        }
    }
    sum.add(&tail(&term))
}

fn reduce_2pi(x: &Enclosure, w: u32) -> Enclosure {
    let m = x.to_f64();
    if m.abs() <= 4.0 {
        return x.round_to(w);
    }
    let k = (m / std::f64::consts::TAU).round() as i64;
    let two_pi = enclose_pi(w + 64).mul_i64(2);
    x.round_to(w + 64).sub(&two_pi.mul_i64(k)).round_to(w)
}

pub fn enclose_sin(x: &Enclosure, prec: u32) -> Enclosure {
    let w = prec + 16;
    let z = reduce_2pi(x, w);
    let s = trig_series(&z, z.clone(), 2, w);
    clamp_unit(s, prec)
}

pub fn enclose_cos(x: &Enclosure, prec: u32) -> Enclosure {
    let w = prec + 16;
    let z = reduce_2pi(x, w);
    let c = trig_series(&z, Enclosure::one(w), 1, w);
    clamp_unit(c, prec)
}

fn clamp_unit(e: Enclosure, prec: u32) -> Enclosure {
    let one = Dyadic::one();
    let lo = Dyadic::max(&e.lower(), &-&one);
    let hi = Dyadic::min(&e.upper(), &one);
    Enclosure::from_bounds(&lo, &hi, prec)
}

/// `tan(π(t − ½))` for rational `t ∈ (0, 1)`, with relative accuracy
/// near both ends of the interval.
pub fn tan_pi_rat(t: &Rat, prec: u32) -> Result<Enclosure> {
    if !t.is_positive() || *t >= Rat::one() {
        return Err(Error::invalid("tan_pi argument must lie in (0, 1)"));
    }
    let half = rat(1, 2);
    if *t == half {
        return Ok(Enclosure::zero(prec));
    }
    if *t == rat(1, 4) || *t == rat(3, 4) {
        let v = if *t < half { -1 } else { 1 };
        return Ok(Enclosure::from_i64(v, prec));
    }
    let flip = *t > half;
    let u = if flip { Rat::one() - t } else { t.clone() };
    let w = prec + 24 + (-floor_log2(&u)).max(0) as u32;
    let z = enclose_pi(w).mul(&Enclosure::from_rat(&u, w));
    let s = trig_series(&z, z.clone(), 2, w);
    let c = trig_series(&z, Enclosure::one(w), 1, w);
    let cot = c.div(&s)?;
    let v = if flip { cot } else { cot.neg() };
    Ok(Enclosure::from_bounds(&v.lower(), &v.upper(), prec))
}

/// Monotone image of `t ↦ tan(π(t − ½))` over an enclosure inside `(0, 1)`.
pub fn enclose_tan_pi(v: &Enclosure, prec: u32) -> Result<Enclosure> {
    let lo = tan_pi_rat(&v.lower_rat(), prec)?.lower();
    let hi = tan_pi_rat(&v.upper_rat(), prec)?.upper();
    Ok(Enclosure::from_bounds(&lo, &hi, prec))
}

// ---------------------------------------------------------------- log

fn atanh_series(y: &Enclosure, w: u32) -> Enclosure {
    let y2 = y.sqr();
    let mut pw = y.clone();
    let mut sum = Enclosure::zero(w);
    let mut k = 0i64;
    loop {
        sum = sum.add(&pw.div_i64(2 * k + 1));
        pw = pw.mul(&y2);
        if below_pow2(&pw, w as i64 + 4) {
            break;
        }
        k += 1;
    }
    // |y| ≤ 1/3, so the remainder is below 2·|pw|
    sum.add(&tail(&pw.mul_i64(2)))
}

fn ln2_cache() -> &'static Mutex<HashMap<u32, Enclosure>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Enclosure>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosure of ln 2 = 2·atanh(1/3).
pub fn enclose_ln2(prec: u32) -> Enclosure {
    if let Some(v) = ln2_cache().lock().unwrap().get(&prec) {
        return v.clone();
    }
    let w = prec + 16;
    let v = atanh_series(&Enclosure::from_rat(&rat(1, 3), w), w).mul_pow2(1);
    let v = Enclosure::from_bounds(&v.lower(), &v.upper(), prec);
    ln2_cache().lock().unwrap().insert(prec, v.clone());
    v
}

fn log_point(d: &Dyadic, prec: u32) -> Result<Enclosure> {
    if !d.is_positive() {
        return Err(Error::invalid("logarithm of a non-positive number"));
    }
    // d = r·2^k with r ∈ [1/2, 1)
    let k = d.magnitude();
    let extra = 64 - (k.unsigned_abs().max(1)).leading_zeros();
    let w = prec + 16 + extra;
    let r = Enclosure::exact(d.mul_pow2(-k), w);
    let z = r.add_rat(&-Rat::one()).div(&r.add_rat(&Rat::one()))?;
    let ln_r = atanh_series(&z, w).mul_pow2(1);
    Ok(enclose_ln2(w).mul_i64(k).add(&ln_r).round_to(prec))
}

/// Enclosure of `ln t` for every `t` in `x`; requires `x > 0`.
pub fn enclose_log(x: &Enclosure, prec: u32) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(Error::invalid("logarithm of an enclosure reaching 0"));
    }
    if x.is_exact() {
        return log_point(x.mid(), prec);
    }
    let lo = log_point(&x.lower(), prec)?.lower();
    let hi = log_point(&x.upper(), prec)?.upper();
    Ok(Enclosure::from_bounds(&lo, &hi, prec))
}

/// `ln q` for a positive rational, as `ln(num) − ln(den)`.
pub fn log_rat(q: &Rat, prec: u32) -> Result<Enclosure> {
    if !q.is_positive() {
        return Err(Error::invalid("logarithm of a non-positive number"));
    }
    let w = prec + 8;
    let num = log_point(&Dyadic::from_bigint(q.numer().clone()), w)?;
    let den = log_point(&Dyadic::from_bigint(q.denom().clone()), w)?;
    Ok(num.sub(&den).round_to(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{int, parse_rat};

    #[test]
    fn log_inverts_exp() {
        let x = Enclosure::from_rat(&rat(37, 5), 200);
        let l = enclose_log(&enclose_exp(&x, 200).unwrap(), 190).unwrap();
        assert!(l.contains_rat(&rat(37, 5)));
        assert!(l.rad_f64() < 1e-50);
        let big = log_rat(&(pow2(5000) * rat(3, 1)), 128).unwrap();
        let expect = enclose_ln2(140).mul_i64(5000).add(&log_rat(&rat(3, 1), 140).unwrap());
        assert!(big.overlaps(&expect));
        assert!(log_rat(&rat(1, 1), 64).unwrap().contains_rat(&Rat::zero()));
        assert!(log_rat(&rat(-1, 2), 64).is_err());
    }

    #[test]
    fn exp_zero_exact() {
        let e = enclose_exp(&Enclosure::zero(60), 60).unwrap();
        assert!(e.is_exact());
        assert!(e.contains_rat(&int(1)));
    }

    #[test]
    fn cbrt_exact_cube() {
        let c = enclose_cbrt(&Enclosure::from_i64(8, 60), 60);
        assert!(c.is_exact());
        assert!(c.contains_rat(&int(2)));
        let m = enclose_cbrt(&Enclosure::from_i64(-1, 60), 60);
        assert!(m.contains_rat(&int(-1)));
    }

    #[test]
    fn cbrt_odd_symmetry() {
        let x = Enclosure::from_rat(&rat(5, 7), 90);
        assert_eq!(enclose_cbrt(&x.neg(), 90), enclose_cbrt(&x, 90).neg());
    }

    #[test]
    fn pi_digits() {
        let p = enclose_pi(200);
        let lo = parse_rat("3.14159265358979323846264338327950288419716939937510").unwrap();
        let hi = parse_rat("3.14159265358979323846264338327950288419716939937511").unwrap();
        assert!(p.upper_rat() > lo && p.lower_rat() < hi);
        assert!(p.rad_rat() < pow2(-195));
    }

    #[test]
    fn tan_pi_values() {
        let q = tan_pi_rat(&rat(3, 4), 80).unwrap();
        assert!(q.contains_rat(&int(1)));
        let q = tan_pi_rat(&rat(1, 4), 80).unwrap();
        assert!(q.contains_rat(&int(-1)));
        let big = tan_pi_rat(&rat(1, 1 << 30), 60).unwrap();
        assert!(big.to_f64() < -3.4e8);
    }

    #[test]
    fn pow_rat_perfect() {
        let x = Enclosure::from_i64(27, 64);
        let y = enclose_pow_rat(&x, &rat(2, 3), 64).unwrap();
        assert!(y.is_exact());
        assert!(y.contains_rat(&int(9)));
        let z = enclose_pow_rat(&x, &rat(-1, 3), 64).unwrap();
        assert!(z.contains_rat(&rat(1, 3)));
    }

    #[test]
    fn sin_cos_pythagoras() {
        let x = Enclosure::from_rat(&rat(7, 3), 100);
        let s = enclose_sin(&x, 100);
        let c = enclose_cos(&x, 100);
        let one = s.sqr().add(&c.sqr());
        assert!(one.contains_rat(&int(1)));
        assert!(one.rad_rat() < pow2(-90));
    }
}
