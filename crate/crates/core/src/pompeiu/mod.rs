//! A strictly increasing differentiable `f: ℝ → (0, 1)` whose derivative
//! vanishes on a dense set.
//!
//! Let `q₁, q₂, …` enumerate the rationals of `(0, 1)` and put
//! `g(y) = Σ 2⁻ⁿ ∛(y − qₙ)` on `[0, 1]`. Then `g` is strictly increasing,
//! `g′ ≥ 1/3`, and `g′(qₙ) = ∞`. With `a = g(0)`, `b = g(1)` and
//! `A(x) = a + (b − a)(arctan x / π + ½)`, the function `f = g⁻¹ ∘ A` is
//! differentiable with `f′ = A′ / g′(f)`, which is zero exactly at the
//! dense set of points `A⁻¹(g(qₙ))`.

mod points;
mod witness;

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use points::{liouville_constant, DerivativeCertificate, PompeiuPoint};
pub use witness::{FreeGeneratorSet, NonconstancyWitness, SwCondition, SwVerdict};

use crate::cantor_mes::calkin_wilf;
use crate::error::{Error, Result};
use crate::numkernel::{
    cbrt_rat, compare, enclose_atan, enclose_pi, enclose_tan_pi, pow2, simplest_between, Dyadic,
    Enclosure, Ordering3, Rat, Round,
};

const TABLE: usize = 4096;

/// `qₙ`: the left children of the Calkin–Wilf tree, i.e. `cw(2n)`. Every
/// rational of `(0, 1)` occurs once and `den(qₙ) ≤ 2n + 1`.
pub fn q(n: u64) -> Rat {
    assert!(n >= 1, "enumeration starts at 1");
    if (n as usize) <= TABLE {
        return q_table()[n as usize - 1].clone();
    }
    q_direct(n)
}

fn q_direct(n: u64) -> Rat {
    let (a, b) = calkin_wilf(n);
    Rat::new(a.into(), (a + b).into())
}

fn q_table() -> &'static [Rat] {
    static T: OnceLock<Vec<Rat>> = OnceLock::new();
    T.get_or_init(|| (1..=TABLE as u64).map(q_direct).collect())
}

/// `qₙ` for an index of any size.
pub fn q_big(n: &BigUint) -> Rat {
    assert!(!n.is_zero(), "enumeration starts at 1");
    if let Some(small) = n.to_u64() {
        return q(small);
    }
    // Calkin–Wilf path of 2n
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    for k in (0..n.bits() - 1).rev() {
        if n.bit(k) {
            a += &b;
        } else {
            b += &a;
        }
    }
    Rat::new(a.clone(), a + b)
}

const MAX_DEPTH: u64 = 1 << 20;

/// Index of `y` in the enumeration, if `y ∈ (0, 1)` is rational. `None`
/// also when the index has more than 2²⁰ bits.
pub fn q_index(y: &Rat) -> Option<BigUint> {
    if !y.is_positive() || *y >= Rat::one() {
        return None;
    }
    // y = a/(a+b) is the left child of a/b; walk a/b up to 1/1
    let mut a = y.numer().clone();
    let mut b = y.denom() - &a;
    let mut runs: Vec<(bool, u64)> = Vec::new();
    let mut depth = 0u64;
    while a != b {
        let (bit, k) = if a < b {
            let k = (&b - BigInt::one()) / &a;
            b -= &a * &k;
            (false, k)
        } else {
            let k = (&a - BigInt::one()) / &b;
            a -= &b * &k;
            (true, k)
        };
        let k = k.to_u64()?;
        depth += k;
        if depth > MAX_DEPTH {
            return None;
        }
        runs.push((bit, k));
    }
    let mut m = BigUint::one();
    for (bit, k) in runs.into_iter().rev() {
        for _ in 0..k {
            m = (m << 1u32) | BigUint::from(bit as u32);
        }
    }
    Some(m)
}

pub(crate) fn rat_bounds(lo: &Rat, hi: &Rat, prec: u32) -> Enclosure {
    let p = prec + 8;
    Enclosure::from_bounds(
        &Dyadic::from_rat(lo, p, Round::Down),
        &Dyadic::from_rat(hi, p, Round::Up),
        prec,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSample {
    #[serde(with = "crate::numkernel::serde_rat")]
    pub x: Rat,
    pub y: Enclosure,
}

/// The construction; `extra_terms` fixes the truncation `N = w + extra_terms`
/// at working precision `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PompeiuBuilder {
    extra_terms: u32,
}

impl Default for PompeiuBuilder {
    fn default() -> Self {
        PompeiuBuilder { extra_terms: 4 }
    }
}

impl PompeiuBuilder {
    pub fn new(extra_terms: u32) -> Self {
        PompeiuBuilder { extra_terms }
    }

    pub fn terms(&self, prec: u32) -> u64 {
        (prec + self.extra_terms) as u64
    }

    /// `g(y)` for `y ∈ [0, 1]`, tail bound `2⁻ᴺ` included.
    pub fn eval_g(&self, y: &Rat, prec: u32) -> Result<Enclosure> {
        if y.is_negative() || *y > Rat::one() {
            return Err(Error::invalid("g is defined on [0, 1]"));
        }
        Ok(self.g_unchecked(y, prec))
    }

    fn g_unchecked(&self, y: &Rat, prec: u32) -> Enclosure {
        let n_terms = self.terms(prec);
        let w = prec + 8;
        let mut acc = Enclosure::zero(w);
        for n in 1..=n_terms {
            let t = cbrt_rat(&(y - q(n)), w).mul_pow2(-(n as i64));
            acc = acc.add(&t);
        }
        let tail = Enclosure::with_radius(Dyadic::zero(), &Dyadic::pow2(-(n_terms as i64)), w);
        acc.add(&tail).round_to(prec)
    }

    /// `g` over every point of `y ⊂ [0, 1]`, by monotonicity.
    pub fn eval_g_enclosure(&self, y: &Enclosure, prec: u32) -> Result<Enclosure> {
        let lo = y.lower_rat().max(Rat::zero());
        let hi = y.upper_rat().min(Rat::one());
        if lo > hi {
            return Err(Error::invalid("enclosure misses [0, 1]"));
        }
        let glo = self.g_unchecked(&lo, prec);
        if lo == hi {
            return Ok(glo);
        }
        let ghi = self.g_unchecked(&hi, prec);
        Ok(Enclosure::from_bounds(&glo.lower(), &ghi.upper(), prec))
    }

    /// `(g(0), g(1))`.
    pub fn endpoints(&self, prec: u32) -> (Enclosure, Enclosure) {
        (self.g_unchecked(&Rat::zero(), prec), self.g_unchecked(&Rat::one(), prec))
    }

    /// Outer map `A(x) = a + (b − a)(arctan x / π + ½)`, onto `(a, b)`.
    pub fn outer(&self, x: &Enclosure, prec: u32) -> Enclosure {
        let w = prec + 8;
        let (a, b) = self.endpoints(w);
        let v = enclose_atan(x, w)
            .div(&enclose_pi(w))
            .expect("π is positive")
            .add_rat(&Rat::new(1.into(), 2.into()));
        a.add(&b.sub(&a).mul(&v)).round_to(prec)
    }

    /// `A⁻¹(z) = tan(π((z − a)/(b − a) − ½))`.
    pub fn outer_inverse(&self, z: &Enclosure, prec: u32) -> Result<Enclosure> {
        let w = prec + 8;
        let (a, b) = self.endpoints(w);
        let v = z.sub(&a).div(&b.sub(&a))?;
        enclose_tan_pi(&v, prec)
    }

    /// `A′(x) = (b − a) / (π(1 + x²))`.
    pub fn outer_derivative(&self, x: &Enclosure, prec: u32) -> Result<Enclosure> {
        let w = prec + 8;
        let (a, b) = self.endpoints(w);
        let den = enclose_pi(w).mul(&x.sqr().add_rat(&Rat::one()));
        Ok(b.sub(&a).div(&den)?.round_to(prec))
    }

    /// `g⁻¹` over a target enclosure inside `(a, b)`, by bisection on
    /// dyadic midpoints with certified comparisons.
    pub fn solve_inner(&self, target: &Enclosure, prec: u32) -> Result<Enclosure> {
        let (mut lo, mut hi) = (Rat::zero(), Rat::one());
        let goal = pow2(-(prec as i64) - 2);
        let max_w = prec + 16;
        let mut k = 0u32;
        while &hi - &lo > goal {
            let m: Rat = (&lo + &hi) / Rat::from_integer(2.into());
            k += 1;
            let mut w = (k + 12).min(max_w);
            loop {
                let gm = self.g_unchecked(&m, w);
                match compare(&gm, target) {
                    Ordering3::CertainlyLess => {
                        lo = m;
                        break;
                    }
                    Ordering3::CertainlyGreater => {
                        hi = m;
                        break;
                    }
                    Ordering3::Overlap if w < max_w => w = (2 * w).min(max_w),
                    Ordering3::Overlap => {
                        // |m − y| ≤ 3·|g(m) − g(y)| since g′ ≥ 1/3
                        let spread = (gm.rad_rat() + target.rad_rat()) * Rat::from_integer(6.into());
                        let l = (&m - &spread).max(lo.clone());
                        let h = (&m + &spread).min(hi.clone());
                        if &h - &l > pow2(-(prec as i64) + 4) {
                            return Err(Error::precision("inverse of g stalled on an overlap"));
                        }
                        return Ok(rat_bounds(&l, &h, prec));
                    }
                }
            }
        }
        Ok(rat_bounds(&lo, &hi, prec))
    }

    /// `f(x) = g⁻¹(A(x))`.
    pub fn eval_f(&self, x: &Rat, prec: u32) -> Result<Enclosure> {
        self.eval_f_enclosure(&Enclosure::from_rat(x, prec + 16), prec)
    }

    pub fn eval_f_enclosure(&self, x: &Enclosure, prec: u32) -> Result<Enclosure> {
        let target = self.outer(x, prec + 8);
        self.solve_inner(&target, prec)
    }

    /// `xₙ = A⁻¹(g(qₙ))`, where `f′` vanishes.
    pub fn dense_zero_point(&self, n: impl Into<BigUint>, prec: u32) -> Result<Enclosure> {
        let n = n.into();
        if n.is_zero() {
            return Err(Error::invalid("dense zero points are indexed from 1"));
        }
        let gq = self.g_unchecked(&q_big(&n), prec + 8);
        self.outer_inverse(&gq, prec)
    }

    /// A dense zero point inside `(lo, hi)`: the simplest `qₙ` between
    /// certified bounds of `f(lo)` and `f(hi)`.
    pub fn dense_zero_in(&self, lo: &Rat, hi: &Rat, prec: u32) -> Result<(BigUint, Enclosure)> {
        if lo >= hi {
            return Err(Error::invalid("empty interval"));
        }
        let ylo = self.eval_f(lo, prec)?.upper_rat();
        let yhi = self.eval_f(hi, prec)?.lower_rat();
        if ylo >= yhi {
            return Err(Error::precision("interval image not resolved"));
        }
        let mut s = simplest_between(&ylo, &yhi);
        if s == ylo || s == yhi {
            let d = (&yhi - &ylo) / Rat::from_integer(4.into());
            s = simplest_between(&(&ylo + &d), &(&yhi - &d));
        }
        let n = q_index(&s)
            .ok_or_else(|| Error::budget(MAX_DEPTH, "enumeration index exceeds the bit budget"))?;
        let x = self.dense_zero_point(n.clone(), prec)?;
        if x.lower_rat() <= *lo || x.upper_rat() >= *hi {
            return Err(Error::precision("dense zero point not separated from the ends"));
        }
        Ok((n, x))
    }

    /// `count` evenly spaced samples of `f` on `[lo, hi]`.
    pub fn graph(&self, lo: &Rat, hi: &Rat, count: usize, prec: u32) -> Result<Vec<GraphSample>> {
        if count < 2 || lo >= hi {
            return Err(Error::invalid("need count ≥ 2 and lo < hi"));
        }
        let step = (hi - lo) / Rat::from_integer((count as i64 - 1).into());
        (0..count)
            .map(|i| {
                let x = lo + &step * Rat::from_integer((i as i64).into());
                let y = self.eval_f(&x, prec)?;
                Ok(GraphSample { x, y })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{int, rat};

    #[test]
    fn enumeration_starts_at_one_half() {
        assert_eq!(q(1), rat(1, 2));
        assert_eq!(q(2), rat(1, 3));
        assert_eq!(q(3), rat(2, 3));
        for n in 1..500u64 {
            assert_eq!(q_index(&q(n)), Some(BigUint::from(n)));
            assert!(q(n).denom() <= &(2 * n + 1).into());
        }
        assert_eq!(q(5000), q_direct(5000));
        let big = (BigUint::one() << 80u32) + BigUint::from(12345u32);
        assert_eq!(q_index(&q_big(&big)), Some(big));
        assert_eq!(q_index(&rat(1, 3)), Some(BigUint::from(2u32)));
        assert_eq!(q_index(&int(1)), None);
    }

    #[test]
    fn g_domain_and_sharpness() {
        let p = PompeiuBuilder::default();
        let g = p.eval_g(&rat(1, 2), 64).unwrap();
        assert!(g.rad_f64() < 1e-15);
        assert!(p.eval_g(&int(2), 64).is_err());
    }

    #[test]
    fn outer_round_trip() {
        let p = PompeiuBuilder::default();
        let x = Enclosure::from_rat(&rat(3, 7), 80);
        let z = p.outer(&x, 80);
        let back = p.outer_inverse(&z, 60).unwrap();
        assert!(back.contains_rat(&rat(3, 7)));
        assert!(back.rad_f64() < 1e-12);
    }

    #[test]
    fn solve_inner_recovers_rationals() {
        let p = PompeiuBuilder::default();
        for y in [rat(1, 5), rat(1, 2), rat(7, 9)] {
            let t = p.eval_g(&y, 72).unwrap();
            let back = p.solve_inner(&t, 60).unwrap();
            assert!(back.contains_rat(&y), "{y}");
        }
    }
}
