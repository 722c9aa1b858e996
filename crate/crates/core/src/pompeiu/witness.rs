//! Nonconstancy of `φ ∘ f` and the point conditions for the algebra
//! generated by `exp ∘ (r f)`.

use num_traits::Signed;
use serde::Serialize;

use super::points::PompeiuPoint;
use super::PompeiuBuilder;
use crate::cantor_mes::RationalInterval;
use crate::error::{Error, Result};
use crate::expalg::ExpSum;
use crate::numkernel::{
    compare, enclose_exp, enclose_sqrt, floor_log2, pow2, serde_rat, Enclosure, Ordering3, Rat,
};

#[derive(Debug, Clone, Serialize)]
pub struct NonconstancyWitness {
    pub interval: RationalInterval,
    pub phi: String,
    /// Inner coordinate `r + sθ`.
    #[serde(with = "serde_rat")]
    pub r: Rat,
    #[serde(with = "serde_rat")]
    pub s: Rat,
    pub grid: u64,
    pub candidates_tried: u64,
    pub x0: Enclosure,
    pub f_prime: Enclosure,
    pub phi_prime_at_f: Enclosure,
    pub chain: Enclosure,
    #[serde(with = "serde_rat")]
    pub delta: Rat,
    pub value_left: Enclosure,
    pub value_right: Enclosure,
    pub ordering: Ordering3,
    pub precision: u32,
}

impl NonconstancyWitness {
    pub fn point(&self) -> PompeiuPoint {
        PompeiuPoint::Golden {
            r: self.r.clone(),
            s: self.s.clone(),
        }
    }
}

fn grid_round(lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    let e = floor_log2(&(hi - lo)) - 2;
    let unit = pow2(e);
    let l = (lo / &unit).ceil() * &unit;
    let h = (hi / &unit).floor() * &unit;
    (l, h)
}

const HALVINGS: u32 = 40;

impl PompeiuBuilder {
    /// A point `x₀ ∈ J` with `f′(x₀) ≠ 0` and `φ′(f(x₀)) ≠ 0`, plus a pair
    /// `x₀ ± δ` on which `φ ∘ f` takes certainly different values.
    ///
    /// Candidates have golden inner coordinates on grids of `M = 1, 2, 4, …`
    /// cells between certified bounds of `f` at the ends of `J`; `budget`
    /// caps the number of candidates. Working precision starts low and
    /// doubles up to `prec`.
    pub fn nonconstancy_witness(
        &self,
        j: &RationalInterval,
        phi: &ExpSum,
        prec: u32,
        budget: u64,
    ) -> Result<NonconstancyWitness> {
        if phi.is_zero() {
            return Err(Error::invalid("φ must be nonzero"));
        }
        let dphi = phi.derivative();
        if dphi.is_zero() {
            return Err(Error::invalid("φ is constant"));
        }
        let mut w = prec.min(64);
        loop {
            match self.witness_at(j, phi, &dphi, w, budget) {
                Err(e) if e.is_unresolved() && w < prec => w = (2 * w).min(prec),
                other => return other,
            }
        }
    }

    fn witness_at(
        &self,
        j: &RationalInterval,
        phi: &ExpSum,
        dphi: &ExpSum,
        w: u32,
        budget: u64,
    ) -> Result<NonconstancyWitness> {
        let fl = self.eval_f(j.left(), w)?.upper_rat();
        let fr = self.eval_f(j.right(), w)?.lower_rat();
        if fl >= fr {
            return Err(Error::precision("image of the interval not resolved"));
        }
        let (lo, hi) = grid_round(&fl, &fr);
        let span = &hi - &lo;
        let mut tried = 0u64;
        let mut cells = 1u64;
        loop {
            let m = Rat::from_integer((cells as i64).into());
            let s = &span / &m;
            for k in 0..cells {
                tried += 1;
                if tried > budget {
                    return Err(Error::budget(
                        budget,
                        format!("nonconstancy scan, densest grid tried: {} cells", cells),
                    ));
                }
                let r = &lo + &s * Rat::from_integer((k as i64).into());
                if let Some(wit) = self.try_candidate(j, phi, dphi, r, s.clone(), w)? {
                    return Ok(NonconstancyWitness {
                        grid: cells,
                        candidates_tried: tried,
                        ..wit
                    });
                }
            }
            cells *= 2;
        }
    }

    fn try_candidate(
        &self,
        j: &RationalInterval,
        phi: &ExpSum,
        dphi: &ExpSum,
        r: Rat,
        s: Rat,
        w: u32,
    ) -> Result<Option<NonconstancyWitness>> {
        let point = PompeiuPoint::golden(r.clone(), s.clone())?;
        let y = point.inner(self, w)?;
        let phi_prime = dphi.eval_enclosure(&y, w)?;
        if phi_prime.contains_zero() {
            return Ok(None);
        }
        let cert = self.derivative_certificate(&point, w);
        let Some(f_prime) = cert.enclosure().filter(|_| cert.excludes_zero()).cloned() else {
            return Ok(None);
        };
        let x0 = point.x(self, w)?;
        if x0.lower_rat() <= *j.left() || x0.upper_rat() >= *j.right() {
            return Ok(None);
        }
        let chain = phi_prime.mul(&f_prime);
        let want = if chain.is_positive() {
            Ordering3::CertainlyLess
        } else {
            Ordering3::CertainlyGreater
        };
        let c = x0.mid_rat();
        let margin = (&c - j.left()).min(j.right() - &c);
        let mut delta = pow2(floor_log2(&margin) - 1);
        for _ in 0..HALVINGS {
            let left = phi.eval_enclosure(&self.eval_f(&(&c - &delta), w)?, w)?;
            let right = phi.eval_enclosure(&self.eval_f(&(&c + &delta), w)?, w)?;
            let ord = compare(&left, &right);
            if ord == want {
                return Ok(Some(NonconstancyWitness {
                    interval: j.clone(),
                    phi: phi.to_string(),
                    r,
                    s,
                    grid: 0,
                    candidates_tried: 0,
                    x0,
                    f_prime,
                    phi_prime_at_f: phi_prime,
                    chain,
                    delta,
                    value_left: left,
                    value_right: right,
                    ordering: ord,
                    precision: w,
                }));
            }
            if ord == Ordering3::Overlap && left.rad_rat() + right.rad_rat() > delta.abs() {
                break;
            }
            delta /= Rat::from_integer(2.into());
        }
        Ok(None)
    }
}

/// Parameters `r = √p` for distinct primes `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeGeneratorSet {
    primes: Vec<u64>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl FreeGeneratorSet {
    pub fn new(primes: Vec<u64>) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::invalid("generator list is empty"));
        }
        for (i, p) in primes.iter().enumerate() {
            if !is_prime(*p) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
            if primes[..i].contains(p) {
                return Err(Error::invalid(format!("prime {p} repeated")));
            }
        }
        Ok(FreeGeneratorSet { primes })
    }

    /// The first `k` primes.
    pub fn first(k: usize) -> Self {
        let primes = (2u64..).filter(|p| is_prime(*p)).take(k.max(1)).collect();
        FreeGeneratorSet { primes }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn parameter(&self, i: usize, prec: u32) -> Enclosure {
        let p = Enclosure::from_i64(self.primes[i] as i64, prec + 4);
        enclose_sqrt(&p, prec + 4).expect("primes are positive").round_to(prec)
    }

    /// `exp(√pᵢ · f(x))`.
    pub fn eval(&self, p: &PompeiuBuilder, i: usize, x: &Rat, prec: u32) -> Result<Enclosure> {
        let w = prec + 8;
        let fx = p.eval_f(x, w)?;
        Ok(enclose_exp(&self.parameter(i, w).mul(&fx), w)?.round_to(prec))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SwCondition {
    /// Some `F` with `F(x₀) ≠ 0`.
    NonVanishing,
    /// Some `F` with `F(x₀) ≠ F(x₁)`.
    Separation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "condition", rename_all = "snake_case")]
pub enum SwVerdict {
    ConditionsHold,
    Failed(SwCondition),
}

impl PompeiuBuilder {
    /// Both point conditions with `F = exp(r f)` for the first `r`.
    pub fn stone_weierstrass_check(
        &self,
        gens: &FreeGeneratorSet,
        x0: &Rat,
        x1: &Rat,
        prec: u32,
    ) -> Result<SwVerdict> {
        if x0 == x1 {
            return Err(Error::invalid("the two points must differ"));
        }
        let f0 = gens.eval(self, 0, x0, prec)?;
        if !f0.is_positive() {
            return Ok(SwVerdict::Failed(SwCondition::NonVanishing));
        }
        let f1 = gens.eval(self, 0, x1, prec)?;
        match compare(&f0, &f1) {
            Ordering3::Overlap => Err(Error::precision("F(x₀) and F(x₁) overlap")),
            _ => Ok(SwVerdict::ConditionsHold),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::rat;

    #[test]
    fn generator_sets_validate() {
        assert!(FreeGeneratorSet::new(vec![]).is_err());
        assert!(FreeGeneratorSet::new(vec![2, 4]).is_err());
        assert!(FreeGeneratorSet::new(vec![3, 3]).is_err());
        assert_eq!(FreeGeneratorSet::first(4).primes(), &[2, 3, 5, 7]);
        let r = FreeGeneratorSet::first(1).parameter(0, 60);
        assert!(r.sqr().contains_rat(&rat(2, 1)));
        assert!(r.rad_f64() < 1e-17);
    }

    #[test]
    fn grid_round_stays_inside() {
        let (l, h) = grid_round(&rat(1, 3), &rat(2, 5));
        assert!(l > rat(1, 3) && h < rat(2, 5) && l < h);
    }
}
