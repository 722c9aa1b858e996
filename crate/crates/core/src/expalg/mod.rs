//! Exponential sums `Σ aⱼ e^{bⱼx}` with rational exponents and coefficients.
//!
//! [`ExpSum`] is kept canonical: exponents are map keys, zero coefficients
//! are never stored, and the empty map is the zero function. Products and
//! polynomial substitution are exact; evaluation goes through
//! [`Enclosure`].

mod poly;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use poly::{Algebra, PolynomialNC};

use crate::error::{Error, Result};
use crate::numkernel::linalg::{nullspace_vector, primitive_integer};
use crate::numkernel::{
    compare, enclose_exp, parse_rat, pow2, rat_to_string, Dyadic, Enclosure, Ordering3, Rat,
};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExpSum {
    terms: BTreeMap<Rat, Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSign {
    Positive,
    Negative,
}

impl TailSign {
    fn of(c: &Rat) -> TailSign {
        if c.is_positive() {
            TailSign::Positive
        } else {
            TailSign::Negative
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            TailSign::Positive => 1,
            TailSign::Negative => -1,
        }
    }
}

/// Signs of `f(x)` as `x → +∞` and `x → −∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticSign {
    ZeroFunction,
    Tails { plus: TailSign, minus: TailSign },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Independence {
    Independent,
    /// Primitive integer coefficients `c` with `Σ cᵢ fᵢ = 0`.
    DependencyWitness(#[serde(with = "crate::numkernel::serde_rat_vec")] Vec<Rat>),
}

impl ExpSum {
    pub fn zero() -> Self {
        ExpSum::default()
    }

    /// `a·e^{bx}`.
    pub fn monomial(b: Rat, a: Rat) -> Self {
        Self::from_terms([(b, a)])
    }

    /// Collects `(exponent, coefficient)` pairs into canonical form.
    pub fn from_terms(pairs: impl IntoIterator<Item = (Rat, Rat)>) -> Self {
        let mut terms: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (b, a) in pairs {
            *terms.entry(b).or_insert_with(Rat::zero) += a;
        }
        terms.retain(|_, a| !a.is_zero());
        ExpSum { terms }
    }

    /// `e^{αx} − e^{−αx}`.
    pub fn phi(alpha: &Rat) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::invalid(format!(
                "phi parameter must be positive, got {}",
                rat_to_string(alpha)
            )));
        }
        Ok(Self::from_terms([
            (alpha.clone(), Rat::one()),
            (-alpha.clone(), -Rat::one()),
        ]))
    }

    /// `Σ cᵢ·φ_{αᵢ}`.
    pub fn phi_combo(parts: &[(Rat, Rat)]) -> Result<Self> {
        let mut acc = ExpSum::zero();
        for (c, alpha) in parts {
            acc = acc.add(&Self::phi(alpha)?.scale(c));
        }
        Ok(acc)
    }

    /// Parses `c:α` pairs, e.g. `2:1,-1:2` for `2φ₁ − φ₂`.
    pub fn parse_phi_combo(s: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for item in s.split(',').filter(|t| !t.trim().is_empty()) {
            let (c, a) = item
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("expected `coeff:alpha`, got `{item}`")))?;
            parts.push((parse_rat(c)?, parse_rat(a)?));
        }
        if parts.is_empty() {
            return Err(Error::invalid("empty combination"));
        }
        Self::phi_combo(&parts)
    }

    pub fn terms(&self) -> &BTreeMap<Rat, Rat> {
        &self.terms
    }

    pub fn coefficient(&self, b: &Rat) -> Rat {
        self.terms.get(b).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Enclosure of `f(x)` at a rational point.
    pub fn eval(&self, x: &Rat, prec: u32) -> Result<Enclosure> {
        if prec == 0 {
            return Err(Error::invalid("precision must be positive"));
        }
        let w = prec + 16 + self.terms.len().max(1).ilog2();
        let mut acc = Enclosure::zero(w);
        for (b, a) in &self.terms {
            let arg = Enclosure::from_rat(&(b * x), w);
            let e = enclose_exp(&arg, w)?;
            acc = acc.add(&e.mul(&Enclosure::from_rat(a, w)));
        }
        Ok(acc.round_to(prec))
    }

    /// Enclosure of `f(t)` over every `t` in `x`.
    pub fn eval_enclosure(&self, x: &Enclosure, prec: u32) -> Result<Enclosure> {
        if x.is_exact() {
            return self.eval(&x.mid_rat(), prec);
        }
        let w = prec + 16 + self.terms.len().max(1).ilog2();
        let x = x.clone().with_precision(w);
        let mut acc = Enclosure::zero(w);
        for (b, a) in &self.terms {
            let e = enclose_exp(&x.mul_rat(b), w)?;
            acc = acc.add(&e.mul(&Enclosure::from_rat(a, w)));
        }
        Ok(acc.round_to(prec))
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(b, a)| (b.clone(), a * b)))
    }

    pub fn asymptotic_sign(&self) -> AsymptoticSign {
        match (self.terms.iter().next_back(), self.terms.iter().next()) {
            (Some((_, top)), Some((_, bottom))) => AsymptoticSign::Tails {
                plus: TailSign::of(top),
                minus: TailSign::of(bottom),
            },
            _ => AsymptoticSign::ZeroFunction,
        }
    }

    /// Largest `|b|` over the exponents.
    fn max_abs_exponent(&self) -> Rat {
        self.terms
            .keys()
            .map(|b| b.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Certified sign of `f(x) − y`, raising precision on overlap.
    fn sign_minus(&self, x: &Rat, y: &Rat, prec: u32, cap: u32) -> Result<i32> {
        let mut w = prec;
        loop {
            let v = self.eval(x, w)?;
            match compare(&v, &Enclosure::from_rat(y, w)) {
                Ordering3::CertainlyLess => return Ok(-1),
                Ordering3::CertainlyGreater => return Ok(1),
                Ordering3::Overlap => {}
            }
            if w >= cap {
                return Ok(0);
            }
            w = (w * 2).min(cap);
        }
    }

    /// Enclosure of a solution of `f(x) = y`, of width at most `2^-prec`.
    ///
    /// A bracket is found by doubling `|x|` until the signs of `f − y` at
    /// both ends are certified; bisection then keeps certified signs.
    pub fn solve_value(&self, y: &Rat, prec: u32) -> Result<Enclosure> {
        let (plus, minus) = match self.asymptotic_sign() {
            AsymptoticSign::ZeroFunction => {
                return Err(Error::NoBracketFound("zero function".into()));
            }
            AsymptoticSign::Tails { plus, minus } => (plus.as_i32(), minus.as_i32()),
        };
        let cap = prec * 4 + 128;
        // start where the largest exponent already matters
        let mut x = if self.max_abs_exponent().is_zero() {
            Rat::one()
        } else {
            (Rat::one() / self.max_abs_exponent()).max(pow2(-8))
        };
        let limit = pow2(16);
        let (mut lo, mut hi) = loop {
            let s_hi = self.sign_minus(&x, y, prec, cap)?;
            let s_lo = self.sign_minus(&-x.clone(), y, prec, cap)?;
            if s_hi == 0 {
                return Ok(Enclosure::from_rat(&x, prec));
            }
            if s_lo == 0 {
                return Ok(Enclosure::from_rat(&-x.clone(), prec));
            }
            if s_hi != s_lo {
                let neg = -x.clone();
                break if s_lo < 0 { (neg, x) } else { (x, neg) };
            }
            if x > limit {
                return Err(Error::NoBracketFound(format!(
                    "no sign change of f − {} on [−{}, {}] (tails {plus:+}, {minus:+})",
                    rat_to_string(y),
                    rat_to_string(&x),
                    rat_to_string(&x)
                )));
            }
            x *= Rat::from_integer(2.into());
        };
        // invariant: f(lo) < y < f(hi); lo and hi may be in either order
        let tol = pow2(-(prec as i64));
        while (&hi - &lo).abs() > tol {
            let mid = (&lo + &hi) / Rat::from_integer(2.into());
            let mid = round_dyadic(&mid, prec as i64 + 8);
            match self.sign_minus(&mid, y, prec, cap)? {
                -1 => lo = mid,
                1 => hi = mid,
                _ => {
                    // f(mid) ≈ y beyond the precision cap
                    return Ok(Enclosure::from_rat(&mid, prec));
                }
            }
        }
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        Ok(Enclosure::from_bounds(
            &Dyadic::from_rat(&a, prec + 64, crate::numkernel::Round::Down),
            &Dyadic::from_rat(&b, prec + 64, crate::numkernel::Round::Up),
            prec,
        ))
    }

    /// Checks the functions for linear dependence over ℚ.
    pub fn independence_certificate(fs: &[ExpSum]) -> Result<Independence> {
        if fs.is_empty() {
            return Err(Error::invalid("empty list of functions"));
        }
        let mut exps: Vec<&Rat> = fs.iter().flat_map(|f| f.terms.keys()).collect();
        exps.sort();
        exps.dedup();
        let matrix: Vec<Vec<Rat>> = exps
            .iter()
            .map(|b| fs.iter().map(|f| f.coefficient(b)).collect())
            .collect();
        match nullspace_vector(&matrix, fs.len()) {
            None => Ok(Independence::Independent),
            Some(v) => Ok(Independence::DependencyWitness(
                primitive_integer(&v)
                    .into_iter()
                    .map(Rat::from_integer)
                    .collect(),
            )),
        }
    }
}

/// Nearest dyadic with `bits` fractional bits.
fn round_dyadic(q: &Rat, bits: i64) -> Rat {
    let scaled = q * pow2(bits);
    let r = scaled.round();
    if r == scaled {
        return q.clone();
    }
    r * pow2(-bits)
}

impl Algebra for ExpSum {
    fn one() -> Self {
        Self::monomial(Rat::zero(), Rat::one())
    }

    fn add(&self, o: &Self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .chain(o.terms.iter())
                .map(|(b, a)| (b.clone(), a.clone())),
        )
    }

    fn mul(&self, o: &Self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|(b1, a1)| {
            o.terms.iter().map(move |(b2, a2)| (b1 + b2, a1 * a2))
        }))
    }

    fn scale(&self, c: &Rat) -> Self {
        Self::from_terms(self.terms.iter().map(|(b, a)| (b.clone(), a * c)))
    }
}

/// Expands `P(g₁, …, g_N)` exactly.
pub fn compose_polynomial(p: &PolynomialNC, gens: &[ExpSum]) -> Result<ExpSum> {
    p.compose(gens)
}

impl fmt::Display for ExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(b, a)| format!("{}·e^({}x)", rat_to_string(a), rat_to_string(b)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for ExpSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.terms.len()))?;
        for (b, a) in &self.terms {
            m.serialize_entry(&rat_to_string(b), &rat_to_string(a))?;
        }
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{int, rat};

    #[test]
    fn phi_rejects_nonpositive() {
        assert!(ExpSum::phi(&int(0)).is_err());
        assert!(ExpSum::phi(&rat(-1, 2)).is_err());
    }

    #[test]
    fn phi_combo_parse() {
        let g = ExpSum::parse_phi_combo("2:1,-1:2").unwrap();
        let expect = ExpSum::phi(&int(1))
            .unwrap()
            .scale(&int(2))
            .sub(&ExpSum::phi(&int(2)).unwrap());
        assert_eq!(g, expect);
        assert!(ExpSum::parse_phi_combo("2").is_err());
    }

    #[test]
    fn cancelling_sum_is_zero() {
        let p = ExpSum::phi(&int(1)).unwrap();
        assert!(p.sub(&p).is_zero());
    }
}
