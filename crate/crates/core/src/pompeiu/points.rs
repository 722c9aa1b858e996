//! Domain points and certificates for `f′`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use num_bigint::BigUint;

use super::{q, q_big, PompeiuBuilder};
use crate::error::{Error, Result};
use crate::numkernel::{
    cbrt_rat, enclose_sqrt, pow2, rat, rat_abs, rat_to_string, Dyadic, Enclosure, Rat,
};

/// A point of the domain, named through whichever coordinate is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PompeiuPoint {
    /// `x` itself is rational; the inner coordinate `f(x)` is only enclosed.
    Rational(Rat),
    /// `xₙ = A⁻¹(g(qₙ))`, inner coordinate `qₙ`.
    DenseZero(BigUint),
    /// Inner coordinate `r + sθ` with `θ = (√5 − 1)/2`; never a rational.
    Golden { r: Rat, s: Rat },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivativeCertificate {
    ExactZero,
    Enclosure { value: Enclosure },
    Unresolved { reason: String },
}

impl DerivativeCertificate {
    pub fn excludes_zero(&self) -> bool {
        matches!(self, DerivativeCertificate::Enclosure { value } if !value.contains_zero())
    }

    pub fn enclosure(&self) -> Option<&Enclosure> {
        match self {
            DerivativeCertificate::Enclosure { value } => Some(value),
            _ => None,
        }
    }
}

pub(crate) fn theta(prec: u32) -> Enclosure {
    let r5 = enclose_sqrt(&Enclosure::from_i64(5, prec + 4), prec + 4).expect("5 > 0");
    r5.add_rat(&-Rat::one()).mul_pow2(-1).round_to(prec)
}

// 0.618 < θ < 0.61804
fn theta_bounds() -> (Rat, Rat) {
    (rat(309, 500), rat(15451, 25000))
}

/// `c` with `|r + sθ − p/q| ≥ c/q²` for every rational `p/q`. From
/// `|P² + PQ − Q²| ≥ 1` one gets `|θ − P/Q| ≥ 1/(4Q²)`, and `Q = q·den(r)·|num(s)|`.
pub fn liouville_constant(r: &Rat, s: &Rat) -> Rat {
    let r2 = Rat::from_integer(r.denom().clone());
    let s1 = Rat::from_integer(s.numer().abs());
    rat_abs(s) / (Rat::from_integer(4.into()) * &r2 * &r2 * &s1 * &s1)
}

fn distance_range(y: &Enclosure, q: &Rat) -> (Rat, Rat) {
    let (lo, hi) = (y.lower_rat(), y.upper_rat());
    let a = rat_abs(&(&lo - q));
    let b = rat_abs(&(&hi - q));
    let far = a.clone().max(b.clone());
    if lo <= *q && *q <= hi {
        (Rat::zero(), far)
    } else {
        (a.min(b), far)
    }
}

impl PompeiuPoint {
    pub fn dense_zero(n: impl Into<BigUint>) -> Self {
        PompeiuPoint::DenseZero(n.into())
    }

    pub fn golden(r: Rat, s: Rat) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::invalid("golden point needs s ≠ 0"));
        }
        let (tl, th) = theta_bounds();
        let (a, b) = (&r + &s * &tl, &r + &s * &th);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if !lo.is_positive() || hi >= Rat::one() {
            return Err(Error::invalid("golden point must lie in (0, 1)"));
        }
        Ok(PompeiuPoint::Golden { r, s })
    }

    pub fn describe(&self) -> String {
        match self {
            PompeiuPoint::Rational(x) => format!("x = {}", rat_to_string(x)),
            PompeiuPoint::DenseZero(n) => {
                format!("x_{n} (inner q_{n} = {})", rat_to_string(&q_big(n)))
            }
            PompeiuPoint::Golden { r, s } => {
                format!("inner {} + {}·θ", rat_to_string(r), rat_to_string(s))
            }
        }
    }

    /// Enclosure of the inner coordinate `y = f(x)`.
    pub fn inner(&self, p: &PompeiuBuilder, prec: u32) -> Result<Enclosure> {
        match self {
            PompeiuPoint::Rational(x) => p.eval_f(x, prec),
            PompeiuPoint::DenseZero(n) => Ok(Enclosure::from_rat(&q_big(n), prec)),
            PompeiuPoint::Golden { r, s } => {
                Ok(theta(prec + 8).mul_rat(s).add_rat(r).round_to(prec))
            }
        }
    }

    /// Enclosure of `x`.
    pub fn x(&self, p: &PompeiuBuilder, prec: u32) -> Result<Enclosure> {
        match self {
            PompeiuPoint::Rational(x) => Ok(Enclosure::from_rat(x, prec)),
            PompeiuPoint::DenseZero(n) => p.dense_zero_point(n.clone(), prec),
            PompeiuPoint::Golden { .. } => {
                let y = self.inner(p, prec + 8)?;
                let gy = p.eval_g_enclosure(&y, prec + 8)?;
                p.outer_inverse(&gy, prec)
            }
        }
    }
}

impl PompeiuBuilder {
    /// Bounds for `g′` over `y`. The upper bound exists only with a
    /// Liouville constant for the points of `y`.
    pub fn g_prime_bounds(
        &self,
        y: &Enclosure,
        liouville: Option<&Rat>,
        prec: u32,
    ) -> (Rat, Option<Rat>) {
        let n_terms = self.terms(prec);
        let w = prec + 8;
        let mut low = Enclosure::zero(w);
        let mut high = Enclosure::zero(w);
        let mut unbounded = false;
        for n in 1..=n_terms {
            let qn = q(n);
            let (mut near, far) = distance_range(y, &qn);
            if let Some(c) = liouville {
                let d = Rat::from_integer(qn.denom().clone());
                near = near.max(c / (&d * &d));
            }
            let scale = |e: Enclosure| e.mul_pow2(-(n as i64)).div_i64(3);
            let inv23 = |d: &Rat| cbrt_rat(d, w).sqr().recip().expect("distance is positive");
            low = low.add(&scale(inv23(&far)));
            if near.is_zero() {
                unbounded = true;
            } else if !unbounded {
                high = high.add(&scale(inv23(&near)));
            }
        }
        let nn = Rat::from_integer((n_terms as i64).into());
        let lower = low.lower_rat() + pow2(-(n_terms as i64)) / Rat::from_integer(3.into());
        let upper = match liouville {
            Some(c) if !unbounded => {
                let k = Rat::one().max(c.recip());
                let poly = Rat::from_integer(4.into()) * &nn * &nn
                    + Rat::from_integer(20.into()) * &nn
                    + Rat::from_integer(33.into());
                let tail = k * poly * pow2(-(n_terms as i64)) / Rat::from_integer(3.into());
                Some(high.upper_rat() + tail)
            }
            _ => None,
        };
        (lower, upper)
    }

    /// `f′` at a point: zero at dense zeros, two-sided at golden points,
    /// and `[0, A′/g′_low]` at rational `x`.
    pub fn derivative_certificate(&self, point: &PompeiuPoint, prec: u32) -> DerivativeCertificate {
        match self.derivative_inner(point, prec) {
            Ok(c) => c,
            Err(e) => DerivativeCertificate::Unresolved {
                reason: e.to_string(),
            },
        }
    }

    fn derivative_inner(&self, point: &PompeiuPoint, prec: u32) -> Result<DerivativeCertificate> {
        let w = prec + 8;
        let liouville = match point {
            PompeiuPoint::DenseZero(_) => return Ok(DerivativeCertificate::ExactZero),
            PompeiuPoint::Rational(_) => None,
            PompeiuPoint::Golden { r, s } => Some(liouville_constant(r, s)),
        };
        let x = point.x(self, w)?;
        let y = point.inner(self, w)?;
        let outer = self.outer_derivative(&x, w)?;
        if !outer.is_positive() {
            return Err(Error::precision("A′ not separated from zero"));
        }
        let (g_lo, g_hi) = self.g_prime_bounds(&y, liouville.as_ref(), w);
        let hi = Enclosure::from_rat(&g_lo, w).recip()?.mul(&outer).upper();
        let lo = match g_hi {
            Some(g_hi) => Enclosure::from_rat(&g_hi, w).recip()?.mul(&outer).lower(),
            None => Dyadic::zero(),
        };
        let lo = Dyadic::max(&lo, &Dyadic::zero());
        Ok(DerivativeCertificate::Enclosure {
            value: Enclosure::from_bounds(&lo, &hi, prec),
        })
    }
}
