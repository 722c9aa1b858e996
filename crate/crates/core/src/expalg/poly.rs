use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numkernel::{parse_rat, rat_to_string, Enclosure, Rat};

/// Commutative algebra over the rationals, enough to substitute into a polynomial.
pub trait Algebra: Clone {
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rat) -> Self;

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Multivariate polynomial with rational coefficients and no constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialNC {
    arity: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl PolynomialNC {
    /// Builds a polynomial from `(exponent vector, coefficient)` pairs.
    /// Like monomials are collected and zero coefficients dropped.
    pub fn new(arity: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rat)>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::invalid("polynomial needs at least one variable"));
        }
        let mut map: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (mono, c) in terms {
            if mono.len() != arity {
                return Err(Error::invalid(format!(
                    "monomial {:?} has {} exponents, expected {arity}",
                    mono,
                    mono.len()
                )));
            }
            *map.entry(mono).or_insert_with(Rat::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        if map.keys().any(|m| m.iter().all(|&e| e == 0)) {
            return Err(Error::invalid("polynomial must not have a constant term"));
        }
        Ok(PolynomialNC { arity, terms: map })
    }

    /// `t_i` (0-based variable index).
    pub fn variable(arity: usize, i: usize) -> Result<Self> {
        let mut m = vec![0; arity];
        if i >= arity {
            return Err(Error::invalid("variable index out of range"));
        }
        m[i] = 1;
        Self::new(arity, [(m, Rat::one())])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Substitutes `gens` for the variables and expands in the algebra.
    pub fn compose<A: Algebra>(&self, gens: &[A]) -> Result<A> {
        if gens.len() != self.arity {
            return Err(Error::invalid(format!(
                "polynomial has {} variables but {} generators were given",
                self.arity,
                gens.len()
            )));
        }
        let mut acc: Option<A> = None;
        for (mono, c) in &self.terms {
            let mut t = A::one().scale(c);
            for (g, &e) in gens.iter().zip(mono) {
                if e > 0 {
                    t = t.mul(&g.pow(e));
                }
            }
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t),
            });
        }
        Ok(acc.unwrap_or_else(|| A::one().scale(&Rat::zero())))
    }

    /// Numeric evaluation on enclosures.
    pub fn eval_enclosures(&self, xs: &[Enclosure]) -> Result<Enclosure> {
        if xs.len() != self.arity {
            return Err(Error::invalid("arity mismatch"));
        }
        let prec = xs.iter().map(|x| x.precision()).max().unwrap_or(64);
        let mut acc = Enclosure::zero(prec);
        for (mono, c) in &self.terms {
            let mut t = Enclosure::from_rat(c, prec);
            for (x, &e) in xs.iter().zip(mono) {
                if e > 0 {
                    t = t.mul(&x.powi(e));
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Parses sums of monomials such as `t1^2 - 3/2*t1*t2 + t3`.
    /// Variables are `t1 … tN`; `arity` is the largest index seen unless given.
    pub fn parse(s: &str, arity: Option<usize>) -> Result<Self> {
        let bad = |m: &str| Error::invalid(format!("cannot parse polynomial `{s}`: {m}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with(['e', 'E', '^']) {
                pieces.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        pieces.push((neg, cur));
        let mut raw: Vec<(BTreeMap<usize, u32>, Rat)> = Vec::new();
        let mut max_var = 0usize;
        for (neg, body) in pieces {
            if body.is_empty() {
                return Err(bad("empty term"));
            }
            let mut coeff = Rat::one();
            let mut mono: BTreeMap<usize, u32> = BTreeMap::new();
            for factor in body.split('*') {
                if let Some(rest) = factor.strip_prefix('t') {
                    let (idx, exp) = match rest.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad("exponent"))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad("variable index"))?;
                    if idx == 0 {
                        return Err(bad("variables are numbered from t1"));
                    }
                    max_var = max_var.max(idx);
                    *mono.entry(idx - 1).or_insert(0) += exp;
                } else {
                    coeff *= parse_rat(factor).map_err(|_| bad("coefficient"))?;
                }
            }
            if neg {
                coeff = -coeff;
            }
            raw.push((mono, coeff));
        }
        let arity = arity.unwrap_or(max_var);
        if max_var > arity {
            return Err(bad("variable index exceeds arity"));
        }
        let terms = raw.into_iter().map(|(mono, c)| {
            let mut v = vec![0; arity];
            for (i, e) in mono {
                v[i] = e;
            }
            (v, c)
        });
        Self::new(arity, terms)
    }
}

impl fmt::Display for PolynomialNC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, c) in self.terms.iter().rev() {
            let neg = c < &Rat::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mut parts = Vec::new();
            if !a.is_one() {
                parts.push(rat_to_string(&a));
            }
            for (i, &e) in mono.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("t{}", i + 1)),
                    _ => parts.push(format!("t{}^{e}", i + 1)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
