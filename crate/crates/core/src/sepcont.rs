//! A function of `n ≥ 2` variables that is continuous in each variable
//! separately but not at the origin, and the algebra generated by
//! `φ_c(x) = e^{|x|^c} − e^{−|x|^c}`.
//!
//! `f(x) = x₁⋯xₙ / (x₁²ⁿ + ⋯ + xₙ²ⁿ)` takes the value `1/(n tⁿ)` on the
//! diagonal. Composing with a polynomial in the `φ_c` that blows up at
//! infinity therefore blows up along the diagonal as `t → 0`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expalg::{Algebra, PolynomialNC};
use crate::numkernel::{
    enclose_exp, enclose_pow_rat, pow2, rat_abs, rat_powi, rat_to_string, serde_rat, Enclosure,
    Rat,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SepFunction {
    n: usize,
}

impl SepFunction {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("dimension must be at least 2"));
        }
        Ok(SepFunction { n })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Exact value; `0` at the origin.
    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.n {
            return Err(Error::invalid(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.n
            )));
        }
        let num: Rat = point.iter().product();
        if num.is_zero() {
            return Ok(Rat::zero());
        }
        let e = 2 * self.n as i64;
        let den: Rat = point.iter().map(|x| rat_powi(x, e)).sum();
        Ok(num / den)
    }

    /// `1/(n tⁿ)`, the value at `(t, …, t)`.
    pub fn diagonal(&self, t: &Rat) -> Result<Rat> {
        if t.is_zero() {
            return Ok(Rat::zero());
        }
        Ok((Rat::from_integer((self.n as i64).into()) * rat_powi(t, self.n as i64)).recip())
    }

    /// Largest change of `f` when coordinate `axis` moves by `±r·k/4`,
    /// `k = 1…4`, for each radius `r`.
    pub fn separate_continuity_probe(
        &self,
        point: &[Rat],
        axis: usize,
        radii: &[Rat],
    ) -> Result<Vec<Rat>> {
        if axis >= self.n {
            return Err(Error::invalid("axis out of range"));
        }
        let base = self.eval(point)?;
        radii
            .iter()
            .map(|r| {
                let mut worst = Rat::zero();
                for k in 1..=4i64 {
                    for sign in [-1i64, 1] {
                        let mut p = point.to_vec();
                        p[axis] += r * Rat::new((sign * k).into(), 4.into());
                        worst = worst.max(rat_abs(&(self.eval(&p)? - &base)));
                    }
                }
                Ok(worst)
            })
            .collect()
    }
}

pub fn eval_sep(f: &SepFunction, point: &[Rat]) -> Result<Rat> {
    f.eval(point)
}

/// Exponent `Σ m·|x|^γ`, stored as `γ ↦ m` without zero multiplicities.
pub type Multiset = BTreeMap<Rat, i64>;

fn merge(a: &Multiset, b: &Multiset, sign: i64) -> Multiset {
    let mut out = a.clone();
    for (g, m) in b {
        *out.entry(g.clone()).or_insert(0) += sign * m;
    }
    out.retain(|_, m| *m != 0);
    out
}

/// Growth order of `e^{Σ m|x|^γ}` as `x → ∞`: the largest power where the
/// multiplicities differ decides.
pub fn growth_cmp(a: &Multiset, b: &Multiset) -> Ordering {
    match merge(a, b, -1).iter().next_back() {
        None => Ordering::Equal,
        Some((_, m)) => m.cmp(&0),
    }
}

/// `Σ D·exp(Σ m·|x|^γ)`, canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PowerExpForm {
    terms: BTreeMap<Multiset, Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    BlowsUp,
    Bounded,
    Zero,
}

impl PowerExpForm {
    pub fn from_terms(pairs: impl IntoIterator<Item = (Multiset, Rat)>) -> Self {
        let mut terms: BTreeMap<Multiset, Rat> = BTreeMap::new();
        for (mut e, d) in pairs {
            e.retain(|_, m| *m != 0);
            *terms.entry(e).or_insert_with(Rat::zero) += d;
        }
        terms.retain(|_, d| !d.is_zero());
        PowerExpForm { terms }
    }

    pub fn terms(&self) -> &BTreeMap<Multiset, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The term of fastest growth.
    pub fn leading(&self) -> Option<(&Multiset, &Rat)> {
        self.terms.iter().max_by(|a, b| growth_cmp(a.0, b.0))
    }

    /// Whether `|form(x)| → ∞` as `x → ∞`.
    pub fn dominance_verdict(&self) -> Dominance {
        match self.leading() {
            None => Dominance::Zero,
            Some((e, _)) => match e.iter().next_back() {
                Some((_, m)) if *m > 0 => Dominance::BlowsUp,
                _ => Dominance::Bounded,
            },
        }
    }

    /// Enclosure of the form at `x` (it depends on `|x|` only).
    pub fn eval(&self, x: &Rat, prec: u32) -> Result<Enclosure> {
        let w = prec + 16;
        let ax = Enclosure::from_rat(&rat_abs(x), w);
        let mut powers: BTreeMap<&Rat, Enclosure> = BTreeMap::new();
        for e in self.terms.keys() {
            for g in e.keys() {
                if !powers.contains_key(g) {
                    let v = if x.is_zero() {
                        Enclosure::zero(w)
                    } else {
                        enclose_pow_rat(&ax, g, w)?
                    };
                    powers.insert(g, v);
                }
            }
        }
        let mut acc = Enclosure::zero(w);
        for (e, d) in &self.terms {
            let mut arg = Enclosure::zero(w);
            for (g, m) in e {
                arg = arg.add(&powers[g].mul_i64(*m));
            }
            acc = acc.add(&enclose_exp(&arg, w)?.mul_rat(d));
        }
        Ok(acc.round_to(prec))
    }

    /// Upper estimate of the largest exponent magnitude at `x`, in f64.
    fn exponent_scale(&self, x: &Rat) -> f64 {
        let ax = rat_abs(x);
        let xf = ax.numer().bits() as f64 - ax.denom().bits() as f64 + 1.0;
        self.terms
            .keys()
            .map(|e| {
                e.iter()
                    .map(|(g, m)| {
                        let gf = g.numer().bits() as f64 - g.denom().bits() as f64 + 1.0;
                        (*m as f64).abs() * (xf * 2f64.powf(gf)).exp2()
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

impl Algebra for PowerExpForm {
    fn one() -> Self {
        PowerExpForm::from_terms([(Multiset::new(), Rat::one())])
    }

    fn add(&self, other: &Self) -> Self {
        PowerExpForm::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, d)| (e.clone(), d.clone())),
        )
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, d1) in &self.terms {
            for (e2, d2) in &other.terms {
                out.push((merge(e1, e2, 1), d1 * d2));
            }
        }
        PowerExpForm::from_terms(out)
    }

    fn scale(&self, c: &Rat) -> Self {
        PowerExpForm::from_terms(self.terms.iter().map(|(e, d)| (e.clone(), d * c)))
    }
}

/// `φ_c = e^{|x|^c} − e^{−|x|^c}`.
pub fn make_phi_c(c: &Rat) -> Result<PowerExpForm> {
    if !c.is_positive() {
        return Err(Error::invalid("φ_c needs c > 0"));
    }
    Ok(PowerExpForm::from_terms([
        (Multiset::from([(c.clone(), 1)]), Rat::one()),
        (Multiset::from([(c.clone(), -1)]), -Rat::one()),
    ]))
}

/// `P(φ_{c₁}, …, φ_{c_p})` expanded exactly.
pub fn expand_poly(p: &PolynomialNC, cs: &[Rat]) -> Result<PowerExpForm> {
    for (i, c) in cs.iter().enumerate() {
        if cs[..i].contains(c) {
            return Err(Error::invalid(format!("parameter {} repeated", rat_to_string(c))));
        }
    }
    let gens = cs.iter().map(make_phi_c).collect::<Result<Vec<_>>>()?;
    p.compose(&gens)
}

pub fn dominance_verdict(form: &PowerExpForm) -> Dominance {
    form.dominance_verdict()
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalWitness {
    pub j: u32,
    /// `t = 2^{−j}`.
    #[serde(with = "serde_rat")]
    pub t: Rat,
    /// `f(t, …, t) = 1/(n tⁿ)`.
    #[serde(with = "serde_rat")]
    pub u: Rat,
    pub value: Enclosure,
}

/// Largest exponent magnitude the search will evaluate.
const EXPONENT_CAP: f64 = 1e12;

/// First `t = 2^{−j}` with `|form(f(t, …, t))| ≥ threshold`, certified.
pub fn diagonal_blowup_witness(
    f: &SepFunction,
    form: &PowerExpForm,
    threshold: &Rat,
    prec: u32,
    max_j: u32,
) -> Result<DiagonalWitness> {
    if form.dominance_verdict() != Dominance::BlowsUp {
        return Err(Error::invalid("form does not blow up"));
    }
    for j in 0..=max_j {
        let t = pow2(-(j as i64));
        let u = f.diagonal(&t)?;
        if form.exponent_scale(&u) > EXPONENT_CAP {
            return Err(Error::budget(
                j as u64,
                "exponent beyond the evaluation cap before the threshold was certified",
            ));
        }
        let value = form.eval(&u, prec)?;
        if !value.contains_zero() && value.abs().lower_rat() >= *threshold {
            return Ok(DiagonalWitness { j, t, u, value });
        }
    }
    Err(Error::budget(max_j as u64, "diagonal refinement"))
}

/// `(t, |Φ(t, …, t)|)` for `t = 2^{−j}`, `j ∈ js`.
pub fn diagonal_trace(
    f: &SepFunction,
    form: &PowerExpForm,
    js: impl IntoIterator<Item = u32>,
    prec: u32,
) -> Result<Vec<(Rat, Enclosure)>> {
    js.into_iter()
        .map(|j| {
            let t = pow2(-(j as i64));
            let v = form.eval(&f.diagonal(&t)?, prec)?.abs();
            Ok((t, v))
        })
        .collect()
}

fn multiset_string(e: &Multiset) -> String {
    if e.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = e
        .iter()
        .rev()
        .map(|(g, m)| format!("{}|x|^{}", m, rat_to_string(g)))
        .collect();
    format!("exp({})", parts.join(" + "))
}

impl fmt::Display for PowerExpForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Multiset> = self.terms.keys().collect();
        keys.sort_by(|a, b| growth_cmp(b, a));
        let parts: Vec<String> = keys
            .into_iter()
            .map(|e| format!("{}·{}", rat_to_string(&self.terms[e]), multiset_string(e)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for PowerExpForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, d) in &self.terms {
            let exps: Vec<(String, i64)> = e.iter().map(|(g, m)| (rat_to_string(g), *m)).collect();
            seq.serialize_element(&(rat_to_string(d), exps))?;
        }
        seq.end()
    }
}
