//! Series that defeat the ratio and root tests, weighted `c₀` spaces and
//! explicit divergence witnesses.
//!
//! All sequence terms are exact rationals. Statements about limits are
//! replaced by finite witnesses: index pairs with extreme ratios, Cauchy
//! windows with large sums, and exactly verified block inequalities.

mod divergence;
mod weights;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use divergence::{
    block_divergence_witness, cauchy_failure_witness, d_seq, density_perturbation,
    stronger_than_probe, BlockWitness, CauchySource, CauchyWitness, DCombo, Perturbation,
    StrongerVerdict, WitnessMethod,
};
pub use weights::{
    build_blocks, harmonic_block_sum, BlockCheck, BlockPartition, SumValue, WeightKind,
    WeightedSpace,
};

use crate::error::{Error, Result};
use crate::numkernel::linalg::determinant;
use crate::numkernel::{
    compare, enclose_exp, log_rat, rat_abs, rat_powi, rat_to_string, serde_rat, Enclosure,
    Ordering3, Rat,
};

/// A term sequence indexed from 1.
pub trait Series {
    fn term(&self, n: u64) -> Rat;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqFamily {
    /// `2^{−n+(−1)ⁿ}`.
    GeometricSkewed,
    /// `(ns)^{−n+(−1)ⁿ}`.
    RatioFailConv(Rat),
    /// `(ns)^{n+(−1)ⁿ}`.
    RatioFailDiv(Rat),
    /// `n^{−s}`, integer `s`.
    RootFailConv(Rat),
    /// `nˢ`, integer `s`.
    RootFailDiv(Rat),
}

fn parity(n: u64) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

impl SeqFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            SeqFamily::GeometricSkewed => Ok(()),
            SeqFamily::RatioFailConv(s) | SeqFamily::RatioFailDiv(s) => {
                if *s > Rat::one() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("s must exceed 1, got {}", rat_to_string(s))))
                }
            }
            SeqFamily::RootFailConv(s) | SeqFamily::RootFailDiv(s) => {
                if s.is_integer() && s.is_positive() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "root families take a positive integer s, got {}",
                        rat_to_string(s)
                    )))
                }
            }
        }
    }

    pub fn parameter(&self) -> Option<&Rat> {
        match self {
            SeqFamily::GeometricSkewed => None,
            SeqFamily::RatioFailConv(s)
            | SeqFamily::RatioFailDiv(s)
            | SeqFamily::RootFailConv(s)
            | SeqFamily::RootFailDiv(s) => Some(s),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SeqFamily::GeometricSkewed => "geometric_skewed",
            SeqFamily::RatioFailConv(_) => "ratio_fail_conv",
            SeqFamily::RatioFailDiv(_) => "ratio_fail_div",
            SeqFamily::RootFailConv(_) => "root_fail_conv",
            SeqFamily::RootFailDiv(_) => "root_fail_div",
        }
    }

    fn same_kind(&self, other: &SeqFamily) -> bool {
        self.kind_name() == other.kind_name()
    }

    fn base_and_exponent(&self, n: u64) -> (Rat, i64) {
        let nn = Rat::from_integer((n as i64).into());
        let e = n as i64;
        match self {
            SeqFamily::GeometricSkewed => (Rat::from_integer(2.into()), -e + parity(n)),
            SeqFamily::RatioFailConv(s) => (nn * s, -e + parity(n)),
            SeqFamily::RatioFailDiv(s) => (nn * s, e + parity(n)),
            SeqFamily::RootFailConv(s) => (nn, -s.to_integer().try_into().unwrap_or(i64::MAX)),
            SeqFamily::RootFailDiv(s) => (nn, s.to_integer().try_into().unwrap_or(i64::MAX)),
        }
    }

    fn term_enclosure(&self, n: u64, prec: u32) -> Enclosure {
        let (base, e) = self.base_and_exponent(n);
        let p = Enclosure::from_rat(&base, prec).powi(e.unsigned_abs() as u32);
        if e < 0 {
            p.recip().expect("bases are positive")
        } else {
            p
        }
    }
}

impl Series for SeqFamily {
    fn term(&self, n: u64) -> Rat {
        assert!(n >= 1, "sequences are indexed from 1");
        let (base, e) = self.base_and_exponent(n);
        rat_powi(&base, e)
    }
}

/// `xₙ = Σ αⱼ a_{n,sⱼ}` over one family kind, `s` strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCombo {
    parts: Vec<(Rat, SeqFamily)>,
}

impl LinearCombo {
    pub fn new(parts: Vec<(Rat, SeqFamily)>) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::invalid("empty combination"));
        };
        for (a, f) in &parts {
            f.validate()?;
            if a.is_zero() {
                return Err(Error::invalid("coefficients must be nonzero"));
            }
            if !f.same_kind(first) {
                return Err(Error::invalid("all parts must share one family kind"));
            }
        }
        let mut parts = parts;
        parts.sort_by(|a, b| b.1.parameter().cmp(&a.1.parameter()));
        for w in parts.windows(2) {
            if w[0].1.parameter() == w[1].1.parameter() {
                return Err(Error::invalid("parameters must be distinct"));
            }
        }
        Ok(LinearCombo { parts })
    }

    pub fn single(f: SeqFamily) -> Result<Self> {
        Self::new(vec![(Rat::one(), f)])
    }

    pub fn parts(&self) -> &[(Rat, SeqFamily)] {
        &self.parts
    }

    fn term_enclosure(&self, n: u64, prec: u32) -> Enclosure {
        let mut acc = Enclosure::zero(prec);
        for (a, f) in &self.parts {
            acc = acc.add(&f.term_enclosure(n, prec).mul_rat(a));
        }
        acc
    }
}

impl Series for LinearCombo {
    fn term(&self, n: u64) -> Rat {
        self.parts.iter().map(|(a, f)| a * f.term(n)).sum()
    }
}

impl std::fmt::Display for LinearCombo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|(a, fam)| match fam.parameter() {
                Some(s) => format!("{}·{}({})", rat_to_string(a), fam.kind_name(), rat_to_string(s)),
                None => format!("{}·{}", rat_to_string(a), fam.kind_name()),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A finite table repeated periodically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSequence(pub Vec<Rat>);

impl Series for TableSequence {
    fn term(&self, n: u64) -> Rat {
        self.0[((n - 1) % self.0.len() as u64) as usize].clone()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioStats {
    #[serde(with = "serde_rat")]
    pub min: Rat,
    pub argmin: u64,
    #[serde(with = "serde_rat")]
    pub max: Rat,
    pub argmax: u64,
}

/// Extremes of `|x_{n+1}/xₙ|` over `1 ≤ n ≤ N`.
pub fn ratio_stats<S: Series + ?Sized>(x: &S, n_max: u64) -> Result<RatioStats> {
    if n_max == 0 {
        return Err(Error::invalid("need N ≥ 1"));
    }
    let mut prev = x.term(1);
    let mut stats: Option<RatioStats> = None;
    for n in 1..=n_max {
        let next = x.term(n + 1);
        if prev.is_zero() {
            return Err(Error::ZeroTerm { index: n });
        }
        let r = rat_abs(&(&next / &prev));
        match &mut stats {
            None => {
                stats = Some(RatioStats {
                    min: r.clone(),
                    argmin: n,
                    max: r,
                    argmax: n,
                })
            }
            Some(s) => {
                if r < s.min {
                    s.min = r.clone();
                    s.argmin = n;
                }
                if r > s.max {
                    s.max = r;
                    s.argmax = n;
                }
            }
        }
        prev = next;
    }
    if prev.is_zero() {
        return Err(Error::ZeroTerm { index: n_max + 1 });
    }
    Ok(stats.expect("n_max ≥ 1"))
}

/// `(n, |x_{n+1}/xₙ|)` for `1 ≤ n ≤ N`.
pub fn ratio_trace<S: Series + ?Sized>(x: &S, n_max: u64) -> Result<Vec<(u64, Rat)>> {
    (1..=n_max)
        .map(|n| {
            let a = x.term(n);
            if a.is_zero() {
                return Err(Error::ZeroTerm { index: n });
            }
            Ok((n, rat_abs(&(x.term(n + 1) / a))))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioCertificate {
    pub odd_index: u64,
    #[serde(with = "serde_rat")]
    pub odd_ratio: Rat,
    pub even_index: u64,
    #[serde(with = "serde_rat")]
    pub even_ratio: Rat,
}

const SCREEN_PREC: u32 = 64;

/// An odd `n₁` with `|x_{n₁+1}/x_{n₁}| ≥ M` and an even `n₂` with ratio
/// `≤ 1/M`, each verified in exact arithmetic, searching `n ≤ max_n`.
///
/// Odd indices are where the ratio grows and even ones where it
/// collapses, so each parity is scanned separately. A 64-bit enclosure
/// screens out indices whose ratio is certainly on the wrong side.
pub fn ratio_certificate(combo: &LinearCombo, m: &Rat, max_n: u64) -> Result<RatioCertificate> {
    if !m.is_positive() {
        return Err(Error::invalid("M must be positive"));
    }
    let inv = m.recip();
    let mut odd: Option<(u64, Rat)> = None;
    let mut even: Option<(u64, Rat)> = None;
    let mut best_odd = Enclosure::zero(SCREEN_PREC);
    let (m_enc, inv_enc) = (Enclosure::from_rat(m, SCREEN_PREC), Enclosure::from_rat(&inv, SCREEN_PREC));
    let mut cur = combo.term_enclosure(1, SCREEN_PREC);
    for n in 1..=max_n {
        let next = combo.term_enclosure(n + 1, SCREEN_PREC);
        let want_odd = n % 2 == 1 && odd.is_none();
        let want_even = n % 2 == 0 && even.is_none();
        if want_odd || want_even {
            let ratio = next.div(&cur).map(|r| r.abs()).ok();
            let maybe = match &ratio {
                None => true,
                Some(r) if want_odd => compare(r, &m_enc) != Ordering3::CertainlyLess,
                Some(r) => compare(r, &inv_enc) != Ordering3::CertainlyGreater,
            };
            if want_odd {
                if let Some(r) = &ratio {
                    if best_odd.upper() < r.upper() {
                        best_odd = r.clone();
                    }
                }
            }
            if maybe {
                // a vanishing term has no ratio; the index is skipped
                let a = combo.term(n);
                if !a.is_zero() {
                    let exact = rat_abs(&(combo.term(n + 1) / a));
                    if want_odd && exact >= *m {
                        odd = Some((n, exact));
                    } else if want_even && exact <= inv {
                        even = Some((n, exact));
                    }
                }
            }
        }
        if let (Some((n1, r1)), Some((n2, r2))) = (&odd, &even) {
            return Ok(RatioCertificate {
                odd_index: *n1,
                odd_ratio: r1.clone(),
                even_index: *n2,
                even_ratio: r2.clone(),
            });
        }
        cur = next;
    }
    let missing = match (&odd, &even) {
        (None, None) => "both parities",
        (None, _) => "odd index",
        _ => "even index",
    };
    Err(Error::budget(
        max_n,
        format!(
            "ratio certificate ({missing}) up to n = {max_n}; largest odd ratio seen ≈ {:.4e}",
            best_odd.upper().to_f64()
        ),
    ))
}

/// `|xₙ|^{1/n}` as `exp(ln|xₙ| / n)`; zero terms give 0.
pub fn root_at<S: Series + ?Sized>(x: &S, n: u64, prec: u32) -> Result<Enclosure> {
    let a = rat_abs(&x.term(n));
    if a.is_zero() {
        return Ok(Enclosure::zero(prec));
    }
    if a.is_one() {
        return Ok(Enclosure::one(prec));
    }
    let w = prec + 8;
    let l = log_rat(&a, w)?.div_i64(n as i64);
    Ok(enclose_exp(&l, w)?.round_to(prec))
}

#[derive(Debug, Clone, Serialize)]
pub struct RootStats {
    pub min: Enclosure,
    pub argmin: u64,
    pub max: Enclosure,
    pub argmax: u64,
}

/// Extremes of `|xₙ|^{1/n}` over `1 ≤ n ≤ N`, ordered by midpoints.
pub fn root_stats<S: Series + ?Sized>(x: &S, n_max: u64, prec: u32) -> Result<RootStats> {
    if n_max == 0 {
        return Err(Error::invalid("need N ≥ 1"));
    }
    let first = root_at(x, 1, prec)?;
    let mut st = RootStats {
        min: first.clone(),
        argmin: 1,
        max: first,
        argmax: 1,
    };
    for n in 2..=n_max {
        let r = root_at(x, n, prec)?;
        if r.mid() < st.min.mid() {
            st.min = r.clone();
            st.argmin = n;
        }
        if r.mid() > st.max.mid() {
            st.max = r;
            st.argmax = n;
        }
    }
    Ok(st)
}

/// `x₁ + ⋯ + x_N`, exact.
pub fn partial_sums<S: Series + ?Sized>(x: &S, n_max: u64) -> Rat {
    (1..=n_max).map(|n| x.term(n)).sum()
}

/// Whether `term(RatioFailConv(s), n) ≤ n⁻²`, decided exactly.
///
/// The term is `(ns)^{−e}` with `e = n ∓ 1 ≥ 1`, so the claim is
/// `(ns)^e ≥ n²`. A 64-bit enclosure of `(ns)^e` settles it; overlaps
/// fall through to exact powers.
pub fn comparison_bound_holds(s: &Rat, n: u64) -> Result<bool> {
    let fam = SeqFamily::RatioFailConv(s.clone());
    fam.validate()?;
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let (base, e) = fam.base_and_exponent(n);
    let lhs = Enclosure::from_rat(&base, SCREEN_PREC).powi((-e) as u32);
    let nn = Rat::from_integer(((n as i64) * (n as i64)).into());
    match compare(&lhs, &Enclosure::from_rat(&nn, SCREEN_PREC)) {
        Ordering3::CertainlyGreater => Ok(true),
        Ordering3::CertainlyLess => Ok(false),
        Ordering3::Overlap => Ok(fam.term(n) * nn <= Rat::one()),
    }
}

/// Determinant of `[a_{nᵢ,sⱼ}]` for `RatioFailConv`; nonzero certifies
/// linear independence of the sequences.
pub fn independence_certificate_series(params: &[Rat], indices: &[u64]) -> Result<Rat> {
    if params.len() < 2 {
        return Err(Error::invalid("need at least two parameters"));
    }
    if indices.len() != params.len() {
        return Err(Error::invalid("need one sample index per parameter"));
    }
    for (i, s) in params.iter().enumerate() {
        if params[..i].contains(s) {
            return Err(Error::invalid(format!("parameter {} repeated", rat_to_string(s))));
        }
        SeqFamily::RatioFailConv(s.clone()).validate()?;
    }
    for (i, n) in indices.iter().enumerate() {
        if *n == 0 || indices[..i].contains(n) {
            return Err(Error::invalid("sample indices must be distinct and positive"));
        }
    }
    let m: Vec<Vec<Rat>> = indices
        .iter()
        .map(|&n| {
            params
                .iter()
                .map(|s| SeqFamily::RatioFailConv(s.clone()).term(n))
                .collect()
        })
        .collect();
    let det = determinant(&m);
    if det.is_zero() {
        return Err(Error::SingularSample);
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{int, rat};

    #[test]
    fn terms_by_formula() {
        assert_eq!(SeqFamily::GeometricSkewed.term(1), rat(1, 4));
        assert_eq!(SeqFamily::GeometricSkewed.term(2), rat(1, 2));
        assert_eq!(SeqFamily::RatioFailConv(int(2)).term(3), rat(1, 1296));
        assert_eq!(SeqFamily::RatioFailDiv(int(2)).term(2), int(64));
        assert_eq!(SeqFamily::RootFailConv(int(2)).term(5), rat(1, 25));
    }

    #[test]
    fn validation() {
        assert!(SeqFamily::RatioFailConv(int(1)).validate().is_err());
        assert!(SeqFamily::RootFailConv(rat(3, 2)).validate().is_err());
        assert!(SeqFamily::RootFailConv(int(1)).validate().is_ok());
        let c = LinearCombo::new(vec![
            (int(1), SeqFamily::RatioFailConv(int(2))),
            (int(-5), SeqFamily::RatioFailConv(int(3))),
        ])
        .unwrap();
        assert_eq!(c.parts()[0].1.parameter(), Some(&int(3)));
        assert!(LinearCombo::new(vec![
            (int(1), SeqFamily::RatioFailConv(int(2))),
            (int(1), SeqFamily::RatioFailDiv(int(3))),
        ])
        .is_err());
    }

    #[test]
    fn comparison_bound_agrees_with_direct() {
        for s in [rat(11, 10), rat(2, 1), rat(101, 100)] {
            for n in 1..60u64 {
                let direct = SeqFamily::RatioFailConv(s.clone()).term(n)
                    * Rat::from_integer(((n * n) as i64).into())
                    <= Rat::one();
                assert_eq!(comparison_bound_holds(&s, n).unwrap(), direct, "s = {s}, n = {n}");
            }
        }
    }
}
