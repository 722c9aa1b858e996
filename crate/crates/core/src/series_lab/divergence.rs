//! d-sequences `d_{j,t} = c_j / kᵗ` on block `k` and divergence witnesses.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::weights::{BlockPartition, SumValue, WeightKind, WeightedSpace};
use super::Series;
use crate::error::{Error, Result};
use crate::numkernel::{enclose_pow_rat, rat_abs, rat_to_string, serde_rat, Enclosure, Rat};

/// Blocks up to this length are confirmed term by term.
const DIRECT_SUM: u64 = 10_000;
const MAX_DOUBLINGS: u32 = 4096;

fn big_rat(n: &BigUint) -> Rat {
    Rat::from_integer(BigInt::from(n.clone()))
}

fn check_t(t: &Rat) -> Result<()> {
    if t.is_positive() && *t < Rat::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("t must lie in (0,1), got {}", rat_to_string(t))))
    }
}

/// `k^{−t}`, exact when `k` is a perfect `den(t)`-th power.
fn kpow_neg(k: &BigUint, t: &Rat, prec: u32) -> Result<SumValue> {
    let q: u32 = t
        .denom()
        .to_u32()
        .ok_or_else(|| Error::invalid("denominator of t too large"))?;
    let p: usize = t
        .numer()
        .to_usize()
        .ok_or_else(|| Error::invalid("numerator of t too large"))?;
    let r = k.nth_root(q);
    if num_traits::pow(r.clone(), q as usize) == *k {
        return Ok(SumValue::Exact {
            value: num_traits::pow(big_rat(&r), p).recip(),
        });
    }
    let w = prec + 16;
    Ok(SumValue::Enclosed {
        value: enclose_pow_rat(&Enclosure::from_rat(&big_rat(k), w), &-t, w)?.round_to(prec),
    })
}

fn scale(v: &SumValue, q: &Rat) -> SumValue {
    match v {
        SumValue::Exact { value } => SumValue::Exact { value: value * q },
        SumValue::Enclosed { value } => SumValue::Enclosed {
            value: value.mul_rat(q),
        },
    }
}

fn add(a: &SumValue, b: &SumValue, prec: u32) -> SumValue {
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => SumValue::Exact { value: x + y },
        _ => SumValue::Enclosed {
            value: a.enclosure(prec).add(&b.enclosure(prec)),
        },
    }
}

fn mul(a: &SumValue, b: &SumValue, prec: u32) -> SumValue {
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => SumValue::Exact { value: x * y },
        _ => SumValue::Enclosed {
            value: a.enclosure(prec).mul(&b.enclosure(prec)),
        },
    }
}

fn abs_lower(v: &SumValue) -> Rat {
    match v {
        SumValue::Exact { value } => rat_abs(value),
        SumValue::Enclosed { value } => {
            let a = value.abs().lower_rat();
            if a.is_negative() {
                Rat::zero()
            } else {
                a
            }
        }
    }
}

/// `d_{j,t}`; index 1 precedes every block and carries 0.
pub fn d_seq(b: &BlockPartition, t: &Rat, j: &BigUint, prec: u32) -> Result<SumValue> {
    check_t(t)?;
    match b.block_of(j)? {
        None => Ok(SumValue::Exact { value: Rat::zero() }),
        Some(k) => Ok(scale(&kpow_neg(&BigUint::from(k), t, prec)?, &b.space().weight(j))),
    }
}

/// `Σ λ_ν d_{·,t_ν}` with `t₁ < ⋯ < t_s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DCombo {
    #[serde(serialize_with = "ser_pairs")]
    terms: Vec<(Rat, Rat)>,
}

fn ser_pairs<S: serde::Serializer>(v: &[(Rat, Rat)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (l, t) in v {
        seq.serialize_element(&(rat_to_string(l), rat_to_string(t)))?;
    }
    seq.end()
}

impl DCombo {
    pub fn new(terms: Vec<(Rat, Rat)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("empty d-combination"));
        }
        for (l, t) in &terms {
            check_t(t)?;
            if l.is_zero() {
                return Err(Error::invalid("coefficients must be nonzero"));
            }
        }
        for w in terms.windows(2) {
            if w[0].1 >= w[1].1 {
                return Err(Error::invalid("exponents t must be strictly increasing"));
            }
        }
        Ok(DCombo { terms })
    }

    pub fn single(t: Rat) -> Result<Self> {
        Self::new(vec![(Rat::one(), t)])
    }

    pub fn terms(&self) -> &[(Rat, Rat)] {
        &self.terms
    }

    /// `F(k) = Σ λ_ν k^{−t_ν}`, the common factor of `c_j` on block `k`.
    pub fn factor(&self, k: &BigUint, prec: u32) -> Result<SumValue> {
        let mut acc = SumValue::Exact { value: Rat::zero() };
        for (l, t) in &self.terms {
            acc = add(&acc, &scale(&kpow_neg(k, t, prec)?, l), prec);
        }
        Ok(acc)
    }

    /// The combination at index `j`.
    pub fn value(&self, b: &BlockPartition, j: &BigUint, prec: u32) -> Result<SumValue> {
        match b.block_of(j)? {
            None => Ok(SumValue::Exact { value: Rat::zero() }),
            Some(k) => Ok(scale(&self.factor(&BigUint::from(k), prec)?, &b.space().weight(j))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    /// Every term of the block summed.
    DirectSummation,
    /// Block weight sum times `F(k)`.
    ProductForm,
    /// `|sum| > k·|F(k)|`, from the block invariant alone.
    LowerBound,
}

/// Block `k` with `|Σ_{block k} xⱼ| ≥ M`.
#[derive(Debug, Clone, Serialize)]
pub struct BlockWitness {
    pub k: String,
    pub start: Option<String>,
    pub end: Option<String>,
    pub method: WitnessMethod,
    pub sum: Option<SumValue>,
    #[serde(with = "serde_rat")]
    pub abs_lower: Rat,
    #[serde(with = "serde_rat")]
    pub target: Rat,
}

impl BlockWitness {
    pub fn k(&self) -> BigUint {
        self.k.parse().expect("decimal block index")
    }
}

/// Bounds of block `k` when known without search.
fn known_bounds(b: &BlockPartition, k: &BigUint) -> Option<(BigUint, BigUint)> {
    if let WeightKind::Constant = b.space().kind() {
        // n_k = 1 + k(k+3)/2
        let end = BigUint::one() + (k * (k + 3u32)) / 2u32;
        let start = &end - k;
        return Some((start, end));
    }
    b.bounds(k.to_u64()?)
}

fn evaluate(combo: &DCombo, b: &BlockPartition, k: &BigUint, prec: u32) -> Result<BlockWitness> {
    let w = prec + k.bits() as u32;
    let f = combo.factor(k, w)?;
    let blank = |method, sum: Option<SumValue>, lower: Rat, bounds: Option<(BigUint, BigUint)>| {
        BlockWitness {
            k: k.to_string(),
            start: bounds.as_ref().map(|x| x.0.to_string()),
            end: bounds.as_ref().map(|x| x.1.to_string()),
            method,
            sum,
            abs_lower: lower,
            target: Rat::zero(),
        }
    };
    let Some((lo, hi)) = known_bounds(b, k) else {
        let lower = abs_lower(&f) * big_rat(k);
        return Ok(blank(WitnessMethod::LowerBound, None, lower, None));
    };
    let len = &hi - &lo + 1u32;
    if len <= BigUint::from(DIRECT_SUM) {
        let mut acc = SumValue::Exact { value: Rat::zero() };
        let mut j = lo.clone();
        while j <= hi {
            acc = add(&acc, &scale(&f, &b.space().weight(&j)), w);
            j += 1u32;
        }
        let lower = abs_lower(&acc);
        return Ok(blank(WitnessMethod::DirectSummation, Some(acc), lower, Some((lo, hi))));
    }
    let s = b.space().block_sum(&(&lo - 1u32), &hi, w)?;
    let sum = mul(&s, &f, w);
    let lower = abs_lower(&sum);
    Ok(blank(WitnessMethod::ProductForm, Some(sum), lower, Some((lo, hi))))
}

fn search_block(
    combo: &DCombo,
    b: &BlockPartition,
    m: &Rat,
    k_min: &BigUint,
    prec: u32,
) -> Result<BlockWitness> {
    let ok = |k: &BigUint| -> Result<Option<BlockWitness>> {
        let wit = evaluate(combo, b, k, prec)?;
        Ok((wit.abs_lower >= *m).then_some(wit))
    };
    if let Some(w) = ok(k_min)? {
        return Ok(w);
    }
    let mut lo = k_min.clone();
    let mut step = BigUint::one();
    for _ in 0..MAX_DOUBLINGS {
        let hi = k_min + &step;
        if let Some(mut best) = ok(&hi)? {
            let mut hi = hi;
            // certified at hi; narrow towards lo
            while &hi - &lo > BigUint::one() {
                let mid = (&lo + &hi) / 2u32;
                match ok(&mid)? {
                    Some(w) => {
                        hi = mid;
                        best = w;
                    }
                    None => lo = mid,
                }
            }
            return Ok(best);
        }
        lo = hi;
        step *= 2u32;
    }
    Err(Error::budget(
        MAX_DOUBLINGS as u64,
        format!("no block reaching {} found", rat_to_string(m)),
    ))
}

/// A block `k` with `|Σ_{j ∈ block k} xⱼ| ≥ M` for `x = Σ λ_ν d_{·,t_ν}`.
///
/// Candidates come from the lower bound `|sum| > k·|F(k)|`; a candidate is
/// then confirmed by direct summation for short blocks, by the product form
/// for long materialized ones, and by the bound itself otherwise.
pub fn block_divergence_witness(
    combo: &DCombo,
    b: &BlockPartition,
    m: &Rat,
    prec: u32,
) -> Result<BlockWitness> {
    let mut w = search_block(combo, b, m, &BigUint::one(), prec)?;
    w.target = m.clone();
    Ok(w)
}

pub enum CauchySource<'a> {
    Blocks {
        combo: &'a DCombo,
        partition: &'a BlockPartition,
    },
    Terms(&'a dyn Series),
}

/// `m > n > N` with `|xₙ + ⋯ + x_m| > M`.
#[derive(Debug, Clone, Serialize)]
pub struct CauchyWitness {
    pub n: String,
    pub m: String,
    pub sum: SumValue,
    #[serde(with = "serde_rat")]
    pub abs_lower: Rat,
}

pub fn cauchy_failure_witness(
    src: &CauchySource<'_>,
    m: &Rat,
    n_min: u64,
    budget: u64,
    prec: u32,
) -> Result<CauchyWitness> {
    match src {
        CauchySource::Terms(x) => {
            let first = n_min + 1;
            let mut sum = x.term(first);
            for idx in first + 1..=first.saturating_add(budget) {
                sum += x.term(idx);
                if rat_abs(&sum) > *m {
                    return Ok(CauchyWitness {
                        n: first.to_string(),
                        m: idx.to_string(),
                        abs_lower: rat_abs(&sum),
                        sum: SumValue::Exact { value: sum },
                    });
                }
            }
            Err(Error::budget(budget, format!("partial sums from {first} stay within {}", rat_to_string(m))))
        }
        CauchySource::Blocks { combo, partition } => {
            // block k starts at n_{k−1}+1 ≥ k+1
            let mut k = BigUint::from(n_min.max(1));
            for _ in 0..budget.max(1) {
                let wit = search_block(combo, partition, m, &k, prec)?;
                let (Some(s), Some(e)) = (&wit.start, &wit.end) else {
                    return Err(Error::ExtendFirst {
                        index: wit.k().to_u64().unwrap_or(u64::MAX),
                        materialized: partition.len(),
                    });
                };
                let (s_big, e_big): (BigUint, BigUint) = (s.parse().unwrap(), e.parse().unwrap());
                let strict = wit.abs_lower > *m;
                if strict && e_big > s_big && s_big > BigUint::from(n_min) {
                    return Ok(CauchyWitness {
                        n: s.clone(),
                        m: e.clone(),
                        sum: wit.sum.clone().expect("bounded witness carries its sum"),
                        abs_lower: wit.abs_lower,
                    });
                }
                k = wit.k() + 1u32;
            }
            Err(Error::budget(budget, "no block beyond N exceeds M"))
        }
    }
}

/// `x = Φ` on `{1..s}`, `ε c_j / 2` on the window, 0 elsewhere.
#[derive(Debug, Clone, Serialize)]
pub struct Perturbation {
    #[serde(with = "crate::numkernel::serde_rat_vec")]
    pub phi: Vec<Rat>,
    #[serde(with = "serde_rat")]
    pub epsilon: Rat,
    pub window_start: String,
    pub window_end: String,
    pub window_sum: SumValue,
    #[serde(with = "serde_rat")]
    pub distance: Rat,
    pub weight: String,
}

/// Explicit window sup is computed up to this many indices.
const NORM_SCAN: u64 = 100_000;

impl Perturbation {
    pub fn value(&self, space: &WeightedSpace, j: &BigUint) -> Rat {
        let lo: BigUint = self.window_start.parse().unwrap();
        let hi: BigUint = self.window_end.parse().unwrap();
        if *j >= lo && *j <= hi {
            return &self.epsilon * space.weight(j) / Rat::from_integer(2.into());
        }
        j.to_usize()
            .and_then(|i| self.phi.get(i.wrapping_sub(1)).cloned())
            .unwrap_or_else(Rat::zero)
    }
}

/// An element of `A_{M,N}` within `ε` of `Φ`: `Φ` followed by a long `ε c_j / 2` window.
pub fn density_perturbation(
    phi: &[Rat],
    eps: &Rat,
    m: &Rat,
    n_min: u64,
    space: &WeightedSpace,
    prec: u32,
) -> Result<Perturbation> {
    if !eps.is_positive() {
        return Err(Error::invalid("ε must be positive"));
    }
    let s = phi.len() as u64;
    let start = BigUint::from(s.max(n_min) + 1);
    let before = &start - 1u32;
    let target = Rat::from_integer(2.into()) * m / eps;
    let end = space.least_exceeding(&before, &target)?;
    let weights = space.block_sum(&before, &end, prec)?;
    let half = eps / Rat::from_integer(2.into());
    let window_sum = scale(&weights, &half);
    // sup over the window of |x_j − Φ_j| / c_j; Φ vanishes there
    let len = &end - &before;
    let mut distance = Rat::zero();
    let scan = |from: BigUint, count: u64, d: &mut Rat| {
        let mut j = from;
        for _ in 0..count {
            if j > end {
                break;
            }
            let c = space.weight(&j);
            let r = rat_abs(&(&half * &c / &c));
            if r > *d {
                *d = r;
            }
            j += 1u32;
        }
    };
    if len <= BigUint::from(NORM_SCAN) {
        scan(start.clone(), NORM_SCAN, &mut distance);
    } else {
        // each ratio is (ε c_j / 2) / c_j = ε/2 identically; sample both ends
        scan(start.clone(), 1000, &mut distance);
        scan(&end - 999u32, 1000, &mut distance);
    }
    Ok(Perturbation {
        phi: phi.to_vec(),
        epsilon: eps.clone(),
        window_start: start.to_string(),
        window_end: end.to_string(),
        window_sum,
        distance,
        weight: space.name().into(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StrongerVerdict {
    pub retained: bool,
    pub same_block: bool,
    pub support_end: u64,
    pub witness: BlockWitness,
}

/// Re-verifies a block witness for `x + y` with `y` finitely supported.
pub fn stronger_than_probe(
    combo: &DCombo,
    b: &BlockPartition,
    witness: &BlockWitness,
    y: &[Rat],
    prec: u32,
) -> Result<StrongerVerdict> {
    let support_end = y.iter().rposition(|v| !v.is_zero()).map_or(0, |i| i as u64 + 1);
    let k = witness.k();
    let start_lower = match &witness.start {
        Some(s) => s.parse::<BigUint>().unwrap(),
        None => &k + 1u32,
    };
    let m = &witness.target;
    if start_lower > BigUint::from(support_end) {
        let mut again = evaluate(combo, b, &k, prec)?;
        again.target = m.clone();
        return Ok(StrongerVerdict {
            retained: again.abs_lower >= *m,
            same_block: true,
            support_end,
            witness: again,
        });
    }
    let k_min = std::cmp::max(&k + 1u32, BigUint::from(support_end));
    let mut later = search_block(combo, b, m, &k_min, prec)?;
    later.target = m.clone();
    Ok(StrongerVerdict {
        retained: later.abs_lower >= *m,
        same_block: false,
        support_end,
        witness: later,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{int, rat};
    use crate::series_lab::build_blocks;

    #[test]
    fn d_is_exact_on_perfect_powers() {
        let b = build_blocks(&WeightedSpace::constant(), 5).unwrap();
        // block 4 of the constant weights is 10..=14
        let d = d_seq(&b, &rat(1, 2), &BigUint::from(12u32), 64).unwrap();
        assert_eq!(d.exact().unwrap(), &rat(1, 2));
        let d1 = d_seq(&b, &rat(1, 3), &BigUint::from(2u32), 64).unwrap();
        assert_eq!(d1.exact().unwrap(), &int(1));
    }

    #[test]
    fn constant_closed_form_matches_materialized() {
        let b = build_blocks(&WeightedSpace::constant(), 30).unwrap();
        for k in 1..=30u64 {
            let (lo, hi) = known_bounds(&b, &BigUint::from(k)).unwrap();
            assert_eq!(Some((lo, hi)), b.bounds(k));
        }
    }

    #[test]
    fn zero_target_is_block_one() {
        let b = build_blocks(&WeightedSpace::constant(), 1).unwrap();
        let w = block_divergence_witness(&DCombo::single(rat(1, 2)).unwrap(), &b, &Rat::zero(), 64).unwrap();
        assert_eq!(w.k, "1");
    }
}
