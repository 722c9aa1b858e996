//! Weighted spaces `c₀((cₙ))` and minimal block partitions of `Σ cₙ`.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::{enclose_exp, log_rat, rat_abs, rat_to_string, Enclosure, Rat};
use crate::pompeiu::rat_bounds;

/// Harmonic sums up to this index are exact.
const DIRECT: u64 = 4096;
const MAX_REFINE: u32 = 6;

fn h_prefix() -> &'static [Rat] {
    static TABLE: OnceLock<Vec<Rat>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(DIRECT as usize + 1);
        let mut acc = Rat::zero();
        v.push(acc.clone());
        for j in 1..=DIRECT {
            acc += Rat::new(BigInt::one(), BigInt::from(j));
            v.push(acc.clone());
        }
        v
    })
}

fn big_rat(n: &BigUint) -> Rat {
    Rat::from_integer(BigInt::from(n.clone()))
}

fn small(n: &BigUint) -> Option<u64> {
    n.to_u64()
}

/// `cₙ`: harmonic `1/n`, constant `1`, or a positive table repeated
/// cyclically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightKind {
    Harmonic,
    Constant,
    Table(Vec<Rat>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSpace {
    kind: WeightKind,
}

/// A block sum, exact where the weights allow it.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SumValue {
    Exact {
        #[serde(with = "crate::numkernel::serde_rat")]
        value: Rat,
    },
    Enclosed { value: Enclosure },
}

impl SumValue {
    /// `Some(true)` if certainly `> t`, `Some(false)` if certainly `≤ t`.
    pub fn exceeds(&self, t: &Rat) -> Option<bool> {
        match self {
            SumValue::Exact { value } => Some(value > t),
            SumValue::Enclosed { value } => {
                if value.lower_rat() > *t {
                    Some(true)
                } else if value.upper_rat() <= *t {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    pub fn enclosure(&self, prec: u32) -> Enclosure {
        match self {
            SumValue::Exact { value } => Enclosure::from_rat(value, prec),
            SumValue::Enclosed { value } => value.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            SumValue::Exact { value } => Some(value),
            SumValue::Enclosed { .. } => None,
        }
    }

    fn sub_rat(&self, q: &Rat) -> SumValue {
        match self {
            SumValue::Exact { value } => SumValue::Exact { value: value - q },
            SumValue::Enclosed { value } => SumValue::Enclosed {
                value: value.add_rat(&-q),
            },
        }
    }
}

/// `H_n − H_c` for `1 ≤ c < n` from the Euler–Maclaurin expansion
/// `H_m = ln m + γ + 1/(2m) − 1/(12m²) + 1/(120m⁴) − θ/(252m⁶)`, `θ ∈ (0,1)`.
fn harmonic_tail(c: &BigUint, n: &BigUint, prec: u32) -> Result<Enclosure> {
    let cr = big_rat(c);
    let nr = big_rat(n);
    let h = |m: &Rat| -> Rat {
        let r = m.recip();
        let r2 = &r * &r;
        let r4 = &r2 * &r2;
        &r / Rat::from_integer(2.into()) - &r2 / Rat::from_integer(12.into())
            + r4 / Rat::from_integer(120.into())
    };
    let poly = h(&nr) - h(&cr);
    let six = |m: &Rat| num_traits::pow(m.recip(), 6) / Rat::from_integer(252.into());
    let err = rat_bounds(&-six(&nr), &six(&cr), prec);
    let ln = log_rat(&(&nr / &cr), prec)?;
    Ok(ln.add(&err).add_rat(&poly))
}

impl WeightedSpace {
    pub fn harmonic() -> Self {
        WeightedSpace { kind: WeightKind::Harmonic }
    }

    pub fn constant() -> Self {
        WeightedSpace { kind: WeightKind::Constant }
    }

    pub fn table(values: Vec<Rat>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("weight table is empty"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_positive()) {
            return Err(Error::invalid(format!("weights must be positive, got {}", rat_to_string(v))));
        }
        Ok(WeightedSpace { kind: WeightKind::Table(values) })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            WeightKind::Harmonic => "harmonic",
            WeightKind::Constant => "constant",
            WeightKind::Table(_) => "table",
        }
    }

    /// `c_j` for `j ≥ 1`.
    pub fn weight(&self, j: &BigUint) -> Rat {
        assert!(!j.is_zero(), "weights are indexed from 1");
        match &self.kind {
            WeightKind::Harmonic => big_rat(j).recip(),
            WeightKind::Constant => Rat::one(),
            WeightKind::Table(t) => {
                let i = ((j - 1u32) % BigUint::from(t.len())).to_usize().expect("below table length");
                t[i].clone()
            }
        }
    }

    /// `‖x‖ = sup |x_j / c_j|` for `x = (x₁, x₂, …)` finitely supported.
    pub fn norm(&self, x: &[Rat]) -> Rat {
        x.iter()
            .enumerate()
            .map(|(i, v)| rat_abs(&(v / self.weight(&BigUint::from(i + 1)))))
            .fold(Rat::zero(), |a, b| if b > a { b } else { a })
    }

    /// `c_{a+1} + ⋯ + c_n` (zero when `n ≤ a`).
    pub fn block_sum(&self, a: &BigUint, n: &BigUint, prec: u32) -> Result<SumValue> {
        if n <= a {
            return Ok(SumValue::Exact { value: Rat::zero() });
        }
        match &self.kind {
            WeightKind::Constant => Ok(SumValue::Exact { value: big_rat(&(n - a)) }),
            WeightKind::Table(t) => {
                let p = BigUint::from(t.len());
                let prefix = |m: &BigUint| -> Rat {
                    let full = m / &p;
                    let rem = (m % &p).to_usize().expect("below table length");
                    let period: Rat = t.iter().sum();
                    big_rat(&full) * period + t[..rem].iter().sum::<Rat>()
                };
                Ok(SumValue::Exact { value: prefix(n) - prefix(a) })
            }
            WeightKind::Harmonic => {
                let h = h_prefix();
                if let Some(nn) = small(n).filter(|&v| v <= DIRECT) {
                    let aa = small(a).expect("a < n") as usize;
                    return Ok(SumValue::Exact { value: &h[nn as usize] - &h[aa] });
                }
                let direct = BigUint::from(DIRECT);
                let (head, c) = match small(a).filter(|&v| v < DIRECT) {
                    Some(aa) => (&h[DIRECT as usize] - &h[aa as usize], direct),
                    None => (Rat::zero(), a.clone()),
                };
                let w = prec.max(n.bits() as u32 + 64);
                Ok(SumValue::Enclosed {
                    value: harmonic_tail(&c, n, w)?.add_rat(&head),
                })
            }
        }
    }

    /// The least `n > a` with `c_{a+1} + ⋯ + c_n > target`.
    pub fn least_exceeding(&self, a: &BigUint, target: &Rat) -> Result<BigUint> {
        if target.is_negative() {
            return Ok(a + 1u32);
        }
        match &self.kind {
            WeightKind::Constant => {
                Ok(a + BigUint::try_from(target.floor().to_integer()).expect("nonnegative") + 1u32)
            }
            WeightKind::Table(t) => {
                let p = t.len();
                let period: Rat = t.iter().sum();
                let full = (target / &period).floor().to_integer();
                let skip = if full > BigInt::one() { full - 1 } else { BigInt::zero() };
                let skip = BigUint::try_from(skip).expect("nonnegative");
                let mut n = a + &skip * p;
                let mut acc = big_rat(&skip) * &period;
                loop {
                    n += 1u32;
                    acc += self.weight(&n);
                    if acc > *target {
                        return Ok(n);
                    }
                }
            }
            WeightKind::Harmonic => self.harmonic_least(a, target),
        }
    }

    fn harmonic_least(&self, a: &BigUint, target: &Rat) -> Result<BigUint> {
        let h = h_prefix();
        let direct = BigUint::from(DIRECT);
        let (c, rest) = match small(a).filter(|&v| v < DIRECT) {
            Some(aa) => {
                let base = &h[aa as usize];
                let goal = base + target;
                // prefix sums are increasing
                let idx = h.partition_point(|v| *v <= goal);
                if idx <= DIRECT as usize {
                    return Ok(BigUint::from(idx));
                }
                (direct, target - (&h[DIRECT as usize] - base))
            }
            None => (a.clone(), target.clone()),
        };
        // H_n − H_c > rest with n > c ≥ DIRECT
        let cr = big_rat(&c);
        let r = cr.recip();
        let shift = &r / Rat::from_integer(2.into()) - (&r * &r) / Rat::from_integer(12.into())
            + num_traits::pow(r.clone(), 4) / Rat::from_integer(120.into());
        let est_bits = c.bits() + (rest.to_f64().unwrap_or(f64::MAX) * std::f64::consts::LOG2_E).ceil() as u64;
        let mut extra = 64u32;
        for _ in 0..MAX_REFINE {
            let w = est_bits as u32 + extra;
            let arg = Enclosure::from_rat(&(&rest + &shift), w);
            let x = enclose_exp(&arg, w)?.mul_rat(&cr).add_rat(&Rat::new((-1).into(), 2.into()));
            let guess = x.mid().floor() + 1;
            let mut m = BigUint::try_from(guess).unwrap_or_else(|_| &c + 1u32);
            if m <= c {
                m = &c + 1u32;
            }
            let mut s = self.block_sum(&c, &m, w)?;
            let mut resolved = true;
            for _ in 0..256 {
                match s.exceeds(&rest) {
                    Some(true) => {
                        if m == &c + 1u32 {
                            return Ok(m);
                        }
                        let prev = s.sub_rat(&big_rat(&m).recip());
                        match prev.exceeds(&rest) {
                            Some(true) => {
                                m -= 1u32;
                                s = prev;
                            }
                            Some(false) => return Ok(m),
                            None => {
                                resolved = false;
                                break;
                            }
                        }
                    }
                    Some(false) => {
                        m += 1u32;
                        s = match s {
                            SumValue::Exact { value } => SumValue::Exact {
                                value: value + big_rat(&m).recip(),
                            },
                            SumValue::Enclosed { value } => SumValue::Enclosed {
                                value: value.add_rat(&big_rat(&m).recip()),
                            },
                        };
                    }
                    None => {
                        resolved = false;
                        break;
                    }
                }
            }
            if resolved {
                return Err(Error::precision("harmonic cut search did not settle near the estimate"));
            }
            extra *= 2;
        }
        Err(Error::precision(format!(
            "harmonic block sum from {} could not be separated from {}",
            a,
            rat_to_string(target)
        )))
    }
}

/// Cuts `1 = n₀ < n₁ < ⋯ < n_K` with `c_{n_{k−1}+1} + ⋯ + c_{n_k} > k`,
/// each `n_k` least. Extending takes `&mut self`; clones are snapshots.
#[derive(Debug, Clone)]
pub struct BlockPartition {
    space: WeightedSpace,
    cuts: Vec<BigUint>,
}

/// Evidence that one block satisfies the invariant and is minimal.
#[derive(Debug, Clone, Serialize)]
pub struct BlockCheck {
    pub k: u64,
    pub start: String,
    pub end: String,
    pub sum: SumValue,
    pub exceeds: bool,
    pub minimal: bool,
}

pub fn build_blocks(space: &WeightedSpace, k: u64) -> Result<BlockPartition> {
    let mut b = BlockPartition {
        space: space.clone(),
        cuts: vec![BigUint::one()],
    };
    b.extend(k)?;
    Ok(b)
}

/// `c_{a+1} + ⋯ + c_n` for the harmonic weights, exact or certified.
pub fn harmonic_block_sum(a: &BigUint, n: &BigUint, prec: u32) -> Result<SumValue> {
    WeightedSpace::harmonic().block_sum(a, n, prec)
}

impl BlockPartition {
    pub fn space(&self) -> &WeightedSpace {
        &self.space
    }

    /// Number of materialized blocks `K`.
    pub fn len(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cuts(&self) -> &[BigUint] {
        &self.cuts
    }

    /// Materializes blocks up to `k`.
    pub fn extend(&mut self, k: u64) -> Result<()> {
        while (self.len() as u64) < k {
            let next = self.len() as u64 + 1;
            let a = self.cuts.last().expect("n₀ present").clone();
            let n = self.space.least_exceeding(&a, &Rat::from_integer(next.into()))?;
            self.cuts.push(n);
        }
        Ok(())
    }

    /// `(n_{k−1}+1, n_k)` for a materialized block `k ≥ 1`.
    pub fn bounds(&self, k: u64) -> Option<(BigUint, BigUint)> {
        let k = usize::try_from(k).ok()?;
        if k == 0 || k > self.len() {
            return None;
        }
        Some((&self.cuts[k - 1] + 1u32, self.cuts[k].clone()))
    }

    /// Block containing `j`, or `None` for `j = 1` (before the first block).
    pub fn block_of(&self, j: &BigUint) -> Result<Option<u64>> {
        let last = self.cuts.last().expect("n₀ present");
        if j.is_zero() {
            return Err(Error::invalid("indices start at 1"));
        }
        if j > last {
            return Err(Error::ExtendFirst {
                index: j.to_u64().unwrap_or(u64::MAX),
                materialized: self.len(),
            });
        }
        if j.is_one() {
            return Ok(None);
        }
        Ok(Some(self.cuts.partition_point(|c| c < j) as u64))
    }

    pub fn block_sum(&self, k: u64, prec: u32) -> Result<SumValue> {
        let (lo, hi) = self.bounds(k).ok_or(Error::ExtendFirst {
            index: k,
            materialized: self.len(),
        })?;
        self.space.block_sum(&(lo - 1u32), &hi, prec)
    }

    /// Checks `block sum > k` and that `n_k − 1` would not suffice.
    pub fn check_block(&self, k: u64, prec: u32) -> Result<BlockCheck> {
        let (lo, hi) = self.bounds(k).ok_or(Error::ExtendFirst {
            index: k,
            materialized: self.len(),
        })?;
        let target = Rat::from_integer(k.into());
        let mut w = prec;
        for _ in 0..MAX_REFINE {
            let s = self.space.block_sum(&(&lo - 1u32), &hi, w)?;
            let shorter = s.sub_rat(&self.space.weight(&hi));
            if let (Some(ex), Some(short)) = (s.exceeds(&target), shorter.exceeds(&target)) {
                return Ok(BlockCheck {
                    k,
                    start: lo.to_string(),
                    end: hi.to_string(),
                    sum: s,
                    exceeds: ex,
                    minimal: !short,
                });
            }
            w *= 2;
        }
        Err(Error::precision(format!("block {k} undecided")))
    }

    /// Checks every materialized block.
    pub fn verify(&self, prec: u32) -> Result<Vec<BlockCheck>> {
        (1..=self.len() as u64).map(|k| self.check_block(k, prec)).collect()
    }
}
