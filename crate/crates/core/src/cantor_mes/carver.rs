use std::collections::BTreeMap;
use std::ops::Bound;
use super::enumerate::{enumerate_interval, RationalInterval};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::numkernel::{floor_log2, Rat};

/// Middle-thirds Cantor set on the closed base `[u, v]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorSet {
    index: u64,
    u: Rat,
    v: Rat,
    /// Whether the base avoids every earlier base (not only earlier sets).
    base_disjoint: bool,
}

impl CantorSet {
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn base(&self) -> (&Rat, &Rat) {
        (&self.u, &self.v)
    }

    pub fn base_length(&self) -> Rat {
        &self.v - &self.u
    }

    pub fn base_disjoint(&self) -> bool {
        self.base_disjoint
    }

    /// Generation-`g` cover as closed intervals (`2^g` of them).
    pub fn cover(&self, g: u32) -> Vec<(Rat, Rat)> {
        let len = self.base_length();
        let scale = &len / Rat::from_integer(num_traits::pow::pow(3u64.into(), g as usize));
        standard_cover(g)
            .into_iter()
            .map(|k| {
                let a = &self.u + &scale * Rat::from_integer(k.into());
                let b = &a + &scale;
                (a, b)
            })
            .collect()
    }

    /// Total length of the generation-`g` cover, summed interval by interval.
    pub fn cover_length(&self, g: u32) -> Rat {
        let cells = standard_cover(g);
        // cells are disjoint unit intervals in units of 3^-g
        debug_assert!(cells.windows(2).all(|w| w[0] + 1 < w[1] || g == 0));
        let units = Rat::from_integer((cells.len() as u64).into());
        self.base_length() * units / Rat::from_integer(num_traits::pow::pow(3u64.into(), g as usize))
    }

    /// The open middle third removed from `[s0, s1]`.
    fn gap_of(s0: &Rat, s1: &Rat) -> (Rat, Rat) {
        let third = (s1 - s0) / Rat::from_integer(3.into());
        (s0 + &third, s1 - &third)
    }

    /// Shrinks the open interval `(a, b) ⊆ [u, v]` to its intersection
    /// with a removed gap of this set.
    fn gap_in(&self, a: &Rat, b: &Rat) -> (Rat, Rat) {
        let (mut s0, mut s1) = (self.u.clone(), self.v.clone());
        loop {
            let (g0, g1) = Self::gap_of(&s0, &s1);
            if a < &g1 && b > &g0 {
                let lo = if a > &g0 { a.clone() } else { g0 };
                let hi = if b < &g1 { b.clone() } else { g1 };
                return (lo, hi);
            }
            if b <= &g0 {
                s1 = g0;
            } else {
                s0 = g1;
            }
        }
    }
}

/// Left coordinates (in units of `3^-g`) of the generation-`g` intervals
/// of the standard Cantor set on `[0, 1]`.
pub fn standard_cover(g: u32) -> Vec<u64> {
    let mut cells = vec![0u64];
    for _ in 0..g {
        cells = cells
            .iter()
            .flat_map(|&k| [3 * k, 3 * k + 2])
            .collect();
    }
    cells
}

/// Map key ordered by a float approximation, falling back to exact
/// comparison when the approximations are too close to decide.
#[derive(Clone, Debug)]
struct Key {
    approx: f64,
    exact: Rat,
}

impl Key {
    fn new(exact: Rat) -> Self {
        let approx = num_traits::ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN);
        Key { approx, exact }
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (x, y) = (self.approx, other.approx);
        let tol = 1e-12 * (x.abs() + y.abs());
        if x.is_finite() && y.is_finite() && (x - y).abs() > tol {
            x.partial_cmp(&y).expect("finite")
        } else {
            self.exact.cmp(&other.exact)
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Node {
    /// Child bases keyed by left endpoint; pairwise disjoint.
    children: BTreeMap<Key, usize>,
}

/// Carves the Cantor sets `C₁, C₂, …` in order, each inside its interval
/// and disjoint from all earlier sets.
///
/// Bases form a laminar family: a base is either disjoint from an earlier
/// base or sits inside one of its removed gaps.
#[derive(Clone, Debug)]
pub struct Carver {
    sets: Vec<CantorSet>,
    /// Node 0 is the virtual root; node `k` belongs to set `k`.
    nodes: Vec<Node>,
    interval_cache: Vec<(f64, f64)>,
}

impl Default for Carver {
    fn default() -> Self {
        Self::new()
    }
}

/// `k · 2^e` as a reduced rational.
fn scaled_pow2(k: BigInt, e: i64) -> Rat {
    if e >= 0 || k.is_zero() {
        return Rat::from_integer(k << e.max(0) as usize);
    }
    let tz = (k.trailing_zeros().unwrap_or(0) as i64).min(-e);
    Rat::new_raw(k >> tz as usize, BigInt::one() << (-e - tz) as usize)
}

/// Dyadic cell `[c, c + h]` holding the midpoint of `(lo, hi)`, with
/// `h` the largest power of two not above `(hi - lo) / 16`.
fn dyadic_cell(lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    let e = floor_log2(&(hi - lo)) - 4;
    let sum = lo + hi;
    // k = floor(sum / 2^(e+1))
    let s = e + 1;
    let k = if s >= 0 {
        sum.numer().div_floor(&(sum.denom() << s as usize))
    } else {
        (sum.numer() << (-s) as usize).div_floor(sum.denom())
    };
    let k1 = &k + 1;
    (scaled_pow2(k, e), scaled_pow2(k1, e))
}

/// `a + (b - a) t`, normalized once.
fn lerp(a: &Rat, b: &Rat, t: &Rat) -> Rat {
    let (p, q) = (a.numer(), a.denom());
    let (r, s) = (b.numer(), b.denom());
    let (u, w) = (t.numer(), t.denom());
    let ps = p * s;
    Rat::new(&ps * w + (r * q - &ps) * u, q * s * w)
}

/// Number of probe points tried before scanning `(a, b)` in full.
const PROBES: u64 = 24;

/// Base-2 radical inverse of `k`.
fn radical_inverse(mut k: u64) -> Rat {
    let (mut num, mut den) = (0u64, 1u64);
    while k > 0 {
        num = 2 * num + (k & 1);
        den *= 2;
        k >>= 1;
    }
    Rat::new(num.into(), den.into())
}

fn clamp_lo(x: Rat, a: &Rat) -> Rat {
    if &x > a {
        x
    } else {
        a.clone()
    }
}

fn clamp_hi(x: Rat, b: &Rat) -> Rat {
    if &x < b {
        x
    } else {
        b.clone()
    }
}

struct Level<'a> {
    sets: &'a [CantorSet],
    children: &'a BTreeMap<Key, usize>,
}

impl Level<'_> {
    fn base(&self, k: usize) -> &CantorSet {
        &self.sets[k - 1]
    }

    /// Base containing `m`, if any.
    fn holder(&self, m: &Rat) -> Option<usize> {
        let (_, &k) = self.children.range(..=Key::new(m.clone())).next_back()?;
        (&self.base(k).v >= m).then_some(k)
    }

    /// Component of `(a, b)` minus the bases that contains the free point `m`.
    fn component_at(&self, a: &Rat, b: &Rat, m: &Rat) -> (Rat, Rat) {
        let lo = self
            .children
            .range(..=Key::new(m.clone()))
            .next_back()
            .map_or(a.clone(), |(_, &k)| clamp_lo(self.base(k).v.clone(), a));
        let hi = self
            .children
            .range((Bound::Excluded(Key::new(m.clone())), Bound::Unbounded))
            .next()
            .map_or(b.clone(), |(_, &k)| clamp_hi(self.base(k).u.clone(), b));
        (lo, hi)
    }

    /// Longest component of `(a, b)` minus the bases (leftmost on ties).
    fn longest_free(&self, a: &Rat, b: &Rat) -> Option<(Rat, Rat)> {
        let start = self
            .children
            .range(..=Key::new(a.clone()))
            .next_back()
            .map_or(Key::new(a.clone()), |(u, _)| u.clone());
        let mut cursor = a.clone();
        let mut best: Option<(Rat, Rat)> = None;
        let mut consider = |lo: &Rat, hi: Rat| {
            if lo < &hi && best.as_ref().map_or(true, |(p, q)| &hi - lo > q - p) {
                best = Some((lo.clone(), hi));
            }
        };
        for (key, &k) in self.children.range(start..) {
            let u = &key.exact;
            if u >= b {
                break;
            }
            consider(&cursor, u.clone());
            let v = &self.base(k).v;
            if v > &cursor {
                cursor = v.clone();
            }
        }
        consider(&cursor, b.clone());
        best
    }
}

impl Carver {
    pub fn new() -> Self {
        Carver {
            sets: Vec::new(),
            nodes: vec![Node::default()],
            interval_cache: Vec::new(),
        }
    }

    pub fn horizon(&self) -> u64 {
        self.sets.len() as u64
    }

    pub fn sets(&self) -> &[CantorSet] {
        &self.sets
    }

    pub fn set(&self, n: u64) -> Option<&CantorSet> {
        if n == 0 {
            return None;
        }
        self.sets.get(n as usize - 1)
    }

    /// Carves sets until the horizon reaches `n`.
    pub fn extend_to(&mut self, n: u64) {
        while self.horizon() < n {
            self.carve_next();
        }
    }

    /// Carves the next set and returns it.
    pub fn carve_next(&mut self) -> &CantorSet {
        let n = self.horizon() + 1;
        let iv = enumerate_interval(n).expect("index is positive");
        let (mut a, mut b) = (iv.left().clone(), iv.right().clone());
        let mut parent = 0usize;
        let mut disjoint = true;
        let (u, v) = 'carve: loop {
            let level = Level {
                sets: &self.sets,
                children: &self.nodes[parent].children,
            };
            for j in 0..PROBES {
                let t = radical_inverse(n + j);
                if t.is_zero() {
                    continue;
                }
                let m = lerp(&a, &b, &t);
                if level.holder(&m).is_none() {
                    let (lo, hi) = level.component_at(&a, &b, &m);
                    break 'carve dyadic_cell(&lo, &hi);
                }
            }
            if let Some((lo, hi)) = level.longest_free(&a, &b) {
                break 'carve dyadic_cell(&lo, &hi);
            }
            let mid = (&a + &b) / Rat::from_integer(2.into());
            let k = level.holder(&mid).expect("covered interval lies in one base");
            let host = &self.sets[k - 1];
            let lo = clamp_lo(host.u.clone(), &a);
            let hi = clamp_hi(host.v.clone(), &b);
            let (lo, hi) = host.gap_in(&lo, &hi);
            a = lo;
            b = hi;
            parent = k;
            disjoint = false;
        };
        self.nodes[parent].children.insert(Key::new(u.clone()), n as usize);
        self.nodes.push(Node::default());
        let f = |q: &Rat| num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
        self.interval_cache.push((f(iv.left()), f(iv.right())));
        self.sets.push(CantorSet {
            index: n,
            u,
            v,
            base_disjoint: disjoint,
        });
        self.sets.last().expect("just pushed")
    }

    /// Smallest carved index whose interval lies inside `iv`.
    pub(crate) fn first_carved_inside(&self, iv: &RationalInterval, from: u64) -> Option<u64> {
        let f = |q: &Rat| num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
        let (lo, hi) = (f(iv.left()), f(iv.right()));
        let slack = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
        for k in from.max(1)..=self.horizon() {
            let (p, q) = self.interval_cache[k as usize - 1];
            if p + slack < lo || q - slack > hi {
                continue;
            }
            let cand = enumerate_interval(k).expect("k ≥ 1");
            if cand.is_subset_of(iv) {
                return Some(k);
            }
        }
        None
    }

    /// The carved set whose Cantor set contains `x`, with the standard
    /// coordinate `(x − u)/(v − u)`.
    pub(crate) fn locate(&self, x: &Rat) -> Option<(&CantorSet, super::CantorAddress)> {
        let mut node = 0usize;
        loop {
            let children = &self.nodes[node].children;
            let (_, &k) = children.range(..=Key::new(x.clone())).next_back()?;
            let s = &self.sets[k - 1];
            if x > &s.v {
                return None;
            }
            let t = (x - &s.u) / s.base_length();
            if let Some(a) = super::CantorAddress::from_ternary_value(s.index, &t) {
                return Some((s, a));
            }
            node = k;
        }
    }
}

/// Convenience: `true` when the closed intervals are disjoint.
pub fn closed_disjoint(a: (&Rat, &Rat), b: (&Rat, &Rat)) -> bool {
    a.1 < b.0 || b.1 < a.0
}
