//! Acceptance criteria 1–10 as self-checking runs.
//!
//! Every randomized draw comes from a ChaCha stream seeded by
//! `(seed, criterion)`, so a run is a pure function of its `Config`.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{CheckRecord, Report};
use crate::cantor_mes::{
    closed_disjoint, Lineable, MesFunction, RationalInterval, DEFAULT_SCAN_BUDGET,
};
use crate::error::{Error, Result};
use crate::expalg::{ExpSum, PolynomialNC};
use crate::measure_lab::{
    in_measure_report, independence_check_td, nonconvergence_witness, rho, translate_dilate,
    typewriter, StepFunction, TDCombo,
};
use crate::numkernel::{compare, int, pow2, rat, rat_abs, rat_powi, rat_to_string, Ordering3, Rat};
use crate::pompeiu::{DerivativeCertificate, PompeiuBuilder, PompeiuPoint};
use crate::sepcont::{
    diagonal_blowup_witness, dominance_verdict, eval_sep, expand_poly, Dominance, SepFunction,
};
use crate::series_lab::{
    block_divergence_witness, build_blocks, comparison_bound_holds, density_perturbation,
    partial_sums, ratio_certificate, BlockPartition, DCombo, LinearCombo, SeqFamily, Series,
    WeightedSpace,
};

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub seed: u64,
    /// Overrides the working precision of criteria 4 and 6.
    pub precision: Option<u32>,
    /// Overrides the enumeration scan budget of criterion 4.
    pub budget: Option<u64>,
    /// Overrides every random sample count.
    pub count: Option<usize>,
    pub timings: bool,
}

impl Config {
    fn rng(&self, criterion: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ criterion)
    }

    fn count(&self, default: usize) -> usize {
        self.count.unwrap_or(default)
    }

    pub fn parameters(&self) -> Value {
        json!({
            "seed": self.seed,
            "precision": self.precision,
            "budget": self.budget,
            "count": self.count,
        })
    }
}

type Outcome = Result<(bool, Value)>;

macro_rules! require {
    ($cond:expr, $($w:tt)+) => {
        if !$cond {
            return Ok((false, json!($($w)+)));
        }
    };
}

pub const NAMES: [&str; 10] = [
    "c01_geometric_skewed",
    "c02_ratio_test_failure",
    "c03_comparison_bound",
    "c04_everywhere_surjective",
    "c05_cantor_soundness",
    "c06_pompeiu",
    "c07_separate_continuity",
    "c08_blocks_and_divergence",
    "c09_typewriter",
    "c10_rho_metric",
];

/// Runs criterion `i ∈ 1..=10`.
pub fn run(i: usize, cfg: &Config) -> CheckRecord {
    let start = Instant::now();
    let out = match i {
        1 => c01(cfg),
        2 => c02(cfg),
        3 => c03(cfg),
        4 => c04(cfg),
        5 => c05(cfg),
        6 => c06(cfg),
        7 => c07(cfg),
        8 => c08(cfg),
        9 => c09(cfg),
        10 => c10(cfg),
        _ => Err(Error::invalid(format!("no criterion {i}"))),
    };
    let name = NAMES.get(i.wrapping_sub(1)).copied().unwrap_or("unknown");
    let mut rec = CheckRecord::from_result(name, out);
    if cfg.timings {
        rec.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    rec
}

pub fn verify_all(cfg: &Config) -> Report {
    let checks = (1..=NAMES.len()).map(|i| run(i, cfg)).collect();
    Report::new("verify-all", cfg.parameters(), checks)
}

fn s(q: &Rat) -> String {
    rat_to_string(q)
}

fn nonzero(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    loop {
        let q = rat(rng.gen_range(-num..=num), rng.gen_range(1..=den));
        if !q.is_zero() {
            return q;
        }
    }
}

fn c01(_: &Config) -> Outcome {
    let x = SeqFamily::GeometricSkewed;
    let sum = partial_sums(&x, 60);
    let err = rat_abs(&(&sum - Rat::one()));
    require!(err <= pow2(-58), { "partial_sum_60": s(&sum) });
    for n in 1..=1000u64 {
        let r = x.term(n + 1) / x.term(n);
        let want = if n % 2 == 1 { int(2) } else { rat(1, 8) };
        require!(r == want, { "n": n, "ratio": s(&r) });
    }
    Ok((true, json!({ "partial_sum_60_error": s(&err), "ratios_checked": 1000 })))
}

fn random_s(rng: &mut ChaCha8Rng) -> Rat {
    // s = p/q ∈ (1, 10], q ≤ 10
    let q = rng.gen_range(1..=10i64);
    rat(rng.gen_range(q + 1..=10 * q), q)
}

fn c02(cfg: &Config) -> Outcome {
    let mut rng = cfg.rng(2);
    let m = int(1_000_000);
    let total = cfg.count(50);
    let mut passed = 0usize;
    let mut failures = Vec::new();
    for _ in 0..total {
        let k = rng.gen_range(1..=4usize);
        let mut ss: Vec<Rat> = Vec::new();
        while ss.len() < k {
            let v = random_s(&mut rng);
            if !ss.contains(&v) {
                ss.push(v);
            }
        }
        let parts = ss
            .into_iter()
            .map(|v| (nonzero(&mut rng, 10, 1), SeqFamily::RatioFailConv(v)))
            .collect();
        let combo = LinearCombo::new(parts)?;
        match ratio_certificate(&combo, &m, 10_000) {
            Ok(_) => passed += 1,
            Err(e @ Error::BudgetExceeded { .. }) => {
                if failures.len() < 3 {
                    failures.push(json!({ "combo": combo.to_string(), "reason": e.to_string() }));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok((
        passed == total,
        json!({ "combos": total, "certified": passed, "first_failures": failures }),
    ))
}

fn c03(cfg: &Config) -> Outcome {
    let mut rng = cfg.rng(3);
    let mut params = Vec::new();
    for _ in 0..cfg.count(10) {
        let v = random_s(&mut rng);
        for n in 3..=10_000u64 {
            require!(comparison_bound_holds(&v, n)?, { "s": s(&v), "n": n });
        }
        params.push(s(&v));
    }
    Ok((true, json!({ "s": params, "n_range": [3, 10_000] })))
}

fn c04(cfg: &Config) -> Outcome {
    let prec = cfg.precision.unwrap_or(128);
    let budget = cfg.budget.unwrap_or(DEFAULT_SCAN_BUDGET);
    let tol = pow2(-40);
    let mut rng = cfg.rng(4);
    let mut f = MesFunction::new(0);
    let phi1 = ExpSum::phi(&int(1))?;
    let combo = ExpSum::phi_combo(&[(int(2), int(1)), (int(-1), int(2))])?;
    let total = cfg.count(100);
    let mut max_set = 0u64;
    for i in 0..total {
        // endpoints on the 1/4 grid inside [−39/4, 39/4], width ≥ 1
        let a = rng.gen_range(-39..=35i64);
        let w = rng.gen_range(4..=(39 - a).min(20));
        let iv = RationalInterval::new(rat(a, 4), rat(a + w, 4))?;
        let d = rng.gen_range(1..=16i64);
        let y = rat(rng.gen_range(-1000 * d..=1000 * d), d);
        let wit = f.surjectivity_witness(&iv, &y, prec, budget)?;
        require!(iv.contains_point(&wit.point) && wit.within(-40), {
            "interval": iv.to_string(), "target": s(&y), "point": s(&wit.point)
        });
        max_set = max_set.max(wit.set_index);
        let g = if i % 2 == 0 { &phi1 } else { &combo };
        let lw = Lineable::new(g.clone()).witness(&mut f, &iv, &y, prec, budget)?;
        let err = rat_abs(&(lw.composed.mid_rat() - &y)) + lw.composed.rad_rat();
        require!(iv.contains_point(&lw.inner.point) && err <= tol, {
            "interval": iv.to_string(), "target": s(&y), "g": g.to_string(), "point": s(&lw.inner.point)
        });
    }
    Ok((
        true,
        json!({ "pairs": total, "compositions": total, "largest_set_index": max_set, "precision": prec }),
    ))
}

fn c05(_: &Config) -> Outcome {
    let f = MesFunction::new(200);
    let sets = f.carver().sets();
    require!(sets.len() >= 200, { "carved": sets.len() });
    for (i, a) in sets[..200].iter().enumerate() {
        for b in &sets[..i] {
            require!(closed_disjoint(a.base(), b.base()), { "sets": [b.index(), a.index()] });
        }
    }
    let two_thirds = rat(2, 3);
    for c in &sets[..200] {
        for g in 0..=20u32 {
            let expect = c.base_length() * rat_powi(&two_thirds, g as i64);
            require!(c.cover_length(g) == expect, { "set": c.index(), "generation": g });
            if g <= 8 {
                let sum: Rat = c.cover(g).iter().map(|(u, v)| v - u).sum();
                require!(sum == expect, { "set": c.index(), "generation": g, "summed": true });
            }
        }
    }
    Ok((true, json!({ "sets": 200, "pairs_checked": 200 * 199 / 2, "generations": 20 })))
}

/// Fixed nonconstancy suite: `(a, b)` as `(num, den)` pairs.
const NONCONSTANCY_SUITE: [((i64, i64), (i64, i64)); 20] = [
    ((0, 1), (1, 1)),
    ((-10, 1), (-9, 1)),
    ((1, 2), (51, 100)),
    ((-1, 1000), (1, 1000)),
    ((7, 1), (15, 2)),
    ((-5, 1), (-4, 1)),
    ((-3, 1), (-2, 1)),
    ((-1, 1), (0, 1)),
    ((1, 1), (2, 1)),
    ((2, 1), (3, 1)),
    ((3, 1), (4, 1)),
    ((5, 1), (6, 1)),
    ((8, 1), (9, 1)),
    ((9, 1), (10, 1)),
    ((-1, 2), (1, 2)),
    ((1, 3), (2, 3)),
    ((-7, 1), (-13, 2)),
    ((4, 1), (41, 10)),
    ((-2, 7), (-1, 7)),
    ((6, 1), (385, 64)),
];

fn test_phis() -> Result<Vec<(&'static str, ExpSum)>> {
    Ok(vec![
        ("exp", ExpSum::monomial(int(1), int(1))),
        ("phi1", ExpSum::phi(&int(1))?),
        ("phi2-3phi1", ExpSum::phi_combo(&[(int(1), int(2)), (int(-3), int(1))])?),
    ])
}

fn c06(cfg: &Config) -> Outcome {
    let prec = cfg.precision.unwrap_or(256);
    let p = PompeiuBuilder::default();
    for n in 1..=100u64 {
        let c = p.derivative_certificate(&PompeiuPoint::dense_zero(n), prec);
        require!(matches!(c, DerivativeCertificate::ExactZero), { "dense_zero": n });
    }

    let mut rng = cfg.rng(6);
    let pairs = cfg.count(200);
    let edge = rat(9999, 1000);
    let mut max_prec = 0;
    for _ in 0..pairs {
        let (mut x, mut y) = loop {
            let x = rat(rng.gen_range(-10_000..10_000), rng.gen_range(1..1000));
            let y = rat(rng.gen_range(-10_000..10_000), rng.gen_range(1..1000));
            let clamp = |v: Rat| v.max(-edge.clone()).min(edge.clone());
            let (x, y) = (clamp(x), clamp(y));
            if x != y {
                break (x, y);
            }
        };
        if x > y {
            std::mem::swap(&mut x, &mut y);
        }
        let mut w = 32;
        loop {
            match compare(&p.eval_f(&x, w)?, &p.eval_f(&y, w)?) {
                Ordering3::CertainlyLess => break,
                Ordering3::CertainlyGreater => {
                    return Ok((false, json!({ "reversed": [s(&x), s(&y)] })))
                }
                Ordering3::Overlap if w < prec => w = (w * 2).min(prec),
                Ordering3::Overlap => {
                    return Err(Error::precision(format!("f({}) vs f({})", s(&x), s(&y))))
                }
            }
        }
        max_prec = max_prec.max(w);
    }

    let phis = test_phis()?;
    for ((an, ad), (bn, bd)) in NONCONSTANCY_SUITE {
        let j = RationalInterval::new(rat(an, ad), rat(bn, bd))?;
        for (name, phi) in &phis {
            let w = p.nonconstancy_witness(&j, phi, prec, 4096)?;
            let inside = w.x0.lower_rat() > *j.left() && w.x0.upper_rat() < *j.right();
            require!(inside && w.ordering != Ordering3::Overlap, {
                "interval": j.to_string(), "phi": name
            });
        }
    }

    for n in 1..=10u64 {
        let c = p.dense_zero_point(n, prec)?.mid_rat();
        let mut fds = Vec::new();
        for k in [10i64, 14, 18] {
            let h = pow2(-k);
            let d = p.eval_f(&(&c + &h), prec)?.sub(&p.eval_f(&(&c - &h), prec)?);
            fds.push(d.mul_pow2(k - 1));
        }
        for w in fds.windows(2) {
            require!(w[1].upper_rat() <= w[0].lower_rat(), { "dense_zero": n });
        }
    }
    Ok((
        true,
        json!({
            "dense_zeros": 100,
            "monotone_pairs": pairs,
            "max_pair_precision": max_prec,
            "nonconstancy_witnesses": NONCONSTANCY_SUITE.len() * phis.len(),
            "fd_points": 10,
            "precision": prec,
        }),
    ))
}

const POWERS: [(i64, i64); 5] = [(1, 3), (1, 2), (1, 1), (3, 2), (2, 1)];

/// Nonzero polynomial without constant term over ≤ 3 generators `φ_c`.
fn random_poly(rng: &mut ChaCha8Rng) -> Result<(PolynomialNC, Vec<Rat>)> {
    let arity = rng.gen_range(1..=3usize);
    let mut cs: Vec<Rat> = Vec::new();
    while cs.len() < arity {
        let (a, b) = POWERS[rng.gen_range(0..POWERS.len())];
        let c = rat(a, b);
        if !cs.contains(&c) {
            cs.push(c);
        }
    }
    loop {
        let k = rng.gen_range(1..=3);
        let terms: Vec<(Vec<u32>, Rat)> = (0..k)
            .map(|_| {
                let mut m: Vec<u32> = (0..arity).map(|_| rng.gen_range(0..=2)).collect();
                if m.iter().all(|&e| e == 0) {
                    m[rng.gen_range(0..arity)] = 1;
                }
                (m, nonzero(rng, 5, 5))
            })
            .collect();
        let p = PolynomialNC::new(arity, terms)?;
        if !p.is_zero() {
            return Ok((p, cs));
        }
    }
}

fn c07(cfg: &Config) -> Outcome {
    let mut rng = cfg.rng(7);
    let ids = cfg.count(100);
    for _ in 0..ids {
        let n = rng.gen_range(2..=5usize);
        let t = nonzero(&mut rng, 40, 20);
        let f = SepFunction::new(n)?;
        let v = eval_sep(&f, &vec![t.clone(); n])?;
        let expect = (int(n as i64) * rat_powi(&t, n as i64)).recip();
        require!(v == expect, { "n": n, "t": s(&t) });
    }
    let polys = cfg.count(50);
    let threshold = int(1_000_000);
    let mut deepest = 0;
    for _ in 0..polys {
        let (p, cs) = random_poly(&mut rng)?;
        let form = expand_poly(&p, &cs)?;
        require!(dominance_verdict(&form) == Dominance::BlowsUp, { "form": form.to_string() });
        let f = SepFunction::new(rng.gen_range(2..=5))?;
        let w = diagonal_blowup_witness(&f, &form, &threshold, 96, 64)?;
        require!(w.value.abs().lower_rat() >= threshold, { "form": form.to_string() });
        deepest = deepest.max(w.j);
    }
    Ok((true, json!({ "identities": ids, "forms": polys, "deepest_j": deepest })))
}

/// `n₁` for `cₙ = 1/n`, by summing `1/2 + 1/3 + ⋯` until it passes 1.
fn first_harmonic_cut() -> u64 {
    let mut sum = Rat::zero();
    let mut j = 1u64;
    while sum <= Rat::one() {
        j += 1;
        sum += rat(1, j as i64);
    }
    j
}

const SHIFTS: [(i64, i64); 5] = [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4)];

fn c08(cfg: &Config) -> Outcome {
    let n1 = first_harmonic_cut();
    let harmonic = build_blocks(&WeightedSpace::harmonic(), 100)?;
    require!(n1 == 4 && harmonic.cuts()[1] == BigUint::from(4u32), { "n1": n1 });
    let constant = build_blocks(&WeightedSpace::constant(), 100)?;
    for b in [&harmonic, &constant] {
        for c in b.verify(64)? {
            require!(c.exceeds && c.minimal, { "weights": b.space().name(), "block": c.k });
        }
    }

    let mut rng = cfg.rng(8);
    let m = int(1000);
    let partitions: [&BlockPartition; 2] = [&constant, &harmonic];
    let combos = cfg.count(20);
    let mut largest = BigUint::zero();
    for i in 0..combos {
        let len = rng.gen_range(1..=3usize);
        let mut ts: Vec<Rat> = Vec::new();
        while ts.len() < len {
            let (a, b) = SHIFTS[rng.gen_range(0..SHIFTS.len())];
            let t = rat(a, b);
            if !ts.contains(&t) {
                ts.push(t);
            }
        }
        ts.sort();
        let combo = DCombo::new(ts.into_iter().map(|t| (nonzero(&mut rng, 8, 4), t)).collect())?;
        let b = partitions[i % 2];
        let w = block_divergence_witness(&combo, b, &m, 64)?;
        require!(w.abs_lower >= m, { "weights": b.space().name(), "k": w.k });
        largest = largest.max(w.k());
    }

    let half = rat(1, 2);
    let spaces = [WeightedSpace::constant(), WeightedSpace::harmonic()];
    let perturbations = cfg.count(20);
    for i in 0..perturbations {
        let phi: Vec<Rat> = (0..rng.gen_range(0..=4)).map(|_| nonzero(&mut rng, 20, 5)).collect();
        let eps = rat(rng.gen_range(1..=5), rng.gen_range(1..=5));
        let mm = rat(rng.gen_range(1..=5), rng.gen_range(1..=2));
        let n_min = rng.gen_range(0..20u64);
        let space = &spaces[i % 2];
        let p = density_perturbation(&phi, &eps, &mm, n_min, space, 64)?;
        let start: BigUint = p.window_start.parse().expect("decimal index");
        let end: BigUint = p.window_end.parse().expect("decimal index");
        let at_ends = [&start, &end]
            .iter()
            .all(|j| p.value(space, j) / space.weight(j) == &eps * &half);
        let keeps_phi = phi
            .iter()
            .enumerate()
            .all(|(k, v)| p.value(space, &BigUint::from(k + 1)) == *v);
        require!(
            p.distance == &eps * &half
                && at_ends
                && keeps_phi
                && start > BigUint::from(n_min)
                && p.window_sum.exceeds(&mm) == Some(true),
            { "weights": space.name(), "epsilon": s(&eps), "M": s(&mm), "distance": s(&p.distance) }
        );
    }
    Ok((
        true,
        json!({
            "n1": n1,
            "blocks_verified": { "harmonic": 100, "constant": 100 },
            "harmonic_n100_bits": harmonic.cuts()[100].bits(),
            "divergence_witnesses": combos,
            "largest_block": largest.to_string(),
            "perturbations": perturbations,
        }),
    ))
}

fn random_td(rng: &mut ChaCha8Rng) -> Result<TDCombo> {
    let len = rng.gen_range(1..=4usize);
    let mut shifts: Vec<Rat> = Vec::new();
    while shifts.len() < len {
        let t = rat(rng.gen_range(1..64), 128);
        if !shifts.contains(&t) {
            shifts.push(t);
        }
    }
    shifts.sort();
    TDCombo::new(shifts.into_iter().map(|t| (nonzero(rng, 10, 4), t)).collect())
}

fn c09(cfg: &Config) -> Outcome {
    let zero = StepFunction::zero();
    for n in 1..=1024u64 {
        let k = n.ilog2() as i64;
        require!(rho(&typewriter(n)?, &zero) == pow2(-k - 1), { "n": n });
    }
    let mut rng = cfg.rng(9);
    let half = rat(1, 2);
    let combos = cfg.count(20);
    for _ in 0..combos {
        let c = random_td(&mut rng)?;
        for r in in_measure_report(&c, 1024, std::slice::from_ref(&half))? {
            require!(r.measure <= r.bound, { "combo": c.to_string(), "n": r.n });
        }
    }
    let points = cfg.count(100);
    for _ in 0..points {
        let c = random_td(&mut rng)?;
        let (lo, hi) = c.window();
        let x0 = &lo + (&hi - &lo) * rat(rng.gen_range(1..=1000), 1000);
        let w = nonconvergence_witness(&c, &x0, 12)?;
        let cs = c.terms().last().expect("nonempty combo").0.clone();
        let direct = w.generations.iter().all(|g| {
            c.eval(g.n_hit, &x0).is_ok_and(|v| v == cs)
                && c.eval(g.n_miss, &x0).is_ok_and(|v| v.is_zero())
        });
        require!(w.gap == cs.abs() && direct, { "combo": c.to_string(), "x0": s(&x0) });
    }
    let lists = cfg.count(20);
    for _ in 0..lists {
        let c = random_td(&mut rng)?;
        let shifts: Vec<Rat> = c.terms().iter().map(|(_, t)| t.clone()).collect();
        let v = independence_check_td(&shifts)?;
        let rows: Vec<Vec<Rat>> = v
            .sample_points
            .iter()
            .map(|x| {
                shifts
                    .iter()
                    .map(|t| translate_dilate(1, t).and_then(|f| f.eval(x)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let det = crate::numkernel::linalg::determinant(&rows);
        require!(!v.determinant.is_zero() && det == v.determinant, { "combo": c.to_string() });
    }
    Ok((
        true,
        json!({ "rho_checked": 1024, "measure_combos": combos, "window_points": points, "independence": lists }),
    ))
}

fn random_step(rng: &mut ChaCha8Rng) -> Result<StepFunction> {
    let mut starts: Vec<i64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(1..32)).collect();
    starts.sort();
    starts.dedup();
    let mut cells = vec![(Rat::zero(), rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)))];
    for a in starts {
        cells.push((rat(a, 32), rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))));
    }
    StepFunction::from_cells(cells)
}

fn c10(cfg: &Config) -> Outcome {
    let mut rng = cfg.rng(10);
    let triples = cfg.count(200);
    let mut equal_pairs = 0;
    for _ in 0..triples {
        let f = random_step(&mut rng)?;
        let g = if rng.gen_bool(0.1) { f.clone() } else { random_step(&mut rng)? };
        let h = random_step(&mut rng)?;
        let (fg, gh, fh) = (rho(&f, &g), rho(&g, &h), rho(&f, &h));
        require!(fg == rho(&g, &f) && fh <= &fg + &gh, { "f": f.to_string(), "g": g.to_string(), "h": h.to_string() });
        require!(fg.is_zero() == (f == g) && rho(&f, &f).is_zero(), { "f": f.to_string(), "g": g.to_string() });
        require!(!fg.is_negative() && fg < Rat::one(), { "f": f.to_string(), "g": g.to_string() });
        if f == g {
            equal_pairs += 1;
        }
    }
    Ok((true, json!({ "triples": triples, "identical_pairs": equal_pairs })))
}
