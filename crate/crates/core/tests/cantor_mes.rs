use std::collections::HashSet;

use lineability::cantor_mes::{
    address_of_value, enumerate_interval, interval_index, phi_inverse, phi_map, reindexed_value,
    CantorAddress, Certainty, Lineable, MesFunction, RationalInterval, SequenceMember,
    DEFAULT_SCAN_BUDGET,
};
use lineability::expalg::ExpSum;
use lineability::numkernel::{pow2, rat, Rat};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PREC: u32 = 128;

fn iv(a: Rat, b: Rat) -> RationalInterval {
    RationalInterval::new(a, b).unwrap()
}

fn base_of(f: &MesFunction, k: u64) -> (Rat, Rat) {
    let s = f.set(k).unwrap();
    let (u, v) = s.base();
    (u.clone(), v.clone())
}

/// Membership of `x` in the generation-`g` cover of the Cantor set on `[u, v]`,
/// by explicit recursion on closed intervals.
fn in_cover(x: &Rat, u: &Rat, v: &Rat, g: u32) -> bool {
    if x < u || x > v {
        return false;
    }
    if g == 0 {
        return true;
    }
    let third = (v - u) / rat(3, 1);
    let l1 = u + &third;
    let r0 = v - &third;
    in_cover(x, u, &l1, g - 1) || in_cover(x, &r0, v, g - 1)
}

#[test]
fn enumeration_is_injective_on_first_thousand() {
    let mut seen = HashSet::new();
    for n in 1..=1000 {
        let i = enumerate_interval(n).unwrap();
        assert!(seen.insert((i.left().clone(), i.right().clone())), "repeat at {n}");
    }
}

#[test]
fn enumerated_intervals_are_ordered() {
    for n in 1..=10_000 {
        let i = enumerate_interval(n).unwrap();
        assert!(i.left() < i.right());
    }
    assert!(enumerate_interval(0).is_err());
}

#[test]
fn unit_interval_golden_index() {
    let target = iv(rat(0, 1), rat(1, 1));
    let found = (1..=1_000_000u64)
        .find(|&n| enumerate_interval(n).unwrap() == target)
        .unwrap();
    assert_eq!(found, 1);
    assert_eq!(interval_index(&target), Some(1));
}

#[test]
fn index_round_trip() {
    for n in 1..=3000 {
        assert_eq!(interval_index(&enumerate_interval(n).unwrap()), Some(n));
    }
}

#[test]
fn bases_sit_inside_their_intervals_and_are_short() {
    let f = MesFunction::new(200);
    let mut total = Rat::zero();
    for k in 1..=200 {
        let i = enumerate_interval(k).unwrap();
        let (u, v) = base_of(&f, k);
        assert!(i.left() < &u && &v < i.right(), "base {k} escapes its interval");
        assert!((&v - &u) * rat(3, 1) <= i.length());
        total += &v - &u;
    }
    assert!(total.is_positive());
}

#[test]
fn bases_pairwise_disjoint_up_to_200() {
    let f = MesFunction::new(200);
    let bases: Vec<(Rat, Rat)> = (1..=200).map(|k| base_of(&f, k)).collect();
    for (i, (a0, a1)) in bases.iter().enumerate() {
        for (b0, b1) in &bases[..i] {
            assert!(a1 < b0 || b1 < a0, "bases {} overlaps an earlier base", i + 1);
        }
    }
}

#[test]
fn deterministic_carving() {
    let f = MesFunction::new(500);
    let g = MesFunction::new(500);
    for k in 1..=500 {
        assert_eq!(base_of(&f, k), base_of(&g, k));
    }
}

#[test]
fn cover_length_identity() {
    let f = MesFunction::new(200);
    for k in 1..=200 {
        let s = f.set(k).unwrap();
        for g in 0..=20u32 {
            let expect = s.base_length() * num_traits::pow(rat(2, 3), g as usize);
            assert_eq!(s.cover_length(g), expect, "set {k}, generation {g}");
        }
    }
    // summed interval by interval on a few sets
    for k in [1u64, 17, 200] {
        let s = f.set(k).unwrap();
        for g in 0..=10u32 {
            let sum: Rat = s.cover(g).iter().map(|(a, b)| b - a).sum();
            assert_eq!(sum, s.base_length() * num_traits::pow(rat(2, 3), g as usize));
        }
    }
}

#[test]
fn address_points() {
    let f = MesFunction::new(1);
    let (u, v) = base_of(&f, 1);
    let zeros = CantorAddress::parse(1, "(0)").unwrap();
    let ones = CantorAddress::parse(1, "(1)").unwrap();
    let alt = CantorAddress::parse(1, "(10)").unwrap();
    assert_eq!(f.address_point(&zeros).unwrap(), u);
    assert_eq!(f.address_point(&ones).unwrap(), v);
    // 2/3 + 2/27 + … = (2/3) / (1 − 1/9)
    let series = rat(2, 3) / (Rat::one() - rat(1, 9));
    assert_eq!(series, rat(3, 4));
    assert_eq!(f.address_point(&alt).unwrap(), &u + (&v - &u) * series);
    let enc = f.address_to_point(&alt, 64).unwrap();
    assert!(enc.contains_rat(&(&u + (&v - &u) * rat(3, 4))));
    assert!(f.address_point(&CantorAddress::parse(2, "(0)").unwrap()).is_err());
}

#[test]
fn phi_center_and_round_trips() {
    let center = CantorAddress::parse(1, "1(0)").unwrap();
    let e = phi_map(&center, PREC).unwrap();
    assert!(e.is_exact() && e.contains_rat(&Rat::zero()));

    let a = phi_inverse(1, &Rat::zero(), PREC).unwrap();
    let e = phi_map(&a, PREC).unwrap();
    assert!(e.contains_rat(&Rat::zero()));
    assert!(e.rad_rat() <= pow2(-40));

    let a = phi_inverse(3, &rat(5, 1), PREC).unwrap();
    assert_eq!(a.set(), 3);
    let e = phi_map(&a, PREC).unwrap();
    assert!(e.contains_rat(&rat(5, 1)) || (e.mid_rat() - rat(5, 1)).abs() <= pow2(-(PREC as i64)));
}

fn tan_pi_f64(t: f64) -> f64 {
    (std::f64::consts::PI * (t - 0.5)).tan()
}

#[test]
fn phi_boundary_codes_are_reindexed() {
    let close = |code: &str, t: f64| {
        let e = phi_map(&CantorAddress::parse(1, code).unwrap(), 64).unwrap();
        (e.to_f64() - tan_pi_f64(t)).abs() < 1e-12
    };
    // 0^∞ takes slot 0 and 1^∞ slot 2 of the merged list
    assert!(close("(0)", 5.0 / 12.0));
    assert!(close("(1)", 17.0 / 24.0));
    assert_eq!(reindexed_value(&CantorAddress::parse(1, "(0)").unwrap()), rat(5, 12));
    assert_eq!(reindexed_value(&CantorAddress::parse(1, "(1)").unwrap()), rat(17, 24));
    // 0 1^∞, the second code of 1/2, is slot 4
    assert_eq!(reindexed_value(&CantorAddress::parse(1, "0(1)").unwrap()), rat(17, 48));
    // the code of 5/12 itself moves to slot 1
    let t1 = CantorAddress::parse(1, "01(10)").unwrap();
    assert_eq!(t1.binary_value(), rat(5, 12));
    assert_eq!(reindexed_value(&t1), rat(5, 24));
    // 1 0^∞ is left alone
    assert_eq!(reindexed_value(&CantorAddress::parse(1, "1(0)").unwrap()), rat(1, 2));
}

#[test]
fn reindexing_is_bijective_on_small_values() {
    let mut seen = HashSet::new();
    let values: HashSet<Rat> = (1..=64i64)
        .flat_map(|den| (1..den).map(move |num| rat(num, den)))
        .collect();
    for t in values {
        {
            let a = address_of_value(1, &t).unwrap();
            assert_eq!(reindexed_value(&a), t);
            assert!(seen.insert(a.code_string()));
        }
    }
}

fn random_address(rng: &mut ChaCha8Rng, set: u64) -> CantorAddress {
    let plen = rng.gen_range(0..50);
    let qlen = rng.gen_range(1..8);
    let prefix: Vec<bool> = (0..plen).map(|_| rng.gen()).collect();
    let period: Vec<bool> = (0..qlen).map(|_| rng.gen()).collect();
    CantorAddress::new(set, prefix, period).unwrap()
}

#[test]
fn phi_inverse_after_phi_map_keeps_forty_digits() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = random_address(&mut rng, 2);
        let y = phi_map(&a, PREC + 64).unwrap().mid_rat();
        let b = phi_inverse(2, &y, PREC).unwrap();
        assert_eq!(a, b);
        let (ta, tb) = (reindexed_value(&a), reindexed_value(&b));
        // compare the first 40 binary digits of the reindexed values
        let s = pow2(40);
        assert_eq!((ta * &s).floor(), (tb * &s).floor(), "address {a}");
    }
}

#[test]
fn mes_eval_examples() {
    let f = MesFunction::new(1);
    let (u, v) = base_of(&f, 1);
    let left = f.eval(&u, 64).unwrap();
    assert_eq!(left.certainty, Certainty::Exact);
    let expect = phi_map(&CantorAddress::parse(1, "(0)").unwrap(), 64).unwrap();
    assert!(left.enclosure(64).overlaps(&expect));
    assert!((left.enclosure(64).to_f64() - tan_pi_f64(5.0 / 12.0)).abs() < 1e-12);

    let gap_mid = (&u + &v) / rat(2, 1);
    let g = f.eval(&gap_mid, 64).unwrap();
    assert_eq!(g.certainty, Certainty::ZeroUpToHorizon);
    assert!(g.value.is_none());

    let f50 = MesFunction::new(50);
    let x = rat(1, 7);
    let outside = (1..=50).all(|k| {
        let (u, v) = base_of(&f50, k);
        (0..=12).any(|g| !in_cover(&x, &u, &v, g))
    });
    assert!(outside, "cover oracle could not place 1/7");
    let r = f50.eval(&x, 64).unwrap();
    assert_eq!(r.certainty, Certainty::ZeroUpToHorizon);
}

#[test]
fn eval_agrees_with_cover_oracle() {
    let f = MesFunction::new(40);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let k = rng.gen_range(1..=40u64);
        let (u, v) = base_of(&f, k);
        let x = &u + (&v - &u) * rat(rng.gen_range(0..=81), 81);
        let r = f.eval(&x, 64).unwrap();
        let covered = (0..=8).all(|g| in_cover(&x, &u, &v, g));
        if r.certainty == Certainty::Exact {
            assert!(covered);
        }
    }
}

#[test]
fn witness_points_land_in_their_sets() {
    let mut f = MesFunction::new(0);
    let w = f
        .surjectivity_witness(&iv(rat(0, 1), rat(1, 1)), &rat(5, 1), PREC, DEFAULT_SCAN_BUDGET)
        .unwrap();
    assert!(w.interval.contains_point(&w.point));
    assert!(w.value.contains_rat(&rat(5, 1)) || w.within(-40));
    let x = f.eval(&w.point, PREC).unwrap();
    assert_eq!(x.certainty, Certainty::Exact);

    let w = f
        .surjectivity_witness(&iv(rat(-10, 1), rat(10, 1)), &Rat::zero(), PREC, DEFAULT_SCAN_BUDGET)
        .unwrap();
    assert!(w.within(-40));
    assert!(iv(rat(-10, 1), rat(10, 1)).contains_point(&w.point));
}

#[test]
fn surjectivity_sweep_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut f = MesFunction::new(0);
    for _ in 0..30 {
        let a = rng.gen_range(-12..12i64);
        let w = rng.gen_range(4..=12i64);
        let i = iv(rat(a, 4), rat(a + w, 4));
        let y = rat(rng.gen_range(-16_000..=16_000), rng.gen_range(1..=16));
        let wit = f.surjectivity_witness(&i, &y, PREC, DEFAULT_SCAN_BUDGET).unwrap();
        assert!(i.contains_point(&wit.point));
        assert!(wit.within(-40), "|f − y| too large for {i}, y = {y}");
    }
}

#[test]
fn witness_budget_is_reported() {
    let mut f = MesFunction::new(0);
    let narrow = iv(rat(9, 1), rat(9, 1) + rat(1, 1000));
    match f.surjectivity_witness(&narrow, &Rat::one(), 64, 50) {
        Err(lineability::Error::BudgetExceeded { budget, .. }) => assert_eq!(budget, 50),
        other => panic!("expected budget error, got {other:?}"),
    }
}

#[test]
fn lineable_witnesses() {
    let mut f = MesFunction::new(0);
    let phi1 = ExpSum::phi(&rat(1, 1)).unwrap();
    let h = Lineable::new(phi1.clone());
    // f vanishes off the carved sets, and φ₁(0) = 0
    let off = h.eval(&MesFunction::new(1), &rat(100, 1), 64).unwrap();
    assert!(off.contains_rat(&Rat::zero()));

    let w = h
        .witness(&mut f, &iv(rat(0, 1), rat(1, 1)), &Rat::one(), PREC, DEFAULT_SCAN_BUDGET)
        .unwrap();
    assert!(iv(rat(0, 1), rat(1, 1)).contains_point(&w.inner.point));
    assert!((w.composed.mid_rat() - Rat::one()).abs() + w.composed.rad_rat() <= pow2(-30));

    let g = ExpSum::phi_combo(&[(rat(2, 1), rat(1, 1)), (rat(-1, 1), rat(2, 1))]).unwrap();
    let h = Lineable::new(g);
    let target = rat(-7, 1);
    let w = h
        .witness(&mut f, &iv(rat(3, 1), rat(4, 1)), &target, PREC, DEFAULT_SCAN_BUDGET)
        .unwrap();
    assert!(iv(rat(3, 1), rat(4, 1)).contains_point(&w.inner.point));
    assert!((w.composed.mid_rat() - &target).abs() + w.composed.rad_rat() <= pow2(-30));

    assert!(Lineable::new(ExpSum::zero())
        .witness(&mut f, &iv(rat(0, 1), rat(1, 1)), &Rat::one(), 64, 10)
        .is_err());
}

#[test]
fn sequence_members_scale() {
    let mut f = MesFunction::new(0);
    let i = iv(rat(0, 1), rat(1, 1));
    let w = f.surjectivity_witness(&i, &rat(3, 1), PREC, DEFAULT_SCAN_BUDGET).unwrap();
    let one = SequenceMember::new(None, 1).unwrap();
    let v1 = one.eval(&f, &w.point, PREC).unwrap();
    assert_eq!(v1.mid_rat(), f.eval(&w.point, PREC).unwrap().enclosure(PREC).mid_rat());

    let v = f.eval(&w.point, PREC).unwrap().enclosure(PREC);
    for n in [2u64, 5, 1 << 22] {
        let m = SequenceMember::new(None, n).unwrap();
        let got = m.eval(&f, &w.point, PREC).unwrap();
        assert!(got.overlaps(&v.div_i64(n as i64)));
    }
    // |v/n| ≤ 2^-20 once n ≥ |v| 2^20
    let n = 4u64 << 20;
    let got = SequenceMember::new(None, n).unwrap().eval(&f, &w.point, PREC).unwrap();
    assert!(got.upper_rat().abs().max(got.lower_rat().abs()) <= pow2(-20));

    let m = SequenceMember::new(None, 6).unwrap();
    let (p, val) = m.witness(&mut f, &i, &rat(1, 2), PREC, DEFAULT_SCAN_BUDGET).unwrap();
    assert!(i.contains_point(&p));
    assert!((val.mid_rat() - rat(1, 2)).abs() + val.rad_rat() <= pow2(-40));
    assert!(SequenceMember::new(None, 0).is_err());
}

proptest! {
    #[test]
    fn canonical_addresses_are_stable(pre in proptest::collection::vec(any::<bool>(), 0..20),
                                      per in proptest::collection::vec(any::<bool>(), 1..6)) {
        let a = CantorAddress::new(1, pre, per).unwrap();
        let b = CantorAddress::parse(1, &a.code_string()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.is_canonical());
        let t = a.ternary_value();
        prop_assert_eq!(CantorAddress::from_ternary_value(1, &t), Some(a.clone()));
    }

    #[test]
    fn reindexing_inverts(num in 1i64..10_000, den in 2i64..10_000) {
        prop_assume!(num < den);
        let t = rat(num, den);
        let a = address_of_value(4, &t).unwrap();
        prop_assert_eq!(reindexed_value(&a), t);
    }
}
