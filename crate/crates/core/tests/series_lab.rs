use lineability::numkernel::{int, pow2, rat, Rat};
use lineability::series_lab::{
    block_divergence_witness, build_blocks, cauchy_failure_witness, comparison_bound_holds,
    d_seq, density_perturbation, independence_certificate_series, partial_sums, ratio_certificate,
    ratio_stats, root_stats, stronger_than_probe, BlockPartition, CauchySource, DCombo,
    LinearCombo, SeqFamily, Series, TableSequence, WeightedSpace, WitnessMethod,
};
use lineability::Error;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use std::time::Instant;

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// Independent term oracle: `base^e` by repeated multiplication.
fn power_oracle(base: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e.abs() {
        acc *= base;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

#[test]
fn family_terms_match_power_oracle() {
    for n in 1..=30u64 {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let nn = int(n as i64);
        assert_eq!(SeqFamily::GeometricSkewed.term(n), power_oracle(&int(2), -(n as i64) + sign));
        let s = rat(7, 3);
        assert_eq!(
            SeqFamily::RatioFailConv(s.clone()).term(n),
            power_oracle(&(&nn * &s), -(n as i64) + sign)
        );
        assert_eq!(
            SeqFamily::RatioFailDiv(s.clone()).term(n),
            power_oracle(&(&nn * &s), n as i64 + sign)
        );
        assert_eq!(SeqFamily::RootFailConv(int(3)).term(n), power_oracle(&nn, -3));
        assert_eq!(SeqFamily::RootFailDiv(int(2)).term(n), power_oracle(&nn, 2));
    }
    assert_eq!(SeqFamily::RatioFailConv(int(2)).term(3), rat(1, 1296));
}

#[test]
fn geometric_skewed_ratios_alternate() {
    let x = SeqFamily::GeometricSkewed;
    for n in 1..=1000u64 {
        let r = x.term(n + 1) / x.term(n);
        let want = if n % 2 == 1 { int(2) } else { rat(1, 8) };
        assert_eq!(r, want, "n = {n}");
    }
    let st = ratio_stats(&x, 10).unwrap();
    assert_eq!(st.max, int(2));
    assert_eq!(st.min, rat(1, 8));
    assert_eq!(st.argmax % 2, 1);
    assert_eq!(st.argmin % 2, 0);
}

#[test]
fn ratio_stats_extremes_and_zero_terms() {
    // odd ratios are 2n·(n/(n+1))ⁿ ∈ (2n/e, 2n), largest at n = 59
    let st = ratio_stats(&SeqFamily::RatioFailConv(int(2)), 60).unwrap();
    assert_eq!(st.argmax, 59);
    assert!(st.max > int(43) && st.max < int(118));
    assert!(st.min <= rat(1, 1000));
    let st = ratio_stats(&SeqFamily::RatioFailDiv(int(3)), 20).unwrap();
    assert!(st.min.is_positive());
    let t = TableSequence(vec![int(1), int(0)]);
    assert_eq!(ratio_stats(&t, 5).unwrap_err(), Error::ZeroTerm { index: 2 });
}

#[test]
fn ratio_certificates() {
    let c = LinearCombo::new(vec![
        (int(1), SeqFamily::RatioFailConv(int(3))),
        (int(-5), SeqFamily::RatioFailConv(int(2))),
    ])
    .unwrap();
    let m = int(1000);
    let cert = ratio_certificate(&c, &m, 10_000).unwrap();
    let exact = |n: u64| (c.term(n + 1) / c.term(n)).abs();
    assert_eq!(cert.odd_index % 2, 1);
    assert_eq!(cert.even_index % 2, 0);
    assert!(exact(cert.odd_index) >= m);
    assert!(exact(cert.even_index) <= m.recip());
    assert_eq!(cert.odd_ratio, exact(cert.odd_index));

    let g = LinearCombo::single(SeqFamily::GeometricSkewed).unwrap();
    let cert = ratio_certificate(&g, &int(1), 10).unwrap();
    assert_eq!((cert.odd_index, cert.even_index), (1, 2));
    assert_eq!((cert.odd_ratio, cert.even_ratio), (int(2), rat(1, 8)));
}

/// The odd-index ratio of `(ns)^{−n+(−1)ⁿ}` is `ns·(n/(n+1))ⁿ < ns`, so
/// a ratio of `10⁶` with `s = 2` needs `n > 5·10⁵`.
#[test]
fn single_family_odd_ratio_is_at_most_ns() {
    let s = int(2);
    let c = LinearCombo::single(SeqFamily::RatioFailConv(s.clone())).unwrap();
    for n in (1..200u64).step_by(2) {
        let r = c.term(n + 1) / c.term(n);
        assert!(r < int(n as i64) * &s);
    }
    match ratio_certificate(&c, &int(1_000_000), 40) {
        Err(Error::BudgetExceeded { budget, .. }) => assert_eq!(budget, 40),
        other => panic!("expected budget exhaustion, got {other:?}"),
    }
}

#[test]
fn root_statistics() {
    let st = root_stats(&SeqFamily::RootFailConv(int(1)), 100, 64).unwrap();
    assert_eq!(st.argmax, 1);
    let r100 = lineability::series_lab::root_at(&SeqFamily::RootFailConv(int(1)), 100, 64).unwrap();
    assert!(r100.lower_rat() > rat(9, 10) && r100.upper_rat() < int(1));
    let r100 = lineability::series_lab::root_at(&SeqFamily::RootFailDiv(int(1)), 100, 64).unwrap();
    assert!(r100.lower_rat() > int(1) && r100.upper_rat() < rat(105, 100));
    // 100^{-1/100} = e^{-ln 100/100}
    let f = (-(100f64).ln() / 100.0).exp();
    assert!((r100.recip().unwrap().to_f64() - f).abs() < 1e-12);
    let ones = root_stats(&TableSequence(vec![int(1)]), 50, 64).unwrap();
    assert!(ones.min.is_exact() && ones.max.is_exact());
    assert_eq!(ones.max.mid_rat(), int(1));
}

#[test]
fn partial_sum_checks() {
    let s = partial_sums(&SeqFamily::GeometricSkewed, 60);
    assert!((s - int(1)).abs() <= pow2(-58));
    let x = SeqFamily::RatioFailConv(int(2));
    for n in [5u64, 10, 20] {
        let tail = partial_sums(&x, 2 * n) - partial_sums(&x, n);
        assert!(tail.abs() <= rat(1, n as i64));
    }
    assert!(partial_sums(&x, 0).is_zero());
}

#[test]
fn comparison_bound_range() {
    for s in [rat(101, 100), rat(3, 2), int(10)] {
        for n in 3..=2000u64 {
            assert!(comparison_bound_holds(&s, n).unwrap(), "s = {s}, n = {n}");
        }
    }
    // n = 2 with s close to 1 is the only failure of the bound
    assert!(!comparison_bound_holds(&rat(101, 100), 2).unwrap());
}

/// Cofactor expansion, independent of the library's elimination.
fn det_oracle(m: &[Vec<Rat>]) -> Rat {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = Rat::zero();
    for c in 0..m.len() {
        let minor: Vec<Vec<Rat>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(i, _)| *i != c).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][c] * det_oracle(&minor);
        acc = if c % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

#[test]
fn independence_determinants() {
    for (params, idx) in [
        (vec![int(2), int(3)], vec![4u64, 5]),
        (vec![rat(3, 2), int(2), int(3)], vec![3, 4, 5]),
    ] {
        let det = independence_certificate_series(&params, &idx).unwrap();
        let m: Vec<Vec<Rat>> = idx
            .iter()
            .map(|&n| params.iter().map(|s| SeqFamily::RatioFailConv(s.clone()).term(n)).collect())
            .collect();
        assert_eq!(det, det_oracle(&m));
        assert!(!det.is_zero());
    }
    assert!(independence_certificate_series(&[int(2), int(2)], &[1, 2]).is_err());
    assert!(independence_certificate_series(&[int(2)], &[1]).is_err());
}

/// Sequential f64 harmonic scan; returns cuts and the smallest margin.
fn harmonic_cut_oracle(k_max: u64) -> (Vec<u64>, f64) {
    let mut cuts = vec![1u64];
    let mut margin = f64::MAX;
    let mut n = 1u64;
    for k in 1..=k_max {
        let mut s = 0.0f64;
        let mut prev;
        loop {
            n += 1;
            prev = s;
            s += 1.0 / n as f64;
            if s > k as f64 {
                break;
            }
        }
        margin = margin.min(s - k as f64).min(k as f64 - prev);
        cuts.push(n);
    }
    (cuts, margin)
}

#[test]
fn harmonic_blocks_small() {
    let b = build_blocks(&WeightedSpace::harmonic(), 5).unwrap();
    // 1/2 + 1/3 + 1/4 = 13/12
    assert_eq!(b.cuts()[1], big(4));
    let (cuts, margin) = harmonic_cut_oracle(5);
    assert!(margin > 1e-9);
    let got: Vec<u64> = b.cuts().iter().map(|c| c.to_u64().unwrap()).collect();
    assert_eq!(got, cuts);
    let s1 = b.block_sum(1, 64).unwrap();
    assert_eq!(s1.exact().unwrap(), &rat(13, 12));
}

#[test]
fn harmonic_blocks_hundred_verified() {
    let t = Instant::now();
    let b = build_blocks(&WeightedSpace::harmonic(), 100).unwrap();
    for c in b.verify(64).unwrap() {
        assert!(c.exceeds && c.minimal, "block {}", c.k);
    }
    // ln n_K ≈ K(K+1)/2 + ln(n₀) − γ-type constants
    let last = b.cuts().last().unwrap();
    let ln = last.bits() as f64 * std::f64::consts::LN_2;
    assert!((ln - 5050.0).abs() < 5.0, "ln n_100 ≈ {ln}");
    assert!(t.elapsed().as_secs() < 120);
}

#[test]
fn constant_blocks() {
    let b = build_blocks(&WeightedSpace::constant(), 100).unwrap();
    for k in 1..=100usize {
        assert_eq!(&b.cuts()[k] - &b.cuts()[k - 1], big(k as u64 + 1));
    }
    for c in b.verify(64).unwrap() {
        assert!(c.exceeds && c.minimal);
    }
    let empty = build_blocks(&WeightedSpace::constant(), 0).unwrap();
    assert_eq!(empty.cuts(), &[big(1)]);
    assert!(empty.is_empty());
}

#[test]
fn table_blocks() {
    let w = WeightedSpace::table(vec![rat(1, 3), rat(5, 2), rat(1, 7)]).unwrap();
    let b = build_blocks(&w, 30).unwrap();
    // direct scan oracle
    let mut n = 1u64;
    for k in 1..=30u64 {
        let mut s = Rat::zero();
        loop {
            n += 1;
            s += w.weight(&big(n));
            if s > int(k as i64) {
                break;
            }
        }
        assert_eq!(b.cuts()[k as usize], big(n));
    }
    assert!(WeightedSpace::table(vec![int(1), int(0)]).is_err());
}

#[test]
fn d_sequence_values() {
    let w = WeightedSpace::harmonic();
    let b = build_blocks(&w, 4).unwrap();
    // block 1 is {2,3,4}
    assert_eq!(d_seq(&b, &rat(1, 3), &big(3), 64).unwrap().exact().unwrap(), &rat(1, 3));
    let (lo, _) = b.bounds(4).unwrap();
    let d = d_seq(&b, &rat(1, 2), &lo, 64).unwrap();
    assert_eq!(d.exact().unwrap(), &(w.weight(&lo) / int(2)));
    let beyond = b.cuts().last().unwrap() + 1u32;
    assert!(matches!(d_seq(&b, &rat(1, 2), &beyond, 64), Err(Error::ExtendFirst { .. })));
    assert!(d_seq(&b, &int(1), &big(2), 64).is_err());
}

#[test]
fn d_sequence_norm_decays() {
    let b = build_blocks(&WeightedSpace::constant(), 1000).unwrap();
    let t = rat(1, 3);
    let mut prev: Option<lineability::Enclosure> = None;
    for k in 1..=1000u64 {
        let (lo, _) = b.bounds(k).unwrap();
        let d = d_seq(&b, &t, &lo, 64).unwrap().enclosure(64);
        let want = (k as f64).powf(-1.0 / 3.0);
        assert!((d.to_f64() - want).abs() < 1e-12);
        if let Some(p) = prev {
            assert!(d.upper() < p.lower(), "k = {k}");
        }
        prev = Some(d);
    }
}

fn block_sum_oracle(combo: &[(f64, f64)], b: &BlockPartition, k: u64) -> f64 {
    // unmaterialized blocks only occur here for constant weights, n_k = 1 + k(k+3)/2
    let (lo, hi) = b.bounds(k).unwrap_or_else(|| {
        let end = 1 + k * (k + 3) / 2;
        (big(end - k), big(end))
    });
    let mut s = 0.0;
    let mut j = lo.to_u64().unwrap();
    while j <= hi.to_u64().unwrap() {
        let c = b.space().weight(&big(j)).to_f64().unwrap();
        s += combo.iter().map(|(l, t)| l * c / (k as f64).powf(*t)).sum::<f64>();
        j += 1;
    }
    s
}

#[test]
fn block_divergence_examples() {
    let b = build_blocks(&WeightedSpace::constant(), 200).unwrap();
    let single = DCombo::single(rat(1, 2)).unwrap();
    let m = int(10);
    let w = block_divergence_witness(&single, &b, &m, 64).unwrap();
    let k: u64 = w.k.parse().unwrap();
    assert!(k <= 100);
    assert_eq!(w.method, WitnessMethod::DirectSummation);
    let oracle = block_sum_oracle(&[(1.0, 0.5)], &b, k);
    assert!(oracle >= 10.0);
    assert!((w.abs_lower.to_f64().unwrap() - oracle).abs() < 1e-9);

    let two = DCombo::new(vec![(int(1), rat(1, 4)), (int(-1), rat(3, 4))]).unwrap();
    let w = block_divergence_witness(&two, &b, &m, 64).unwrap();
    let k: u64 = w.k.parse().unwrap();
    let oracle = block_sum_oracle(&[(1.0, 0.25), (-1.0, 0.75)], &b, k);
    assert!(oracle.abs() >= 10.0);
    assert!((w.abs_lower.to_f64().unwrap() - oracle.abs()).abs() < 1e-9);

    let w = block_divergence_witness(&single, &b, &Rat::zero(), 64).unwrap();
    assert_eq!(w.k, "1");
}

#[test]
fn block_divergence_beyond_materialized() {
    let b = build_blocks(&WeightedSpace::harmonic(), 5).unwrap();
    let combo = DCombo::new(vec![(rat(1, 2), rat(1, 2)), (int(3), rat(2, 3))]).unwrap();
    let w = block_divergence_witness(&combo, &b, &int(1000), 64).unwrap();
    assert_eq!(w.method, WitnessMethod::LowerBound);
    let k = w.k().to_f64().unwrap();
    let lower = k * (0.5 * k.powf(-0.5) + 3.0 * k.powf(-2.0 / 3.0));
    assert!(lower >= 1000.0);
    assert!((w.abs_lower.to_f64().unwrap() - lower).abs() / lower < 1e-9);

    let c = build_blocks(&WeightedSpace::constant(), 0).unwrap();
    let w = block_divergence_witness(&DCombo::single(rat(3, 4)).unwrap(), &c, &int(1000), 64).unwrap();
    // (k+1)·k^{-3/4} ≥ 1000 first near k = 10¹²
    let k = w.k().to_f64().unwrap();
    assert!((k + 1.0) * k.powf(-0.75) >= 1000.0 * (1.0 - 1e-12));
    assert!(k > 9.9e11 && k < 1.01e12);
    assert_eq!(w.method, WitnessMethod::ProductForm);
}

#[test]
fn cauchy_witnesses() {
    let b = build_blocks(&WeightedSpace::constant(), 400).unwrap();
    let d = DCombo::single(rat(1, 2)).unwrap();
    let m = int(5);
    let w = cauchy_failure_witness(&CauchySource::Blocks { combo: &d, partition: &b }, &m, 3, 100, 64).unwrap();
    let (n, e): (u64, u64) = (w.n.parse().unwrap(), w.m.parse().unwrap());
    assert!(e > n && n > 3);
    let mut oracle = 0.0;
    for j in n..=e {
        oracle += d.value(&b, &big(j), 64).unwrap().enclosure(64).to_f64();
    }
    assert!(oracle > 5.0);

    let x = SeqFamily::RatioFailDiv(int(2));
    let w = cauchy_failure_witness(&CauchySource::Terms(&x), &int(1000), 4, 100, 64).unwrap();
    let (n, e): (u64, u64) = (w.n.parse().unwrap(), w.m.parse().unwrap());
    assert_eq!(n, 5);
    assert!(e > n);
    assert!(partial_sums(&x, e) - partial_sums(&x, n - 1) > int(1000));

    // M below the first term: the shortest pair
    let w = cauchy_failure_witness(&CauchySource::Terms(&x), &rat(1, 2), 0, 10, 64).unwrap();
    assert_eq!((w.n.as_str(), w.m.as_str()), ("1", "2"));

    let conv = SeqFamily::GeometricSkewed;
    assert!(matches!(
        cauchy_failure_witness(&CauchySource::Terms(&conv), &int(1), 0, 200, 64),
        Err(Error::BudgetExceeded { .. })
    ));
}

#[test]
fn density_perturbations() {
    let w = WeightedSpace::constant();
    let p = density_perturbation(&[], &int(1), &int(5), 0, &w, 64).unwrap();
    assert_eq!((p.window_start.as_str(), p.window_end.as_str()), ("1", "11"));
    assert_eq!(p.distance, rat(1, 2));
    assert_eq!(p.window_sum.exact().unwrap(), &rat(11, 2));

    let phi = vec![int(3), rat(-1, 2), int(7)];
    let eps = rat(1, 10);
    let p = density_perturbation(&phi, &eps, &rat(1, 10), 10, &WeightedSpace::harmonic(), 64).unwrap();
    assert_eq!(p.distance, rat(1, 20));
    assert_eq!(p.window_start, "11");
    assert!(p.window_sum.exceeds(&rat(1, 10)).unwrap());
    assert_eq!(p.value(&WeightedSpace::harmonic(), &big(2)), rat(-1, 2));
    assert_eq!(p.value(&WeightedSpace::harmonic(), &big(11)), rat(1, 20) / int(11));
    // explicit norm of x − Φ over the window, independent of the library
    let end: u64 = p.window_end.parse().unwrap();
    let mut sup = Rat::zero();
    let mut sum = Rat::zero();
    for j in 11..=end {
        let c = rat(1, j as i64);
        let diff = p.value(&WeightedSpace::harmonic(), &big(j));
        sum += &diff;
        sup = sup.max((diff / c).abs());
    }
    assert_eq!(sup, rat(1, 20));
    assert!(sum > rat(1, 10));
    assert!(sum - p.value(&WeightedSpace::harmonic(), &big(end)) <= rat(1, 10));

    // a window far beyond any explicit scan
    let p = density_perturbation(&[], &rat(1, 10), &int(2), 10, &WeightedSpace::harmonic(), 64).unwrap();
    assert_eq!(p.distance, rat(1, 20));
    let end: BigUint = p.window_end.parse().unwrap();
    let ln = end.bits() as f64 * std::f64::consts::LN_2;
    assert!((ln - (40.0 + 10f64.ln())).abs() < 1.0);

    let p = density_perturbation(&[], &int(1), &Rat::zero(), 0, &w, 64).unwrap();
    assert_eq!((p.window_start.as_str(), p.window_end.as_str()), ("1", "1"));
}

#[test]
fn stronger_than_keeps_witness() {
    let b = build_blocks(&WeightedSpace::constant(), 300).unwrap();
    let d = DCombo::single(rat(1, 2)).unwrap();
    let w = block_divergence_witness(&d, &b, &int(8), 64).unwrap();
    let y: Vec<Rat> = (1..=10).map(|i| rat(i, 3)).collect();
    let v = stronger_than_probe(&d, &b, &w, &y, 64).unwrap();
    assert!(v.retained && v.same_block);
    assert_eq!(v.witness.k, w.k);

    let zero = stronger_than_probe(&d, &b, &w, &[], 64).unwrap();
    assert!(zero.same_block && zero.retained);

    let start: usize = w.start.as_ref().unwrap().parse().unwrap();
    let mut y = vec![Rat::zero(); start + 5];
    y[start + 2] = int(-1_000);
    let v = stronger_than_probe(&d, &b, &w, &y, 64).unwrap();
    assert!(v.retained && !v.same_block);
    let later: usize = v.witness.start.as_ref().unwrap().parse().unwrap();
    assert!(later > y.len());
    let k: u64 = v.witness.k.parse().unwrap();
    assert!(block_sum_oracle(&[(1.0, 0.5)], &b, k) >= 8.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn comparison_bound_matches_exact(p in 101i64..2000, q in 100i64..1000, n in 1u64..80) {
        prop_assume!(p > q);
        let s = rat(p, q);
        let exact = SeqFamily::RatioFailConv(s.clone()).term(n) * int((n * n) as i64) <= int(1);
        prop_assert_eq!(comparison_bound_holds(&s, n).unwrap(), exact);
    }

    #[test]
    fn combo_terms_are_linear(a in -10i64..=10, b in -10i64..=10, n in 1u64..40) {
        prop_assume!(a != 0 && b != 0);
        let f = SeqFamily::RatioFailConv(int(2));
        let g = SeqFamily::RatioFailConv(rat(7, 2));
        let c = LinearCombo::new(vec![(int(a), f.clone()), (int(b), g.clone())]).unwrap();
        prop_assert_eq!(c.term(n), int(a) * f.term(n) + int(b) * g.term(n));
    }

    #[test]
    fn constant_block_sums_closed_form(k in 1u64..5000) {
        let b = build_blocks(&WeightedSpace::constant(), 1).unwrap();
        let d = DCombo::single(rat(1, 2)).unwrap();
        let w = block_divergence_witness(&d, &b, &Rat::from_integer(BigInt::from(k)), 64).unwrap();
        // (k+1)/√k ≥ M first at this k
        let kk = w.k().to_f64().unwrap();
        prop_assert!((kk + 1.0) / kk.sqrt() >= k as f64 * (1.0 - 1e-12));
    }
}
