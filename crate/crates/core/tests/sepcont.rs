use lineability::expalg::PolynomialNC;
use lineability::numkernel::{int, pow2, rat, rat_powi, Enclosure, Rat};
use lineability::sepcont::{
    diagonal_blowup_witness, dominance_verdict, eval_sep, expand_poly, make_phi_c, Dominance,
    Multiset, PowerExpForm, SepFunction,
};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ms(pairs: &[(i64, i64)]) -> Multiset {
    pairs.iter().map(|(g, m)| (int(*g), *m)).collect()
}

fn nonzero_rat(rng: &mut ChaCha8Rng, span: i64) -> Rat {
    loop {
        let q = rat(rng.gen_range(-span..=span), rng.gen_range(1..=span));
        if !q.is_zero() {
            return q;
        }
    }
}

const POWERS: [(i64, i64); 5] = [(1, 3), (1, 2), (1, 1), (3, 2), (2, 1)];

fn random_poly(rng: &mut ChaCha8Rng) -> (PolynomialNC, Vec<Rat>) {
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
                (m, nonzero_rat(rng, 5))
            })
            .collect();
        let p = PolynomialNC::new(arity, terms).unwrap();
        if !p.is_zero() {
            return (p, cs);
        }
    }
}

#[test]
fn sep_examples() {
    let f2 = SepFunction::new(2).unwrap();
    assert_eq!(eval_sep(&f2, &[int(1), int(1)]).unwrap(), rat(1, 2));
    assert_eq!(eval_sep(&f2, &[int(0), rat(3, 7)]).unwrap(), int(0));
    assert_eq!(eval_sep(&f2, &[int(0), int(0)]).unwrap(), int(0));
    let f4 = SepFunction::new(4).unwrap();
    assert_eq!(eval_sep(&f4, &[int(2), int(0), int(-1), int(5)]).unwrap(), int(0));
    assert!(eval_sep(&f4, &[int(1)]).is_err());
}

#[test]
fn phi_c_shape_and_evenness() {
    let p = make_phi_c(&int(1)).unwrap();
    let expect = PowerExpForm::from_terms([(ms(&[(1, 1)]), int(1)), (ms(&[(1, -1)]), int(-1))]);
    assert_eq!(p, expect);
    let a = p.eval(&rat(3, 2), 80).unwrap();
    let b = p.eval(&rat(-3, 2), 80).unwrap();
    assert_eq!(a, b);
    assert!((a.to_f64() - 2.0 * 1.5f64.sinh()).abs() < 1e-12);
}

#[test]
fn expansions_by_hand() {
    let t = PolynomialNC::parse("t1", None).unwrap();
    assert_eq!(expand_poly(&t, &[int(1)]).unwrap(), make_phi_c(&int(1)).unwrap());

    let sq = PolynomialNC::parse("t1^2", None).unwrap();
    let form = expand_poly(&sq, &[int(1)]).unwrap();
    let expect = PowerExpForm::from_terms([
        (ms(&[(1, 2)]), int(1)),
        (Multiset::new(), int(-2)),
        (ms(&[(1, -2)]), int(1)),
    ]);
    assert_eq!(form, expect);
    for x in [1.0f64, 2.0] {
        let v = form.eval(&rat(x as i64, 1), 80).unwrap();
        let oracle = (x.exp() - (-x).exp()).powi(2);
        assert!((v.to_f64() - oracle).abs() < 1e-9 * oracle);
    }

    let prod = PolynomialNC::parse("t1*t2", None).unwrap();
    let form = expand_poly(&prod, &[int(1), int(2)]).unwrap();
    let keys: Vec<Multiset> = form.terms().keys().cloned().collect();
    assert_eq!(keys.len(), 4);
    for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let e = ms(&[(1, a), (2, b)]);
        assert_eq!(form.terms()[&e], int(a * b));
    }
    assert!(expand_poly(&prod, &[int(1), int(1)]).is_err());
}

#[test]
fn dominance_examples() {
    assert_eq!(dominance_verdict(&make_phi_c(&int(1)).unwrap()), Dominance::BlowsUp);
    let sq = expand_poly(&PolynomialNC::parse("t1^2", None).unwrap(), &[int(1)]).unwrap();
    assert_eq!(dominance_verdict(&sq), Dominance::BlowsUp);
    let v = sq.eval(&int(30), 64).unwrap();
    assert!(v.lower_rat() > rat_powi(&int(10), 25));
    assert_eq!(dominance_verdict(&PowerExpForm::default()), Dominance::Zero);
    let decaying = PowerExpForm::from_terms([(ms(&[(2, -1), (1, 7)]), int(3)), (Multiset::new(), int(1))]);
    assert_eq!(dominance_verdict(&decaying), Dominance::Bounded);
}

#[test]
fn diagonal_witness_examples() {
    let f = SepFunction::new(2).unwrap();
    let phi = make_phi_c(&int(1)).unwrap();
    let w = diagonal_blowup_witness(&f, &phi, &int(1_000_000), 96, 60).unwrap();
    assert!(w.t <= rat(1, 8));
    let u = w.u.to_f64().unwrap();
    assert!(2.0 * u.sinh() >= 1e6);
    assert_eq!(w.u, f.diagonal(&w.t).unwrap());
    // t = 1 is not enough
    let at_one = phi.eval(&rat(1, 2), 64).unwrap();
    assert!((at_one.to_f64() - 2.0 * 0.5f64.sinh()).abs() < 1e-12);
    assert!(at_one.upper_rat() < int(1_000_000));
    let w0 = diagonal_blowup_witness(&f, &phi, &int(0), 64, 60).unwrap();
    assert_eq!(w0.j, 0);
    let bounded = PowerExpForm::from_terms([(Multiset::new(), int(1))]);
    assert!(diagonal_blowup_witness(&f, &bounded, &int(1), 64, 10).is_err());
}

#[test]
fn separate_continuity_probes() {
    let f = SepFunction::new(2).unwrap();
    let zeros = f
        .separate_continuity_probe(&[int(3), int(0)], 0, &[rat(1, 2), rat(1, 4)])
        .unwrap();
    assert!(zeros.iter().all(|z| z.is_zero()));
    let origin = f
        .separate_continuity_probe(&[int(0), int(0)], 1, &[int(1), rat(1, 1000)])
        .unwrap();
    assert!(origin.iter().all(|z| z.is_zero()));
    let radii: Vec<Rat> = (2..=10).map(|k| pow2(-k)).collect();
    let osc = f.separate_continuity_probe(&[int(1), int(1)], 0, &radii).unwrap();
    for w in osc.windows(2) {
        assert!(w[1] <= w[0]);
    }
    assert!(*osc.last().unwrap() <= rat(1, 1000));
}

#[test]
fn random_polynomials_blow_up_along_the_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let (p, cs) = random_poly(&mut rng);
        let form = expand_poly(&p, &cs).unwrap();
        assert_eq!(dominance_verdict(&form), Dominance::BlowsUp, "{form}");
        let f = SepFunction::new(rng.gen_range(2..=5)).unwrap();
        let w = diagonal_blowup_witness(&f, &form, &int(1_000_000), 96, 64).unwrap();
        assert!(w.value.abs().lower_rat() >= int(1_000_000));
    }
}

#[test]
fn early_dip_before_blow_up() {
    // ¼φ² − (5/2)φ with φ = φ_{1/2}: |form| falls from x = 2 to x = 4
    let p = PolynomialNC::parse("1/4*t1^2 - 5/2*t1", None).unwrap();
    let form = expand_poly(&p, &[rat(1, 2)]).unwrap();
    assert_eq!(dominance_verdict(&form), Dominance::BlowsUp);
    let at = |k: i64| form.eval(&pow2(k), 64).unwrap().abs();
    assert!(at(2).upper_rat() < at(1).lower_rat());
    assert!(at(10).lower_rat() > at(9).upper_rat());
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-40i64..40, 1i64..20).prop_filter_map("nonzero", |(a, b)| (a != 0).then(|| rat(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneity(n in 2usize..5, xs in proptest::collection::vec(small_rat(), 5), lam in small_rat()) {
        let f = SepFunction::new(n).unwrap();
        let x: Vec<Rat> = xs[..n].to_vec();
        let scaled: Vec<Rat> = x.iter().map(|v| v * &lam).collect();
        let lhs = f.eval(&scaled).unwrap();
        let rhs = f.eval(&x).unwrap() / rat_powi(&lam, n as i64);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn diagonal_identity(n in 2usize..=5, t in small_rat()) {
        let f = SepFunction::new(n).unwrap();
        let v = f.eval(&vec![t.clone(); n]).unwrap();
        let expect = (Rat::from_integer((n as i64).into()) * rat_powi(&t, n as i64)).recip();
        prop_assert_eq!(v, expect);
    }

    #[test]
    fn expansion_is_an_evaluation_homomorphism(seed in 0u64..10_000, xi in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, cs) = random_poly(&mut rng);
        let x = [rat(1, 2), int(1), int(2)][xi].clone();
        let form = expand_poly(&p, &cs).unwrap();
        let lhs = form.eval(&x, 96).unwrap();
        let phis: Vec<Enclosure> = cs
            .iter()
            .map(|c| make_phi_c(c).unwrap().eval(&x, 120).unwrap())
            .collect();
        let rhs = p.eval_enclosures(&phis).unwrap();
        prop_assert!(lhs.overlaps(&rhs), "{} vs {}", lhs, rhs);
    }

    // growth is only eventual: see early_dip_before_blow_up
    #[test]
    fn blow_up_grows_along_powers_of_two(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, cs) = random_poly(&mut rng);
        let form = expand_poly(&p, &cs).unwrap();
        prop_assume!(dominance_verdict(&form) == Dominance::BlowsUp);
        let lows: Vec<Rat> = (1..=10)
            .map(|k| form.eval(&pow2(k), 64).unwrap().abs().lower_rat())
            .collect();
        for w in lows[6..].windows(2) {
            prop_assert!(w[1] > w[0], "{}", form);
        }
    }
}
