use lineability::error::Error;
use lineability::expalg::{
    compose_polynomial, Algebra, AsymptoticSign, ExpSum, Independence, PolynomialNC, TailSign,
};
use lineability::numkernel::{compare, int, pow2, rat, Enclosure, Ordering3, Rat};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn phi(a: i64) -> ExpSum {
    ExpSum::phi(&int(a)).unwrap()
}

fn sum(pairs: &[(i64, i64)]) -> ExpSum {
    ExpSum::from_terms(pairs.iter().map(|&(b, a)| (int(b), int(a))))
}

// ---------------------------------------------------------------- oracles

/// Bracket of `sinh(x)` for `0 ≤ x ≤ 1` from the odd Taylor series.
fn sinh_bracket(x: &Rat) -> (Rat, Rat) {
    let x2 = x * x;
    let mut t = x.clone();
    let mut s = Rat::zero();
    for k in 1..=30i64 {
        s += &t;
        t = t * &x2 / int((2 * k) * (2 * k + 1));
    }
    (s.clone(), s + t * int(2))
}

/// Bisection for `2·sinh(x) = 1` on `[0, 1]`.
fn asinh_half() -> (Rat, Rat) {
    let (mut lo, mut hi) = (Rat::zero(), Rat::one());
    for _ in 0..80 {
        let m = (&lo + &hi) / int(2);
        let (a, b) = sinh_bracket(&m);
        if b * int(2) < Rat::one() {
            lo = m;
        } else if a * int(2) > Rat::one() {
            hi = m;
        } else {
            break;
        }
    }
    (lo, hi)
}

fn e_bracket() -> (Rat, Rat) {
    let mut t = Rat::one();
    let mut s = Rat::zero();
    for k in 1..=40i64 {
        s += &t;
        t /= int(k);
    }
    (s.clone(), s + t * int(2))
}

// ---------------------------------------------------------------- construction

#[test]
fn phi_alpha_terms() {
    let p = phi(1);
    assert_eq!(p, sum(&[(1, 1), (-1, -1)]));
    let v = phi(2).eval(&int(0), 64).unwrap();
    assert!(v.is_exact() && v.contains_rat(&int(0)));
    assert_eq!(p.mul(&p), sum(&[(2, 1), (0, -2), (-2, 1)]));
}

#[test]
fn eval_examples() {
    let z = ExpSum::zero().eval(&rat(7, 3), 64).unwrap();
    assert!(z.is_exact() && z.contains_rat(&int(0)));

    let (lo, hi) = asinh_half();
    let x = (&lo + &hi) / int(2);
    let v = phi(1).eval(&x, 128).unwrap();
    assert!((v.mid_rat() - int(1)).abs() < pow2(-60));

    let (elo, ehi) = e_bracket();
    let e = sum(&[(1, 1)]).eval(&int(1), 128).unwrap();
    assert!(e.lower_rat() <= ehi && elo <= e.upper_rat());
}

#[test]
fn derivative_examples() {
    let a = rat(3, 2);
    let p = ExpSum::phi(&a).unwrap().derivative();
    assert_eq!(p, ExpSum::from_terms([(a.clone(), a.clone()), (-a.clone(), a)]));
    assert!(ExpSum::zero().derivative().is_zero());
    assert_eq!(sum(&[(2, 3), (0, 5)]).derivative(), sum(&[(2, 6)]));
}

#[test]
fn asymptotic_sign_examples() {
    let tails = |p, m| AsymptoticSign::Tails { plus: p, minus: m };
    assert_eq!(phi(1).asymptotic_sign(), tails(TailSign::Positive, TailSign::Negative));
    let f = phi(1).sub(&phi(2).scale(&int(3)));
    assert_eq!(f.asymptotic_sign(), tails(TailSign::Negative, TailSign::Positive));
    assert!(f.eval(&int(50), 64).unwrap().is_negative());
    assert!(f.eval(&int(-50), 64).unwrap().is_positive());
    assert_eq!(ExpSum::zero().asymptotic_sign(), AsymptoticSign::ZeroFunction);
}

#[test]
fn solve_value_examples() {
    let z = phi(1).solve_value(&int(0), 128).unwrap();
    assert!(z.contains_rat(&int(0)));

    let (lo, hi) = asinh_half();
    let s = phi(1).solve_value(&int(1), 128).unwrap();
    assert!(s.lower_rat() <= hi && lo <= s.upper_rat());
    assert!(s.mid_decimal(9).starts_with("0.481211825"));

    let m = phi(1).solve_value(&int(-1), 128).unwrap();
    assert!(m.lower_rat() <= -&lo && -&hi <= m.upper_rat());
}

#[test]
fn solve_value_without_bracket() {
    // e^{2x} + e^{-2x} ≥ 2
    let f = sum(&[(2, 1), (-2, 1)]);
    assert!(matches!(f.solve_value(&int(0), 64), Err(Error::NoBracketFound(_))));
    assert!(matches!(ExpSum::zero().solve_value(&int(0), 64), Err(Error::NoBracketFound(_))));
}

#[test]
fn compose_examples() {
    let sq = PolynomialNC::parse("t1^2", None).unwrap();
    assert_eq!(compose_polynomial(&sq, &[phi(1)]).unwrap(), sum(&[(2, 1), (0, -2), (-2, 1)]));

    let prod = PolynomialNC::parse("t1*t2", None).unwrap();
    let got = compose_polynomial(&prod, &[phi(1), phi(2)]).unwrap();
    assert_eq!(got, sum(&[(3, 1), (1, -1), (-1, -1), (-3, 1)]));
    for x in [rat(-1, 2), rat(1, 3), int(2)] {
        let lhs = got.eval(&x, 96).unwrap();
        let rhs = phi(1).eval(&x, 96).unwrap().mul(&phi(2).eval(&x, 96).unwrap());
        assert_eq!(compare(&lhs, &rhs), Ordering3::Overlap);
    }

    let id = PolynomialNC::parse("t1", None).unwrap();
    assert!(compose_polynomial(&id, &[ExpSum::zero()]).unwrap().is_zero());
    assert!(compose_polynomial(&id, &[phi(1), phi(2)]).is_err());
}

#[test]
fn independence_examples() {
    assert_eq!(
        ExpSum::independence_certificate(&[phi(1), phi(2), phi(3)]).unwrap(),
        Independence::Independent
    );
    assert_eq!(
        ExpSum::independence_certificate(&[phi(1), phi(1).scale(&int(2))]).unwrap(),
        Independence::DependencyWitness(vec![int(2), int(-1)])
    );
    assert_eq!(
        ExpSum::independence_certificate(&[sum(&[(1, 1)]), sum(&[(-1, 1)]), phi(1)]).unwrap(),
        Independence::DependencyWitness(vec![int(1), int(-1), int(-1)])
    );
    assert!(ExpSum::independence_certificate(&[]).is_err());
}

// ---------------------------------------------------------------- properties

fn small_rat(n: i64, d: i64) -> impl Strategy<Value = Rat> {
    (-n..=n, 1..=d).prop_map(|(a, b)| rat(a, b))
}

fn exp_sum() -> impl Strategy<Value = ExpSum> {
    prop::collection::vec((small_rat(8, 4), small_rat(10, 3)), 0..5)
        .prop_map(ExpSum::from_terms)
}

fn poly(arity: usize) -> impl Strategy<Value = PolynomialNC> {
    prop::collection::vec(
        (prop::collection::vec(0u32..3, arity), (-5i64..=5).prop_filter("nz", |c| *c != 0)),
        1..4,
    )
    .prop_map(move |terms| {
        let terms = terms.into_iter().filter(|(m, _)| m.iter().any(|&e| e > 0));
        PolynomialNC::new(arity, terms.map(|(m, c)| (m, int(c)))).unwrap()
    })
}

fn distinct_alphas(p: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::btree_set((1i64..40, 1i64..6).prop_map(|(a, b)| rat(a, b)), p)
        .prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_a_homomorphism(p in poly(2), gens in prop::collection::vec(exp_sum(), 2), x in small_rat(4, 4)) {
        let lhs = compose_polynomial(&p, &gens).unwrap().eval(&x, 96).unwrap();
        let vals: Vec<Enclosure> = gens.iter().map(|g| g.eval(&x, 96).unwrap()).collect();
        let rhs = p.eval_enclosures(&vals).unwrap();
        prop_assert_eq!(compare(&lhs, &rhs), Ordering3::Overlap);
    }

    #[test]
    fn polynomials_of_phis_are_nonzero(p in poly(3), alphas in distinct_alphas(3)) {
        prop_assume!(!p.is_zero());
        let gens: Vec<ExpSum> = alphas.iter().map(|a| ExpSum::phi(a).unwrap()).collect();
        prop_assert!(!compose_polynomial(&p, &gens).unwrap().is_zero());
    }

    #[test]
    fn asymptotic_sign_matches_far_evaluation(f in exp_sum()) {
        let x = pow2(10);
        match f.asymptotic_sign() {
            AsymptoticSign::ZeroFunction => prop_assert!(f.is_zero()),
            AsymptoticSign::Tails { plus, minus } => {
                for (pt, want) in [(x.clone(), plus), (-x.clone(), minus)] {
                    let v = f.eval(&pt, 64).unwrap();
                    let s = v.certain_sign();
                    if s != 0 {
                        prop_assert_eq!(s, want.as_i32());
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference(f in exp_sum(), x in small_rat(3, 4)) {
        let h = pow2(-20);
        let p = 128;
        let up = f.eval(&(&x + &h), p).unwrap();
        let dn = f.eval(&(&x - &h), p).unwrap();
        let fd = up.sub(&dn).mul_rat(&(Rat::one() / (h.clone() * int(2))));
        let d = f.derivative().eval(&x, p).unwrap();
        // |fd − f'| ≤ h²/6 · max|f'''| with |f'''| ≤ Σ |a||b|³ e^{|b|(|x|+1)}
        let mut c = Rat::zero();
        for (b, a) in f.terms() {
            let arg = b.abs() * (x.abs() + int(1));
            let e = lineability::numkernel::enclose_exp(&Enclosure::from_rat(&arg, 64), 64).unwrap();
            c += a.abs() * b.abs() * b.abs() * b.abs() * e.upper_rat();
        }
        let bound = &h * &h * c / int(6) + fd.rad_rat() + d.rad_rat();
        prop_assert!((fd.mid_rat() - d.mid_rat()).abs() <= bound);
    }
}
