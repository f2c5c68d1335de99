use bikegeo_diffpoly::*;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn k(o: u32) -> DiffPoly {
    DiffPoly::kappa(o)
}

fn t(o: u32) -> DiffPoly {
    DiffPoly::tau(o)
}

fn c(p: &DiffPoly, a: GaussRat) -> DiffPoly {
    p.scale(&a)
}

#[test]
fn derivative_examples() {
    assert_eq!(k(0).pow(2).derivative(), c(&k(0).mul(&k(1)), q(2, 1)));
    assert_eq!(k(0).mul(&t(0)).derivative(), k(1).mul(&t(0)).add(&k(0).mul(&t(1))));
    assert!(DiffPoly::constant(q(7, 3)).derivative().is_zero());
}

#[test]
fn zn_matches_closed_forms() {
    let z = zn_series(3);
    assert!(z[0].is_zero());
    assert_eq!(z[1], c(&k(0), q(1, 2)));
    assert_eq!(z[2], c(&k(1), q(1, 2)).add(&c(&t(0).mul(&k(0)), qi(1, 2))));
    let re = c(&k(2), q(1, 2))
        .add(&c(&k(0).pow(3), q(1, 8)))
        .sub(&c(&t(0).pow(2).mul(&k(0)), q(1, 2)));
    let im = c(&t(1).mul(&k(0)), q(1, 2)).add(&t(0).mul(&k(1)));
    assert_eq!(z[3], re.add(&c(&im, qi(1, 1))));
}

#[test]
fn integrands_low_order_exact() {
    let i = monodromy_integrands(4);
    assert_eq!(i[0], DiffPoly::one());
    assert_eq!(i[1], c(&t(0), qi(-1, 1)));
    assert_eq!(i[2], c(&k(0).pow(2), q(-1, 2)));
}

#[test]
fn integrands_three_and_four_mod_total_derivative() {
    let i = monodromy_integrands(4);
    let i3 = c(&k(0).pow(2).mul(&t(0)), qi(-1, 2));
    let r3 = equal_mod_total_derivative(&i[3], &i3);
    assert_eq!(r3.witness().unwrap(), &c(&k(0).pow(2), q(-1, 4)));
    let i4 = c(&k(0).mul(&k(2)), q(-1, 2))
        .add(&c(&k(0).pow(2).mul(&t(0).pow(2)), q(1, 2)))
        .sub(&c(&k(0).pow(4), q(1, 8)));
    assert_eq!(i[4].real_part(), i4);
    let r4 = equal_mod_total_derivative(&i[4], &i4);
    assert_eq!(r4.witness().unwrap(), &c(&k(0).pow(2).mul(&t(0)), qi(-1, 2)));
    let nf = monodromy_integrals(4);
    assert_eq!(nf[3], i3);
}

#[test]
fn weight_grading() {
    for (n, p) in monodromy_integrands(7).iter().enumerate() {
        assert_eq!(p.weight(), Some(n as u32), "I_{n}");
    }
    for (n, p) in zn_series(6).iter().enumerate().skip(1) {
        assert_eq!(p.weight(), Some(n as u32));
    }
}

#[test]
fn filament_fields_closed_forms() {
    let x = filament_fields(4);
    assert_eq!(x[0], FrameField::new(DiffPoly::one().neg(), DiffPoly::zero(), DiffPoly::zero()));
    assert_eq!(x[1], FrameField::new(DiffPoly::zero(), DiffPoly::zero(), k(0)));
    assert_eq!(x[2], FrameField::new(c(&k(0).pow(2), q(1, 2)), k(1), k(0).mul(&t(0))));
    let x3 = FrameField::new(
        k(0).pow(2).mul(&t(0)),
        c(&k(1).mul(&t(0)), q(2, 1)).add(&k(0).mul(&t(1))),
        k(0).mul(&t(0).pow(2)).sub(&k(2)).sub(&c(&k(0).pow(3), q(1, 2))),
    );
    assert_eq!(x[3], x3);
}

#[test]
fn filament_recursion_and_normalization() {
    let x = filament_fields(6);
    for i in 0..6 {
        let lhs = x[i].derivative();
        let rhs = x[i + 1].cross_tangent();
        assert!(lhs.sub(&rhs).is_zero(), "recursion fails at {i}");
    }
    for m in 1..=6 {
        let mut s = DiffPoly::zero();
        for a in 0..=m {
            s = s.add(&x[a].dot(&x[m - a]));
        }
        assert!(s.is_zero(), "normalization fails at order {m}");
    }
}

#[test]
fn filament_integrands_match_known_list() {
    let f = filament_integrands(6);
    assert_eq!(f[0].density, DiffPoly::one());
    assert_eq!(f[1].density, t(0));
    assert_eq!(f[2].density, k(0).pow(2));
    assert_eq!(f[3].density, k(0).pow(2).mul(&t(0)));
    let f5 = k(1).pow(2).add(&k(0).pow(2).mul(&t(0).pow(2))).sub(&c(&k(0).pow(4), q(1, 4)));
    assert_eq!(f[4].density, f5);
    assert!(!f[4].experimental && f[5].experimental);
}

#[test]
fn identity_chain() {
    let i = monodromy_integrands(4);
    let f = filament_integrands(5);
    assert_eq!(i[0], f[0].density);
    assert_eq!(i[1], c(&f[1].density, qi(-1, 1)));
    assert_eq!(i[2], c(&f[2].density, q(-1, 2)));
    assert!(equal_mod_total_derivative(&i[3], &c(&f[3].density, qi(-1, 2))).is_equal());
    let r = equal_mod_total_derivative(&i[4], &c(&f[4].density, q(1, 2)));
    let w = r.witness().expect("I4 = F5/2 mod d/dt");
    assert_eq!(w.derivative(), i[4].sub(&c(&f[4].density, q(1, 2))));
    assert!(w.terms().any(|(m, _)| *m == Monomial::from_factors(&[(Var::kappa(0), 1), (Var::kappa(1), 1)])));
}

#[test]
fn total_derivative_examples() {
    let r = equal_mod_total_derivative(&k(0).mul(&k(2)).add(&k(1).pow(2)), &DiffPoly::zero());
    assert_eq!(r.witness().unwrap(), &k(0).mul(&k(1)));
    let r = equal_mod_total_derivative(&k(0).pow(2), &k(0).pow(2));
    assert_eq!(r.witness().unwrap(), &DiffPoly::zero());
    assert_eq!(equal_mod_total_derivative(&k(0).pow(2), &DiffPoly::zero()), TotalDerivative::NotEqual);
    assert_eq!(equal_mod_total_derivative(&DiffPoly::one(), &DiffPoly::zero()), TotalDerivative::NotEqual);
}

#[test]
fn inconclusive_beyond_weight_bound() {
    let heavy = k(MAX_REDUCTION_WEIGHT);
    assert!(matches!(
        equal_mod_total_derivative(&heavy, &DiffPoly::zero()),
        TotalDerivative::Inconclusive { .. }
    ));
}

#[test]
fn parity_of_integrals_up_to_eight() {
    for (n, p) in monodromy_integrals(8).iter().enumerate() {
        if n % 2 == 0 {
            assert!(p.is_real(), "I_{n} = {p}");
        } else {
            assert!(p.is_imaginary(), "I_{n} = {p}");
        }
    }
}

#[test]
fn monomial_basis_counts() {
    // two-coloured partitions: 1, 2, 5, 10, 20, 36
    let counts: Vec<usize> = (0..6).map(|w| monomials_of_weight(w).len()).collect();
    assert_eq!(counts, vec![1, 2, 5, 10, 20, 36]);
}

fn arb_poly() -> impl Strategy<Value = DiffPoly> {
    let var = (0u32..2, 0u32..3).prop_map(|(s, o)| if s == 0 { Var::kappa(o) } else { Var::tau(o) });
    let mono = prop::collection::vec((var, 1u32..3), 0..3);
    let coeff = (-5i64..6, 1i64..4, -5i64..6);
    prop::collection::vec((mono, coeff), 0..5).prop_map(|terms| {
        let mut p = DiffPoly::zero();
        for (f, (a, d, b)) in terms {
            p.add_term(&q(a, d) + &qi(b, d), Monomial::from_factors(&f));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, rng_seed: RngSeed::Fixed(11), failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn leibniz(p in arb_poly(), r in arb_poly()) {
        let lhs = p.mul(&r).derivative();
        let rhs = p.derivative().mul(&r).add(&p.mul(&r.derivative()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivatives_reduce_to_zero(p in arb_poly()) {
        let d = p.derivative();
        let res = equal_mod_total_derivative(&d, &DiffPoly::zero());
        let w = res.witness().cloned();
        prop_assert!(w.is_some());
        prop_assert_eq!(w.unwrap().derivative(), d);
    }

    #[test]
    fn normal_form_is_idempotent(p in arb_poly()) {
        let (nf, w) = normal_form(&p).unwrap();
        prop_assert_eq!(nf.add(&w.derivative()), p);
        let (nf2, w2) = normal_form(&nf).unwrap();
        prop_assert_eq!(nf2, nf);
        prop_assert!(w2.is_zero());
    }

    #[test]
    fn derivative_raises_weight(p in arb_poly()) {
        for (w, comp) in p.homogeneous_components() {
            let d = comp.derivative();
            if !d.is_zero() {
                prop_assert_eq!(d.weight(), Some(w + 1));
            }
        }
    }
}
