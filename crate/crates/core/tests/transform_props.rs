use braidfan::rational::{self, int, ratio};
use braidfan::transform::{change_fan, eval_direct, evaluate_setfn, phi, phi_inverse, phi_naive};
use braidfan::{FanChange, PwlExpr, RationalPoint, Subset};
use proptest::prelude::*;

fn expr_strategy(max_d: usize) -> impl Strategy<Value = PwlExpr> {
    (1..=max_d).prop_flat_map(|d| {
        let full = (1u32 << d) - 1;
        (
            Just(d),
            -5i64..=5,
            prop::collection::vec((1..=full, -6i64..=6, 1i64..=3), 0..8),
        )
            .prop_map(|(d, c, terms)| {
                let mut e = PwlExpr::constant_fn(d, int(c)).unwrap();
                for (bits, p, q) in terms {
                    let m = Subset::from_bits(bits);
                    let old = e.coefficient(m);
                    e.add_term(m, old + ratio(p, q)).unwrap();
                }
                e
            })
    })
}

/// Points with small integer coordinates, so ties are frequent.
fn point_for(d: usize) -> impl Strategy<Value = RationalPoint> {
    prop::collection::vec((-3i64..=3, 1i64..=2), d)
        .prop_map(|v| RationalPoint(v.into_iter().map(|(p, q)| ratio(p, q)).collect()))
}

fn expr_and_point(max_d: usize) -> impl Strategy<Value = (PwlExpr, RationalPoint)> {
    expr_strategy(max_d).prop_flat_map(|e| {
        let d = e.d();
        (Just(e), point_for(d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_round_trip(e in expr_strategy(7)) {
        let f = phi(&e);
        prop_assert_eq!(phi_inverse(&f).unwrap(), e);
    }

    #[test]
    fn fast_transform_matches_naive(e in expr_strategy(7)) {
        prop_assert_eq!(phi(&e), phi_naive(&e));
    }

    #[test]
    fn chain_interpolation_matches_direct_evaluation((e, x) in expr_and_point(6)) {
        let f = phi(&e);
        prop_assert_eq!(evaluate_setfn(&f, &x).unwrap(), eval_direct(&e, &x).unwrap());
    }

    #[test]
    fn transform_is_linear(a in expr_strategy(5), b in expr_strategy(5), p in -4i64..=4) {
        prop_assume!(a.d() == b.d());
        let c = int(p);
        let combo = a.checked_add(&b.scale(&c)).unwrap();
        let expected = phi(&a).checked_add(&phi(&b).scale(&c)).unwrap();
        prop_assert_eq!(phi(&combo), expected);
    }

    #[test]
    fn values_on_indicators((e, _x) in expr_and_point(6)) {
        let f = phi(&e);
        for (s, v) in f.iter() {
            let x = RationalPoint::indicator(e.d(), s);
            prop_assert_eq!(v, &eval_direct(&e, &x).unwrap());
        }
    }

    #[test]
    fn projection_pins_last_coordinate((e, x) in expr_and_point(6)) {
        prop_assume!(e.d() >= 2);
        let p = change_fan(&e, &FanChange::Project).unwrap();
        let mut pinned = x.clone();
        *pinned.0.last_mut().unwrap() = rational::zero();
        prop_assert!(p.coefficient(Subset::singleton(e.d())) == rational::zero());
        prop_assert_eq!(eval_direct(&p, &pinned).unwrap(), eval_direct(&e, &pinned).unwrap());
    }

    #[test]
    fn embedding_inverts_projection(e in expr_strategy(6)) {
        prop_assume!(e.d() >= 2);
        let p = change_fan(&e, &FanChange::Project).unwrap();
        let back = change_fan(&p, &FanChange::Embed { slope: e.slope() }).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn embedding_is_invariant_along_the_diagonal((e, x) in expr_and_point(5), t in -3i64..=3) {
        prop_assume!(e.d() >= 2);
        // With slope 0 the embedded function depends only on x - x_d·1.
        let g = change_fan(&e, &FanChange::Embed { slope: rational::zero() }).unwrap();
        let shifted = RationalPoint(x.coords().iter().map(|c| c + int(t)).collect());
        prop_assert_eq!(eval_direct(&g, &x).unwrap(), eval_direct(&g, &shifted).unwrap());
    }
}

#[test]
fn sigma_has_level_of_its_size() {
    for d in 1..=8 {
        for bits in 1u32..(1 << d) {
            let m = Subset::from_bits(bits);
            let f = phi(&PwlExpr::sigma(d, m).unwrap());
            assert_eq!(f.min_level().k_min, m.len(), "sigma {m} at d = {d}");
        }
    }
}

#[test]
fn embedding_examples() {
    // max{0, y_1, y_2} is stored as σ_{1,2,3} read at x_3 = 0; it embeds as max{x_1, x_2, x_3}.
    let p = PwlExpr::sigma(3, Subset::full(3)).unwrap();
    let e = change_fan(&p, &FanChange::Embed { slope: int(1) }).unwrap();
    assert_eq!(e, p);
    // max{y_1, y_2} embeds as max{x_1, x_2} - x_3 + x_3·slope.
    let q = PwlExpr::sigma(3, Subset::from_bits(0b011)).unwrap();
    let e = change_fan(&q, &FanChange::Embed { slope: int(0) }).unwrap();
    let mut expected = q.clone();
    expected.add_term(Subset::singleton(3), int(-1)).unwrap();
    assert_eq!(e, expected);
}

#[test]
fn projection_keeps_constants_and_max_round_trips() {
    let c = PwlExpr::constant_fn(4, ratio(-5, 2)).unwrap();
    assert_eq!(change_fan(&c, &FanChange::Project).unwrap(), c);
    for d in 3..=6 {
        let s = PwlExpr::sigma(d, Subset::full(d)).unwrap();
        let p = change_fan(&s, &FanChange::Project).unwrap();
        let back = change_fan(&p, &FanChange::Embed { slope: int(1) }).unwrap();
        for i in 0..200i64 {
            let x = RationalPoint((0..d as i64).map(|j| ratio((i * 7 + j * 13) % 11 - 5, 1 + j % 3)).collect());
            assert_eq!(eval_direct(&back, &x).unwrap(), eval_direct(&s, &x).unwrap());
        }
    }
    // max{0, x_1} pinned in d = 2 is σ_{1,2}; embedding gives max{x_1, x_2}.
    let p = PwlExpr::sigma(2, Subset::full(2)).unwrap();
    assert_eq!(change_fan(&p, &FanChange::Embed { slope: int(1) }).unwrap(), p);
    assert!(change_fan(&PwlExpr::zero(1).unwrap(), &FanChange::Project).is_err());
}

#[test]
fn ties_break_consistently() {
    let e = PwlExpr::sigma(4, Subset::from_bits(0b0110)).unwrap();
    let f = phi(&e);
    for coords in [[1, 1, 1, 1], [2, 0, 2, 0], [0, 3, 3, -1], [-1, -1, -1, -1]] {
        let x = RationalPoint(coords.iter().map(|&c| int(c)).collect());
        assert_eq!(evaluate_setfn(&f, &x).unwrap(), eval_direct(&e, &x).unwrap());
    }
}
