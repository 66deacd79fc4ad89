//! Set-function predicates against direct brute-force definitions.

use braidfan::rational::{int, Rational};
use braidfan::setfn::{argmax_map, in_cone, is_conforming, pointwise_max, span_dimension};
use braidfan::transform::phi;
use braidfan::{Interval, PwlExpr, SetFn, Subset};
use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setfn_strategy(max_d: usize) -> impl Strategy<Value = SetFn> {
    (0..=max_d).prop_flat_map(|d| {
        prop::collection::vec(-3i64..=3, 1 << d).prop_map(move |v| {
            SetFn::new(Interval::full(d), v.into_iter().map(int).collect()).unwrap()
        })
    })
}

/// `Σ_{S ⊆ U ⊆ T} (-1)^{|U \ S|} F(U)`, straight from the definition.
fn alt_sum(f: &SetFn, s: u32, t: u32) -> Rational {
    let free = t & !s;
    let mut acc = int(0);
    let mut sub = free;
    loop {
        let v = f.value(Subset::from_bits(s | sub)).unwrap().clone();
        if sub.count_ones().is_multiple_of(2) {
            acc += v;
        } else {
            acc -= v;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    acc
}

/// Orthogonality to every interval of rank at least `k + 1` (not just `k + 1`).
fn in_level_brute(f: &SetFn, k: usize) -> bool {
    let d = f.domain().rank();
    (0u32..1 << d).all(|t| {
        (0u32..1 << d)
            .filter(|s| s & !t == 0 && (t & !s).count_ones() as usize > k)
            .all(|s| alt_sum(f, s, t) == int(0))
    })
}

/// Conformity by enumerating all permutations of `[d]`.
fn conforming_brute(fns: &[SetFn]) -> bool {
    let d = fns[0].domain().rank();
    (0..d).permutations(d).all(|perm| {
        let mut prefix = 0u32;
        let mut chain = vec![Subset::EMPTY];
        for i in perm {
            prefix |= 1 << i;
            chain.push(Subset::from_bits(prefix));
        }
        (0..fns.len()).any(|j| {
            chain.iter().all(|s| {
                let best = fns.iter().map(|f| f.value(*s).unwrap()).max().unwrap();
                fns[j].value(*s).unwrap() == best
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn level_matches_definition(f in setfn_strategy(5)) {
        let k = f.min_level().k_min;
        for j in 0..=f.domain().rank() {
            prop_assert_eq!(f.in_level_space(j), in_level_brute(&f, j), "k = {}", j);
        }
        prop_assert!(k == 0 || !in_level_brute(&f, k - 1));
    }

    #[test]
    fn level_spaces_are_nested(f in setfn_strategy(6)) {
        let d = f.domain().rank();
        for k in 0..d {
            prop_assert!(!f.in_level_space(k) || f.in_level_space(k + 1));
        }
    }

    #[test]
    fn hc_is_conformity_with_zero(f in setfn_strategy(6)) {
        let zero = SetFn::zero(f.domain());
        prop_assert_eq!(f.in_hc(), is_conforming(&[zero, f.clone()]).unwrap());
    }

    #[test]
    fn witness_interval_is_genuine(f in setfn_strategy(5)) {
        let report = f.min_level();
        if let Some(w) = report.witness {
            prop_assert_eq!(w.upper.difference(w.lower).len(), report.k_min);
            prop_assert_eq!(alt_sum(&f, w.lower.bits(), w.upper.bits()), w.value.clone());
            prop_assert_ne!(w.value, int(0));
        }
    }

    #[test]
    fn hc_matches_definition(f in setfn_strategy(5)) {
        let vals: Vec<(u32, i8)> = f.iter().map(|(s, v)| (s.bits(), braidfan::rational::sign(v))).collect();
        let brute = vals.iter().all(|&(s, a)| {
            vals.iter().all(|&(t, b)| s & !t != 0 || a * b >= 0)
        });
        prop_assert_eq!(f.in_hc(), brute);
    }

    #[test]
    fn level_is_shift_invariant(f in setfn_strategy(5), c in -4i64..=4) {
        prop_assert_eq!(f.shift(&int(c)).min_level(), f.min_level());
    }
}

#[test]
fn conformity_matches_chain_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = [0usize; 2];
    for _ in 0..500 {
        let d = rng.random_range(1..=5);
        let r = rng.random_range(1..=3);
        let domain = Interval::full(d);
        let fns: Vec<SetFn> = (0..r)
            .map(|_| SetFn::from_fn(domain, |_| int(rng.random_range(0..=2))))
            .collect();
        let expected = conforming_brute(&fns);
        assert_eq!(is_conforming(&fns).unwrap(), expected, "{fns:?}");
        assert!(in_cone(&fns, &argmax_map(&fns).unwrap()).unwrap());
        assert_eq!(pointwise_max(&fns, true).is_ok(), expected);
        seen[usize::from(expected)] += 1;
    }
    assert!(seen[0] > 20 && seen[1] > 20, "both outcomes exercised: {seen:?}");
}

#[test]
fn level_spaces_have_expected_dimension() {
    // Sf(k) is spanned by the constants and σ_M with |M| ≤ k.
    for d in 1..=5 {
        let domain = Interval::full(d);
        for k in 0..=d {
            let mut family = vec![SetFn::constant(domain, int(1))];
            for bits in 1u32..1 << d {
                let m = Subset::from_bits(bits);
                if m.len() <= k {
                    family.push(phi(&PwlExpr::sigma(d, m).unwrap()));
                }
            }
            assert!(family.iter().all(|f| f.in_level_space(k)));
            let expected = 1 + (1..=k).map(|i| braidfan::lattice::binomial(d, i) as usize).sum::<usize>();
            assert_eq!(span_dimension(&family).unwrap(), expected, "d = {d}, k = {k}");
        }
    }
}

#[test]
fn hc_and_positive_part() {
    let domain = Interval::full(3);
    let f = SetFn::from_fn(domain, |s| match s.bits() {
        0b001 => int(2),
        0b010 => int(-1),
        _ => int(0),
    });
    assert!(f.in_hc(), "incomparable sets may carry opposite signs");
    let f = SetFn::from_fn(domain, |s| match s.bits() {
        0b001 => int(2),
        0b011 => int(-1),
        _ => int(0),
    });
    assert_eq!(f.hc_violation(), Some((Subset::from_bits(0b001), Subset::from_bits(0b011))));
    let g = SetFn::from_fn(domain, |s| match s.bits() {
        0b001 => int(1),
        0b010 | 0b100 => int(-1),
        _ => int(0),
    });
    assert!(g.in_hc());
    let plus = g.positive_part();
    assert_eq!(plus.supports().support, vec![Subset::from_bits(0b001)]);
}
