use braidfan::network::{
    apply_maxout_layer, build_max_network, certify, depth_bound, Affine, BoundRule, LayerSpec,
    NetworkPlan,
};
use braidfan::rational::{int, ratio};
use braidfan::setfn::span_dimension;
use braidfan::transform::{eval_direct, phi};
use braidfan::{Error, Interval, PwlExpr, RationalPoint, SetFn, Subset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> RationalPoint {
    RationalPoint(
        (0..d)
            .map(|_| ratio(rng.random_range(-4..=4), rng.random_range(1..=3)))
            .collect(),
    )
}

#[test]
fn max_networks_exist_iff_capacity_suffices() {
    let d = 5;
    for ranks in [vec![2], vec![2, 2], vec![3, 2], vec![2, 2, 2]] {
        let capacity: usize = ranks.iter().product();
        for bits in 1u32..1 << d {
            let m = Subset::from_bits(bits);
            match build_max_network(d, m, &ranks) {
                Ok(plan) => {
                    assert!(m.len() <= capacity);
                    assert_eq!(plan.ranks(), ranks);
                    let f = plan.compose().unwrap();
                    assert_eq!(f, phi(&PwlExpr::sigma(d, m).unwrap()));
                    assert_eq!(f.min_level().k_min, m.len());
                }
                Err(Error::Capacity { .. }) => assert!(m.len() > capacity, "{m} with ranks {ranks:?}"),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
}

#[test]
fn forward_pass_agrees_with_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = 6;
    let m = Subset::from_elements([1, 3, 4, 6]).unwrap();
    let plan = build_max_network(d, m, &[2, 2]).unwrap();
    let f = plan.compose().unwrap();
    let expr = PwlExpr::sigma(d, m).unwrap();
    for _ in 0..200 {
        let x = random_point(&mut rng, d);
        let y = plan.run(&x).unwrap();
        assert_eq!(y, eval_direct(&expr, &x).unwrap());
        assert_eq!(y, braidfan::transform::evaluate_setfn(&f, &x).unwrap());
    }
}

#[test]
fn plans_survive_json() {
    let plan = build_max_network(4, Subset::full(4), &[2, 2]).unwrap();
    let text = serde_json::to_string(&plan).unwrap();
    let back: NetworkPlan = serde_json::from_str(&text).unwrap();
    assert_eq!(back, plan);
}

#[test]
fn non_conforming_neuron_is_rejected() {
    let domain = Interval::full(2);
    let x = |i: usize| SetFn::from_fn(domain, move |s| int(s.contains(i) as i64));
    let inputs = [x(1), x(2)];
    // max{x_1, 1/2} breaks along x_1 = 1/2, which is not a braid hyperplane.
    let layer = LayerSpec {
        rank: 2,
        neurons: vec![vec![Affine::select(2, 0), Affine::constant(2, ratio(1, 2))]],
    };
    assert!(matches!(
        apply_maxout_layer(&inputs, &layer),
        Err(Error::NotConforming { .. })
    ));
}

#[test]
fn shifting_preactivations_keeps_level() {
    // Adding the same constant to every preactivation shifts the output and
    // leaves the level unchanged.
    let plan = build_max_network(4, Subset::from_bits(0b0111), &[3]).unwrap();
    let base = plan.compose().unwrap();
    let mut shifted = plan.clone();
    for neuron in &mut shifted.layers[0].neurons {
        for pre in neuron {
            pre.constant += ratio(7, 3);
        }
    }
    let g = shifted.compose().unwrap();
    assert_eq!(g, base.shift(&ratio(7, 3)));
    assert_eq!(g.min_level(), base.min_level());
}

#[test]
fn one_layer_images_span_level_two() {
    // max of two conforming affine functions of the inputs, at d = 3 and 4.
    for d in [3usize, 4] {
        let domain = Interval::full(d);
        let coords: Vec<SetFn> = (1..=d)
            .map(|i| SetFn::from_fn(domain, move |s| int(s.contains(i) as i64)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let mut family = Vec::new();
        for _ in 0..4000 {
            let pre = |rng: &mut ChaCha8Rng| Affine {
                coeffs: (0..d).map(|_| int(rng.random_range(-1..=1))).collect(),
                constant: int(rng.random_range(-1..=1)),
            };
            let layer = LayerSpec { rank: 2, neurons: vec![vec![pre(&mut rng), pre(&mut rng)]] };
            if let Ok(out) = apply_maxout_layer(&coords, &layer) {
                assert!(out[0].in_level_space(2));
                family.push(out[0].clone());
            }
        }
        let dim_sf2 = 1 + d + d * (d - 1) / 2;
        assert_eq!(span_dimension(&family).unwrap(), dim_sf2, "d = {d}");
    }
}

#[test]
fn bound_tables() {
    let table = |rule| (1..=3).map(|l| depth_bound(l, rule).unwrap()).collect::<Vec<_>>();
    assert_eq!(table(BoundRule::Closed), [2, 8, 128]);
    assert_eq!(table(BoundRule::Recursive), [2, 6, 42]);
    assert_eq!(table(BoundRule::Exact4), [2, 4, 20]);
    assert!(depth_bound(8, BoundRule::Closed).is_err());
    assert!(depth_bound(9, BoundRule::Recursive).is_err());
}

#[test]
fn certificates_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..300 {
        let d = rng.random_range(2..=7);
        let domain = Interval::full(d);
        let f = SetFn::from_fn(domain, |_| int(rng.random_range(-2..=2)));
        for layers in 1..=2 {
            for rule in [BoundRule::Closed, BoundRule::Recursive, BoundRule::Exact4] {
                let k = depth_bound(layers, rule).unwrap();
                match certify(&f, layers, rule).unwrap() {
                    Some(cert) => {
                        assert!(cert.verify(&f));
                        assert_eq!(cert.depth_bound, k);
                        assert_eq!(cert.upper.difference(cert.lower).len() as u128, k + 1);
                        assert!(!f.in_level_space(k as usize));
                    }
                    None => assert!(f.in_level_space(k.min(d as u128) as usize)),
                }
            }
        }
    }
}

#[test]
fn full_max_needs_three_layers_at_rank_two() {
    let d = 5;
    let target = phi(&PwlExpr::sigma(d, Subset::full(d)).unwrap());
    let cert = certify(&target, 2, BoundRule::Exact4).unwrap().expect("certificate");
    assert_eq!(cert.value, int(-1));
    assert_eq!((cert.lower, cert.upper), (Subset::EMPTY, Subset::full(5)));
    // Three layers of rank 2 do build it.
    assert!(build_max_network(d, Subset::full(d), &[2, 2, 2]).is_ok());
}
