use std::collections::HashSet;

use proptest::prelude::*;

use cayley_srg::arith::{divisors, gcd};
use cayley_srg::constructions::{
    additive_connection, build_halving_sets, catalog_params, conic_partition_m3, elliptic_halving,
    hyperbolic_halving, hyperbolic_lift, partition_from_x, ConnectionSet, Geometry, Halving, PartitionSpec, Side,
};
use cayley_srg::cyclotomy::IndexSet;
use cayley_srg::verify::{dense_check, exact_spectrum, srg_verify};
use cayley_srg::{build_field, Error, FieldCtx};

fn f81() -> FieldCtx {
    build_field(3, 4, None).unwrap()
}

fn f9() -> FieldCtx {
    build_field(3, 2, None).unwrap()
}

fn index_set() -> impl Strategy<Value = IndexSet> {
    (1u64..60).prop_flat_map(|m| proptest::collection::vec(0..m, 0..m as usize).prop_map(move |r| IndexSet::new(m, r)))
}

/// A divisor M of `order` and a subset of Z_M.
fn classes_of(order: u64) -> impl Strategy<Value = IndexSet> {
    let ds: Vec<u64> = divisors(order).into_iter().filter(|&d| d > 1).collect();
    proptest::sample::select(ds)
        .prop_flat_map(|m| proptest::collection::vec(any::<bool>(), m as usize))
        .prop_map(|mask| {
            let m = mask.len() as u64;
            IndexSet::new(m, (0..m).filter(|&t| mask[t as usize]))
        })
}

/// An odd N and a partition (P1, P2) of a subset of Z_N.
fn partition(side: Side) -> impl Strategy<Value = PartitionSpec> {
    (1u64..20).prop_flat_map(move |h| {
        let n = 2 * h + 1;
        proptest::collection::vec(0u8..3, n as usize).prop_map(move |tags| {
            let part = |tag: u8| IndexSet::new(n, (0..n).filter(|&t| tags[t as usize] == tag));
            PartitionSpec::new(side, part(1), part(2)).unwrap()
        })
    })
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Subdiff), Just(Side::Complement)]
}

fn negate(ctx: &FieldCtx, set: &ConnectionSet, x: u64) -> u64 {
    if set.is_product() {
        let width = ctx.order() + 1;
        ctx.neg_packed(x / width) * width + ctx.neg_packed(x % width)
    } else {
        ctx.neg_packed(x)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_set_algebra(a in index_set(), raw in proptest::collection::vec(0u64..1000, 0..40), t in -200i64..200) {
        let m = a.modulus();
        let b = IndexSet::new(m, raw);
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.union(&b).len() + a.intersection(&b).len(), a.len() + b.len());
        prop_assert_eq!(a.difference(&b), a.intersection(&b.complement()));
        prop_assert_eq!(a.is_disjoint(&b), a.intersection(&b).is_empty());
        prop_assert_eq!(a.translate(t).translate(-t), a.clone());
        for u in (1..m).filter(|&u| gcd(u, m) == 1).take(3) {
            prop_assert_eq!(a.scale(u).divide(u), Some(a.clone()));
        }
        prop_assert_eq!(a.lift(3 * m).reduce(m), a.clone());
        prop_assert_eq!(a.lift(3 * m).len(), 3 * a.len());
    }

    #[test]
    fn halving_round_trip(side in side(), part in partition(Side::Subdiff)) {
        let part = PartitionSpec::new(side, part.p1.clone(), part.p2.clone()).unwrap();
        let n = part.n();
        let sets = build_halving_sets(&part).unwrap();
        let union = part.union();
        prop_assert_eq!(sets.x.len(), union.len());
        prop_assert_eq!(sets.y.len(), 2 * union.len());
        prop_assert_eq!(sets.y.reduce(n), union.clone());
        prop_assert_eq!(sets.x.reduce(n), union.divide(2).unwrap());
        prop_assert_eq!(partition_from_x(&sets.x, side).unwrap(), part.clone());
        let swapped = build_halving_sets(&part.swapped()).unwrap();
        prop_assert_eq!(swapped.x, sets.x.translate(n as i64));
    }

    #[test]
    fn additive_cardinality(s in classes_of(80)) {
        let ctx = f81();
        let set = additive_connection(&ctx, s.clone()).unwrap();
        let expected = s.len() as u128 * 80 / s.modulus() as u128;
        prop_assert_eq!(set.cardinality(), expected);
        prop_assert_eq!(set.elements(&ctx).unwrap().len() as u128, expected);
    }

    #[test]
    fn product_cardinality(s in classes_of(8), axes in any::<bool>()) {
        let ctx = f9();
        let set = hyperbolic_lift(&ctx, s.clone(), axes).unwrap();
        let expected = 64 * s.len() as u128 / s.modulus() as u128 + if axes { 16 } else { 0 };
        prop_assert_eq!(set.cardinality(), expected);
        prop_assert_eq!(set.elements(&ctx).unwrap().len() as u128, expected);
    }

    #[test]
    fn halved_cardinality(
        tags5 in proptest::collection::vec(0u8..3, 5),
        tags13 in proptest::collection::vec(0u8..3, 13),
        side in side(),
    ) {
        let sets_for = |tags: &[u8]| {
            let n = tags.len() as u64;
            let part = |tag: u8| IndexSet::new(n, (0..n).filter(|&t| tags[t as usize] == tag));
            build_halving_sets(&PartitionSpec::new(side, part(1), part(2)).unwrap()).unwrap()
        };
        let ctx = f81();
        let sets = sets_for(&tags5);
        let u = sets.partition.union().len() as u128;
        let h = hyperbolic_halving(&ctx, &sets, false).unwrap();
        prop_assert_eq!(h.cardinality(), 80 * 80 * u / 10);
        prop_assert_eq!(h.elements(&ctx).unwrap().len() as u128, 80 * 80 * u / 10);

        let big = build_field(3, 6, None).unwrap();
        let sets = sets_for(&tags13);
        let u = sets.partition.union().len() as u128;
        let e = elliptic_halving(&big, &sets).unwrap();
        prop_assert_eq!(e.cardinality(), 728 * u / 26);
        prop_assert_eq!(e.elements(&big).unwrap().len() as u128, 728 * u / 26);
    }

    #[test]
    fn symmetry_matches_negation(s in classes_of(80)) {
        let ctx = f81();
        let set = additive_connection(&ctx, s).unwrap();
        let elems: HashSet<u64> = set.elements(&ctx).unwrap().into_iter().collect();
        let closed = elems.iter().all(|&x| elems.contains(&negate(&ctx, &set, x)));
        prop_assert_eq!(set.is_symmetric(), closed);
    }

    #[test]
    fn product_symmetry_matches_negation(s in classes_of(8), axes in any::<bool>()) {
        let ctx = f9();
        let set = hyperbolic_lift(&ctx, s, axes).unwrap();
        let elems: HashSet<u64> = set.elements(&ctx).unwrap().into_iter().collect();
        let closed = elems.iter().all(|&x| elems.contains(&negate(&ctx, &set, x)));
        prop_assert_eq!(set.is_symmetric(), closed);
    }

    #[test]
    fn spectrum_ignores_thread_count(s in classes_of(40), t in classes_of(8), axes in any::<bool>()) {
        let (big, small) = (f81(), f9());
        let a = additive_connection(&big, s).unwrap();
        let h = hyperbolic_lift(&small, t, axes).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                (
                    serde_json::to_string(&exact_spectrum(&big, &a).unwrap()).unwrap(),
                    serde_json::to_string(&exact_spectrum(&small, &h).unwrap()).unwrap(),
                )
            })
        };
        prop_assert_eq!(run(1), run(3));
    }

    #[test]
    fn catalog_feasibility(
        geometry in prop_oneof![Just(Geometry::Elliptic), Just(Geometry::Hyperbolic)],
        half in proptest::option::of(side()),
        p in proptest::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
        f in 1u32..12,
        n in 2u64..50,
        i_size in 0u64..50,
    ) {
        let halving = half.map_or(Halving::Full, Halving::Half);
        if let Ok(params) = catalog_params(geometry, halving, p, f, n, i_size.min(n)) {
            let lhs = &params.k * (&params.k - &params.lambda - 1u32);
            let rhs = (&params.v - &params.k - 1u32) * &params.mu;
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn dense_agrees_with_spectrum(s in classes_of(40), t in classes_of(8), axes in any::<bool>()) {
        let (big, small) = (f81(), f9());
        for (ctx, set) in [
            (&big, additive_connection(&big, s.clone()).unwrap()),
            (&small, hyperbolic_lift(&small, t.clone(), axes).unwrap()),
        ] {
            let dense = dense_check(ctx, &set).unwrap();
            match srg_verify(ctx, &set) {
                Ok(ver) => {
                    prop_assert_eq!(dense.degree, Some(ver.params.k));
                    prop_assert_eq!(dense.lambda, Some(ver.params.lambda));
                    prop_assert_eq!(dense.mu, Some(ver.params.mu));
                    let [t1, t2] = ver.params.theta;
                    let [m1, m2] = ver.params.multiplicities;
                    prop_assert_eq!(ver.params.k as i64 + m1 as i64 * t1 + m2 as i64 * t2, 0);
                }
                Err(Error::NotSymmetric(_)) => prop_assert!(!set.is_symmetric()),
                Err(_) => prop_assert!(dense.degree.is_none() || dense.lambda.is_none() || dense.mu.is_none()),
            }
        }
    }
}

#[test]
fn moving_one_residue_breaks_the_conic_halving() {
    let big = build_field(3, 6, None).unwrap();
    let small = big.subfield(3).unwrap().ctx;
    let y = conic_partition_m3(&small, 3).unwrap().halving.y;
    for from in y.iter() {
        for to in (0..52).filter(|&t| !y.contains(t)) {
            let moved = IndexSet::new(52, y.iter().filter(|&t| t != from).chain([to]));
            let set = additive_connection(&big, moved).unwrap();
            assert!(
                matches!(srg_verify(&big, &set), Err(Error::NotTwoValued(_))),
                "moving {from} to {to} kept the graph strongly regular"
            );
        }
    }
}
