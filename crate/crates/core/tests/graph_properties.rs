use std::collections::BTreeSet;

use mmphf_lab::graphs::{
    adjacent, build_graph, independent_set_of, maximal_independent_sets, maximal_sets_via_labels, Graph, GraphSpec,
    LabelFunction, Vertex,
};
use mmphf_lab::Caps;
use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;

fn caps() -> Caps {
    Caps::default()
}

/// Maximal independent sets by scanning every subset.
fn brute_force_maximal(g: &Graph) -> BTreeSet<Vec<usize>> {
    let n = g.order();
    assert!(n <= 16);
    let independent = |mask: u32| {
        g.edges()
            .iter()
            .all(|&(a, b)| mask >> a & 1 == 0 || mask >> b & 1 == 0)
    };
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        if !independent(mask) {
            continue;
        }
        let maximal = (0..n).all(|v| mask >> v & 1 == 1 || !independent(mask | 1 << v));
        if maximal {
            out.insert((0..n).filter(|&v| mask >> v & 1 == 1).collect());
        }
    }
    out
}

fn arb_small_spec() -> impl Strategy<Value = GraphSpec> {
    prop_oneof![
        (1usize..=3, 0u64..=4).prop_map(|(m, extra)| GraphSpec::conflict(m, m as u64 + extra).unwrap()),
        (1usize..=3, 0u64..=4, 0u64..1000)
            .prop_map(|(m, extra, off)| GraphSpec::offset_conflict(m, BigUint::from(m as u64 + extra), off.into()).unwrap()),
        (1usize..=3, 1u64..=4).prop_map(|(n, extra)| GraphSpec::shift(n, n as u64 + extra).unwrap()),
        arb_numbered(7),
    ]
}

fn arb_numbered(max_n: usize) -> impl Strategy<Value = GraphSpec> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), n * (n - 1) / 2)))
        .prop_map(|(n, bits)| {
            let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
            let edges: Vec<_> = pairs.zip(bits).filter(|(_, keep)| *keep).map(|(e, _)| e).collect();
            GraphSpec::numbered(n, &edges).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_symmetric_and_irreflexive(spec in arb_small_spec()) {
        let vs = spec.vertices(&caps()).unwrap();
        let g = build_graph(&spec, &caps()).unwrap();
        for (a, v) in vs.iter().enumerate() {
            prop_assert!(!adjacent(&spec, v, v).unwrap());
            for (b, w) in vs.iter().enumerate() {
                let vw = adjacent(&spec, v, w).unwrap();
                prop_assert_eq!(vw, adjacent(&spec, w, v).unwrap());
                prop_assert_eq!(vw, g.is_adjacent(a, b));
            }
        }
    }

    #[test]
    fn maximal_sets_match_subset_scan(spec in arb_numbered(12)) {
        let g = build_graph(&spec, &caps()).unwrap();
        let fast: BTreeSet<Vec<usize>> = g.maximal_independent_sets(&caps()).unwrap().into_iter().collect();
        prop_assert_eq!(fast, brute_force_maximal(&g));
    }

    #[test]
    fn offset_conflict_label_route_matches_generic(m in 1usize..=3, extra in 0u64..=3, off in 0u64..50) {
        let spec = GraphSpec::offset_conflict(m, BigUint::from(m as u64 + extra), off.into()).unwrap();
        let g = build_graph(&spec, &caps()).unwrap();
        let generic: BTreeSet<_> = g.maximal_independent_sets(&caps()).unwrap().into_iter().collect();
        let labels: BTreeSet<_> = maximal_sets_via_labels(&spec, &g, &caps()).unwrap().into_iter().collect();
        prop_assert_eq!(generic, labels);
    }

    #[test]
    fn dimacs_round_trip(spec in arb_numbered(9)) {
        let g = build_graph(&spec, &caps()).unwrap();
        let back = Graph::from_dimacs(&g.to_dimacs()).unwrap();
        prop_assert_eq!(back.order(), g.order());
        prop_assert_eq!(back.edges(), g.edges());
    }
}

#[test]
fn every_label_class_is_independent_up_to_3_pow_8_functions() {
    let mut total = 0u64;
    for m in 1usize..=4 {
        for width in m as u64.. {
            if (m as u64).pow(width as u32) > 3u64.pow(8) {
                break;
            }
            let spec = GraphSpec::conflict(m, width).unwrap();
            let g = build_graph(&spec, &caps()).unwrap();
            for f in LabelFunction::all(m, BigUint::one(), width as usize, &caps()).unwrap() {
                let set: Vec<usize> = independent_set_of(&f, &spec, &caps())
                    .unwrap()
                    .iter()
                    .map(|v| g.index_of(v).unwrap())
                    .collect();
                assert!(g.is_independent(&set), "m={m} M={width} f={:?}", f.labels());
                total += 1;
            }
            if m == 1 {
                break;
            }
        }
    }
    assert!(total > 6561);
}

#[test]
fn every_maximal_set_comes_from_a_label_function() {
    for width in 2..=6u64 {
        let spec = GraphSpec::conflict(2, width).unwrap();
        let from_labels: BTreeSet<Vec<Vertex>> = LabelFunction::all(2, BigUint::one(), width as usize, &caps())
            .unwrap()
            .map(|f| independent_set_of(&f, &spec, &caps()).unwrap())
            .collect();
        for set in maximal_independent_sets(&spec, &caps()).unwrap() {
            assert!(from_labels.contains(&set), "M={width}: {set:?}");
        }
    }
}

#[test]
fn shift_edges_are_conflict_edges() {
    for n in 2..=3usize {
        for u in n as u64 + 1..=9 {
            let shift = GraphSpec::shift(n, u).unwrap();
            let conflict = GraphSpec::conflict(n, u).unwrap();
            let g = build_graph(&shift, &caps()).unwrap();
            assert!(g.edge_count() > 0);
            for &(a, b) in g.edges() {
                assert!(adjacent(&conflict, &g.vertices()[a], &g.vertices()[b]).unwrap());
            }
        }
    }
}

#[test]
fn single_element_shift_graph_is_not_a_conflict_subgraph() {
    // With one-element tuples the conflict graph has no edges at all.
    let shift = build_graph(&GraphSpec::shift(1, 4).unwrap(), &caps()).unwrap();
    let conflict = build_graph(&GraphSpec::conflict(1, 4).unwrap(), &caps()).unwrap();
    assert!(shift.edge_count() > 0);
    assert_eq!(conflict.edge_count(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_independent_sets_are_products(a in arb_numbered(5), b in arb_numbered(5)) {
        let ga = build_graph(&a, &caps()).unwrap();
        let gb = build_graph(&b, &caps()).unwrap();
        let gp = build_graph(&GraphSpec::product(a, b), &caps()).unwrap();
        prop_assert_eq!(gp.order(), ga.order() * gb.order());
        let nb = gb.order();
        let mut expected = BTreeSet::new();
        for s1 in ga.maximal_independent_sets(&caps()).unwrap() {
            for s2 in gb.maximal_independent_sets(&caps()).unwrap() {
                let mut set: Vec<usize> = s1.iter().flat_map(|&x| s2.iter().map(move |&y| x * nb + y)).collect();
                set.sort_unstable();
                expected.insert(set);
            }
        }
        let found: BTreeSet<Vec<usize>> = if gp.order() <= 16 {
            brute_force_maximal(&gp)
        } else {
            gp.maximal_independent_sets(&caps()).unwrap().into_iter().collect()
        };
        prop_assert_eq!(found, expected);
        // Two product vertices are compatible iff both projections are, so
        // every independent set sits inside the product of its projections.
        for i in 0..gp.order() {
            for j in 0..gp.order() {
                let (a, b) = ((i / nb, i % nb), (j / nb, j % nb));
                let either = ga.is_adjacent(a.0, b.0) || gb.is_adjacent(a.1, b.1);
                prop_assert_eq!(gp.is_adjacent(i, j), either);
            }
        }
        for (i, v) in gp.vertices().iter().enumerate() {
            let Vertex::Pair(x, y) = v else { panic!("product vertex {v} is not a pair") };
            prop_assert_eq!(&ga.vertices()[i / nb], x.as_ref());
            prop_assert_eq!(&gb.vertices()[i % nb], y.as_ref());
        }
    }
}

#[test]
fn oversized_enumeration_is_rejected() {
    let spec = GraphSpec::conflict(4, 100).unwrap();
    assert!(build_graph(&spec, &caps()).is_err());
}
