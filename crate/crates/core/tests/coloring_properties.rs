use mmphf_lab::coloring::{
    chi_report, chromatic_number, evaluate_dual_witness, fractional_chromatic_number, verify_coloring, verify_dual,
    verify_primal, DualWitness, Optimality,
};
use mmphf_lab::graphs::{build_graph, Graph, GraphSpec};
use mmphf_lab::rational::{from_counts, ratio, Rational};
use mmphf_lab::{Caps, Error};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn caps() -> Caps {
    Caps::default()
}

fn graph(spec: &GraphSpec) -> Graph {
    build_graph(spec, &caps()).unwrap()
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

/// Whether a proper coloring with `k` colors exists, by plain backtracking.
fn colorable(g: &Graph, k: usize) -> bool {
    fn go(g: &Graph, k: usize, v: usize, colors: &mut Vec<usize>) -> bool {
        if v == g.order() {
            return true;
        }
        for c in 0..k {
            if g.neighbors(v).iter().all(|&w| w >= v || colors[w] != c) {
                colors[v] = c;
                if go(g, k, v + 1, colors) {
                    return true;
                }
            }
        }
        false
    }
    go(g, k, 0, &mut vec![0; g.order()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chromatic_number_matches_backtracking(spec in arb_numbered(8)) {
        let g = graph(&spec);
        let r = chromatic_number(&g, &caps()).unwrap();
        prop_assert!(verify_coloring(&g, &r.coloring));
        prop_assert!(colorable(&g, r.chi));
        prop_assert!(!colorable(&g, r.chi - 1));
        if let Optimality::Clique { vertices } = &r.optimality {
            prop_assert_eq!(vertices.len(), r.chi);
            for (i, &a) in vertices.iter().enumerate() {
                for &b in &vertices[i + 1..] {
                    prop_assert!(g.is_adjacent(a, b));
                }
            }
        }
    }

    #[test]
    fn report_certificates_agree(spec in arb_numbered(8)) {
        let g = graph(&spec);
        let r = chi_report(&g, &caps()).unwrap();
        prop_assert_eq!(verify_primal(&g, &r.primal).unwrap(), r.chi_f.clone());
        prop_assert_eq!(verify_dual(&g, &r.dual, &caps()).unwrap(), r.chi_f.clone());
        prop_assert!(r.chi_f <= Rational::from_integer(r.chi.into()));
        // Any clique and n/alpha are lower bounds.
        let alpha = g.maximal_independent_sets(&caps()).unwrap().iter().map(Vec::len).max().unwrap();
        prop_assert!(from_counts(g.order() as u64, alpha as u64) <= r.chi_f);
    }

    #[test]
    fn product_is_multiplicative(a in arb_numbered(5), b in arb_numbered(5)) {
        let fa = fractional_chromatic_number(&graph(&a), &caps()).unwrap().chi_f;
        let fb = fractional_chromatic_number(&graph(&b), &caps()).unwrap().chi_f;
        let fp = fractional_chromatic_number(&graph(&GraphSpec::product(a, b)), &caps()).unwrap().chi_f;
        prop_assert_eq!(fp, fa * fb);
    }
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> DualWitness {
    let raw: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=20)).collect();
    let raw = if raw.iter().all(|&w| w == 0) { vec![1; n] } else { raw };
    let total: u64 = raw.iter().sum();
    DualWitness {
        weights: raw.iter().map(|&w| from_counts(w, total)).collect(),
    }
}

#[test]
fn dual_witnesses_never_exceed_the_optimum() {
    let specs = [
        GraphSpec::complete(3).unwrap(),
        GraphSpec::cycle(5).unwrap(),
        GraphSpec::cycle(7).unwrap(),
        GraphSpec::conflict(2, 4).unwrap(),
        GraphSpec::conflict(2, 6).unwrap(),
        GraphSpec::conflict(3, 5).unwrap(),
        GraphSpec::shift(2, 7).unwrap(),
        GraphSpec::product(GraphSpec::cycle(5).unwrap(), GraphSpec::complete(2).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in &specs {
        let g = graph(spec);
        let opt = fractional_chromatic_number(&g, &caps()).unwrap();
        for _ in 0..100 {
            let mu = random_distribution(&mut rng, g.order());
            assert!(evaluate_dual_witness(&g, &mu, &caps()).unwrap() <= opt.chi_f);
        }
        let mu = opt.dual.normalized().unwrap();
        assert_eq!(evaluate_dual_witness(&g, &mu, &caps()).unwrap(), opt.chi_f);
    }
}

#[test]
fn unnormalized_witness_is_rejected() {
    let g = graph(&GraphSpec::cycle(5).unwrap());
    let mu = DualWitness { weights: vec![ratio(1, 2); 5] };
    assert!(matches!(evaluate_dual_witness(&g, &mu, &caps()), Err(Error::NotNormalized(_))));
}

#[test]
fn edgeless_graph_has_chi_one() {
    let g = graph(&GraphSpec::edgeless(4).unwrap());
    let r = chi_report(&g, &caps()).unwrap();
    assert_eq!((r.chi, r.chi_f), (1, ratio(1, 1)));
}

#[test]
fn coloring_solver_rejects_large_graphs() {
    let g = graph(&GraphSpec::conflict(2, 17).unwrap());
    assert!(matches!(chromatic_number(&g, &caps()), Err(Error::CapExceeded { .. })));
}

/// Values below were produced by the LP and are frozen only because both
/// certificates verify independently: the primal by covering, the dual by a
/// maximum-weight independent set search.
#[test]
fn certified_values_on_shift_and_conflict_graphs() {
    let cases = [
        (GraphSpec::shift(2, 4).unwrap(), 2, ratio(2, 1)),
        (GraphSpec::shift(2, 5).unwrap(), 3, ratio(5, 2)),
        (GraphSpec::shift(2, 6).unwrap(), 3, ratio(5, 2)),
        (GraphSpec::shift(2, 7).unwrap(), 3, ratio(8, 3)),
        (GraphSpec::shift(2, 8).unwrap(), 3, ratio(11, 4)),
        (GraphSpec::shift(2, 9).unwrap(), 4, ratio(37, 13)),
        (GraphSpec::conflict(2, 5).unwrap(), 3, ratio(5, 2)),
        (GraphSpec::conflict(2, 8).unwrap(), 3, ratio(11, 4)),
    ];
    for (spec, chi, chi_f) in cases {
        let g = graph(&spec);
        let r = chi_report(&g, &caps()).unwrap();
        assert_eq!(verify_primal(&g, &r.primal).unwrap(), r.chi_f);
        assert_eq!(verify_dual(&g, &r.dual, &caps()).unwrap(), r.chi_f);
        assert!(colorable(&g, r.chi) && !colorable(&g, r.chi - 1));
        assert_eq!((r.chi, r.chi_f), (chi, chi_f), "{spec:?}");
    }
}
