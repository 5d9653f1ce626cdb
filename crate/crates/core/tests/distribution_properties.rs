use std::collections::BTreeMap;

use mmphf_lab::harddist::{
    enumerate_distribution, monte_carlo_success, outcome_count, sample, success_probability, verify_trace,
    window_geometry, SamplerParams, ThresholdAdversary, ViolationKind,
};
use mmphf_lab::rational::{from_counts, Rational};
use mmphf_lab::{Caps, Error};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn caps() -> Caps {
    Caps::default()
}

fn params(m: usize, k: u64, s0: u64) -> SamplerParams {
    SamplerParams::new(m, k, BigUint::from(s0)).unwrap()
}

fn generalized_settings() -> Vec<SamplerParams> {
    let mut out = Vec::new();
    for m in 1..=4usize {
        for k in 2..=6u64 {
            let floor = k.pow(m as u32 + 1);
            if floor > 8000 {
                continue;
            }
            out.push(params(m, k, floor + (m as u64 * 7 + k) % 13));
        }
    }
    out.truncate(20);
    out
}

/// Re-derives every structural fact of a trace from its raw steps.
fn check_by_hand(p: &SamplerParams, seed: u64) {
    let t = sample(p, seed).unwrap();
    assert_eq!(t.iterations.len(), p.m);
    let (mut x, mut s) = (BigUint::zero(), p.s0.clone());
    for (idx, step) in t.iterations.iter().enumerate() {
        let i = idx + 1;
        assert!(step.y >= BigUint::one() && step.y <= BigUint::one() << s.to_usize().unwrap());
        assert!(step.z >= 1 && step.z < p.k);
        assert_eq!(step.x, &x + &step.y);
        let dec = BigUint::from(p.k).pow((p.m - i + 1) as u32) * step.z;
        assert!(dec <= s);
        assert_eq!(step.s, &s - &dec);
        x = step.x.clone();
        s = step.s.clone();
    }
}

#[test]
fn traces_are_clean_at_generalized_settings() {
    let settings = generalized_settings();
    assert_eq!(settings.len(), 20);
    for p in &settings {
        for seed in 0..200 {
            let check = verify_trace(&sample(p, seed).unwrap(), p);
            assert!(check.ok, "{p:?} seed {seed}: {:?}", check.violations);
            if seed < 20 {
                check_by_hand(p, seed);
            }
        }
    }
}

#[test]
fn sampling_is_deterministic_in_the_seed() {
    let p = SamplerParams::default_constants(2).unwrap();
    assert_eq!(sample(&p, 42).unwrap(), sample(&p, 42).unwrap());
    assert_ne!(sample(&p, 42).unwrap(), sample(&p, 43).unwrap());
    let f = |e: &BigUint| if e.bits() < 100 { 1 } else { 2 };
    assert_eq!(
        monte_carlo_success(&p, &f, 500, 3).unwrap(),
        monte_carlo_success(&p, &f, 500, 3).unwrap()
    );
}

#[test]
fn tampered_traces_are_flagged() {
    let p = params(2, 3, 27);
    let mut t = sample(&p, 1).unwrap();
    t.iterations[1].x += 1u32;
    let check = verify_trace(&t, &p);
    assert!(!check.ok);
    assert!(check.violations.iter().any(|v| v.kind == ViolationKind::Consistency));

    let mut t = sample(&p, 2).unwrap();
    t.iterations[0].z = p.k;
    assert!(!verify_trace(&t, &p).ok);
}

#[test]
fn window_ladder_has_constant_ratio() {
    let p = params(3, 3, 81);
    let g = window_geometry(&p, 2, &BigUint::from(40u32)).unwrap();
    let widths = g.widths().unwrap();
    assert_eq!(widths[0], BigUint::one() << 40);
    for w in widths.windows(2) {
        assert_eq!(&w[0] / &w[1], g.ratio().unwrap());
        assert_eq!(&w[0] % &w[1], BigUint::zero());
    }
    assert!(matches!(
        window_geometry(&p, 2, &BigUint::from(26u32)),
        Err(Error::ExponentUnderflow(_))
    ));
}

#[test]
fn enumerated_laws_are_normalized_with_uniform_first_marginal() {
    for p in [params(1, 2, 4), params(1, 3, 9), params(2, 2, 8), params(2, 2, 9), params(2, 2, 10)] {
        let d = enumerate_distribution(&p, &caps()).unwrap();
        assert_eq!(d.total(), Rational::one());
        let s0 = p.s0.to_u32().unwrap();
        let marginal = d.marginal(1);
        assert_eq!(marginal.len(), 1 << s0);
        let expected = from_counts(1, 1 << s0);
        for (x, mass) in marginal {
            assert!((1..=1u64 << s0).contains(&x));
            assert_eq!(mass, expected);
        }
    }
}

#[test]
fn second_coordinate_is_uniform_on_its_window() {
    // With k = 2 every Z equals 1, so s_1 = S0 - 4 and Win_2 = [x_1 + 1, x_1 + 2^{s_1}].
    for s0 in [8u64, 9, 10] {
        let p = params(2, 2, s0);
        let d = enumerate_distribution(&p, &caps()).unwrap();
        let width = 1u64 << (s0 - 4);
        let mut by_first: BTreeMap<u64, Vec<(u64, Rational)>> = BTreeMap::new();
        for (t, mass) in d.entries() {
            by_first.entry(t[0]).or_default().push((t[1], mass.clone()));
        }
        for (x1, rows) in by_first {
            let total: Rational = rows.iter().map(|(_, m)| m).sum();
            let seen: Vec<u64> = rows.iter().map(|(x2, _)| *x2).collect();
            assert_eq!(seen, (x1 + 1..=x1 + width).collect::<Vec<_>>());
            for (_, mass) in rows {
                assert_eq!(mass / &total, from_counts(1, width));
            }
        }
    }
}

#[test]
fn outcome_count_matches_enumeration_size() {
    let p = params(2, 2, 8);
    assert_eq!(outcome_count(&p), BigUint::from(256u32 * 16));
    assert!(matches!(
        enumerate_distribution(&params(2, 2, 8), &Caps { max_outcomes: 100, ..caps() }),
        Err(Error::CapExceeded { .. })
    ));
}

#[test]
fn threshold_adversary_is_exact_on_the_small_instance() {
    let p = params(2, 2, 8);
    let d = enumerate_distribution(&p, &caps()).unwrap();
    let f = ThresholdAdversary::along_unit_ladder(&p).unwrap();
    assert_eq!(f.cuts, vec![BigUint::from(256u32)]);
    assert_eq!(success_probability(&d, &f), from_counts(17, 512));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn swapped_labelings_have_disjoint_success(bits in proptest::collection::vec(any::<bool>(), 272)) {
        let d = enumerate_distribution(&params(2, 2, 8), &caps()).unwrap();
        prop_assert_eq!(d.universe(), 272);
        let label = |e: &BigUint, swap: bool| {
            let b = bits[(e.to_u64().unwrap() - 1) as usize] ^ swap;
            if b { 2 } else { 1 }
        };
        let a = success_probability(&d, &|e: &BigUint| label(e, false));
        let b = success_probability(&d, &|e: &BigUint| label(e, true));
        prop_assert!(a + b <= Rational::one());
    }
}

#[test]
fn small_instance_success_matches_direct_count() {
    // X_1 uniform on [1, 256]; X_2 uniform on the next 16 values. The
    // labeling succeeds exactly when X_2 lands above 256.
    let mut hits = 0u64;
    for x1 in 1..=256u64 {
        hits += (x1 + 1..=x1 + 16).filter(|&x2| x2 > 256).count() as u64;
    }
    let oracle = from_counts(hits, 256 * 16);
    let d = enumerate_distribution(&params(2, 2, 8), &caps()).unwrap();
    let f = |e: &BigUint| if *e <= BigUint::from(256u32) { 1 } else { 2 };
    assert_eq!(success_probability(&d, &f), oracle);
    assert_eq!(oracle, from_counts(17, 512));
}
