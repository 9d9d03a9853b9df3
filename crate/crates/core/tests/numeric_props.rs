mod common;

use num::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sorites_core::comparative::{
    find_comparative_sequence, is_equivalence, make_matcher, number_label, Judgment, Matcher,
    MatcherSpec, TableMatcher,
};
use sorites_core::fuzzy::{implication, negation, strong_conj, weak_conj, TruthValue};
use sorites_core::pretopology::FrechetSpace;
use sorites_core::probabilistic::{
    bernoulli_oracle, check_probabilistic_tolerance, discretize, estimate_p, reduce_mixture,
    validate_zora, wilson_interval, NestedMixture,
};
use sorites_core::threshold::{
    check_monotone_consistency, dyadic, estimate_boundary, exact_gap, stay_below_sequence, Binary,
    Convention, ReplayOracle, RuleOracle, ThresholdRule, UnitStimulus,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn convention() -> impl Strategy<Value = Convention> {
    prop_oneof![Just(Convention::Closed), Just(Convention::Open)]
}

fn truth() -> impl Strategy<Value = TruthValue> {
    (0.0..=1.0f64).prop_map(|v| TruthValue::new(v).unwrap())
}

proptest! {
    #[test]
    fn bisection_brackets_v(v in 0.0..1.0f64, n in 0u32..=52, c in convention()) {
        prop_assume!(v > 0.0);
        let rule = ThresholdRule::with_convention(v, c).unwrap();
        let trace = estimate_boundary(&mut RuleOracle::new(rule), n).unwrap();
        prop_assert_eq!(trace.oracle_calls, u64::from(n));
        prop_assert_eq!(trace.q.len(), n as usize + 1);
        prop_assert!(trace.verify().is_ok());
        let (lo, hi) = trace.bracket();
        prop_assert!(lo <= v && v <= hi);
        prop_assert!(exact_gap(trace.estimate(), v) <= dyadic(n));
    }

    #[test]
    fn replayed_probes_reproduce_the_trace(v in 0.001..1.0f64, n in 1u32..=20) {
        let rule = ThresholdRule::with_convention(v, Convention::Closed).unwrap();
        let live = estimate_boundary(&mut RuleOracle::new(rule), n).unwrap();
        // Record the probes the live run made, then replay them.
        let log: Vec<(f64, Binary)> = live.q.windows(2).enumerate().map(|(k, w)| {
            let x = w[0] + (-(k as f64 + 1.0)).exp2();
            (x, rule.classify(UnitStimulus::new(x).unwrap()))
        }).collect();
        let replayed = estimate_boundary(&mut ReplayOracle::new(log).unwrap(), n).unwrap();
        prop_assert_eq!(live, replayed);
    }

    #[test]
    fn classification_is_monotone(v in 0.0..=1.0f64, c in convention(), xs in prop::collection::vec(0.0..=1.0f64, 1..30)) {
        let Ok(rule) = ThresholdRule::with_convention(v, c) else { return Ok(()) };
        let samples: Vec<_> = xs.iter().map(|&x| {
            let x = UnitStimulus::new(x).unwrap();
            (x, rule.classify(x))
        }).collect();
        prop_assert!(check_monotone_consistency(&samples).is_none());
    }

    #[test]
    fn stay_below_climbs_under_v(v in 0.01..=1.0f64, frac in 0.0..1.0f64, k in 1usize..60) {
        let xs = stay_below_sequence(v, v * frac, k).unwrap();
        let v = BigRational::from_float(v).unwrap();
        prop_assert_eq!(xs.len(), k);
        for w in xs.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        prop_assert!(xs.iter().all(|x| *x < v));
    }

    #[test]
    fn nested_mixtures_reduce_like_their_flattening(seed in any::<u64>()) {
        let mut r = rng(seed);
        let labels = ["r0", "r1", "r2", "r3"];
        let k = r.gen_range(1..=4);
        let inner = (0..k).map(|_| common::random_mixture(&mut r, &labels)).collect();
        let nested = NestedMixture::new(inner, common::random_weights(&mut r, k)).unwrap();
        let flat = nested.flatten();
        let a = nested.reduce();
        let b = reduce_mixture(&flat);
        prop_assert!(a.max_abs_diff(&b) <= 1e-12);
        let total: f64 = a.weights().values().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        // Event-level agreement for every subset of responses.
        for mask in 0u32..16 {
            let event: Vec<&str> = labels.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| *l).collect();
            prop_assert!((flat.event_prob(&event) - b.prob(event.iter().copied())).abs() <= 1e-12);
        }
    }

    #[test]
    fn zora_grids_are_never_tolerant(seed in any::<u64>()) {
        let zg = common::random_zora(&mut rng(seed));
        prop_assert!(validate_zora(&zg).is_empty());
        let space = FrechetSpace::neighbor_grid(zg.grid.len());
        let rep = check_probabilistic_tolerance(&zg, &space, 0.0).unwrap();
        prop_assert!(!rep.holds);
        let d = discretize(&zg);
        prop_assert!(d.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(d[0], Binary::R0);
        prop_assert_eq!(*d.last().unwrap(), Binary::R1);
    }

    #[test]
    fn wilson_interval_holds_the_point_estimate(trials in 1u64..5000, frac in 0.0..=1.0f64) {
        let successes = (trials as f64 * frac).round() as u64;
        let (lo, hi) = wilson_interval(successes, trials);
        let p = successes as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn estimates_are_reproducible(seed in any::<u64>()) {
        let zg = common::random_zora(&mut rng(seed));
        let x = zg.grid[zg.grid.len() / 2];
        let a = estimate_p(&mut bernoulli_oracle(&zg, seed).unwrap(), x, 200).unwrap();
        let b = estimate_p(&mut bernoulli_oracle(&zg, seed).unwrap(), x, 200).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lukasiewicz_laws(p in truth(), q in truth()) {
        prop_assert!(strong_conj(p, q).value() <= weak_conj(p, q).value());
        prop_assert_eq!(weak_conj(p, q), weak_conj(q, p));
        prop_assert_eq!(strong_conj(p, q), strong_conj(q, p));
        prop_assert_eq!(implication(p, q).value() == 1.0, p.value() <= q.value());
        prop_assert!((negation(negation(p)).value() - p.value()).abs() <= 1e-15);
        prop_assert_eq!(weak_conj(p, p), p);
    }

    #[test]
    fn found_sequences_are_soritical_and_shortest(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=7);
        let points: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let j_ = if r.gen_bool(0.6) { Judgment::Same } else { Judgment::Different };
                entries.push((points[i].clone(), points[j].clone(), j_));
            }
        }
        let m = Matcher::Table(TableMatcher::new(entries).unwrap());
        let eq = is_equivalence(&points, &m).unwrap();
        let seq = find_comparative_sequence(&points, &m).unwrap();
        // A soritical sequence exists exactly when "same" fails transitivity.
        prop_assert_eq!(seq.is_some(), !eq.holds());
        if let Some(seq) = seq {
            prop_assert!(seq.verify(&m).is_ok());
            prop_assert!(seq.points.len() >= 3);
            // No three-point sequence was missed when a longer one was returned.
            if seq.points.len() > 3 {
                for a in &points { for b in &points { for c in &points {
                    let three = sorites_core::comparative::ComparativeSequence { points: vec![a.clone(), b.clone(), c.clone()] };
                    prop_assert!(three.verify(&m).is_err());
                }}}
            }
        }
    }

    #[test]
    fn digit_matchers_admit_no_sequence(xs in prop::collection::vec(0.0..1.0f64, 2..12), k in 1u32..8) {
        let m = make_matcher(&MatcherSpec::Digits { k }).unwrap();
        let mut points: Vec<String> = xs.iter().map(|&x| number_label(x)).collect();
        points.sort();
        points.dedup();
        prop_assert!(find_comparative_sequence(&points, &m).unwrap().is_none());
    }

    #[test]
    fn epsilon_chains_on_a_lattice(eps in 0.05..0.5f64, steps in 3usize..10) {
        // Points spaced just under eps apart: neighbours match, ends do not.
        let gap = eps * 0.9;
        let points: Vec<String> = (0..steps).map(|i| number_label(i as f64 * gap)).collect();
        let m = make_matcher(&MatcherSpec::Epsilon { epsilon: eps }).unwrap();
        let seq = find_comparative_sequence(&points, &m).unwrap().unwrap();
        prop_assert_eq!(seq.points.len(), 3);
        prop_assert!(seq.verify(&m).is_ok());
    }
}
