mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sorites_core::pretopology::{
    chain_in_cover, connectivity_matrix, enumerate_minimal_covers, v_connected, validate_space,
    ConnectivityVerdict, FrechetSpace,
};
use sorites_core::system::{
    assert_no_sorites, check_tolerance, derive_soritical_contradiction, find_con_witness,
    ToleranceReport, Verdict,
};
use sorites_core::SoritesError;

const CAP: u64 = 1 << 20;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn minimal_covers_decide_connectedness_over_all_covers(seed in any::<u64>()) {
        let space = common::random_space(&mut rng(seed), 4, 2);
        for x in 0..space.len() {
            for y in 0..space.len() {
                let fast = v_connected(&space, x, y, CAP).unwrap().is_connected();
                prop_assert_eq!(fast, common::brute_v_connected(&space, x, y), "pair ({}, {})", x, y);
            }
        }
    }

    #[test]
    fn connectedness_is_symmetric_and_matches_the_matrix(seed in any::<u64>()) {
        let space = common::random_space(&mut rng(seed), 6, 3);
        let m = connectivity_matrix(&space, CAP).unwrap();
        for x in 0..space.len() {
            prop_assert!(m.is_connected(x, x));
            for y in 0..space.len() {
                let v = v_connected(&space, x, y, CAP).unwrap();
                prop_assert_eq!(v.is_connected(), m.is_connected(x, y));
                prop_assert_eq!(m.is_connected(x, y), m.is_connected(y, x));
                match v {
                    ConnectivityVerdict::Connected { sample, .. } => prop_assert!(sample.verify(&space).is_ok()),
                    ConnectivityVerdict::Disconnected { witness, .. } => {
                        prop_assert!(witness.check(&space).is_ok());
                        prop_assert!(chain_in_cover(&space, &witness, x, y).unwrap().is_none());
                    }
                }
            }
        }
    }

    #[test]
    fn chains_are_shortest(seed in any::<u64>()) {
        // Any chain found must be no longer than the BFS distance recomputed
        // from scratch over cover vicinities.
        let space = common::random_space(&mut rng(seed), 6, 2);
        for cover in enumerate_minimal_covers(&space, CAP).unwrap() {
            let sets: Vec<_> = (0..space.len()).map(|p| cover.member(&space, p).members().to_vec()).collect();
            for x in 0..space.len() {
                for y in 0..space.len() {
                    let Some(chain) = chain_in_cover(&space, &cover, x, y).unwrap() else { continue };
                    let mut dist = vec![usize::MAX; sets.len()];
                    let mut frontier: Vec<usize> = (0..sets.len()).filter(|&i| sets[i].contains(&x)).collect();
                    for &i in &frontier { dist[i] = 1; }
                    let mut d = 1;
                    while !frontier.is_empty() {
                        d += 1;
                        let mut next = Vec::new();
                        for &i in &frontier {
                            for j in 0..sets.len() {
                                if dist[j] == usize::MAX && sets[i].iter().any(|m| sets[j].contains(m)) {
                                    dist[j] = d;
                                    next.push(j);
                                }
                            }
                        }
                        frontier = next;
                    }
                    let best = (0..sets.len()).filter(|&i| sets[i].contains(&y)).map(|i| dist[i]).min().unwrap();
                    prop_assert_eq!(chain.len(), best);
                }
            }
        }
    }

    #[test]
    fn tolerance_and_connectedness_never_hold_together(seed in any::<u64>()) {
        let sys = common::random_system(&mut rng(seed), 7, 3, 3);
        let tol = check_tolerance(&sys);
        let con = find_con_witness(&sys, CAP).unwrap();
        prop_assert!(!(tol.holds && con.is_some()));
        match assert_no_sorites(&sys, CAP).unwrap() {
            Verdict::ToleranceFails { points, con_witness } => {
                prop_assert!(!tol.holds && con == Some(con_witness));
                prop_assert_eq!(points, tol.failing_points());
            }
            Verdict::ConFails => prop_assert!(con.is_none()),
            Verdict::BothFail { points } => {
                prop_assert!(!tol.holds && con.is_none() && !points.is_empty());
            }
        }
        if let Some(cover) = tol.tolerant_cover {
            for p in 0..sys.space().len() {
                prop_assert!(sys.is_constant_on(cover.member(sys.space(), p)));
            }
        }
    }

    #[test]
    fn asserted_covers_break_at_a_violating_link(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = common::random_system(&mut r, 7, 3, 3);
        let space = sys.space();
        let m = connectivity_matrix(space, CAP).unwrap();
        let covers: Vec<_> = enumerate_minimal_covers(space, CAP).unwrap().collect();
        let cover = covers[seed as usize % covers.len()].clone();
        let report = ToleranceReport::asserted(cover);
        for x in 0..space.len() {
            for y in 0..space.len() {
                let result = derive_soritical_contradiction(&sys, &report, x, y);
                if sys.response_ix(x) == sys.response_ix(y) {
                    prop_assert!(matches!(result, Err(SoritesError::Precondition(_))));
                } else if m.is_connected(x, y) {
                    let chain = result.unwrap();
                    prop_assert!(chain.verify(&sys).is_ok());
                    let i = chain.violating_link.unwrap();
                    prop_assert_ne!(sys.response_ix(chain.points[i]), sys.response_ix(chain.points[i + 1]));
                    prop_assert!(!sys.is_constant_on(&chain.flagged.unwrap().vicinity));
                }
            }
        }
    }

    #[test]
    fn space_spec_round_trip(seed in any::<u64>()) {
        let space = common::random_space(&mut rng(seed), 8, 3);
        let spec = space.to_spec();
        prop_assert!(validate_space(&spec).is_empty());
        prop_assert_eq!(FrechetSpace::from_spec(&spec).unwrap(), space);
    }
}

#[test]
fn enumeration_respects_the_budget() {
    let space = FrechetSpace::neighbor_grid(3)
        .with_vicinity(0, vec![0])
        .unwrap()
        .with_vicinity(1, vec![1])
        .unwrap();
    assert_eq!(space.cover_count(), 4);
    assert_eq!(enumerate_minimal_covers(&space, 4).unwrap().count(), 4);
    assert!(matches!(
        enumerate_minimal_covers(&space, 3),
        Err(SoritesError::Budget { product: 4, cap: 3 })
    ));
}
