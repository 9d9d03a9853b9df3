//! Random instance generators and brute-force oracles shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use sorites_core::pretopology::FrechetSpace;
use sorites_core::probabilistic::{Distribution, Mixture, ZoraGrid};
use sorites_core::system::ResponseSystem;

/// A random space: each vicinity is its owner plus a random subset.
pub fn random_space(rng: &mut impl Rng, max_points: usize, max_vics: usize) -> FrechetSpace {
    let n = rng.gen_range(1..=max_points);
    let vics = (0..n)
        .map(|p| {
            (0..rng.gen_range(1..=max_vics))
                .map(|_| {
                    let mut v: Vec<usize> =
                        (0..n).filter(|&q| q == p || rng.gen_bool(0.35)).collect();
                    v.dedup();
                    v
                })
                .collect()
        })
        .collect();
    FrechetSpace::from_indices((0..n).map(|i| format!("p{i}")).collect(), vics).unwrap()
}

pub fn random_system(
    rng: &mut impl Rng,
    max_points: usize,
    max_vics: usize,
    max_responses: usize,
) -> ResponseSystem {
    let space = random_space(rng, max_points, max_vics);
    let k = rng.gen_range(1..=max_responses);
    let pi = (0..space.len()).map(|_| rng.gen_range(0..k)).collect();
    ResponseSystem::from_indices(space, (0..k).map(|r| format!("r{r}")).collect(), pi).unwrap()
}

/// Vicinity member lists, straight from the space.
fn raw(space: &FrechetSpace) -> Vec<Vec<Vec<usize>>> {
    (0..space.len())
        .map(|p| {
            space
                .vicinities(p)
                .iter()
                .map(|v| v.members().to_vec())
                .collect()
        })
        .collect()
}

/// Whether `x` and `y` are linked using the given vicinities, by fixpoint
/// closure over overlapping sets.
fn linked(sets: &[Vec<usize>], x: usize, y: usize) -> bool {
    let mut reached: Vec<bool> = sets.iter().map(|s| s.contains(&x)).collect();
    loop {
        let mut grew = false;
        for i in 0..sets.len() {
            if !reached[i]
                && (0..sets.len())
                    .any(|j| reached[j] && sets[j].iter().any(|m| sets[i].contains(m)))
            {
                reached[i] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    x == y || (0..sets.len()).any(|i| reached[i] && sets[i].contains(&y))
}

/// V-connectedness checked over every V-cover (any nonempty selection of
/// vicinities per point), not only minimal ones.
pub fn brute_v_connected(space: &FrechetSpace, x: usize, y: usize) -> bool {
    let vics = raw(space);
    let masks: Vec<u32> = vics.iter().map(|vs| (1u32 << vs.len()) - 1).collect();
    let mut choice: Vec<u32> = vec![1; vics.len()];
    loop {
        let sets: Vec<Vec<usize>> = vics
            .iter()
            .zip(&choice)
            .flat_map(|(vs, &m)| {
                vs.iter()
                    .enumerate()
                    .filter(move |(i, _)| m & (1 << i) != 0)
                    .map(|(_, v)| v.clone())
            })
            .collect();
        if !linked(&sets, x, y) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return true;
            }
            if choice[i] < masks[i] {
                choice[i] += 1;
                break;
            }
            choice[i] = 1;
            i += 1;
        }
    }
}

/// A valid Zora grid: strictly increasing stimuli, nondecreasing `p` from 0 to 1.
pub fn random_zora(rng: &mut impl Rng) -> ZoraGrid {
    let n = rng.gen_range(2..=12);
    let mut grid: Vec<f64> = rand::seq::index::sample(rng, 1001, n)
        .into_iter()
        .map(|i| i as f64 / 1000.0)
        .collect();
    grid.sort_by(f64::total_cmp);
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    p.sort_by(f64::total_cmp);
    p[0] = 0.0;
    p[n - 1] = 1.0;
    ZoraGrid { grid, p }
}

pub fn random_weights(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // Put the rounding residue on the last weight so the sum is 1 to within an ulp.
    let head: f64 = w[..k - 1].iter().sum();
    w[k - 1] = 1.0 - head;
    w
}

pub fn random_distribution(rng: &mut impl Rng, labels: &[&str]) -> Distribution {
    let mut ls = labels.to_vec();
    ls.shuffle(rng);
    let k = rng.gen_range(1..=ls.len());
    let w = random_weights(rng, k);
    Distribution::new(
        ls[..k]
            .iter()
            .map(|s| s.to_string())
            .zip(w)
            .collect::<BTreeMap<_, _>>(),
    )
    .unwrap()
}

pub fn random_mixture(rng: &mut impl Rng, labels: &[&str]) -> Mixture {
    let k = rng.gen_range(1..=4);
    let comps = (0..k).map(|_| random_distribution(rng, labels)).collect();
    Mixture::new(comps, random_weights(rng, k)).unwrap()
}
