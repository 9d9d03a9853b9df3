//! Probabilistic supervenience.
//!
//! Here what supervenes on a stimulus is the probability `p(x)` of answering
//! `r1`, not the answer itself. A grid of such probabilities must reach both 0
//! and 1 and never decrease. A distribution over first-order distributions
//! always reduces to a single first-order distribution, so no higher-order
//! probabilities are ever needed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SoritesError};
use crate::pretopology::FrechetSpace;
use crate::system::{tolerance_by, ToleranceReport};
use crate::threshold::Binary;

/// Tolerance on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Observations needed before a unanimous stimulus counts as deterministic.
pub const DEFAULT_DETERMINISM_THRESHOLD: usize = 20;

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// A probability vector over response labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct Distribution {
    weights: BTreeMap<String, f64>,
}

impl Distribution {
    pub fn new(weights: BTreeMap<String, f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(SoritesError::input("distribution has no responses"));
        }
        check_mass(weights.values().copied(), "distribution")?;
        Ok(Distribution { weights })
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (k, w) in pairs {
            let k = k.into();
            if weights.insert(k.clone(), w).is_some() {
                return Err(SoritesError::input(format!("response {k} listed twice")));
            }
        }
        Self::new(weights)
    }

    /// All mass on one response.
    pub fn point(label: impl Into<String>) -> Self {
        Distribution {
            weights: BTreeMap::from([(label.into(), 1.0)]),
        }
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    /// Probability of one response; unlisted responses have probability 0.
    pub fn get(&self, label: &str) -> f64 {
        self.weights.get(label).copied().unwrap_or(0.0)
    }

    /// Probability of an event, given as a set of responses.
    pub fn prob<'a>(&self, event: impl IntoIterator<Item = &'a str>) -> f64 {
        event
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(|l| self.get(l))
            .sum()
    }

    /// Largest pointwise difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.weights
            .keys()
            .chain(other.weights.keys())
            .map(|k| (self.get(k) - other.get(k)).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<BTreeMap<String, f64>> for Distribution {
    type Error = SoritesError;

    fn try_from(w: BTreeMap<String, f64>) -> Result<Self> {
        Distribution::new(w)
    }
}

impl From<Distribution> for BTreeMap<String, f64> {
    fn from(d: Distribution) -> Self {
        d.weights
    }
}

fn check_mass(weights: impl Iterator<Item = f64>, what: &str) -> Result<()> {
    let mut total = 0.0;
    for w in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(SoritesError::input(format!("{what} has weight {w}")));
        }
        total += w;
    }
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(SoritesError::input(format!(
            "{what} weights sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// Picks an index by cumulative weight. The last positive weight absorbs
/// rounding at the top of the range.
fn draw_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let last = weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1);
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate().take(last) {
        acc += w;
        if w > 0.0 && u < acc {
            return i;
        }
    }
    last
}

/// A finite distribution over first-order distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mixture {
    components: Vec<Distribution>,
    weights: Vec<f64>,
}

impl Mixture {
    pub fn new(components: Vec<Distribution>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(SoritesError::input("mixture has no components"));
        }
        if components.len() != weights.len() {
            return Err(SoritesError::input(format!(
                "{} components but {} weights",
                components.len(),
                weights.len()
            )));
        }
        check_mass(weights.iter().copied(), "mixture")?;
        Ok(Mixture {
            components,
            weights,
        })
    }

    pub fn components(&self) -> &[Distribution] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_i w_i · λ_i(E)` computed component by component.
    pub fn event_prob(&self, event: &[&str]) -> f64 {
        self.components
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * c.prob(event.iter().copied()))
            .sum()
    }

    /// Every response with positive mass in some component, sorted.
    pub fn support(&self) -> BTreeSet<String> {
        self.components
            .iter()
            .flat_map(|c| c.weights.keys().cloned())
            .collect()
    }
}

/// Collapses a mixture to the single distribution with the same probability
/// for every event: `weights(r) = Σ_i w_i · λ_i(r)`.
pub fn reduce_mixture(m: &Mixture) -> Distribution {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    for (c, w) in m.components.iter().zip(&m.weights) {
        for (r, p) in &c.weights {
            *out.entry(r.clone()).or_insert(0.0) += w * p;
        }
    }
    Distribution::new(out).expect("a convex combination of distributions is a distribution")
}

/// A mixture whose components are themselves mixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedMixture {
    mixtures: Vec<Mixture>,
    weights: Vec<f64>,
}

impl NestedMixture {
    pub fn new(mixtures: Vec<Mixture>, weights: Vec<f64>) -> Result<Self> {
        if mixtures.is_empty() || mixtures.len() != weights.len() {
            return Err(SoritesError::input(
                "nested mixture needs one weight per inner mixture",
            ));
        }
        check_mass(weights.iter().copied(), "nested mixture")?;
        Ok(NestedMixture { mixtures, weights })
    }

    /// Reduces each inner mixture first, then the outer one.
    pub fn reduce(&self) -> Distribution {
        let inner: Vec<Distribution> = self.mixtures.iter().map(reduce_mixture).collect();
        reduce_mixture(&Mixture {
            components: inner,
            weights: self.weights.clone(),
        })
    }

    /// The one-level mixture with weights `w_i · u_ij`.
    pub fn flatten(&self) -> Mixture {
        let mut components = Vec::new();
        let mut weights = Vec::new();
        for (m, w) in self.mixtures.iter().zip(&self.weights) {
            for (c, u) in m.components.iter().zip(&m.weights) {
                components.push(c.clone());
                weights.push(w * u);
            }
        }
        Mixture {
            components,
            weights,
        }
    }
}

/// Simulates the two-stage draw (component, then response) and returns the
/// largest gap between observed frequencies and [`reduce_mixture`].
pub fn verify_reduction_by_simulation(m: &Mixture, seed: u64, trials: u64) -> Result<f64> {
    if trials == 0 {
        return Err(SoritesError::input("trials must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables: Vec<(Vec<&String>, Vec<f64>)> = m
        .components
        .iter()
        .map(|c| {
            (
                c.weights.keys().collect(),
                c.weights.values().copied().collect(),
            )
        })
        .collect();
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for _ in 0..trials {
        let (labels, probs) = &tables[draw_index(&m.weights, &mut rng)];
        *counts
            .entry(labels[draw_index(probs, &mut rng)].as_str())
            .or_insert(0) += 1;
    }
    let reduced = reduce_mixture(m);
    let labels: BTreeSet<&str> = reduced
        .weights
        .keys()
        .map(String::as_str)
        .chain(counts.keys().copied())
        .collect();
    Ok(labels
        .into_iter()
        .map(|l| {
            let freq = counts.get(l).copied().unwrap_or(0) as f64 / trials as f64;
            (freq - reduced.get(l)).abs()
        })
        .fold(0.0, f64::max))
}

/// Probabilities of `r1` on an increasing grid of stimuli.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoraGrid {
    pub grid: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZoraViolation {
    LengthMismatch {
        grid: usize,
        p: usize,
    },
    EmptyGrid,
    GridOutsideUnit {
        index: usize,
    },
    GridNotIncreasing {
        index: usize,
    },
    NotProbability {
        index: usize,
    },
    /// `p` drops at `index`.
    Decreasing {
        index: usize,
    },
    NeverZero,
    NeverOne,
}

impl fmt::Display for ZoraViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZoraViolation::LengthMismatch { grid, p } => {
                write!(f, "grid has {grid} points but p has {p} values")
            }
            ZoraViolation::EmptyGrid => write!(f, "grid is empty"),
            ZoraViolation::GridOutsideUnit { index } => {
                write!(f, "grid point {index} is outside [0, 1]")
            }
            ZoraViolation::GridNotIncreasing { index } => {
                write!(f, "grid is not strictly increasing at {index}")
            }
            ZoraViolation::NotProbability { index } => write!(f, "p at {index} is not in [0, 1]"),
            ZoraViolation::Decreasing { index } => write!(f, "Z2: p decreases at index {index}"),
            ZoraViolation::NeverZero => write!(f, "Z1: p never attains 0"),
            ZoraViolation::NeverOne => write!(f, "Z1: p never attains 1"),
        }
    }
}

/// Empty iff the grid is well formed, `p` reaches 0 and 1, and `p` never
/// decreases.
pub fn validate_zora(zg: &ZoraGrid) -> Vec<ZoraViolation> {
    let mut out = Vec::new();
    if zg.grid.len() != zg.p.len() {
        out.push(ZoraViolation::LengthMismatch {
            grid: zg.grid.len(),
            p: zg.p.len(),
        });
        return out;
    }
    if zg.grid.is_empty() {
        out.push(ZoraViolation::EmptyGrid);
        return out;
    }
    for (i, x) in zg.grid.iter().enumerate() {
        if !(0.0..=1.0).contains(x) {
            out.push(ZoraViolation::GridOutsideUnit { index: i });
        }
        if i > 0 && (x.is_nan() || zg.grid[i - 1] >= *x) {
            out.push(ZoraViolation::GridNotIncreasing { index: i });
        }
    }
    for (i, p) in zg.p.iter().enumerate() {
        if !(0.0..=1.0).contains(p) {
            out.push(ZoraViolation::NotProbability { index: i });
        }
        if i > 0 && *p < zg.p[i - 1] {
            out.push(ZoraViolation::Decreasing { index: i });
        }
    }
    if !zg.p.contains(&0.0) {
        out.push(ZoraViolation::NeverZero);
    }
    if !zg.p.contains(&1.0) {
        out.push(ZoraViolation::NeverOne);
    }
    out
}

impl ZoraGrid {
    pub fn validated(grid: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let zg = ZoraGrid { grid, p };
        let v = validate_zora(&zg);
        if v.is_empty() {
            Ok(zg)
        } else {
            Err(SoritesError::input(
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    fn index_of(&self, x: f64) -> Option<usize> {
        self.grid.iter().position(|&g| g == x)
    }

    /// Linear interpolation between grid points. Not part of the grid's own
    /// definition; off-grid probabilities are otherwise undefined.
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        if let Some(i) = self.index_of(x) {
            return Ok(self.p[i]);
        }
        let hi = self
            .grid
            .iter()
            .position(|&g| g > x)
            .filter(|&i| i > 0)
            .ok_or_else(|| SoritesError::input(format!("{x} is outside the grid")))?;
        let (x0, x1) = (self.grid[hi - 1], self.grid[hi]);
        let t = (x - x0) / (x1 - x0);
        Ok(self.p[hi - 1] + t * (self.p[hi] - self.p[hi - 1]))
    }
}

/// A source of stochastic binary responses.
pub trait StochasticSource {
    fn respond(&mut self, x: f64) -> Result<Binary>;
}

/// Answers `r1` at grid stimulus `x` with probability `p(x)`.
#[derive(Debug, Clone)]
pub struct BernoulliSource {
    zg: ZoraGrid,
    rng: ChaCha8Rng,
    interpolate: bool,
}

/// Seeded Bernoulli responder for a valid grid. Off-grid stimuli are errors.
pub fn bernoulli_oracle(zg: &ZoraGrid, seed: u64) -> Result<BernoulliSource> {
    let zg = ZoraGrid::validated(zg.grid.clone(), zg.p.clone())?;
    Ok(BernoulliSource {
        zg,
        rng: ChaCha8Rng::seed_from_u64(seed),
        interpolate: false,
    })
}

impl BernoulliSource {
    /// Answers off-grid stimuli by linear interpolation of `p`.
    pub fn with_interpolation(mut self) -> Self {
        self.interpolate = true;
        self
    }

    pub fn probability(&self, x: f64) -> Result<f64> {
        if self.interpolate {
            return self.zg.interpolate(x);
        }
        self.zg
            .index_of(x)
            .map(|i| self.zg.p[i])
            .ok_or_else(|| SoritesError::input(format!("{x} is not a grid stimulus")))
    }
}

impl StochasticSource for BernoulliSource {
    fn respond(&mut self, x: f64) -> Result<Binary> {
        let p = self.probability(x)?;
        Ok(if self.rng.gen_bool(p) {
            Binary::R1
        } else {
            Binary::R0
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    /// 95% Wilson score interval.
    pub ci: (f64, f64),
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 || successes > trials {
            return Err(SoritesError::input(format!(
                "{successes} successes in {trials} trials"
            )));
        }
        Ok(Estimate {
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            ci: wilson_interval(successes, trials),
        })
    }
}

/// 95% Wilson score interval; exact 0 and 1 at the boundary counts.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Frequency of `r1` over `trials` queries of `x`.
pub fn estimate_p(source: &mut dyn StochasticSource, x: f64, trials: u64) -> Result<Estimate> {
    if trials == 0 {
        return Err(SoritesError::input("trials must be at least 1"));
    }
    let mut hits = 0;
    for _ in 0..trials {
        if source.respond(x)? == Binary::R1 {
            hits += 1;
        }
    }
    Estimate::from_counts(hits, trials)
}

/// `r1` wherever `p ≥ 1/2`.
pub fn discretize(zg: &ZoraGrid) -> Vec<Binary> {
    zg.p.iter()
        .map(|&p| if p >= 0.5 { Binary::R1 } else { Binary::R0 })
        .collect()
}

/// Tolerance of `p` itself: a vicinity is constant when the spread of `p` on
/// it is at most `tolerance` (0 means exact equality).
pub fn check_probabilistic_tolerance(
    zg: &ZoraGrid,
    space: &FrechetSpace,
    tolerance: f64,
) -> Result<ToleranceReport> {
    if space.len() != zg.p.len() {
        return Err(SoritesError::input(format!(
            "space has {} points for a grid of {}",
            space.len(),
            zg.p.len()
        )));
    }
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(SoritesError::input("tolerance must be nonnegative"));
    }
    Ok(tolerance_by(space, |v| {
        let vals = v.members().iter().map(|&i| zg.p[i]);
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| {
            (l.min(x), h.max(x))
        });
        hi - lo <= tolerance
    }))
}

/// A probabilistic system whose stimuli are `(x, t)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldedSystem {
    /// Sorted by `x`, then `t`.
    pub stimuli: Vec<(f64, String)>,
    pub p: Vec<f64>,
}

impl FoldedSystem {
    pub fn times(&self) -> BTreeSet<&str> {
        self.stimuli.iter().map(|(_, t)| t.as_str()).collect()
    }

    /// The grid at one time tag, as `(x, p)` in increasing `x`.
    pub fn slice(&self, t: &str) -> ZoraGrid {
        let (grid, p) = self
            .stimuli
            .iter()
            .zip(&self.p)
            .filter(|((_, tt), _)| tt == t)
            .map(|((x, _), p)| (*x, *p))
            .unzip();
        ZoraGrid { grid, p }
    }

    pub fn get(&self, x: f64, t: &str) -> Option<f64> {
        self.stimuli
            .iter()
            .position(|(sx, st)| *sx == x && st == t)
            .map(|i| self.p[i])
    }
}

/// Moves time into the stimulus: each `(x, t)` becomes a stimulus of its own.
/// No monotonicity is imposed on the result.
pub fn temporal_fold(table: &[(f64, String, f64)]) -> Result<FoldedSystem> {
    if table.is_empty() {
        return Err(SoritesError::input("temporal table is empty"));
    }
    let mut rows: Vec<&(f64, String, f64)> = table.iter().collect();
    for (x, _, p) in &rows {
        if !x.is_finite() || !(0.0..=1.0).contains(p) {
            return Err(SoritesError::input(format!("bad row x = {x}, p = {p}")));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    if let Some(w) = rows
        .windows(2)
        .find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1)
    {
        return Err(SoritesError::input(format!(
            "duplicate stimulus ({}, {})",
            w[0].0, w[0].1
        )));
    }
    Ok(FoldedSystem {
        stimuli: rows.iter().map(|(x, t, _)| (*x, t.clone())).collect(),
        p: rows.iter().map(|(_, _, p)| *p).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub stimulus: String,
    pub response: String,
    pub time: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ObservationLog {
    pub records: Vec<Observation>,
}

impl ObservationLog {
    /// Parses `stimulus,response[,time]` lines; a leading header row is skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let row = row.map_err(|e| SoritesError::input(format!("observation log: {e}")))?;
            let line = row.position().map_or(i as u64 + 1, |p| p.line());
            if row.iter().all(str::is_empty) {
                continue;
            }
            if records.is_empty()
                && i == 0
                && row
                    .get(0)
                    .is_some_and(|s| s.eq_ignore_ascii_case("stimulus"))
                && row
                    .get(1)
                    .is_some_and(|s| s.eq_ignore_ascii_case("response"))
            {
                continue;
            }
            if !(2..=3).contains(&row.len()) || row[0].is_empty() || row[1].is_empty() {
                return Err(SoritesError::input(format!(
                    "observation log line {line}: expected stimulus,response[,time]"
                )));
            }
            records.push(Observation {
                stimulus: row[0].to_string(),
                response: row[1].to_string(),
                time: row.get(2).filter(|t| !t.is_empty()).map(str::to_string),
            });
        }
        Ok(ObservationLog { records })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SupervenienceVerdict {
    Deterministic {
        response: String,
        count: u64,
    },
    /// Per-response frequency estimates.
    Probabilistic {
        count: u64,
        estimates: BTreeMap<String, Estimate>,
    },
    SingleObservation {
        response: String,
    },
}

/// Per stimulus: deterministic if unanimous over at least `threshold`
/// observations, flagged if seen once, probabilistic otherwise.
pub fn assess_supervenience(
    log: &ObservationLog,
    threshold: usize,
) -> BTreeMap<String, SupervenienceVerdict> {
    let mut by_stimulus: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    for r in &log.records {
        *by_stimulus
            .entry(&r.stimulus)
            .or_default()
            .entry(&r.response)
            .or_insert(0) += 1;
    }
    by_stimulus
        .into_iter()
        .map(|(s, counts)| {
            let total: u64 = counts.values().sum();
            let verdict = if total == 1 {
                SupervenienceVerdict::SingleObservation {
                    response: counts.keys().next().expect("one record").to_string(),
                }
            } else if counts.len() == 1 && total >= threshold as u64 {
                SupervenienceVerdict::Deterministic {
                    response: counts.keys().next().expect("one response").to_string(),
                    count: total,
                }
            } else {
                let estimates = counts
                    .iter()
                    .map(|(r, &c)| {
                        (
                            r.to_string(),
                            Estimate::from_counts(c, total).expect("counts within total"),
                        )
                    })
                    .collect();
                SupervenienceVerdict::Probabilistic {
                    count: total,
                    estimates,
                }
            };
            (s.to_string(), verdict)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zg(p: &[f64]) -> ZoraGrid {
        let n = p.len();
        let grid = (0..n).map(|i| i as f64 / (n - 1).max(1) as f64).collect();
        ZoraGrid {
            grid,
            p: p.to_vec(),
        }
    }

    #[test]
    fn zora_validation() {
        assert!(validate_zora(&zg(&[0.0, 0.5, 1.0])).is_empty());
        let v = validate_zora(&zg(&[0.0, 0.6, 0.4]));
        assert!(v.contains(&ZoraViolation::Decreasing { index: 2 }));
        let v = validate_zora(&zg(&[0.1, 0.5, 1.0]));
        assert_eq!(v, vec![ZoraViolation::NeverZero]);
        assert_eq!(v[0].to_string(), "Z1: p never attains 0");
        let bad = ZoraGrid {
            grid: vec![0.0, 0.0],
            p: vec![0.0, 1.0],
        };
        assert_eq!(
            validate_zora(&bad),
            vec![ZoraViolation::GridNotIncreasing { index: 1 }]
        );
        assert!(!validate_zora(&ZoraGrid {
            grid: vec![0.0],
            p: vec![]
        })
        .is_empty());
    }

    #[test]
    fn degenerate_bernoulli() {
        let g = zg(&[0.0, 1.0]);
        let mut src = bernoulli_oracle(&g, 1).unwrap();
        for _ in 0..1000 {
            assert_eq!(src.respond(1.0).unwrap(), Binary::R1);
            assert_eq!(src.respond(0.0).unwrap(), Binary::R0);
        }
        assert!(src.respond(0.5).is_err());
    }

    #[test]
    fn bernoulli_frequency() {
        let g = ZoraGrid {
            grid: vec![0.0, 0.5, 1.0],
            p: vec![0.0, 0.3, 1.0],
        };
        let mut src = bernoulli_oracle(&g, 99).unwrap();
        let est = estimate_p(&mut src, 0.5, 100_000).unwrap();
        assert!((est.p_hat - 0.3).abs() < 0.005, "{}", est.p_hat);
        let mut a = bernoulli_oracle(&g, 5).unwrap();
        let mut b = bernoulli_oracle(&g, 5).unwrap();
        let sa: Vec<_> = (0..200).map(|_| a.respond(0.5).unwrap()).collect();
        let sb: Vec<_> = (0..200).map(|_| b.respond(0.5).unwrap()).collect();
        assert_eq!(sa, sb);
    }

    #[test]
    fn interpolating_source() {
        let g = ZoraGrid {
            grid: vec![0.0, 0.5, 1.0],
            p: vec![0.0, 0.4, 1.0],
        };
        let src = bernoulli_oracle(&g, 0).unwrap().with_interpolation();
        assert!((src.probability(0.25).unwrap() - 0.2).abs() < 1e-15);
        assert!((src.probability(0.75).unwrap() - 0.7).abs() < 1e-15);
        assert!(bernoulli_oracle(&zg(&[0.2, 1.0]), 0).is_err());
    }

    // Frozen from statsmodels proportion_confint(method="wilson").
    #[test]
    fn wilson_reference_values() {
        let e = Estimate::from_counts(30, 100).unwrap();
        assert_eq!(e.p_hat, 0.3);
        assert!((e.ci.0 - 0.21894885294932756).abs() < 1e-12);
        assert!((e.ci.1 - 0.39584854633346667).abs() < 1e-12);
        let e = Estimate::from_counts(100, 100).unwrap();
        assert_eq!(e.ci.1, 1.0);
        assert!((e.ci.0 - 0.9630065017930143).abs() < 1e-12);
        let e = Estimate::from_counts(0, 10).unwrap();
        assert_eq!(e.p_hat, 0.0);
        assert_eq!(e.ci.0, 0.0);
        assert!((e.ci.1 - 0.27753279986288926).abs() < 1e-12);
        let e = Estimate::from_counts(1, 3).unwrap();
        assert!((e.ci.0 - 0.06149194472039626).abs() < 1e-12);
        assert!((e.ci.1 - 0.7923403991979523).abs() < 1e-12);
    }

    #[test]
    fn discretization() {
        use Binary::*;
        assert_eq!(discretize(&zg(&[0.0, 0.5, 1.0])), vec![R0, R1, R1]);
        assert_eq!(discretize(&zg(&[0.0, 0.49, 1.0])), vec![R0, R0, R1]);
        assert_eq!(discretize(&zg(&[0.0, 0.0, 1.0, 1.0])), vec![R0, R0, R1, R1]);
    }

    #[test]
    fn probabilistic_tolerance() {
        let space = FrechetSpace::neighbor_grid(5);
        let strict = zg(&[0.0, 0.2, 0.5, 0.7, 1.0]);
        let rep = check_probabilistic_tolerance(&strict, &space, 0.0).unwrap();
        assert_eq!(rep.failing_points(), vec![0, 1, 2, 3, 4]);

        let flat = zg(&[0.4; 5]);
        assert!(
            check_probabilistic_tolerance(&flat, &space, 0.0)
                .unwrap()
                .holds
        );

        let steps = zg(&[0.0, 0.0, 1.0, 1.0]);
        let rep =
            check_probabilistic_tolerance(&steps, &FrechetSpace::neighbor_grid(4), 0.0).unwrap();
        assert_eq!(rep.failing_points(), vec![1, 2]);

        let noisy = zg(&[0.0, 0.001, 0.002]);
        let rep =
            check_probabilistic_tolerance(&noisy, &FrechetSpace::neighbor_grid(3), 0.01).unwrap();
        assert!(rep.holds);
        assert!(check_probabilistic_tolerance(&noisy, &space, 0.0).is_err());
    }

    fn d(pairs: &[(&str, f64)]) -> Distribution {
        Distribution::from_pairs(pairs.iter().map(|(k, v)| (*k, *v))).unwrap()
    }

    #[test]
    fn coin_reduction() {
        let m = Mixture::new(
            vec![d(&[("head", 1.0)]), d(&[("head", 0.0), ("tail", 1.0)])],
            vec![0.5, 0.5],
        )
        .unwrap();
        let r = reduce_mixture(&m);
        assert_eq!(r.get("head"), 0.5);
        assert_eq!(r.get("tail"), 0.5);
    }

    #[test]
    fn identity_and_three_component_reduction() {
        let c = d(&[("a", 0.2), ("b", 0.8)]);
        assert_eq!(
            reduce_mixture(&Mixture::new(vec![c.clone()], vec![1.0]).unwrap()),
            c
        );
        let m = Mixture::new(
            vec![c, d(&[("a", 0.6), ("b", 0.4)]), d(&[("a", 1.0)])],
            vec![0.5, 0.25, 0.25],
        )
        .unwrap();
        let r = reduce_mixture(&m);
        assert!((r.get("a") - 0.5).abs() < 1e-15);
        assert!((r.get("b") - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mixture_validation() {
        assert!(Distribution::from_pairs([("a", 0.5)]).is_err());
        assert!(Distribution::from_pairs([("a", -0.5), ("b", 1.5)]).is_err());
        assert!(Mixture::new(vec![Distribution::point("a")], vec![0.9]).is_err());
        assert!(Mixture::new(vec![], vec![]).is_err());
    }

    #[test]
    fn simulation_matches_reduction() {
        let point = Mixture::new(vec![Distribution::point("a")], vec![1.0]).unwrap();
        assert_eq!(
            verify_reduction_by_simulation(&point, 3, 1000).unwrap(),
            0.0
        );
        let coin = Mixture::new(
            vec![d(&[("head", 1.0)]), d(&[("tail", 1.0)])],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert!(verify_reduction_by_simulation(&coin, 11, 100_000).unwrap() < 0.01);
        let three = Mixture::new(
            vec![
                d(&[("a", 0.2), ("b", 0.8)]),
                d(&[("a", 0.6), ("b", 0.4)]),
                d(&[("a", 1.0)]),
            ],
            vec![0.5, 0.25, 0.25],
        )
        .unwrap();
        assert!(verify_reduction_by_simulation(&three, 12, 100_000).unwrap() < 0.01);
        assert!(verify_reduction_by_simulation(&three, 12, 0).is_err());
    }

    #[test]
    fn temporal_folding() {
        let single = vec![
            (0.0, "t0".to_string(), 0.0),
            (0.5, "t0".into(), 0.4),
            (1.0, "t0".into(), 1.0),
        ];
        let f = temporal_fold(&single).unwrap();
        assert_eq!(
            f.slice("t0"),
            ZoraGrid {
                grid: vec![0.0, 0.5, 1.0],
                p: vec![0.0, 0.4, 1.0]
            }
        );

        let flat: Vec<_> = ["a", "b"]
            .iter()
            .flat_map(|t| single.iter().map(move |(x, _, p)| (*x, t.to_string(), *p)))
            .collect();
        let f = temporal_fold(&flat).unwrap();
        assert_eq!(f.slice("a"), f.slice("b"));

        let table = vec![
            (0.0, "1".to_string(), 0.1),
            (0.0, "2".into(), 0.2),
            (1.0, "1".into(), 0.3),
            (1.0, "2".into(), 0.4),
        ];
        let f = temporal_fold(&table).unwrap();
        assert_eq!(f.stimuli.len(), 4);
        assert_eq!(f.get(1.0, "1"), Some(0.3));
        assert_eq!(f.get(0.0, "2"), Some(0.2));

        let mut dup = table.clone();
        dup.push((0.0, "1".into(), 0.9));
        assert!(temporal_fold(&dup).is_err());
        assert!(temporal_fold(&[]).is_err());
    }

    #[test]
    fn observation_log_parsing() {
        let log = ObservationLog::parse("stimulus,response,time\na, r1 ,t1\n\nb,r0\n").unwrap();
        assert_eq!(log.records.len(), 2);
        assert_eq!(log.records[0].response, "r1");
        assert_eq!(log.records[0].time.as_deref(), Some("t1"));
        assert_eq!(log.records[1].time, None);
        assert!(ObservationLog::parse("a\n").is_err());
        assert!(ObservationLog::parse("a,b,c,d\n").is_err());
        assert_eq!(ObservationLog::parse("x,r1\n").unwrap().records.len(), 1);
    }

    #[test]
    fn supervenience_assessment() {
        let mut text = String::new();
        for _ in 0..50 {
            text.push_str("a,r1\n");
        }
        for i in 0..100 {
            text.push_str(if i < 30 { "b,r1\n" } else { "b,r0\n" });
        }
        text.push_str("c,r0\n");
        for _ in 0..5 {
            text.push_str("d,r1\n");
        }
        let log = ObservationLog::parse(&text).unwrap();
        let v = assess_supervenience(&log, 20);
        assert_eq!(
            v["a"],
            SupervenienceVerdict::Deterministic {
                response: "r1".into(),
                count: 50
            }
        );
        let SupervenienceVerdict::Probabilistic { count, estimates } = &v["b"] else {
            panic!()
        };
        assert_eq!(*count, 100);
        assert_eq!(estimates["r1"].p_hat, 0.3);
        assert_eq!(estimates["r1"].ci, wilson_interval(30, 100));
        assert_eq!(
            v["c"],
            SupervenienceVerdict::SingleObservation {
                response: "r0".into()
            }
        );
        assert!(matches!(
            v["d"],
            SupervenienceVerdict::Probabilistic { count: 5, .. }
        ));
    }
}
