//! Deterministic threshold systems on `[0, 1]`.
//!
//! A rule classifies `x` as `r1` above a boundary `v` and `r0` below it, with
//! the response at `v` itself fixed by the rule. Any labelling satisfying the
//! monotonicity rules has this form, and `v` can be pinned to within `2^-n`
//! with `n` oracle queries.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SoritesError};
use crate::pretopology::FrechetSpace;
use crate::system::ResponseSystem;

/// Finest precision at which dyadic probes stay exact in `f64`.
pub const MAX_PRECISION: u32 = 52;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binary {
    R0,
    R1,
}

impl Binary {
    pub fn label(self) -> &'static str {
        match self {
            Binary::R0 => "r0",
            Binary::R1 => "r1",
        }
    }
}

impl std::str::FromStr for Binary {
    type Err = SoritesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r0" => Ok(Binary::R0),
            "r1" => Ok(Binary::R1),
            other => Err(SoritesError::input(format!(
                "response must be r0 or r1, got {other}"
            ))),
        }
    }
}

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct UnitStimulus(f64);

impl UnitStimulus {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(UnitStimulus(value))
        } else {
            Err(SoritesError::input(format!(
                "stimulus {value} is outside [0, 1]"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which side of the boundary owns `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `r1` exactly on `[v, 1]`.
    Closed,
    /// `r1` exactly on `(v, 1]`.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdRule {
    v: UnitStimulus,
    boundary: Binary,
}

impl ThresholdRule {
    /// Rejects the degenerate forms that would leave one response unused:
    /// at `v = 0` the boundary response must be `r0`, at `v = 1` it must be `r1`.
    pub fn new(v: f64, boundary: Binary) -> Result<Self> {
        let v = UnitStimulus::new(v)?;
        if v.0 == 0.0 && boundary == Binary::R1 {
            return Err(SoritesError::input("a rule with v = 0 must answer r0 at 0"));
        }
        if v.0 == 1.0 && boundary == Binary::R0 {
            return Err(SoritesError::input("a rule with v = 1 must answer r1 at 1"));
        }
        Ok(ThresholdRule { v, boundary })
    }

    pub fn with_convention(v: f64, convention: Convention) -> Result<Self> {
        Self::new(
            v,
            match convention {
                Convention::Closed => Binary::R1,
                Convention::Open => Binary::R0,
            },
        )
    }

    pub fn v(&self) -> f64 {
        self.v.0
    }

    pub fn boundary_response(&self) -> Binary {
        self.boundary
    }

    pub fn convention(&self) -> Convention {
        match self.boundary {
            Binary::R1 => Convention::Closed,
            Binary::R0 => Convention::Open,
        }
    }

    pub fn classify(&self, x: UnitStimulus) -> Binary {
        if x.0 > self.v.0 || (x.0 == self.v.0 && self.boundary == Binary::R1) {
            Binary::R1
        } else {
            Binary::R0
        }
    }
}

/// Finds an `r1`-labelled stimulus strictly below an `r0`-labelled one.
///
/// Returns the smallest `r1` stimulus paired with the largest `r0` stimulus
/// when they are out of order.
pub fn check_monotone_consistency(
    samples: &[(UnitStimulus, Binary)],
) -> Option<(UnitStimulus, UnitStimulus)> {
    let lowest_r1 = samples
        .iter()
        .filter(|(_, r)| *r == Binary::R1)
        .map(|(x, _)| *x)
        .min_by(|a, b| a.0.total_cmp(&b.0))?;
    let highest_r0 = samples
        .iter()
        .filter(|(_, r)| *r == Binary::R0)
        .map(|(x, _)| *x)
        .max_by(|a, b| a.0.total_cmp(&b.0))?;
    (lowest_r1.0 < highest_r0.0).then_some((lowest_r1, highest_r0))
}

pub trait ResponseOracle {
    fn query(&mut self, x: UnitStimulus) -> Result<Binary>;

    /// Queries answered so far.
    fn calls(&self) -> u64;
}

/// Answers from a rule.
#[derive(Debug, Clone)]
pub struct RuleOracle {
    rule: ThresholdRule,
    calls: u64,
}

impl RuleOracle {
    pub fn new(rule: ThresholdRule) -> Self {
        RuleOracle { rule, calls: 0 }
    }
}

impl ResponseOracle for RuleOracle {
    fn query(&mut self, x: UnitStimulus) -> Result<Binary> {
        self.calls += 1;
        Ok(self.rule.classify(x))
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

/// Answers from a recorded probe log. Unrecorded stimuli are an input error.
#[derive(Debug, Clone)]
pub struct ReplayOracle {
    log: Vec<(f64, Binary)>,
    calls: u64,
}

impl ReplayOracle {
    /// Conflicting answers for one stimulus are rejected.
    pub fn new(mut log: Vec<(f64, Binary)>) -> Result<Self> {
        for (x, _) in &log {
            UnitStimulus::new(*x)?;
        }
        log.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        log.dedup();
        if let Some(w) = log.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(SoritesError::input(format!(
                "probe log answers {} both ways",
                w[0].0
            )));
        }
        Ok(ReplayOracle { log, calls: 0 })
    }
}

impl ResponseOracle for ReplayOracle {
    fn query(&mut self, x: UnitStimulus) -> Result<Binary> {
        self.calls += 1;
        self.log
            .binary_search_by(|(s, _)| s.total_cmp(&x.0))
            .map(|i| self.log[i].1)
            .map_err(|_| SoritesError::input(format!("probe log has no answer at {}", x.0)))
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BisectionTrace {
    /// `q_0, …, q_n`.
    pub q: Vec<f64>,
    pub oracle_calls: u64,
    pub n: u32,
}

impl BisectionTrace {
    pub fn estimate(&self) -> f64 {
        *self.q.last().expect("trace starts at q_0")
    }

    /// `2^-n`.
    pub fn error_bound(&self) -> f64 {
        (-(self.n as f64)).exp2()
    }

    /// Every rule consistent with the trace has its boundary in this interval.
    pub fn bracket(&self) -> (f64, f64) {
        let q = self.estimate();
        (q, q + self.error_bound())
    }

    pub fn verify(&self) -> std::result::Result<(), String> {
        if self.q.len() != self.n as usize + 1 || self.q[0] != 0.0 {
            return Err("trace must run q_0 = 0 through q_n".into());
        }
        for (k, w) in self.q.windows(2).enumerate() {
            let step = (-((k + 1) as f64)).exp2();
            let d = w[1] - w[0];
            if d != 0.0 && d != step {
                return Err(format!(
                    "q_{} - q_{} is neither 0 nor 2^-{}",
                    k + 1,
                    k,
                    k + 1
                ));
            }
        }
        if self.oracle_calls != self.n as u64 {
            return Err("oracle calls differ from n".into());
        }
        Ok(())
    }
}

/// Bisection on dyadic probes: `q_{k+1} = q_k` if the oracle answers `r1` at
/// `q_k + 2^-(k+1)`, else `q_k + 2^-(k+1)`.
pub fn estimate_boundary(oracle: &mut dyn ResponseOracle, n: u32) -> Result<BisectionTrace> {
    if n > MAX_PRECISION {
        return Err(SoritesError::input(format!(
            "precision 2^-{n} is finer than f64 can probe exactly (max {MAX_PRECISION})"
        )));
    }
    let before = oracle.calls();
    let mut q = Vec::with_capacity(n as usize + 1);
    let mut current = 0.0_f64;
    q.push(current);
    for k in 0..n {
        let probe = current + (-((k + 1) as f64)).exp2();
        if oracle.query(UnitStimulus(probe))? == Binary::R0 {
            current = probe;
        }
        q.push(current);
    }
    Ok(BisectionTrace {
        q,
        oracle_calls: oracle.calls() - before,
        n,
    })
}

/// `x_0, x_1, …, x_{k-1}` with `x_{i+1} = x_i + (v - x_i)/2`, in exact
/// arithmetic. Strictly increasing and never reaching `v`.
pub fn stay_below_sequence(v: f64, x0: f64, k: usize) -> Result<Vec<BigRational>> {
    UnitStimulus::new(v)?;
    UnitStimulus::new(x0)?;
    if x0 >= v {
        return Err(SoritesError::Precondition(format!(
            "x0 = {x0} is not below v = {v}"
        )));
    }
    if k == 0 {
        return Err(SoritesError::Precondition("k must be at least 1".into()));
    }
    let v = exact(v);
    let two = BigRational::from_integer(BigInt::from(2));
    let mut x = exact(x0);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let next = &x + (&v - &x) / &two;
        out.push(std::mem::replace(&mut x, next));
    }
    Ok(out)
}

/// The exact value of a finite `f64`.
pub(crate) fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleAtom {
    pub v: f64,
    pub boundary: Binary,
    pub weight: f64,
}

/// A distribution over rules `(v, boundary response)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleDistribution {
    Point {
        v: f64,
        boundary: Binary,
    },
    Finite {
        atoms: Vec<RuleAtom>,
    },
    /// `v` uniform on the open interval, boundary `r1` with probability `p_r1`.
    Uniform {
        p_r1: f64,
    },
}

impl RuleDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            RuleDistribution::Point { v, boundary } => {
                ThresholdRule::new(*v, *boundary).map(|_| ())
            }
            RuleDistribution::Finite { atoms } => {
                if atoms.is_empty() {
                    return Err(SoritesError::input("finite rule distribution has no atoms"));
                }
                let mut total = 0.0;
                for a in atoms {
                    ThresholdRule::new(a.v, a.boundary)?;
                    if !(a.weight >= 0.0 && a.weight.is_finite()) {
                        return Err(SoritesError::input(format!("bad atom weight {}", a.weight)));
                    }
                    total += a.weight;
                }
                if (total - 1.0).abs() > 1e-12 {
                    return Err(SoritesError::input(format!("atom weights sum to {total}")));
                }
                Ok(())
            }
            RuleDistribution::Uniform { p_r1 } => {
                if (0.0..=1.0).contains(p_r1) {
                    Ok(())
                } else {
                    Err(SoritesError::input(format!(
                        "p_r1 = {p_r1} is not a probability"
                    )))
                }
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ThresholdRule> {
        self.validate()?;
        match self {
            RuleDistribution::Point { v, boundary } => ThresholdRule::new(*v, *boundary),
            RuleDistribution::Finite { atoms } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let last = atoms
                    .iter()
                    .rposition(|a| a.weight > 0.0)
                    .unwrap_or(atoms.len() - 1);
                for (i, a) in atoms.iter().enumerate() {
                    acc += a.weight;
                    if (u < acc && a.weight > 0.0) || i == last {
                        return ThresholdRule::new(a.v, a.boundary);
                    }
                }
                unreachable!("the last positive atom always matches")
            }
            RuleDistribution::Uniform { p_r1 } => {
                let v = loop {
                    let v: f64 = rng.gen();
                    if v > 0.0 {
                        break v;
                    }
                };
                let boundary = if rng.gen_bool(*p_r1) {
                    Binary::R1
                } else {
                    Binary::R0
                };
                ThresholdRule::new(v, boundary)
            }
        }
    }
}

/// One rule drawn with a generator seeded from `seed`.
pub fn sample_rule(dist: &RuleDistribution, seed: u64) -> Result<ThresholdRule> {
    dist.draw(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// `count` rules from one seeded stream.
pub fn sample_rules(
    dist: &RuleDistribution,
    seed: u64,
    count: usize,
) -> Result<Vec<ThresholdRule>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| dist.draw(&mut rng)).collect()
}

/// The rule restricted to `n ≥ 2` evenly spaced points `i / (n-1)`, with
/// two-sided neighbour vicinities.
pub fn grid_system(rule: &ThresholdRule, n: usize) -> Result<ResponseSystem> {
    if n < 2 {
        return Err(SoritesError::input("a grid needs at least two points"));
    }
    let space = FrechetSpace::neighbor_grid(n);
    let pi = (0..n)
        .map(|i| {
            let x = UnitStimulus::new(i as f64 / (n - 1) as f64)?;
            Ok(match rule.classify(x) {
                Binary::R0 => 0,
                Binary::R1 => 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ResponseSystem::from_indices(space, vec!["r0".into(), "r1".into()], pi)
}

/// `2^-n` as an exact rational.
pub fn dyadic(n: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << n as usize)
}

/// Exact `|q - v|`.
pub fn exact_gap(q: f64, v: f64) -> BigRational {
    let d = exact(q) - exact(v);
    if d < BigRational::zero() {
        -d
    } else {
        d
    }
}
