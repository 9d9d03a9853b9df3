//! Response systems `(S, R, π)` over Fréchet spaces.
//!
//! `π` is total by construction, which is exactly the supervenience
//! assumption. Tolerance (`π` constant on some vicinity of every point) and
//! connectedness (some V-connected pair with different responses) are checked
//! exactly; the two can never hold together, and
//! [`derive_soritical_contradiction`] shows where an asserted tolerant cover
//! breaks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SoritesError};
use crate::pretopology::{
    chain_in_cover, connectivity_matrix, ChainLink, FrechetSpace, MinimalCover, PointIx, SpaceSpec,
    Vicinity, VicinityChain,
};

/// Label-based system description, as read from scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    #[serde(flatten)]
    pub space: SpaceSpec,
    /// Declared response set; defaults to the values of `pi`.
    #[serde(default)]
    pub responses: Option<Vec<String>>,
    pub pi: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseSystem {
    space: FrechetSpace,
    responses: Vec<String>,
    pi: Vec<usize>,
}

impl ResponseSystem {
    /// `pi` must assign a declared response to every point of `space`.
    pub fn new(
        space: FrechetSpace,
        responses: Vec<String>,
        pi: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut ixs = Vec::with_capacity(space.len());
        for label in space.labels() {
            let r = pi
                .get(label)
                .ok_or_else(|| SoritesError::input(format!("pi is undefined at {label}")))?;
            let ix = responses
                .iter()
                .position(|d| d == r)
                .ok_or_else(|| SoritesError::input(format!("response {r} is not declared")))?;
            ixs.push(ix);
        }
        for label in pi.keys() {
            space.point(label)?;
        }
        Self::from_indices(space, responses, ixs)
    }

    pub fn from_indices(
        space: FrechetSpace,
        responses: Vec<String>,
        pi: Vec<usize>,
    ) -> Result<Self> {
        if pi.len() != space.len() {
            return Err(SoritesError::input(format!(
                "pi has {} values for {} points",
                pi.len(),
                space.len()
            )));
        }
        if let Some(&bad) = pi.iter().find(|&&r| r >= responses.len()) {
            return Err(SoritesError::input(format!(
                "response index {bad} out of range"
            )));
        }
        let mut sorted = responses.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != responses.len() {
            return Err(SoritesError::input("duplicate response labels"));
        }
        Ok(ResponseSystem {
            space,
            responses,
            pi,
        })
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        let space = FrechetSpace::from_spec(&spec.space)?;
        let responses = match &spec.responses {
            Some(r) => r.clone(),
            None => {
                let mut r: Vec<String> = spec.pi.values().cloned().collect();
                r.sort();
                r.dedup();
                r
            }
        };
        Self::new(space, responses, &spec.pi)
    }

    pub fn space(&self) -> &FrechetSpace {
        &self.space
    }

    pub fn responses(&self) -> &[String] {
        &self.responses
    }

    pub fn response_ix(&self, p: PointIx) -> usize {
        self.pi[p]
    }

    pub fn response(&self, p: PointIx) -> &str {
        &self.responses[self.pi[p]]
    }

    pub fn is_constant_on(&self, v: &Vicinity) -> bool {
        let m = v.members();
        m.iter().all(|&p| self.pi[p] == self.pi[m[0]])
    }
}

/// Which vicinities of each point carry a constant effect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToleranceReport {
    /// Per point, indices of vicinities on which the effect is constant.
    pub constant: Vec<Vec<usize>>,
    pub holds: bool,
    /// First constant vicinity of each point, present iff `holds`.
    pub tolerant_cover: Option<MinimalCover>,
    /// Set when the cover was supplied by the caller rather than computed.
    pub asserted: bool,
}

impl ToleranceReport {
    /// A report claiming `cover` is tolerant without checking it.
    pub fn asserted(cover: MinimalCover) -> Self {
        let constant = cover.choice.iter().map(|&c| vec![c]).collect();
        ToleranceReport {
            constant,
            holds: true,
            tolerant_cover: Some(cover),
            asserted: true,
        }
    }

    /// Points with no constant vicinity.
    pub fn failing_points(&self) -> Vec<PointIx> {
        self.constant
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_empty())
            .map(|(p, _)| p)
            .collect()
    }
}

/// Tolerance under an arbitrary constancy predicate on vicinities.
pub fn tolerance_by(
    space: &FrechetSpace,
    is_constant: impl Fn(&Vicinity) -> bool,
) -> ToleranceReport {
    let constant: Vec<Vec<usize>> = (0..space.len())
        .map(|p| {
            space
                .vicinities(p)
                .iter()
                .enumerate()
                .filter(|(_, v)| is_constant(v))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let holds = constant.iter().all(|c| !c.is_empty());
    let tolerant_cover = holds.then(|| MinimalCover {
        choice: constant.iter().map(|c| c[0]).collect(),
    });
    ToleranceReport {
        constant,
        holds,
        tolerant_cover,
        asserted: false,
    }
}

pub fn check_tolerance(sys: &ResponseSystem) -> ToleranceReport {
    tolerance_by(&sys.space, |v| sys.is_constant_on(v))
}

/// First pair `x < y` (point order) with different responses that is
/// V-connected, if any.
pub fn find_con_witness(sys: &ResponseSystem, cap: u64) -> Result<Option<(PointIx, PointIx)>> {
    let n = sys.space.len();
    let differing = (0..n).any(|x| (x + 1..n).any(|y| sys.pi[x] != sys.pi[y]));
    if !differing {
        // Con is vacuously false; skip the enumeration but honour the budget.
        crate::pretopology::check_budget(&sys.space, cap)?;
        return Ok(None);
    }
    let m = connectivity_matrix(&sys.space, cap)?;
    for x in 0..n {
        for y in x + 1..n {
            if sys.pi[x] != sys.pi[y] && m.is_connected(x, y) {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

/// `x_1, …, x_k` read off a vicinity chain, with the first adjacent pair whose
/// responses differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoriticalChain {
    pub points: Vec<PointIx>,
    pub responses: Vec<String>,
    /// Index `i` such that `π(x_i) ≠ π(x_{i+1})`.
    pub violating_link: Option<usize>,
    pub chain: VicinityChain,
    /// The chain vicinity holding both ends of the violating link; it is not
    /// constant under `π` even though the cover claimed it was.
    pub flagged: Option<ChainLink>,
}

impl SoriticalChain {
    /// Replays the chain against `sys`.
    pub fn verify(&self, sys: &ResponseSystem) -> std::result::Result<(), String> {
        self.chain.verify(&sys.space)?;
        let mut expect = vec![self.chain.x];
        expect.extend(&self.chain.linking_points);
        expect.push(self.chain.y);
        if expect != self.points {
            return Err("points do not follow the chain".into());
        }
        for (p, r) in self.points.iter().zip(&self.responses) {
            if sys.response(*p) != r {
                return Err(format!(
                    "recorded response at {} is wrong",
                    sys.space.label(*p)
                ));
            }
        }
        match (self.violating_link, &self.flagged) {
            (Some(i), Some(link)) => {
                if i + 1 >= self.points.len() || self.responses[i] == self.responses[i + 1] {
                    return Err("violating link does not change response".into());
                }
                if !link.vicinity.contains(self.points[i])
                    || !link.vicinity.contains(self.points[i + 1])
                {
                    return Err("flagged vicinity does not hold the violating link".into());
                }
                if sys.is_constant_on(&link.vicinity) {
                    return Err("flagged vicinity is constant".into());
                }
                Ok(())
            }
            (None, None) => {
                if self.responses.first() != self.responses.last() {
                    return Err("ends differ without a violating link".into());
                }
                Ok(())
            }
            _ => Err("violating link and flagged vicinity disagree".into()),
        }
    }
}

/// Runs the reductio: follow the tolerant cover from `x` to `y` and report the
/// link at which the claimed constancy fails.
///
/// Fails with [`SoritesError::NoChain`] when the cover itself separates the
/// endpoints, which refutes the connectedness claim for this cover.
pub fn derive_soritical_contradiction(
    sys: &ResponseSystem,
    report: &ToleranceReport,
    x: PointIx,
    y: PointIx,
) -> Result<SoriticalChain> {
    let n = sys.space.len();
    if x >= n || y >= n {
        return Err(SoritesError::input("point index out of range"));
    }
    let cover = report
        .tolerant_cover
        .as_ref()
        .ok_or_else(|| SoritesError::Precondition("report has no tolerant cover".into()))?;
    if report.constant.len() != n || cover.check(&sys.space).is_err() {
        return Err(SoritesError::StaleReport(
            "cover does not fit this space".into(),
        ));
    }
    if !report.asserted && *report != check_tolerance(sys) {
        return Err(SoritesError::StaleReport(
            "report was computed for another system".into(),
        ));
    }
    if sys.pi[x] == sys.pi[y] {
        return Err(SoritesError::Precondition(format!(
            "{} and {} have the same response",
            sys.space.label(x),
            sys.space.label(y)
        )));
    }
    let chain = chain_in_cover(&sys.space, cover, x, y)?.ok_or_else(|| SoritesError::NoChain {
        x: sys.space.label(x).to_string(),
        y: sys.space.label(y).to_string(),
    })?;

    let mut points = vec![x];
    points.extend(&chain.linking_points);
    points.push(y);
    let responses: Vec<String> = points
        .iter()
        .map(|&p| sys.response(p).to_string())
        .collect();
    let violating_link = points.windows(2).position(|w| sys.pi[w[0]] != sys.pi[w[1]]);
    let Some(i) = violating_link else {
        return Err(SoritesError::Inconsistency(
            "chain with equal adjacent responses joins different responses".into(),
        ));
    };
    let flagged = Some(chain.links[i].clone());
    Ok(SoriticalChain {
        points,
        responses,
        violating_link,
        chain,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Tolerance fails at `points`; connectedness holds with `con_witness`.
    ToleranceFails {
        points: Vec<PointIx>,
        con_witness: (PointIx, PointIx),
    },
    /// Tolerance holds; no V-connected pair has different responses.
    ConFails,
    /// Neither tolerance nor connectedness holds.
    BothFail { points: Vec<PointIx> },
}

/// Classifies which of tolerance and connectedness fails.
pub fn assert_no_sorites(sys: &ResponseSystem, cap: u64) -> Result<Verdict> {
    let tol = check_tolerance(sys);
    let con = find_con_witness(sys, cap)?;
    match (tol.holds, con) {
        (true, Some((x, y))) => Err(SoritesError::Inconsistency(format!(
            "tolerance holds and {} ~ {} are connected with different responses",
            sys.space.label(x),
            sys.space.label(y)
        ))),
        (true, None) => Ok(Verdict::ConFails),
        (false, Some(w)) => Ok(Verdict::ToleranceFails {
            points: tol.failing_points(),
            con_witness: w,
        }),
        (false, None) => Ok(Verdict::BothFail {
            points: tol.failing_points(),
        }),
    }
}
