//! Finite Fréchet spaces.
//!
//! Every point owns a nonempty list of vicinities, each of which contains the
//! point itself. A point `y` is close to `x` in the sense of a vicinity `V` of
//! `x` when `y ∈ V`. Closeness is not symmetric in general.
//!
//! A V-cover is a collection of vicinities holding at least one vicinity of
//! every point. Two points are V-connected when every V-cover links them by a
//! chain of vicinities whose neighbours overlap. Every V-cover contains a
//! minimal cover (one vicinity per point) and a chain through a sub-collection
//! is a chain through the whole cover, so it is enough to check the finitely
//! many minimal covers.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SoritesError};

/// Index of a point within its space.
pub type PointIx = usize;

/// Label-based description of a space, as read from scenarios.
///
/// A `SpaceSpec` may be malformed; [`validate_space`] reports every problem and
/// [`FrechetSpace::from_spec`] refuses to build from it unless it is clean.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub points: Vec<String>,
    /// Vicinities per owner, each a list of member labels.
    #[serde(default)]
    pub vicinities: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicatePoint {
        point: String,
    },
    UnknownOwner {
        owner: String,
    },
    NoVicinity {
        point: String,
    },
    MissingOwner {
        point: String,
        vicinity: usize,
    },
    NotSubset {
        point: String,
        vicinity: usize,
        member: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePoint { point } => write!(f, "point {point} is declared twice"),
            Violation::UnknownOwner { owner } => {
                write!(f, "vicinities given for undeclared point {owner}")
            }
            Violation::NoVicinity { point } => write!(f, "point {point} has no vicinity"),
            Violation::MissingOwner { point, vicinity } => {
                write!(f, "vicinity {vicinity} of {point} does not contain {point}")
            }
            Violation::NotSubset {
                point,
                vicinity,
                member,
            } => {
                write!(
                    f,
                    "vicinity {vicinity} of {point} names unknown point {member}"
                )
            }
        }
    }
}

/// Checks the Fréchet-space invariants of a label-based description.
///
/// Returns an empty list iff the description is a well-formed space.
pub fn validate_space(spec: &SpaceSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for p in &spec.points {
        if seen.insert(p.as_str(), 0).is_some() {
            out.push(Violation::DuplicatePoint { point: p.clone() });
        }
    }
    for owner in spec.vicinities.keys() {
        if !seen.contains_key(owner.as_str()) {
            out.push(Violation::UnknownOwner {
                owner: owner.clone(),
            });
        }
    }
    for p in &spec.points {
        if seen.get(p.as_str()) == Some(&1) {
            continue;
        }
        seen.insert(p.as_str(), 1);
        let vics = spec.vicinities.get(p).map(Vec::as_slice).unwrap_or(&[]);
        if vics.is_empty() {
            out.push(Violation::NoVicinity { point: p.clone() });
        }
        for (i, v) in vics.iter().enumerate() {
            if !v.contains(p) {
                out.push(Violation::MissingOwner {
                    point: p.clone(),
                    vicinity: i,
                });
            }
            for m in v {
                if !seen.contains_key(m.as_str()) {
                    out.push(Violation::NotSubset {
                        point: p.clone(),
                        vicinity: i,
                        member: m.clone(),
                    });
                }
            }
        }
    }
    out
}

/// A set of points, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vicinity(Vec<PointIx>);

impl Vicinity {
    pub fn new(mut members: Vec<PointIx>) -> Self {
        members.sort_unstable();
        members.dedup();
        Vicinity(members)
    }

    pub fn members(&self) -> &[PointIx] {
        &self.0
    }

    pub fn contains(&self, p: PointIx) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    /// Smallest common member, if any.
    pub fn first_common(&self, other: &Vicinity) -> Option<PointIx> {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(self.0[i]),
            }
        }
        None
    }

    pub fn intersects(&self, other: &Vicinity) -> bool {
        self.first_common(other).is_some()
    }
}

/// A validated finite Fréchet space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrechetSpace {
    labels: Vec<String>,
    index: HashMap<String, PointIx>,
    vicinities: Vec<Vec<Vicinity>>,
}

impl FrechetSpace {
    pub fn from_spec(spec: &SpaceSpec) -> Result<Self> {
        let violations = validate_space(spec);
        if !violations.is_empty() {
            return Err(SoritesError::InvalidSpace(violations));
        }
        let index: HashMap<String, PointIx> = spec
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let vicinities = spec
            .points
            .iter()
            .map(|p| {
                spec.vicinities[p]
                    .iter()
                    .map(|v| Vicinity::new(v.iter().map(|m| index[m]).collect()))
                    .collect()
            })
            .collect();
        Ok(FrechetSpace {
            labels: spec.points.clone(),
            index,
            vicinities,
        })
    }

    /// Builds a space from point labels and index-based vicinities.
    pub fn from_indices(labels: Vec<String>, vicinities: Vec<Vec<Vec<PointIx>>>) -> Result<Self> {
        let n = labels.len();
        if vicinities.len() != n {
            return Err(SoritesError::input(format!(
                "{} vicinity lists for {} points",
                vicinities.len(),
                n
            )));
        }
        let mut spec = SpaceSpec {
            points: labels.clone(),
            vicinities: BTreeMap::new(),
        };
        for (owner, vics) in vicinities.iter().enumerate() {
            let mut named = Vec::with_capacity(vics.len());
            for v in vics {
                let mut members = Vec::with_capacity(v.len());
                for &m in v {
                    let label = labels.get(m).ok_or_else(|| {
                        SoritesError::input(format!("point index {m} out of range"))
                    })?;
                    members.push(label.clone());
                }
                named.push(members);
            }
            spec.vicinities.insert(labels[owner].clone(), named);
        }
        Self::from_spec(&spec)
    }

    /// `n` points labelled `0..n` on a line, each with the single vicinity
    /// `{i - left, …, i + right}` clipped to the line.
    pub fn line(n: usize, left: usize, right: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let vics = (0..n)
            .map(|i| {
                vec![(i.saturating_sub(left)..=(i + right).min(n.saturating_sub(1))).collect()]
            })
            .collect();
        Self::from_indices(labels, vics).expect("line spaces are well formed")
    }

    /// Line with two-sided neighbour vicinities `{i-1, i, i+1}`.
    pub fn neighbor_grid(n: usize) -> Self {
        Self::line(n, 1, 1)
    }

    /// Line with right-neighbour vicinities `{i, i+1}`.
    pub fn right_neighbor(n: usize) -> Self {
        Self::line(n, 0, 1)
    }

    /// Every point's only vicinity is itself.
    pub fn discrete(n: usize) -> Self {
        Self::line(n, 0, 0)
    }

    /// Returns a copy with `members` appended to the vicinities of `owner`.
    pub fn with_vicinity(&self, owner: PointIx, members: Vec<PointIx>) -> Result<Self> {
        let mut vics: Vec<Vec<Vec<PointIx>>> = self
            .vicinities
            .iter()
            .map(|vs| vs.iter().map(|v| v.members().to_vec()).collect())
            .collect();
        vics.get_mut(owner)
            .ok_or_else(|| SoritesError::input(format!("point index {owner} out of range")))?
            .push(members);
        Self::from_indices(self.labels.clone(), vics)
    }

    /// Returns a copy with vicinity `index` of `owner` removed.
    pub fn without_vicinity(&self, owner: PointIx, index: usize) -> Result<Self> {
        self.vicinity(owner, index)?;
        let mut vics: Vec<Vec<Vec<PointIx>>> = self
            .vicinities
            .iter()
            .map(|vs| vs.iter().map(|v| v.members().to_vec()).collect())
            .collect();
        vics[owner].remove(index);
        Self::from_indices(self.labels.clone(), vics)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: PointIx) -> &str {
        &self.labels[p]
    }

    /// Resolves a label to its index.
    pub fn point(&self, label: &str) -> Result<PointIx> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| SoritesError::input(format!("unknown point {label}")))
    }

    fn check_point(&self, p: PointIx) -> Result<()> {
        if p < self.len() {
            Ok(())
        } else {
            Err(SoritesError::input(format!("point index {p} out of range")))
        }
    }

    pub fn vicinities(&self, p: PointIx) -> &[Vicinity] {
        &self.vicinities[p]
    }

    pub fn vicinity(&self, p: PointIx, index: usize) -> Result<&Vicinity> {
        self.check_point(p)?;
        self.vicinities[p].get(index).ok_or_else(|| {
            SoritesError::input(format!(
                "point {} has no vicinity {index} (it has {})",
                self.labels[p],
                self.vicinities[p].len()
            ))
        })
    }

    /// Number of minimal covers, saturating at `u128::MAX`.
    pub fn cover_count(&self) -> u128 {
        self.vicinities
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.len() as u128))
    }

    pub fn to_spec(&self) -> SpaceSpec {
        SpaceSpec {
            points: self.labels.clone(),
            vicinities: self
                .labels
                .iter()
                .zip(&self.vicinities)
                .map(|(l, vs)| (l.clone(), vs.iter().map(|v| self.names(v)).collect()))
                .collect(),
        }
    }

    pub fn names(&self, v: &Vicinity) -> Vec<String> {
        v.members()
            .iter()
            .map(|&m| self.labels[m].clone())
            .collect()
    }
}

/// `y` is close to `x` in the sense of vicinity `v_index` of `x`.
pub fn is_close(space: &FrechetSpace, y: PointIx, x: PointIx, v_index: usize) -> Result<bool> {
    space.check_point(y)?;
    Ok(space.vicinity(x, v_index)?.contains(y))
}

/// One vicinity chosen per point: `choice[x]` indexes into the vicinities of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinimalCover {
    pub choice: Vec<usize>,
}

impl MinimalCover {
    pub fn check(&self, space: &FrechetSpace) -> Result<()> {
        if self.choice.len() != space.len() {
            return Err(SoritesError::input(format!(
                "cover chooses for {} points, space has {}",
                self.choice.len(),
                space.len()
            )));
        }
        for (p, &c) in self.choice.iter().enumerate() {
            space.vicinity(p, c)?;
        }
        Ok(())
    }

    /// The vicinity chosen for `owner`. Assumes the cover fits `space`.
    pub fn member<'a>(&self, space: &'a FrechetSpace, owner: PointIx) -> &'a Vicinity {
        &space.vicinities(owner)[self.choice[owner]]
    }

    /// Member sets keyed by owner label, for reports.
    pub fn describe(&self, space: &FrechetSpace) -> BTreeMap<String, Vec<String>> {
        (0..space.len())
            .map(|p| {
                (
                    space.label(p).to_string(),
                    space.names(self.member(space, p)),
                )
            })
            .collect()
    }
}

/// Lexicographic iterator over all minimal covers (first point most significant).
#[derive(Debug, Clone)]
pub struct CoverIter<'a> {
    space: &'a FrechetSpace,
    next: Option<Vec<usize>>,
}

impl Iterator for CoverIter<'_> {
    type Item = MinimalCover;

    fn next(&mut self) -> Option<MinimalCover> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut advanced = false;
        for p in (0..succ.len()).rev() {
            succ[p] += 1;
            if succ[p] < self.space.vicinities(p).len() {
                advanced = true;
                break;
            }
            succ[p] = 0;
        }
        if advanced {
            self.next = Some(succ);
        }
        Some(MinimalCover { choice: current })
    }
}

pub fn enumerate_minimal_covers(space: &FrechetSpace, cap: u64) -> Result<CoverIter<'_>> {
    check_budget(space, cap)?;
    Ok(CoverIter {
        space,
        next: Some(vec![0; space.len()]),
    })
}

pub(crate) fn check_budget(space: &FrechetSpace, cap: u64) -> Result<()> {
    let product = space.cover_count();
    if product > cap as u128 {
        return Err(SoritesError::Budget { product, cap });
    }
    Ok(())
}

/// One vicinity of a chain together with the point that owns it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLink {
    pub owner: PointIx,
    pub vicinity: Vicinity,
}

/// `V_1, …, V_n` with `x ∈ V_1`, `y ∈ V_n` and a recorded linking point
/// `z_i ∈ V_i ∩ V_{i+1}` for every adjacent pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VicinityChain {
    pub x: PointIx,
    pub y: PointIx,
    pub links: Vec<ChainLink>,
    pub linking_points: Vec<PointIx>,
}

impl VicinityChain {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Re-checks every chain invariant against `space`.
    pub fn verify(&self, space: &FrechetSpace) -> std::result::Result<(), String> {
        let (first, last) = match (self.links.first(), self.links.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err("empty chain".into()),
        };
        if !first.vicinity.contains(self.x) {
            return Err("x is not in the first vicinity".into());
        }
        if !last.vicinity.contains(self.y) {
            return Err("y is not in the last vicinity".into());
        }
        if self.linking_points.len() + 1 != self.links.len() {
            return Err("wrong number of linking points".into());
        }
        for link in &self.links {
            if link.owner >= space.len() || !space.vicinities(link.owner).contains(&link.vicinity) {
                return Err(format!(
                    "vicinity is not a vicinity of owner {}",
                    link.owner
                ));
            }
        }
        for (i, z) in self.linking_points.iter().enumerate() {
            if !self.links[i].vicinity.contains(*z) || !self.links[i + 1].vicinity.contains(*z) {
                return Err(format!(
                    "linking point {i} is not in both neighbouring vicinities"
                ));
            }
        }
        Ok(())
    }

    /// Owner labels and member labels, for reports.
    pub fn describe(&self, space: &FrechetSpace) -> Vec<(String, Vec<String>)> {
        self.links
            .iter()
            .map(|l| (space.label(l.owner).to_string(), space.names(&l.vicinity)))
            .collect()
    }
}

/// Shortest chain from `x` to `y` through members of `cover`.
///
/// Breadth-first search over the intersection graph of cover members; ties go
/// to the lowest owner index. `None` when the cover separates `x` from `y`.
pub fn chain_in_cover(
    space: &FrechetSpace,
    cover: &MinimalCover,
    x: PointIx,
    y: PointIx,
) -> Result<Option<VicinityChain>> {
    space.check_point(x)?;
    space.check_point(y)?;
    cover.check(space)?;
    let n = space.len();
    let member = |o: PointIx| cover.member(space, o);

    let mut parent: Vec<Option<PointIx>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for (o, s) in seen.iter_mut().enumerate() {
        if member(o).contains(x) {
            *s = true;
            queue.push_back(o);
        }
    }
    while let Some(u) = queue.pop_front() {
        if member(u).contains(y) {
            let mut owners = vec![u];
            let mut cur = u;
            while let Some(p) = parent[cur] {
                owners.push(p);
                cur = p;
            }
            owners.reverse();
            let links: Vec<ChainLink> = owners
                .iter()
                .map(|&o| ChainLink {
                    owner: o,
                    vicinity: member(o).clone(),
                })
                .collect();
            let linking_points = links
                .windows(2)
                .map(|w| {
                    w[0].vicinity
                        .first_common(&w[1].vicinity)
                        .expect("adjacent links overlap")
                })
                .collect();
            return Ok(Some(VicinityChain {
                x,
                y,
                links,
                linking_points,
            }));
        }
        for v in 0..n {
            if !seen[v] && member(u).intersects(member(v)) {
                seen[v] = true;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    Ok(None)
}

/// Component id of every point under the chain relation of one cover.
///
/// Members sharing a point are adjacent, so every point lies in exactly one
/// component: the component of its own chosen vicinity.
pub fn cover_components(space: &FrechetSpace, cover: &MinimalCover) -> Vec<usize> {
    let n = space.len();
    let mut uf = UnionFind::new(n);
    let mut holder: Vec<Option<PointIx>> = vec![None; n];
    for owner in 0..n {
        for &p in cover.member(space, owner).members() {
            match holder[p] {
                Some(h) => uf.union(h, owner),
                None => holder[p] = Some(owner),
            }
        }
    }
    (0..n).map(|p| uf.find(p)).collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConnectivityVerdict {
    /// Every minimal cover chains the pair; `sample` comes from the first cover.
    Connected {
        sample: VicinityChain,
        covers_checked: u128,
    },
    /// `witness` is the first minimal cover that separates the pair.
    Disconnected {
        witness: MinimalCover,
        cover_index: u128,
    },
}

impl ConnectivityVerdict {
    pub fn is_connected(&self) -> bool {
        matches!(self, ConnectivityVerdict::Connected { .. })
    }
}

/// Decides V-connectedness of `x` and `y` by checking every minimal cover.
pub fn v_connected(
    space: &FrechetSpace,
    x: PointIx,
    y: PointIx,
    cap: u64,
) -> Result<ConnectivityVerdict> {
    space.check_point(x)?;
    space.check_point(y)?;
    let mut sample = None;
    let mut checked = 0u128;
    for cover in enumerate_minimal_covers(space, cap)? {
        match chain_in_cover(space, &cover, x, y)? {
            Some(chain) => {
                if sample.is_none() {
                    sample = Some(chain);
                }
            }
            None => {
                return Ok(ConnectivityVerdict::Disconnected {
                    witness: cover,
                    cover_index: checked,
                })
            }
        }
        checked += 1;
    }
    let sample = sample.expect("a space with points has at least one cover");
    Ok(ConnectivityVerdict::Connected {
        sample,
        covers_checked: checked,
    })
}

/// All-pairs V-connectedness, computed from per-cover components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityMatrix {
    n: usize,
    connected: Vec<bool>,
}

impl ConnectivityMatrix {
    pub fn is_connected(&self, x: PointIx, y: PointIx) -> bool {
        self.connected[x * self.n + y]
    }
}

pub fn connectivity_matrix(space: &FrechetSpace, cap: u64) -> Result<ConnectivityMatrix> {
    let n = space.len();
    let mut connected = vec![true; n * n];
    for cover in enumerate_minimal_covers(space, cap)? {
        let comp = cover_components(space, &cover);
        for x in 0..n {
            for y in 0..n {
                if comp[x] != comp[y] {
                    connected[x * n + y] = false;
                }
            }
        }
    }
    Ok(ConnectivityMatrix { n, connected })
}
