//! Comparative sorites over same/different judgments on stimulus pairs.
//!
//! A comparative soritical sequence `x_1, …, x_n` has every adjacent pair
//! judged `same` and the end pair judged `different`. Nothing logical forbids
//! one; it exists exactly when the `same` relation fails to be transitive
//! somewhere along a `same`-path.
//!
//! Numeric matchers read point labels as exact decimals, so `"0.3"` is three
//! tenths rather than the nearest double.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num::{BigInt, BigRational, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SoritesError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Judgment {
    Same,
    Different,
}

impl std::str::FromStr for Judgment {
    type Err = SoritesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same" => Ok(Judgment::Same),
            "different" => Ok(Judgment::Different),
            other => Err(SoritesError::input(format!(
                "judgment must be same or different, got {other}"
            ))),
        }
    }
}

/// Serialized matcher description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatcherSpec {
    /// `same` iff `|x - y| ≤ epsilon`.
    Epsilon { epsilon: f64 },
    /// `same` iff the first `k` decimal digits agree.
    Digits { k: u32 },
    /// Explicit judgments; the reverse of each pair is filled in.
    Table {
        entries: Vec<(String, String, Judgment)>,
    },
}

/// Explicit, symmetric pair judgments. Unlisted `(x, x)` pairs are `same`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TableMatcher {
    pairs: HashMap<(String, String), Judgment>,
}

impl TableMatcher {
    /// Rejects a pair listed with both judgments (in either order).
    pub fn new(entries: impl IntoIterator<Item = (String, String, Judgment)>) -> Result<Self> {
        let mut pairs = HashMap::new();
        for (x, y, j) in entries {
            for key in [(x.clone(), y.clone()), (y.clone(), x.clone())] {
                if let Some(prev) = pairs.insert(key, j) {
                    if prev != j {
                        return Err(SoritesError::input(format!(
                            "conflicting judgments for ({x}, {y})"
                        )));
                    }
                }
            }
        }
        Ok(TableMatcher { pairs })
    }

    /// Parses `x,y,same|different` lines.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_entries(text)?)
    }

    pub fn get(&self, x: &str, y: &str) -> Option<Judgment> {
        self.pairs.get(&(x.to_string(), y.to_string())).copied()
    }
}

/// Reads `x,y,same|different` lines, skipping an optional header.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String, Judgment)>> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [x, y, j] = fields.as_slice() else {
            return Err(SoritesError::input(format!(
                "table line {}: expected x,y,same|different",
                i + 1
            )));
        };
        if i == 0 && j.eq_ignore_ascii_case("judgment") {
            continue;
        }
        entries.push((x.to_string(), y.to_string(), j.parse()?));
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Matcher {
    Epsilon(BigRational),
    Digits(u32),
    Table(TableMatcher),
}

pub fn make_matcher(spec: &MatcherSpec) -> Result<Matcher> {
    match spec {
        MatcherSpec::Epsilon { epsilon } => {
            if !(epsilon.is_finite() && *epsilon >= 0.0) {
                return Err(SoritesError::input(format!(
                    "epsilon {epsilon} must be a nonnegative number"
                )));
            }
            Ok(Matcher::Epsilon(
                parse_decimal(&number_label(*epsilon)).expect("finite float"),
            ))
        }
        MatcherSpec::Digits { k } => {
            if *k == 0 {
                return Err(SoritesError::input("digits matcher needs k ≥ 1"));
            }
            Ok(Matcher::Digits(*k))
        }
        MatcherSpec::Table { entries } => {
            Ok(Matcher::Table(TableMatcher::new(entries.iter().cloned())?))
        }
    }
}

impl Matcher {
    pub fn judge(&self, x: &str, y: &str) -> Result<Judgment> {
        match self {
            Matcher::Table(t) => match t.get(x, y) {
                Some(j) => Ok(j),
                None if x == y => Ok(Judgment::Same),
                None => Err(SoritesError::input(format!(
                    "table has no judgment for ({x}, {y})"
                ))),
            },
            _ => {
                let (a, b) = (numeric(x)?, numeric(y)?);
                Ok(self.judge_numbers(&a, &b))
            }
        }
    }

    fn judge_numbers(&self, a: &BigRational, b: &BigRational) -> Judgment {
        let same = match self {
            Matcher::Epsilon(eps) => (a - b).abs() <= *eps,
            Matcher::Digits(k) => digit_prefix(a, *k) == digit_prefix(b, *k),
            Matcher::Table(_) => unreachable!("tables are judged by label"),
        };
        if same {
            Judgment::Same
        } else {
            Judgment::Different
        }
    }

    /// Full judgment matrix over `points`.
    fn matrix(&self, points: &[String]) -> Result<Vec<Vec<Judgment>>> {
        let mut seen = HashMap::new();
        for p in points {
            if seen.insert(p.as_str(), ()).is_some() {
                return Err(SoritesError::input(format!("point {p} listed twice")));
            }
        }
        match self {
            Matcher::Table(_) => points
                .iter()
                .map(|x| points.iter().map(|y| self.judge(x, y)).collect())
                .collect(),
            _ => {
                let vals = points
                    .iter()
                    .map(|p| numeric(p))
                    .collect::<Result<Vec<_>>>()?;
                Ok(vals
                    .iter()
                    .map(|a| vals.iter().map(|b| self.judge_numbers(a, b)).collect())
                    .collect())
            }
        }
    }
}

/// `floor(x · 10^k)`: the integer part followed by the first `k` digits of
/// the expansion that never ends in repeated nines.
fn digit_prefix(x: &BigRational, k: u32) -> BigInt {
    (x * BigRational::from_integer(BigInt::from(10).pow(k)))
        .floor()
        .to_integer()
}

/// Shortest decimal text that reads back as `x`.
pub fn number_label(x: f64) -> String {
    format!("{x}")
}

fn numeric(label: &str) -> Result<BigRational> {
    parse_decimal(label)
        .ok_or_else(|| SoritesError::input(format!("{label} is not a decimal number")))
}

/// Exact value of a decimal literal such as `-12.5e-3`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let scale = exp as i64 - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if neg && !value.is_zero() {
        value = -value;
    }
    Some(value)
}

/// Points judged `same` adjacently and `different` end to end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparativeSequence {
    pub points: Vec<String>,
}

impl ComparativeSequence {
    /// Replays the matcher over the sequence.
    pub fn verify(&self, m: &Matcher) -> std::result::Result<(), String> {
        let p = &self.points;
        if p.len() < 3 {
            return Err("a comparative sequence has at least three points".into());
        }
        for w in p.windows(2) {
            if m.judge(&w[0], &w[1]).map_err(|e| e.to_string())? != Judgment::Same {
                return Err(format!("({}, {}) is not judged same", w[0], w[1]));
            }
        }
        if m.judge(&p[0], &p[p.len() - 1]).map_err(|e| e.to_string())? != Judgment::Different {
            return Err("the end points are not judged different".into());
        }
        Ok(())
    }
}

/// Shortest comparative soritical sequence, if any.
///
/// Ties go to the earliest start point, then the earliest end point, then the
/// breadth-first path through earlier points.
pub fn find_comparative_sequence(
    points: &[String],
    m: &Matcher,
) -> Result<Option<ComparativeSequence>> {
    if points.is_empty() {
        return Err(SoritesError::input("no points"));
    }
    let j = m.matrix(points)?;
    let n = points.len();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for a in 0..n {
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut dist: Vec<Option<usize>> = vec![None; n];
        dist[a] = Some(0);
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if dist[v].is_none() && j[u][v] == Judgment::Same {
                    dist[v] = Some(dist[u].unwrap() + 1);
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        for b in 0..n {
            let Some(d) = dist[b] else { continue };
            if b == a || j[a][b] != Judgment::Different {
                continue;
            }
            if best.as_ref().is_some_and(|(bd, _)| *bd <= d) {
                continue;
            }
            let mut path = vec![b];
            let mut cur = b;
            while let Some(p) = parent[cur] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            best = Some((d, path));
        }
    }
    Ok(best.map(|(_, path)| ComparativeSequence {
        points: path.into_iter().map(|i| points[i].clone()).collect(),
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum EquivalenceCheck {
    Equivalence,
    NotReflexive {
        x: String,
    },
    NotSymmetric {
        x: String,
        y: String,
    },
    /// `x ~ y` and `y ~ z` but not `x ~ z`.
    NotTransitive {
        x: String,
        y: String,
        z: String,
    },
}

impl EquivalenceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, EquivalenceCheck::Equivalence)
    }
}

impl fmt::Display for EquivalenceCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivalenceCheck::Equivalence => write!(f, "equivalence"),
            EquivalenceCheck::NotReflexive { x } => write!(f, "({x}, {x}) judged different"),
            EquivalenceCheck::NotSymmetric { x, y } => {
                write!(f, "({x}, {y}) and ({y}, {x}) disagree")
            }
            EquivalenceCheck::NotTransitive { x, y, z } => {
                write!(f, "{x} ~ {y} and {y} ~ {z} but not {x} ~ {z}")
            }
        }
    }
}

/// Checks reflexivity, symmetry and transitivity of `same` on `points`,
/// returning the first counterexample in point order.
pub fn is_equivalence(points: &[String], m: &Matcher) -> Result<EquivalenceCheck> {
    let j = m.matrix(points)?;
    let n = points.len();
    let same = |a: usize, b: usize| j[a][b] == Judgment::Same;
    if let Some(x) = points.iter().enumerate().find(|&(i, _)| !same(i, i)) {
        return Ok(EquivalenceCheck::NotReflexive { x: x.1.clone() });
    }
    for x in 0..n {
        for y in 0..n {
            if j[x][y] != j[y][x] {
                return Ok(EquivalenceCheck::NotSymmetric {
                    x: points[x].clone(),
                    y: points[y].clone(),
                });
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if !same(x, y) {
                continue;
            }
            for z in 0..n {
                if same(y, z) && !same(x, z) {
                    return Ok(EquivalenceCheck::NotTransitive {
                        x: points[x].clone(),
                        y: points[y].clone(),
                        z: points[z].clone(),
                    });
                }
            }
        }
    }
    Ok(EquivalenceCheck::Equivalence)
}
