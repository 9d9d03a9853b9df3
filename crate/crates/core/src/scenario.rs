//! JSON scenarios in, canonical JSON reports out.
//!
//! A scenario names a `kind`, carries a kind-specific `payload`, and may pin a
//! `seed` and a cover-enumeration `budget`. Reports are serialized with sorted
//! keys and every float written to 17 significant digits, so identical input
//! and seed give byte-identical output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::comparative::{
    find_comparative_sequence, is_equivalence, make_matcher, number_label, parse_entries, Judgment,
    Matcher, MatcherSpec, TableMatcher,
};
use crate::error::SoritesError;
use crate::fuzzy::{luk_eval, mismatch_report, Connective, TruthValue};
use crate::pretopology::{
    chain_in_cover, v_connected, ConnectivityVerdict, FrechetSpace, MinimalCover, SpaceSpec,
    VicinityChain,
};
use crate::probabilistic::{
    assess_supervenience, bernoulli_oracle, check_probabilistic_tolerance, discretize, estimate_p,
    reduce_mixture, temporal_fold, validate_zora, verify_reduction_by_simulation, Distribution,
    Mixture, ObservationLog, ZoraGrid, DEFAULT_DETERMINISM_THRESHOLD,
};
use crate::system::{
    assert_no_sorites, check_tolerance, derive_soritical_contradiction, find_con_witness,
    ResponseSystem, SystemSpec, ToleranceReport, Verdict,
};
use crate::threshold::{
    dyadic, estimate_boundary, exact_gap, rational_to_f64, sample_rules, stay_below_sequence,
    Binary, Convention, ReplayOracle, ResponseOracle, RuleDistribution, RuleOracle, ThresholdRule,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Cover-enumeration cap when neither the scenario nor the caller sets one.
pub const DEFAULT_BUDGET: u64 = 1 << 20;

/// Largest response set for which every event is tabulated.
const MAX_EVENT_RESPONSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    SpaceAnalysis,
    Boundary,
    Zora,
    Mixture,
    Fuzzy,
    Comparative,
    Rulemaking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    pub payload: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the scenario's seed.
    pub seed: Option<u64>,
    /// Overrides the scenario's budget.
    pub budget: Option<u64>,
}

/// Why a run produced no report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => 2,
            RunError::Budget(_) => 3,
            RunError::Internal(_) => 1,
        }
    }
}

impl From<SoritesError> for RunError {
    fn from(e: SoritesError) -> Self {
        match e {
            SoritesError::Budget { .. } => RunError::Budget(e.to_string()),
            SoritesError::Inconsistency(_) => RunError::Internal(e.to_string()),
            other => RunError::Input(other.to_string()),
        }
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

fn input(msg: impl Into<String>) -> RunError {
    RunError::Input(msg.into())
}

/// A finished analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Report(pub Value);

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => canonical_json(&self.0),
            Format::Text => text_lines(&self.0),
        }
    }
}

/// Parses and runs a scenario. `base_dir` resolves payload file references.
pub fn run(text: &str, base_dir: &Path, opts: &RunOptions) -> RunResult<Report> {
    let raw: Value = serde_json::from_str(text)
        .map_err(|e| input(format!("scenario is not valid JSON: {e}")))?;
    let mut scenario: Scenario = serde_json::from_value(raw)
        .map_err(|e| input(format!("scenario does not match the schema: {e}")))?;
    if scenario.schema_version != SCHEMA_VERSION {
        return Err(input(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            scenario.schema_version
        )));
    }
    if opts.seed.is_some() {
        scenario.seed = opts.seed;
    }
    if opts.budget.is_some() {
        scenario.budget = opts.budget;
    }
    if scenario.budget == Some(0) {
        return Err(input("budget must be positive"));
    }
    let budget = scenario.budget.unwrap_or(DEFAULT_BUDGET);
    let ctx = Ctx {
        seed: scenario.seed,
        budget,
        base_dir,
    };
    let result = match scenario.kind {
        ScenarioKind::SpaceAnalysis => space_analysis(payload(&scenario)?, &ctx)?,
        ScenarioKind::Boundary => boundary(payload(&scenario)?)?,
        ScenarioKind::Zora => zora(payload(&scenario)?, &ctx)?,
        ScenarioKind::Mixture => mixture(payload(&scenario)?, &ctx)?,
        ScenarioKind::Fuzzy => fuzzy(payload(&scenario)?)?,
        ScenarioKind::Comparative => comparative(payload(&scenario)?, &ctx)?,
        ScenarioKind::Rulemaking => rulemaking(payload(&scenario)?, &ctx)?,
    };
    let echo = serde_json::to_value(&scenario).expect("scenario serializes");
    Ok(Report(json!({
        "schema_version": SCHEMA_VERSION,
        "kind": scenario.kind,
        "seed": scenario.seed,
        "budget": budget,
        "input": echo,
        "result": result,
    })))
}

struct Ctx<'a> {
    seed: Option<u64>,
    budget: u64,
    base_dir: &'a Path,
}

impl Ctx<'_> {
    fn require_seed(&self, what: &str) -> RunResult<u64> {
        self.seed.ok_or_else(|| {
            input(format!(
                "{what} is stochastic: set a seed in the scenario or pass --seed"
            ))
        })
    }

    fn read(&self, rel: &str) -> RunResult<String> {
        let path = self.base_dir.join(rel);
        std::fs::read_to_string(&path)
            .map_err(|e| input(format!("cannot read {}: {e}", path.display())))
    }
}

fn payload<T: DeserializeOwned>(s: &Scenario) -> RunResult<T> {
    serde_json::from_value(s.payload.clone())
        .map_err(|e| input(format!("bad {:?} payload: {e}", s.kind)))
}

// space-analysis

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpacePayload {
    points: Vec<String>,
    vicinities: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    responses: Option<Vec<String>>,
    pi: BTreeMap<String, String>,
    /// Pairs to test for V-connectedness.
    #[serde(default)]
    pairs: Vec<(String, String)>,
    /// Reductio: follow an asserted tolerant cover between two points.
    #[serde(default)]
    contradiction: Option<ContradictionRequest>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContradictionRequest {
    x: String,
    y: String,
    /// Vicinity index per point; the computed tolerant cover when absent.
    #[serde(default)]
    cover: Option<BTreeMap<String, usize>>,
}

fn space_analysis(p: SpacePayload, ctx: &Ctx) -> RunResult<Value> {
    let spec = SystemSpec {
        space: SpaceSpec {
            points: p.points,
            vicinities: p.vicinities,
        },
        responses: p.responses,
        pi: p.pi,
    };
    let sys = ResponseSystem::from_spec(&spec)?;
    let space = sys.space();
    let labels =
        |ps: &[usize]| -> Vec<String> { ps.iter().map(|&i| space.label(i).to_string()).collect() };

    let tol = check_tolerance(&sys);
    let con = find_con_witness(&sys, ctx.budget)?;
    let verdict = match assert_no_sorites(&sys, ctx.budget)? {
        Verdict::ToleranceFails {
            points,
            con_witness,
        } => json!({
            "kind": "tolerance_fails",
            "points": labels(&points),
            "con_witness": labels(&[con_witness.0, con_witness.1]),
        }),
        Verdict::ConFails => json!({ "kind": "con_fails" }),
        Verdict::BothFail { points } => json!({ "kind": "both_fail", "points": labels(&points) }),
    };

    let mut connectivity = Vec::new();
    for (x, y) in &p.pairs {
        let (xi, yi) = (space.point(x)?, space.point(y)?);
        connectivity.push(match v_connected(space, xi, yi, ctx.budget)? {
            ConnectivityVerdict::Connected {
                sample,
                covers_checked,
            } => json!({
                "x": x, "y": y, "verdict": "connected",
                "covers_checked": covers_checked as u64,
                "sample_chain": chain_json(space, &sample),
            }),
            ConnectivityVerdict::Disconnected {
                witness,
                cover_index,
            } => json!({
                "x": x, "y": y, "verdict": "disconnected",
                "cover_index": cover_index as u64,
                "witness_cover": witness.describe(space),
            }),
        });
    }

    let contradiction = match p.contradiction {
        None => Value::Null,
        Some(req) => {
            let (xi, yi) = (space.point(&req.x)?, space.point(&req.y)?);
            let report = match &req.cover {
                Some(choice) => {
                    let mut c = Vec::with_capacity(space.len());
                    for l in space.labels() {
                        c.push(
                            *choice
                                .get(l)
                                .ok_or_else(|| input(format!("asserted cover skips {l}")))?,
                        );
                    }
                    for l in choice.keys() {
                        space.point(l)?;
                    }
                    let cover = MinimalCover { choice: c };
                    cover.check(space)?;
                    ToleranceReport::asserted(cover)
                }
                None => tol.clone(),
            };
            let cover_json = report.tolerant_cover.as_ref().map(|c| c.describe(space));
            match derive_soritical_contradiction(&sys, &report, xi, yi) {
                Ok(ch) => json!({
                    "x": req.x, "y": req.y, "asserted": report.asserted, "cover": cover_json,
                    "outcome": "violating_link",
                    "points": labels(&ch.points),
                    "responses": ch.responses,
                    "violating_link": ch.violating_link,
                    "flagged_vicinity": ch.flagged.as_ref().map(|l| json!({
                        "owner": space.label(l.owner),
                        "members": space.names(&l.vicinity),
                    })),
                    "chain": chain_json(space, &ch.chain),
                }),
                Err(SoritesError::NoChain { .. }) => json!({
                    "x": req.x, "y": req.y, "asserted": report.asserted, "cover": cover_json,
                    "outcome": "no_chain",
                }),
                Err(e) => return Err(e.into()),
            }
        }
    };

    Ok(json!({
        "cover_count": u64::try_from(space.cover_count()).unwrap_or(u64::MAX),
        "tolerance": {
            "holds": tol.holds,
            "failing_points": labels(&tol.failing_points()),
            "constant_vicinities": space.labels().iter().cloned().zip(tol.constant.iter().cloned()).collect::<BTreeMap<_, _>>(),
            "tolerant_cover": tol.tolerant_cover.as_ref().map(|c| c.describe(space)),
        },
        "con_witness": con.map(|(x, y)| labels(&[x, y])),
        "verdict": verdict,
        "connectivity": connectivity,
        "contradiction": contradiction,
    }))
}

fn chain_json(space: &FrechetSpace, chain: &VicinityChain) -> Value {
    json!({
        "vicinities": chain.describe(space).into_iter()
            .map(|(owner, members)| json!({ "owner": owner, "members": members }))
            .collect::<Vec<_>>(),
        "linking_points": chain.linking_points.iter().map(|&p| space.label(p)).collect::<Vec<_>>(),
    })
}

// boundary

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryPayload {
    n: u32,
    #[serde(default)]
    v: Option<f64>,
    #[serde(default)]
    convention: Option<Convention>,
    /// Recorded `(stimulus, response)` answers, replayed instead of a rule.
    #[serde(default)]
    probe_log: Option<Vec<(f64, Binary)>>,
    #[serde(default)]
    stay_below: Option<StayBelow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StayBelow {
    x0: f64,
    k: usize,
    /// Defaults to the rule's `v`.
    #[serde(default)]
    v: Option<f64>,
}

fn boundary(p: BoundaryPayload) -> RunResult<Value> {
    let (mut oracle, rule): (Box<dyn ResponseOracle>, Option<ThresholdRule>) =
        match (&p.probe_log, p.v) {
            (Some(_), Some(_)) => return Err(input("give either v or probe_log, not both")),
            (Some(log), None) => (Box::new(ReplayOracle::new(log.clone())?), None),
            (None, Some(v)) => {
                let rule =
                    ThresholdRule::with_convention(v, p.convention.unwrap_or(Convention::Closed))?;
                (Box::new(RuleOracle::new(rule)), Some(rule))
            }
            (None, None) => return Err(input("boundary payload needs v or probe_log")),
        };
    let trace = estimate_boundary(oracle.as_mut(), p.n)?;
    let (lo, hi) = trace.bracket();
    let mut out = json!({
        "n": p.n,
        "q": trace.q,
        "estimate": trace.estimate(),
        "error_bound": trace.error_bound(),
        "bracket": [lo, hi],
        "oracle_calls": trace.oracle_calls,
        "consistent_conventions": ["closed", "open"],
    });
    if let Some(rule) = rule {
        let gap = exact_gap(trace.estimate(), rule.v());
        out["rule"] = json!({ "v": rule.v(), "convention": rule.convention() });
        out["abs_error"] = json!(rational_to_f64(&gap));
        out["within_bound"] = json!(gap <= dyadic(p.n));
    }
    if let Some(sb) = p.stay_below {
        let v =
            sb.v.or(rule.map(|r| r.v()))
                .ok_or_else(|| input("stay_below needs v"))?;
        let xs = stay_below_sequence(v, sb.x0, sb.k)?;
        out["stay_below"] = json!({
            "v": v,
            "x0": sb.x0,
            "exact": xs.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "approx": xs.iter().map(rational_to_f64).collect::<Vec<_>>(),
        });
    }
    Ok(out)
}

// zora

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZoraPayload {
    grid: Vec<f64>,
    p: Vec<f64>,
    /// Spread of `p` still counted as constant on a vicinity.
    #[serde(default)]
    tolerance: f64,
    /// Neighbour radius of the grid's vicinities.
    #[serde(default = "one")]
    radius: usize,
    #[serde(default)]
    estimate: Vec<EstimateRequest>,
    /// Answer off-grid stimuli by linear interpolation.
    #[serde(default)]
    interpolate: bool,
    /// Path to a `stimulus,response[,time]` log.
    #[serde(default)]
    observations: Option<String>,
    #[serde(default)]
    determinism_threshold: Option<usize>,
    #[serde(default)]
    temporal: Option<Vec<(f64, String, f64)>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimateRequest {
    stimulus: f64,
    trials: u64,
}

fn zora(p: ZoraPayload, ctx: &Ctx) -> RunResult<Value> {
    let zg = ZoraGrid {
        grid: p.grid,
        p: p.p,
    };
    if zg.grid.len() != zg.p.len() || zg.grid.is_empty() {
        return Err(input("grid and p must be nonempty and of equal length"));
    }
    let violations: Vec<String> = validate_zora(&zg).iter().map(ToString::to_string).collect();
    let space = FrechetSpace::line(zg.grid.len(), p.radius, p.radius);
    let tol = check_probabilistic_tolerance(&zg, &space, p.tolerance)?;
    let discrete: Vec<&str> = discretize(&zg).into_iter().map(Binary::label).collect();

    let mut estimates = Vec::new();
    if !p.estimate.is_empty() {
        let seed = ctx.require_seed("estimation")?;
        let mut src = bernoulli_oracle(&zg, seed)?;
        if p.interpolate {
            src = src.with_interpolation();
        }
        for req in &p.estimate {
            let e = estimate_p(&mut src, req.stimulus, req.trials)?;
            estimates.push(json!({
                "stimulus": req.stimulus,
                "p": src.probability(req.stimulus)?,
                "trials": e.trials,
                "successes": e.successes,
                "p_hat": e.p_hat,
                "ci95": [e.ci.0, e.ci.1],
            }));
        }
    }

    let supervenience = match &p.observations {
        None => Value::Null,
        Some(path) => {
            let log = ObservationLog::parse(&ctx.read(path)?)?;
            let threshold = p
                .determinism_threshold
                .unwrap_or(DEFAULT_DETERMINISM_THRESHOLD);
            json!({ "threshold": threshold, "records": log.records.len(), "verdicts": assess_supervenience(&log, threshold) })
        }
    };

    let temporal = match &p.temporal {
        None => Value::Null,
        Some(table) => {
            let folded = temporal_fold(table)?;
            json!({
                "stimuli": folded.stimuli.iter().zip(&folded.p)
                    .map(|((x, t), p)| json!({ "x": x, "t": t, "p": p }))
                    .collect::<Vec<_>>(),
                "times": folded.times(),
            })
        }
    };

    Ok(json!({
        "violations": violations,
        "valid": violations.is_empty(),
        "tolerance": {
            "holds": tol.holds,
            "failing_points": tol.failing_points(),
            "radius": p.radius,
            "spread": p.tolerance,
        },
        "discretized": discrete,
        "estimates": estimates,
        "supervenience": supervenience,
        "temporal": temporal,
    }))
}

// mixture

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixturePayload {
    components: Vec<Distribution>,
    weights: Vec<f64>,
    #[serde(default)]
    trials: Option<u64>,
}

fn mixture(p: MixturePayload, ctx: &Ctx) -> RunResult<Value> {
    let m = Mixture::new(p.components, p.weights)?;
    let reduced = reduce_mixture(&m);
    let support: Vec<String> = m.support().into_iter().collect();
    let events = if support.len() <= MAX_EVENT_RESPONSES {
        (0u32..1 << support.len())
            .map(|mask| {
                let event: Vec<&str> = support
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, s)| s.as_str())
                    .collect();
                json!({
                    "event": event,
                    "mixed": m.event_prob(&event),
                    "reduced": reduced.prob(event.iter().copied()),
                })
            })
            .collect()
    } else {
        Vec::new()
    };
    let simulation = match p.trials {
        None => Value::Null,
        Some(trials) => {
            let seed = ctx.require_seed("simulation")?;
            json!({ "trials": trials, "max_deviation": verify_reduction_by_simulation(&m, seed, trials)? })
        }
    };
    Ok(json!({ "reduced": reduced, "events": events, "simulation": simulation }))
}

// fuzzy

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FuzzyPayload {
    #[serde(default)]
    pairs: Vec<(f64, f64)>,
    #[serde(default)]
    evaluations: Vec<Evaluation>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Evaluation {
    connective: Connective,
    p: f64,
    #[serde(default)]
    q: Option<f64>,
}

fn fuzzy(p: FuzzyPayload) -> RunResult<Value> {
    let mut reports = Vec::new();
    for (a, b) in p.pairs {
        reports.push(mismatch_report(TruthValue::new(a)?, TruthValue::new(b)?));
    }
    let mut evals = Vec::new();
    for e in p.evaluations {
        let q = e.q.map(TruthValue::new).transpose()?;
        let v = luk_eval(e.connective, TruthValue::new(e.p)?, q)?;
        evals.push(json!({ "connective": e.connective, "p": e.p, "q": e.q, "value": v.value() }));
    }
    Ok(json!({ "mismatch": reports, "evaluations": evals }))
}

// comparative

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PointLabel {
    Number(f64),
    Label(String),
}

impl PointLabel {
    fn into_label(self) -> String {
        match self {
            PointLabel::Number(x) => number_label(x),
            PointLabel::Label(s) => s,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum MatcherPayload {
    Epsilon {
        epsilon: f64,
    },
    Digits {
        k: u32,
    },
    Table {
        #[serde(default)]
        entries: Vec<(String, String, Judgment)>,
        /// Path to an `x,y,same|different` file.
        #[serde(default)]
        path: Option<String>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComparativePayload {
    points: Vec<PointLabel>,
    matcher: MatcherPayload,
}

fn build_matcher(mp: MatcherPayload, ctx: &Ctx) -> RunResult<Matcher> {
    Ok(match mp {
        MatcherPayload::Epsilon { epsilon } => make_matcher(&MatcherSpec::Epsilon { epsilon })?,
        MatcherPayload::Digits { k } => make_matcher(&MatcherSpec::Digits { k })?,
        MatcherPayload::Table { mut entries, path } => {
            if let Some(path) = path {
                entries.extend(parse_entries(&ctx.read(&path)?)?);
            }
            Matcher::Table(TableMatcher::new(entries)?)
        }
    })
}

fn comparative(p: ComparativePayload, ctx: &Ctx) -> RunResult<Value> {
    let points: Vec<String> = p.points.into_iter().map(PointLabel::into_label).collect();
    let m = build_matcher(p.matcher, ctx)?;
    let seq = find_comparative_sequence(&points, &m)?;
    let eq = is_equivalence(&points, &m)?;
    Ok(json!({
        "points": points,
        "sequence": seq.map(|s| s.points),
        "equivalence": eq,
    }))
}

// rulemaking

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RulemakingPayload {
    distribution: RuleDistribution,
    #[serde(default = "one")]
    samples: usize,
}

fn rulemaking(p: RulemakingPayload, ctx: &Ctx) -> RunResult<Value> {
    let seed = ctx.require_seed("rule sampling")?;
    if p.samples == 0 {
        return Err(input("samples must be at least 1"));
    }
    let rules = sample_rules(&p.distribution, seed, p.samples)?;
    let mean_v = rules.iter().map(|r| r.v()).sum::<f64>() / rules.len() as f64;
    let r1 = rules
        .iter()
        .filter(|r| r.boundary_response() == Binary::R1)
        .count();
    Ok(json!({
        "rules": rules.iter().map(|r| json!({ "v": r.v(), "boundary": r.boundary_response() })).collect::<Vec<_>>(),
        "mean_v": mean_v,
        "boundary_r1_fraction": r1 as f64 / rules.len() as f64,
    }))
}

// replay

/// Re-checks the witnesses in a report against the scenario that produced it.
pub fn replay(text: &str, base_dir: &Path, report: &Value) -> std::result::Result<(), String> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let ctx = Ctx {
        seed: None,
        budget: DEFAULT_BUDGET,
        base_dir,
    };
    let result = &report["result"];
    match scenario.kind {
        ScenarioKind::SpaceAnalysis => {
            let p: SpacePayload = payload(&scenario).map_err(|e| e.to_string())?;
            let spec = SystemSpec {
                space: SpaceSpec {
                    points: p.points,
                    vicinities: p.vicinities,
                },
                responses: p.responses,
                pi: p.pi,
            };
            let sys = ResponseSystem::from_spec(&spec).map_err(|e| e.to_string())?;
            replay_space(&sys, result)
        }
        ScenarioKind::Boundary => replay_boundary(result),
        ScenarioKind::Comparative => {
            let p: ComparativePayload = payload(&scenario).map_err(|e| e.to_string())?;
            let m = build_matcher(p.matcher, &ctx).map_err(|e| e.to_string())?;
            if let Some(seq) = result["sequence"].as_array() {
                let points = seq
                    .iter()
                    .map(|v| v.as_str().unwrap_or_default().to_string())
                    .collect();
                crate::comparative::ComparativeSequence { points }.verify(&m)?;
            }
            Ok(())
        }
        ScenarioKind::Mixture => {
            serde_json::from_value::<Distribution>(result["reduced"].clone())
                .map_err(|e| e.to_string())?;
            for ev in result["events"].as_array().into_iter().flatten() {
                let (a, b) = (
                    ev["mixed"].as_f64().unwrap_or(f64::NAN),
                    ev["reduced"].as_f64().unwrap_or(f64::NAN),
                );
                if (a - b).abs() > 1e-12 {
                    return Err(format!("event {} disagrees", ev["event"]));
                }
            }
            Ok(())
        }
        ScenarioKind::Rulemaking => {
            for r in result["rules"].as_array().into_iter().flatten() {
                let v = r["v"].as_f64().ok_or("rule without v")?;
                let b: Binary =
                    serde_json::from_value(r["boundary"].clone()).map_err(|e| e.to_string())?;
                ThresholdRule::new(v, b).map_err(|e| e.to_string())?;
            }
            Ok(())
        }
        ScenarioKind::Zora | ScenarioKind::Fuzzy => Ok(()),
    }
}

fn labels_of(space: &FrechetSpace, v: &Value) -> std::result::Result<Vec<usize>, String> {
    v.as_array()
        .ok_or("expected a list of points")?
        .iter()
        .map(|l| {
            space
                .point(l.as_str().unwrap_or_default())
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Finds the vicinity index of `owner` whose members are `members`.
fn vicinity_index(
    space: &FrechetSpace,
    owner: usize,
    members: &Value,
) -> std::result::Result<usize, String> {
    let mut ms = labels_of(space, members)?;
    ms.sort_unstable();
    space
        .vicinities(owner)
        .iter()
        .position(|v| v.members() == ms.as_slice())
        .ok_or_else(|| format!("{members} is not a vicinity of {}", space.label(owner)))
}

fn cover_from_json(space: &FrechetSpace, v: &Value) -> std::result::Result<MinimalCover, String> {
    let obj = v.as_object().ok_or("cover must be an object")?;
    let choice = (0..space.len())
        .map(|p| {
            vicinity_index(
                space,
                p,
                obj.get(space.label(p)).ok_or("cover skips a point")?,
            )
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(MinimalCover { choice })
}

fn chain_from_json(
    space: &FrechetSpace,
    x: usize,
    y: usize,
    v: &Value,
) -> std::result::Result<VicinityChain, String> {
    let mut links = Vec::new();
    for link in v["vicinities"]
        .as_array()
        .ok_or("chain without vicinities")?
    {
        let owner = space
            .point(link["owner"].as_str().unwrap_or_default())
            .map_err(|e| e.to_string())?;
        let idx = vicinity_index(space, owner, &link["members"])?;
        links.push(crate::pretopology::ChainLink {
            owner,
            vicinity: space.vicinities(owner)[idx].clone(),
        });
    }
    let linking_points = labels_of(space, &v["linking_points"])?;
    Ok(VicinityChain {
        x,
        y,
        links,
        linking_points,
    })
}

fn replay_space(sys: &ResponseSystem, result: &Value) -> std::result::Result<(), String> {
    let space = sys.space();
    if let Some(cover) = result["tolerance"]["tolerant_cover"].as_object() {
        let c = cover_from_json(space, &Value::Object(cover.clone()))?;
        if (0..space.len()).any(|p| !sys.is_constant_on(c.member(space, p))) {
            return Err("tolerant cover has a non-constant member".into());
        }
    }
    for entry in result["connectivity"].as_array().into_iter().flatten() {
        let x = space
            .point(entry["x"].as_str().unwrap_or_default())
            .map_err(|e| e.to_string())?;
        let y = space
            .point(entry["y"].as_str().unwrap_or_default())
            .map_err(|e| e.to_string())?;
        match entry["verdict"].as_str() {
            Some("connected") => {
                chain_from_json(space, x, y, &entry["sample_chain"])?.verify(space)?
            }
            Some("disconnected") => {
                let c = cover_from_json(space, &entry["witness_cover"])?;
                if chain_in_cover(space, &c, x, y)
                    .map_err(|e| e.to_string())?
                    .is_some()
                {
                    return Err("witness cover does link the pair".into());
                }
            }
            other => return Err(format!("unknown verdict {other:?}")),
        }
    }
    let c = &result["contradiction"];
    if c["outcome"] == "violating_link" {
        let x = space
            .point(c["x"].as_str().unwrap_or_default())
            .map_err(|e| e.to_string())?;
        let y = space
            .point(c["y"].as_str().unwrap_or_default())
            .map_err(|e| e.to_string())?;
        let chain = chain_from_json(space, x, y, &c["chain"])?;
        chain.verify(space)?;
        let i = c["violating_link"]
            .as_u64()
            .ok_or("missing violating link")? as usize;
        let points = labels_of(space, &c["points"])?;
        let owner = space
            .point(c["flagged_vicinity"]["owner"].as_str().unwrap_or_default())
            .map_err(|e| e.to_string())?;
        let idx = vicinity_index(space, owner, &c["flagged_vicinity"]["members"])?;
        let flagged = crate::pretopology::ChainLink {
            owner,
            vicinity: space.vicinities(owner)[idx].clone(),
        };
        let responses = points
            .iter()
            .map(|&p| sys.response(p).to_string())
            .collect();
        crate::system::SoriticalChain {
            points,
            responses,
            violating_link: Some(i),
            chain,
            flagged: Some(flagged),
        }
        .verify(sys)?;
    }
    Ok(())
}

fn replay_boundary(result: &Value) -> std::result::Result<(), String> {
    let q: Vec<f64> = serde_json::from_value(result["q"].clone()).map_err(|e| e.to_string())?;
    let n = result["n"].as_u64().ok_or("missing n")? as u32;
    let trace = crate::threshold::BisectionTrace {
        q,
        oracle_calls: result["oracle_calls"]
            .as_u64()
            .ok_or("missing oracle_calls")?,
        n,
    };
    trace.verify()?;
    if let Some(v) = result["rule"]["v"].as_f64() {
        let (lo, hi) = trace.bracket();
        if !(lo <= v && v <= hi) {
            return Err(format!("v = {v} lies outside [{lo}, {hi}]"));
        }
    }
    Ok(())
}

// canonical output

/// Pretty JSON with sorted keys, two-space indent, floats at 17 significant
/// digits, and a trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn format_number(n: &serde_json::Number) -> String {
    if let Some(u) = n.as_u64() {
        u.to_string()
    } else if let Some(i) = n.as_i64() {
        i.to_string()
    } else {
        format!("{:.16e}", n.as_f64().expect("finite number"))
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&format_number(n)),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(o) if o.is_empty() => out.push_str("{}"),
        Value::Object(o) => {
            out.push_str("{\n");
            let keys: BTreeSet<&String> = o.keys().collect();
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_value(out, &o[*k], depth + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

/// One `path = value` line per leaf, in key order.
fn text_lines(v: &Value) -> String {
    fn walk(out: &mut String, path: &str, v: &Value) {
        match v {
            Value::Object(o) if !o.is_empty() => {
                for (k, x) in o {
                    let p = if path.is_empty() {
                        k.clone()
                    } else {
                        format!("{path}.{k}")
                    };
                    walk(out, &p, x);
                }
            }
            Value::Array(a) if !a.is_empty() => {
                for (i, x) in a.iter().enumerate() {
                    walk(out, &format!("{path}[{i}]"), x);
                }
            }
            Value::Number(n) => {
                let _ = writeln!(out, "{path} = {}", format_number(n));
            }
            other => {
                let _ = writeln!(out, "{path} = {other}");
            }
        }
    }
    let mut out = String::new();
    walk(&mut out, "", v);
    out
}
