//! Python bindings for `sorites_core`.
//!
//! Spaces, systems, rules and grids are classes; the rest are functions.
//! Structured results come back as plain dicts and lists.

use std::collections::BTreeMap;
use std::path::Path;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use sorites_core::comparative::{self, MatcherSpec};
use sorites_core::fuzzy::{self, Connective, TruthValue};
use sorites_core::pretopology::{
    self, ConnectivityVerdict, FrechetSpace, MinimalCover, SpaceSpec, VicinityChain,
};
use sorites_core::probabilistic::{self, Distribution, Mixture};
use sorites_core::scenario::{self, RunError, RunOptions, DEFAULT_BUDGET};
use sorites_core::system::{self, ResponseSystem, ToleranceReport, Verdict};
use sorites_core::threshold::{self, Convention, RuleOracle, UnitStimulus};
use sorites_core::SoritesError;

create_exception!(
    sorites,
    BudgetExceeded,
    PyRuntimeError,
    "Cover enumeration would exceed the budget."
);

fn err(e: SoritesError) -> PyErr {
    match e {
        SoritesError::Budget { .. } => BudgetExceeded::new_err(e.to_string()),
        SoritesError::Inconsistency(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Hands a serializable value to Python through `json.loads`.
fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn chain_json(space: &FrechetSpace, chain: &VicinityChain) -> serde_json::Value {
    serde_json::json!({
        "vicinities": chain.describe(space),
        "linking_points": chain.linking_points.iter().map(|&p| space.label(p)).collect::<Vec<_>>(),
    })
}

fn convention(s: &str) -> PyResult<Convention> {
    match s {
        "closed" => Ok(Convention::Closed),
        "open" => Ok(Convention::Open),
        other => Err(PyValueError::new_err(format!(
            "convention must be closed or open, not {other}"
        ))),
    }
}

fn truth(v: f64) -> PyResult<TruthValue> {
    TruthValue::new(v).map_err(err)
}

/// A finite Fréchet space.
#[pyclass(name = "Space", module = "sorites", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpace(FrechetSpace);

#[pymethods]
impl PySpace {
    #[new]
    fn new(points: Vec<String>, vicinities: BTreeMap<String, Vec<Vec<String>>>) -> PyResult<Self> {
        FrechetSpace::from_spec(&SpaceSpec { points, vicinities })
            .map(PySpace)
            .map_err(err)
    }

    /// Points `0..n` with vicinities `{i-1, i, i+1}`.
    #[staticmethod]
    fn neighbor_grid(n: usize) -> Self {
        PySpace(FrechetSpace::neighbor_grid(n))
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn vicinities(&self, point: &str) -> PyResult<Vec<Vec<String>>> {
        let p = self.0.point(point).map_err(err)?;
        Ok(self
            .0
            .vicinities(p)
            .iter()
            .map(|v| self.0.names(v))
            .collect())
    }

    fn cover_count(&self) -> u128 {
        self.0.cover_count()
    }

    #[pyo3(signature = (x, y, budget = DEFAULT_BUDGET))]
    fn v_connected<'py>(
        &self,
        py: Python<'py>,
        x: &str,
        y: &str,
        budget: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let (xi, yi) = (self.0.point(x).map_err(err)?, self.0.point(y).map_err(err)?);
        let verdict = py
            .detach(|| pretopology::v_connected(&self.0, xi, yi, budget))
            .map_err(err)?;
        let v = match verdict {
            ConnectivityVerdict::Connected {
                sample,
                covers_checked,
            } => serde_json::json!({
                "connected": true,
                "covers_checked": covers_checked as u64,
                "chain": chain_json(&self.0, &sample),
            }),
            ConnectivityVerdict::Disconnected {
                witness,
                cover_index,
            } => serde_json::json!({
                "connected": false,
                "cover_index": cover_index as u64,
                "witness": witness.describe(&self.0),
            }),
        };
        to_py(py, &v)
    }

    /// `m[x][y]` is whether points `x` and `y` are V-connected.
    #[pyo3(signature = (budget = DEFAULT_BUDGET))]
    fn connectivity(&self, py: Python<'_>, budget: u64) -> PyResult<Vec<Vec<bool>>> {
        let n = self.0.len();
        let m = py
            .detach(|| pretopology::connectivity_matrix(&self.0, budget))
            .map_err(err)?;
        Ok((0..n)
            .map(|x| (0..n).map(|y| m.is_connected(x, y)).collect())
            .collect())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Space({} points)", self.0.len())
    }
}

/// A space with a response for every point.
#[pyclass(name = "System", module = "sorites", frozen)]
struct PySystem(ResponseSystem);

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (space, pi, responses = None))]
    fn new(
        space: &PySpace,
        pi: BTreeMap<String, String>,
        responses: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let responses = responses.unwrap_or_else(|| {
            let mut r: Vec<String> = pi.values().cloned().collect();
            r.sort();
            r.dedup();
            r
        });
        ResponseSystem::new(space.0.clone(), responses, &pi)
            .map(PySystem)
            .map_err(err)
    }

    #[getter]
    fn space(&self) -> PySpace {
        PySpace(self.0.space().clone())
    }

    fn response(&self, point: &str) -> PyResult<String> {
        let p = self.0.space().point(point).map_err(err)?;
        Ok(self.0.response(p).to_string())
    }

    fn tolerance<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let space = self.0.space();
        let rep = system::check_tolerance(&self.0);
        let dict = PyDict::new(py);
        dict.set_item("holds", rep.holds)?;
        dict.set_item(
            "failing_points",
            rep.failing_points()
                .iter()
                .map(|&p| space.label(p))
                .collect::<Vec<_>>(),
        )?;
        dict.set_item(
            "tolerant_cover",
            rep.tolerant_cover.map(|c| c.describe(space)),
        )?;
        Ok(dict.into_any())
    }

    #[pyo3(signature = (budget = DEFAULT_BUDGET))]
    fn con_witness(&self, py: Python<'_>, budget: u64) -> PyResult<Option<(String, String)>> {
        let w = py
            .detach(|| system::find_con_witness(&self.0, budget))
            .map_err(err)?;
        let space = self.0.space();
        Ok(w.map(|(x, y)| (space.label(x).to_string(), space.label(y).to_string())))
    }

    /// Which of tolerance and connectedness fails.
    #[pyo3(signature = (budget = DEFAULT_BUDGET))]
    fn verdict<'py>(&self, py: Python<'py>, budget: u64) -> PyResult<Bound<'py, PyAny>> {
        let v = py
            .detach(|| system::assert_no_sorites(&self.0, budget))
            .map_err(err)?;
        let space = self.0.space();
        let names = |ps: &[usize]| {
            ps.iter()
                .map(|&p| space.label(p).to_string())
                .collect::<Vec<_>>()
        };
        let v = match v {
            Verdict::ToleranceFails {
                points,
                con_witness,
            } => serde_json::json!({
                "kind": "tolerance_fails",
                "points": names(&points),
                "con_witness": names(&[con_witness.0, con_witness.1]),
            }),
            Verdict::ConFails => serde_json::json!({ "kind": "con_fails" }),
            Verdict::BothFail { points } => {
                serde_json::json!({ "kind": "both_fail", "points": names(&points) })
            }
        };
        to_py(py, &v)
    }

    /// Follows a tolerant cover from `x` to `y` until the responses break.
    /// `cover` maps each point to a vicinity index; by default the computed
    /// tolerant cover is used.
    #[pyo3(signature = (x, y, cover = None))]
    fn contradiction<'py>(
        &self,
        py: Python<'py>,
        x: &str,
        y: &str,
        cover: Option<BTreeMap<String, usize>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let space = self.0.space();
        let (xi, yi) = (space.point(x).map_err(err)?, space.point(y).map_err(err)?);
        let report = match cover {
            Some(choice) => {
                let choice = space
                    .labels()
                    .iter()
                    .map(|l| {
                        choice
                            .get(l)
                            .copied()
                            .ok_or_else(|| PyValueError::new_err(format!("cover skips {l}")))
                    })
                    .collect::<PyResult<Vec<_>>>()?;
                let c = MinimalCover { choice };
                c.check(space).map_err(err)?;
                ToleranceReport::asserted(c)
            }
            None => system::check_tolerance(&self.0),
        };
        let ch = system::derive_soritical_contradiction(&self.0, &report, xi, yi).map_err(err)?;
        let v = serde_json::json!({
            "points": ch.points.iter().map(|&p| space.label(p)).collect::<Vec<_>>(),
            "responses": ch.responses,
            "violating_link": ch.violating_link,
            "flagged_vicinity": ch.flagged.as_ref().map(|l| (space.label(l.owner), space.names(&l.vicinity))),
            "chain": chain_json(space, &ch.chain),
        });
        to_py(py, &v)
    }
}

/// A threshold rule on `[0, 1]`.
#[pyclass(name = "ThresholdRule", module = "sorites", frozen)]
struct PyRule(threshold::ThresholdRule);

#[pymethods]
impl PyRule {
    #[new]
    #[pyo3(signature = (v, convention = "closed"))]
    fn new(v: f64, convention: &str) -> PyResult<Self> {
        threshold::ThresholdRule::with_convention(v, self::convention(convention)?)
            .map(PyRule)
            .map_err(err)
    }

    #[getter]
    fn v(&self) -> f64 {
        self.0.v()
    }

    #[getter]
    fn convention(&self) -> &'static str {
        match self.0.convention() {
            Convention::Closed => "closed",
            Convention::Open => "open",
        }
    }

    fn classify(&self, x: f64) -> PyResult<&'static str> {
        Ok(self.0.classify(UnitStimulus::new(x).map_err(err)?).label())
    }

    /// Bisects for the boundary with `n` queries to this rule.
    fn estimate_boundary<'py>(&self, py: Python<'py>, n: u32) -> PyResult<Bound<'py, PyAny>> {
        let trace = threshold::estimate_boundary(&mut RuleOracle::new(self.0), n).map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item("q", &trace.q)?;
        dict.set_item("estimate", trace.estimate())?;
        dict.set_item("error_bound", trace.error_bound())?;
        dict.set_item("oracle_calls", trace.oracle_calls)?;
        Ok(dict.into_any())
    }

    fn __repr__(&self) -> String {
        format!(
            "ThresholdRule(v={}, convention='{}')",
            self.0.v(),
            self.convention()
        )
    }
}

/// Points creeping towards `v` without reaching it, as floats.
#[pyfunction]
fn stay_below_sequence(v: f64, x0: f64, k: usize) -> PyResult<Vec<f64>> {
    let xs = threshold::stay_below_sequence(v, x0, k).map_err(err)?;
    Ok(xs.iter().map(threshold::rational_to_f64).collect())
}

/// A response probability function on a grid.
#[pyclass(name = "ZoraGrid", module = "sorites", frozen)]
struct PyZora(probabilistic::ZoraGrid);

#[pymethods]
impl PyZora {
    /// Invalid grids are accepted; see `violations()`.
    #[new]
    fn new(grid: Vec<f64>, p: Vec<f64>) -> Self {
        PyZora(probabilistic::ZoraGrid { grid, p })
    }

    fn violations(&self) -> Vec<String> {
        probabilistic::validate_zora(&self.0)
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn discretize(&self) -> Vec<&'static str> {
        probabilistic::discretize(&self.0)
            .into_iter()
            .map(|b| b.label())
            .collect()
    }

    /// Whether `p` is tolerant on neighbour vicinities of the given radius.
    #[pyo3(signature = (tolerance = 0.0, radius = 1))]
    fn tolerant(&self, tolerance: f64, radius: usize) -> PyResult<bool> {
        let space = FrechetSpace::line(self.0.grid.len(), radius, radius);
        Ok(
            probabilistic::check_probabilistic_tolerance(&self.0, &space, tolerance)
                .map_err(err)?
                .holds,
        )
    }

    #[pyo3(signature = (x, trials, seed, interpolate = false))]
    fn estimate<'py>(
        &self,
        py: Python<'py>,
        x: f64,
        trials: u64,
        seed: u64,
        interpolate: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut src = probabilistic::bernoulli_oracle(&self.0, seed).map_err(err)?;
        if interpolate {
            src = src.with_interpolation();
        }
        to_py(
            py,
            &probabilistic::estimate_p(&mut src, x, trials).map_err(err)?,
        )
    }
}

fn mixture(components: Vec<BTreeMap<String, f64>>, weights: Vec<f64>) -> PyResult<Mixture> {
    let comps = components
        .into_iter()
        .map(Distribution::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    Mixture::new(comps, weights).map_err(err)
}

/// The single distribution equivalent to a weighted mixture of distributions.
#[pyfunction]
fn reduce_mixture(
    components: Vec<BTreeMap<String, f64>>,
    weights: Vec<f64>,
) -> PyResult<BTreeMap<String, f64>> {
    Ok(
        probabilistic::reduce_mixture(&mixture(components, weights)?)
            .weights()
            .clone(),
    )
}

/// Largest gap between simulated two-stage frequencies and the reduction.
#[pyfunction]
fn simulate_mixture(
    components: Vec<BTreeMap<String, f64>>,
    weights: Vec<f64>,
    seed: u64,
    trials: u64,
) -> PyResult<f64> {
    probabilistic::verify_reduction_by_simulation(&mixture(components, weights)?, seed, trials)
        .map_err(err)
}

#[pyfunction]
fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    probabilistic::wilson_interval(successes, trials)
}

#[pyfunction]
#[pyo3(signature = (connective, p, q = None))]
fn luk_eval(connective: &str, p: f64, q: Option<f64>) -> PyResult<f64> {
    let c: Connective = connective.parse().map_err(err)?;
    Ok(fuzzy::luk_eval(c, truth(p)?, q.map(truth).transpose()?)
        .map_err(err)?
        .value())
}

#[pyfunction]
fn mismatch_report<'py>(py: Python<'py>, p: f64, q: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &fuzzy::mismatch_report(truth(p)?, truth(q)?))
}

fn matcher(spec: &Bound<'_, PyDict>) -> PyResult<comparative::Matcher> {
    let json: String = spec
        .py()
        .import("json")?
        .call_method1("dumps", (spec,))?
        .extract()?;
    let spec: MatcherSpec =
        serde_json::from_str(&json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    comparative::make_matcher(&spec).map_err(err)
}

/// Shortest same-same-…-different sequence, or `None`. `matcher` is a dict
/// such as `{"kind": "epsilon", "epsilon": 0.5}`.
#[pyfunction]
fn find_comparative_sequence(
    points: Vec<String>,
    matcher: &Bound<'_, PyDict>,
) -> PyResult<Option<Vec<String>>> {
    let m = self::matcher(matcher)?;
    Ok(comparative::find_comparative_sequence(&points, &m)
        .map_err(err)?
        .map(|s| s.points))
}

#[pyfunction]
fn is_equivalence<'py>(
    points: Vec<String>,
    matcher: &Bound<'py, PyDict>,
) -> PyResult<Bound<'py, PyAny>> {
    let m = self::matcher(matcher)?;
    to_py(
        matcher.py(),
        &comparative::is_equivalence(&points, &m).map_err(err)?,
    )
}

#[pyfunction]
fn number_label(x: f64) -> String {
    comparative::number_label(x)
}

/// Runs a scenario given as JSON text and returns the canonical report.
#[pyfunction]
#[pyo3(signature = (text, base_dir = ".", seed = None, budget = None))]
fn run_scenario(
    py: Python<'_>,
    text: &str,
    base_dir: &str,
    seed: Option<u64>,
    budget: Option<u64>,
) -> PyResult<String> {
    let opts = RunOptions { seed, budget };
    let report = py
        .detach(|| scenario::run(text, Path::new(base_dir), &opts))
        .map_err(|e| match e {
            RunError::Budget(m) => BudgetExceeded::new_err(m),
            RunError::Input(m) => PyValueError::new_err(m),
            RunError::Internal(m) => PyRuntimeError::new_err(m),
        })?;
    Ok(report.render(scenario::Format::Json))
}

#[pymodule]
fn sorites(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add("DEFAULT_BUDGET", DEFAULT_BUDGET)?;
    m.add_class::<PySpace>()?;
    m.add_class::<PySystem>()?;
    m.add_class::<PyRule>()?;
    m.add_class::<PyZora>()?;
    m.add_function(wrap_pyfunction!(stay_below_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_mixture, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_mixture, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_interval, m)?)?;
    m.add_function(wrap_pyfunction!(luk_eval, m)?)?;
    m.add_function(wrap_pyfunction!(mismatch_report, m)?)?;
    m.add_function(wrap_pyfunction!(find_comparative_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(is_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(number_label, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
