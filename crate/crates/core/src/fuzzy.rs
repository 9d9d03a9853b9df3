//! Łukasiewicz connectives, and why a response probability is not a degree of
//! truth.
//!
//! Classically, "p(x) = p and p(y) = q" is simply true whenever both facts
//! hold, and "if p(y) = q then (p(x) = p ⇒ p(y) = q)" is true whatever `p` is.
//! Reading `p` and `q` as truth values instead gives intermediate values for
//! the same compounds. [`mismatch_report`] tabulates the difference.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SoritesError};

/// A truth value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct TruthValue(f64);

impl TruthValue {
    pub fn new(v: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&v) {
            Ok(TruthValue(v))
        } else {
            Err(SoritesError::input(format!(
                "truth value {v} is outside [0, 1]"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connective {
    WeakConj,
    StrongConj,
    Implication,
    Negation,
}

impl FromStr for Connective {
    type Err = SoritesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak_conj" => Ok(Connective::WeakConj),
            "strong_conj" => Ok(Connective::StrongConj),
            "implication" => Ok(Connective::Implication),
            "negation" => Ok(Connective::Negation),
            other => Err(SoritesError::input(format!("unknown connective {other}"))),
        }
    }
}

pub fn weak_conj(p: TruthValue, q: TruthValue) -> TruthValue {
    TruthValue(p.0.min(q.0))
}

pub fn strong_conj(p: TruthValue, q: TruthValue) -> TruthValue {
    TruthValue((p.0 + q.0 - 1.0).max(0.0))
}

pub fn implication(p: TruthValue, q: TruthValue) -> TruthValue {
    TruthValue((1.0 - p.0 + q.0).min(1.0))
}

pub fn negation(p: TruthValue) -> TruthValue {
    TruthValue(1.0 - p.0)
}

/// Evaluates a connective; binary connectives need `q`.
pub fn luk_eval(
    connective: Connective,
    p: TruthValue,
    q: Option<TruthValue>,
) -> Result<TruthValue> {
    let need_q =
        || q.ok_or_else(|| SoritesError::input(format!("{connective:?} needs two operands")));
    Ok(match connective {
        Connective::WeakConj => weak_conj(p, need_q()?),
        Connective::StrongConj => strong_conj(p, need_q()?),
        Connective::Implication => implication(p, need_q()?),
        Connective::Negation => negation(p),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MismatchReport {
    pub p: f64,
    pub q: f64,
    /// The classical meta-conjunction is true whenever both facts hold.
    pub classical_conjunction: bool,
    pub weak_conj: f64,
    pub strong_conj: f64,
    /// Classical meta-implication given `p(y) = q`: always true.
    pub classical_implication: bool,
    pub implication: f64,
    pub conjunction_diverges: bool,
    pub implication_diverges: bool,
    pub diverges: bool,
}

pub fn mismatch_report(p: TruthValue, q: TruthValue) -> MismatchReport {
    let strong = strong_conj(p, q).0;
    let imp = implication(p, q).0;
    let conjunction_diverges = strong != 0.0 && strong != 1.0;
    let implication_diverges = imp < 1.0;
    MismatchReport {
        p: p.0,
        q: q.0,
        classical_conjunction: true,
        weak_conj: weak_conj(p, q).0,
        strong_conj: strong,
        classical_implication: true,
        implication: imp,
        conjunction_diverges,
        implication_diverges,
        diverges: conjunction_diverges || implication_diverges,
    }
}
