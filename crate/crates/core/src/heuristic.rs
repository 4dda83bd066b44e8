//! Interference degree from the network's own amplitudes.
//!
//! For a query with exactly one unobserved binary variable, each query
//! outcome `x` has two amplitude products `(α_x, β_x)`, one per state of the
//! unobserved variable. Each pair is reduced to a belief distance measuring
//! its deviation from total ignorance (0.5), and the distances are turned
//! into one belief degree `Σ B log2(B / (2^n − 1))`, the negated Deng entropy
//! of the distances. That degree replaces the phase cosine for every outcome.

use serde::Serialize;

use crate::belief::deng_term;
use crate::error::{Error, Result};
use crate::network::Assignment;
use crate::quantum::{AmplitudeNetwork, InterferenceDegree};

/// Below this, `|α + β − 1|` is treated as zero.
pub const SINGULAR_EPS: f64 = 1e-12;

/// The two amplitude products of one query outcome, ordered by the
/// unobserved variable's declared outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeVectorPair {
    pub outcome: String,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct BeliefDistance(f64);

impl BeliefDistance {
    /// Wraps an already computed distance, e.g. one read from a trace.
    pub fn from_value(value: f64) -> Self {
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A belief degree, clamped into `[-1, 1]`; `raw` keeps the unclamped sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeliefDegree {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl BeliefDegree {
    pub fn interference(self) -> InterferenceDegree {
        InterferenceDegree::new(self.value).expect("belief degree is clamped")
    }
}

/// Every intermediate of [`degree_for_query`], for tracing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefTrace {
    pub pairs: Vec<OutcomeVectorPair>,
    pub distances: Vec<BeliefDistance>,
    pub num_unobserved: u32,
    pub degree: BeliefDegree,
}

/// `(α_x, β_x)` for every outcome of `query`.
///
/// Requires exactly one unobserved variable besides the query.
pub fn extract_outcome_vectors(
    anet: &AmplitudeNetwork,
    query: &str,
    evidence: &Assignment,
) -> Result<Vec<OutcomeVectorPair>> {
    let branches = anet.branches(query, evidence)?;
    if branches.unobserved.len() != 1 {
        return Err(Error::UnsupportedStructure(format!(
            "belief heuristic needs exactly one unobserved variable besides `{query}`, found {}",
            branches.unobserved.len()
        )));
    }
    let var = &anet.network().variables()[branches.query];
    Ok(branches
        .magnitudes
        .iter()
        .zip(&var.outcomes)
        .map(|(m, outcome)| OutcomeVectorPair {
            outcome: outcome.clone(),
            alpha: m[0],
            beta: m[1],
        })
        .collect())
}

/// `|α + (α − β) / |α + β − 1||`, where the argument closer to 0.5 plays
/// `α`. Exact ties keep the given order.
///
/// `α = β` returns `α` (the numerator vanishes); this covers `α = β = 0.5`,
/// where the denominator vanishes too. Any other pair with `α + β = 1` is
/// [`Error::SingularDenominator`].
pub fn belief_distance(alpha: f64, beta: f64) -> Result<BeliefDistance> {
    for (field, value) in [("alpha", alpha), ("beta", beta)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidProbability {
                field: field.into(),
                value,
            });
        }
    }
    let (a, b) = if (alpha - 0.5).abs() > (beta - 0.5).abs() {
        (beta, alpha)
    } else {
        (alpha, beta)
    };
    if a == b {
        return Ok(BeliefDistance(a));
    }
    let denom = (a + b - 1.0).abs();
    if denom < SINGULAR_EPS {
        return Err(Error::SingularDenominator { alpha, beta });
    }
    Ok(BeliefDistance((a + (a - b) / denom).abs()))
}

/// `Σ B log2(B / (2^n − 1))` over the distances, clamped into `[-1, 1]`.
///
/// # Panics
///
/// If `num_unobserved` is zero.
pub fn belief_degree(distances: &[BeliefDistance], num_unobserved: u32) -> BeliefDegree {
    assert!(num_unobserved >= 1, "num_unobserved must be positive");
    let raw: f64 = -distances
        .iter()
        .map(|d| deng_term(d.value(), num_unobserved))
        .sum::<f64>();
    let (degree, clamped) = InterferenceDegree::clamped(raw);
    BeliefDegree {
        value: degree.value(),
        raw,
        clamped,
    }
}

/// Vectors, distances and degree for a query, with one unobserved variable.
pub fn belief_trace(anet: &AmplitudeNetwork, query: &str, evidence: &Assignment) -> Result<BeliefTrace> {
    let pairs = extract_outcome_vectors(anet, query, evidence)?;
    let distances = pairs
        .iter()
        .map(|p| belief_distance(p.alpha, p.beta))
        .collect::<Result<Vec<_>>>()?;
    let num_unobserved = 1;
    let degree = belief_degree(&distances, num_unobserved);
    Ok(BeliefTrace {
        pairs,
        distances,
        num_unobserved,
        degree,
    })
}

/// The single belief degree shared by every outcome of `query`.
pub fn degree_for_query(anet: &AmplitudeNetwork, query: &str, evidence: &Assignment) -> Result<BeliefDegree> {
    belief_trace(anet, query, evidence).map(|t| t.degree)
}
