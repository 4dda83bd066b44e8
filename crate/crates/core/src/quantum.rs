//! Quantum-like Bayesian networks.
//!
//! Every CPT probability `p` is replaced by the real amplitude `ψ = √p`. The
//! joint of a full assignment is the squared amplitude product (Born rule),
//! which equals the classical joint. Marginalizing over unobserved variables
//! sums amplitudes before squaring, which adds a pairwise interference term:
//!
//! ```text
//! Pr(X = x | e) = ∂ [ Σ_i m_i² + 2 · Σ_{i<j} m_i m_j · d_x ]
//! ```
//!
//! where `m_i` is the amplitude-product magnitude of the `i`-th completion of
//! the unobserved variables and `d_x` stands in for the phase cosine
//! `cos(θ_i − θ_j)`. Phases are never stored; `d_x` is supplied per query
//! outcome by a [`DegreeSource`]. `∂` is the reciprocal of the total
//! unnormalized mass.

use serde::Serialize;

use crate::belief::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::network::{Assignment, Network};

/// Stand-in for the phase cosine of an interference pair; always in
/// `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct InterferenceDegree(f64);

impl InterferenceDegree {
    pub const ZERO: Self = Self(0.0);
    pub const CONSTRUCTIVE: Self = Self(1.0);
    pub const DESTRUCTIVE: Self = Self(-1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::DegreeOutOfRange(value))
        }
    }

    /// Clamps into `[-1, 1]`, reporting whether clamping happened. NaN maps
    /// to zero and counts as clamped.
    pub fn clamped(value: f64) -> (Self, bool) {
        if value.is_nan() {
            (Self::ZERO, true)
        } else {
            let c = value.clamp(-1.0, 1.0);
            (Self(c), c != value)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Supplies the interference degree for each outcome of the query variable.
pub trait DegreeSource {
    fn degree_for(&self, outcome_index: usize, outcome: &str) -> Result<InterferenceDegree>;
}

/// The same degree for every outcome.
impl DegreeSource for InterferenceDegree {
    fn degree_for(&self, _: usize, _: &str) -> Result<InterferenceDegree> {
        Ok(*self)
    }
}

/// One degree per outcome, in the query variable's declared order.
impl DegreeSource for [InterferenceDegree] {
    fn degree_for(&self, outcome_index: usize, outcome: &str) -> Result<InterferenceDegree> {
        self.get(outcome_index)
            .copied()
            .ok_or_else(|| Error::UnsupportedStructure(format!("no interference degree for outcome `{outcome}`")))
    }
}

impl DegreeSource for Vec<InterferenceDegree> {
    fn degree_for(&self, outcome_index: usize, outcome: &str) -> Result<InterferenceDegree> {
        self.as_slice().degree_for(outcome_index, outcome)
    }
}

/// Adapts a closure over outcome labels.
pub struct ByOutcome<F>(pub F);

impl<F> DegreeSource for ByOutcome<F>
where
    F: Fn(&str) -> Result<InterferenceDegree>,
{
    fn degree_for(&self, _: usize, outcome: &str) -> Result<InterferenceDegree> {
        (self.0)(outcome)
    }
}

/// `2 · degree · Σ_{i<j} m_i m_j`, evaluated pair by pair.
pub fn interference_sum(magnitudes: &[f64], degree: InterferenceDegree) -> f64 {
    let mut pairs = 0.0;
    for (i, &mi) in magnitudes.iter().enumerate() {
        for &mj in &magnitudes[i + 1..] {
            pairs += mi * mj;
        }
    }
    2.0 * degree.value() * pairs
}

/// Amplitude products for every query outcome, one per completion of the
/// unobserved variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Branches {
    pub query: usize,
    /// Unobserved non-query variables, in declaration order.
    pub unobserved: Vec<usize>,
    /// `magnitudes[x][i]`: amplitude product with the query at outcome `x`
    /// and the unobserved variables at their `i`-th joint completion
    /// (mixed radix, last variable fastest).
    pub magnitudes: Vec<Vec<f64>>,
}

/// Per-outcome breakdown of a quantum marginal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeTerms {
    pub outcome: String,
    pub degree: f64,
    pub magnitudes: Vec<f64>,
    /// `Σ_i m_i²`.
    pub classical_part: f64,
    /// `2 · Σ_{i<j} m_i m_j · degree`.
    pub interference_part: f64,
    /// `classical_part + interference_part`; may be negative for an
    /// out-of-model degree.
    pub unnormalized: f64,
    /// `unnormalized` clamped at zero; the value that gets normalized.
    pub mass: f64,
    pub clamped: bool,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumInferenceResult {
    pub query: String,
    pub outcomes: Vec<OutcomeTerms>,
    /// `∂ = 1 / Σ mass`.
    pub normalizer: f64,
    /// Set when any outcome's unnormalized value was clamped to zero.
    pub clamped: bool,
}

impl QuantumInferenceResult {
    pub fn probability(&self, outcome: &str) -> Option<f64> {
        self.terms(outcome).map(|t| t.probability)
    }

    pub fn terms(&self, outcome: &str) -> Option<&OutcomeTerms> {
        self.outcomes.iter().find(|t| t.outcome == outcome)
    }

    pub fn distribution(&self) -> DiscreteDistribution {
        DiscreteDistribution::new(
            self.outcomes.iter().map(|t| t.outcome.clone()).collect(),
            self.outcomes.iter().map(|t| t.probability).collect(),
        )
        .expect("normalized masses form a distribution")
    }
}

/// A network whose CPT entries are real amplitudes `√p`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeNetwork {
    net: Network,
    amplitudes: Vec<Vec<Vec<f64>>>,
}

impl AmplitudeNetwork {
    /// Takes the square root of every CPT entry. Only binary variables are
    /// supported.
    pub fn from_network(net: &Network) -> Result<Self> {
        if let Some(v) = net.variables().iter().find(|v| v.arity() != 2) {
            return Err(Error::NonBinaryVariable(v.name.clone()));
        }
        let amplitudes = (0..net.variables().len())
            .map(|v| {
                net.cpt_rows(v)
                    .iter()
                    .map(|row| row.iter().map(|p| p.sqrt()).collect())
                    .collect()
            })
            .collect();
        Ok(Self {
            net: net.clone(),
            amplitudes,
        })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    /// `ψ(var | parents)` for the states in `states`.
    pub fn amplitude(&self, var: usize, states: &[usize]) -> f64 {
        let row = self
            .net
            .parents(var)
            .iter()
            .fold(0, |row, &p| row * self.net.variables()[p].arity() + states[p]);
        self.amplitudes[var][row][states[var]]
    }

    pub fn amplitude_product(&self, states: &[usize]) -> f64 {
        (0..states.len()).map(|v| self.amplitude(v, states)).product()
    }

    /// Amplitude of a single CPT entry, looked up by labels.
    pub fn entry(&self, variable: &str, outcome: &str, given: &Assignment) -> Result<f64> {
        let mut a = given.clone();
        a.insert(variable, outcome);
        let states = self.net.resolve(&a)?;
        let v = self.net.var_index(variable)?;
        let mut full = vec![0; states.len()];
        for &p in self.net.parents(v) {
            full[p] = states[p].ok_or_else(|| Error::IncompleteAssignment(self.net.variables()[p].name.clone()))?;
        }
        full[v] = states[v].expect("just inserted");
        Ok(self.amplitude(v, &full))
    }

    /// Born-rule joint `|Π ψ|²` of a full assignment.
    pub fn full_joint(&self, a: &Assignment) -> Result<f64> {
        let states = self.net.resolve(a)?;
        let states = states
            .iter()
            .enumerate()
            .map(|(v, s)| s.ok_or_else(|| Error::IncompleteAssignment(self.net.variables()[v].name.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.amplitude_product(&states).powi(2))
    }

    /// Amplitude products per query outcome over every completion of the
    /// unobserved variables.
    pub fn branches(&self, query: &str, evidence: &Assignment) -> Result<Branches> {
        let q = self.net.var_index(query)?;
        if evidence.contains(query) {
            return Err(Error::QueryInEvidence(query.to_string()));
        }
        let mut fixed = self.net.resolve(evidence)?;
        let unobserved = (0..fixed.len()).filter(|&v| v != q && fixed[v].is_none()).collect();
        let arity = self.net.variables()[q].arity();
        let mut magnitudes = Vec::with_capacity(arity);
        for x in 0..arity {
            fixed[q] = Some(x);
            let mut products = Vec::new();
            self.net
                .for_each_completion(&fixed, |states| products.push(self.amplitude_product(states)));
            magnitudes.push(products);
        }
        Ok(Branches {
            query: q,
            unobserved,
            magnitudes,
        })
    }

    /// Quantum marginal of `query` given `evidence`, with one interference
    /// degree per query outcome taken from `degrees`.
    ///
    /// An outcome whose unnormalized value comes out negative is clamped to
    /// zero and flagged. If nothing positive remains the degree is outside
    /// the model and [`Error::NegativeUnnormalizedMass`] is returned.
    pub fn infer<D>(&self, query: &str, evidence: &Assignment, degrees: &D) -> Result<QuantumInferenceResult>
    where
        D: DegreeSource + ?Sized,
    {
        let branches = self.branches(query, evidence)?;
        let var = &self.net.variables()[branches.query];
        let mut outcomes = Vec::with_capacity(var.arity());
        for (x, magnitudes) in branches.magnitudes.into_iter().enumerate() {
            let label = &var.outcomes[x];
            let degree = degrees.degree_for(x, label)?;
            let classical_part: f64 = magnitudes.iter().map(|m| m * m).sum();
            let interference_part = interference_sum(&magnitudes, degree);
            let unnormalized = classical_part + interference_part;
            let clamped = unnormalized < 0.0;
            outcomes.push(OutcomeTerms {
                outcome: label.clone(),
                degree: degree.value(),
                magnitudes,
                classical_part,
                interference_part,
                unnormalized,
                mass: unnormalized.max(0.0),
                clamped,
                probability: 0.0,
            });
        }
        let total: f64 = outcomes.iter().map(|t| t.mass).sum();
        if total <= 0.0 {
            return Err(if outcomes.iter().all(|t| t.classical_part == 0.0) {
                Error::InconsistentEvidence
            } else {
                Error::NegativeUnnormalizedMass
            });
        }
        let normalizer = 1.0 / total;
        for t in &mut outcomes {
            t.probability = t.mass * normalizer;
        }
        Ok(QuantumInferenceResult {
            query: query.to_string(),
            clamped: outcomes.iter().any(|t| t.clamped),
            outcomes,
            normalizer,
        })
    }
}
