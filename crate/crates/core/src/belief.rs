//! Basic belief assignments over a finite frame, plus Shannon and Deng
//! entropy.
//!
//! Focal sets are stored canonically as sorted, deduplicated label lists so
//! iteration order and equality do not depend on how the caller spelled a
//! set. The empty set is never stored.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance for "sums to one" checks on hand-entered decimals.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// The frame of discernment: an ordered set of distinct, nonempty labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frame {
    elements: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        if elements.is_empty() {
            return Err(Error::EmptyFrame);
        }
        let mut seen = HashSet::new();
        for e in &elements {
            if e.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if !seen.insert(e.as_str()) {
                return Err(Error::DuplicateLabel(e.clone()));
            }
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.elements.iter().any(|e| e == label)
    }
}

/// A nonempty subset of a frame, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FocalSet(Vec<String>);

impl FocalSet {
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        labels.sort();
        labels.dedup();
        Self(labels)
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    /// Cardinality `|A|`.
    pub fn cardinality(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(","))
    }
}

/// A validated basic belief assignment (mass function).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefAssignment {
    frame: Frame,
    masses: BTreeMap<FocalSet, f64>,
}

impl BeliefAssignment {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Stored focal sets and their masses, in canonical order. Zero masses
    /// are not stored.
    pub fn masses(&self) -> impl Iterator<Item = (&FocalSet, f64)> {
        self.masses.iter().map(|(k, &v)| (k, v))
    }

    pub fn mass(&self, set: &FocalSet) -> f64 {
        self.masses.get(set).copied().unwrap_or(0.0)
    }

    /// True when every focal set is a singleton, i.e. the assignment is an
    /// ordinary probability distribution.
    pub fn is_bayesian(&self) -> bool {
        self.masses.keys().all(|s| s.cardinality() == 1)
    }
}

/// Checks raw masses against the frame and the two mass-function
/// conditions: zero mass on the empty set and total mass one.
pub fn validate_bba<I, S, L>(raw: I, frame: Frame) -> Result<BeliefAssignment>
where
    I: IntoIterator<Item = (S, f64)>,
    S: IntoIterator<Item = L>,
    L: Into<String>,
{
    let mut masses = BTreeMap::new();
    let mut sum = 0.0;
    for (labels, mass) in raw {
        let set = FocalSet::new(labels);
        if !(0.0..=1.0).contains(&mass) {
            if set.is_empty() && mass != 0.0 {
                return Err(Error::EmptySetMass(mass));
            }
            return Err(Error::MassOutOfRange {
                set: set.to_string(),
                mass,
            });
        }
        if set.is_empty() {
            if mass != 0.0 {
                return Err(Error::EmptySetMass(mass));
            }
            continue;
        }
        if let Some(unknown) = set.labels().iter().find(|l| !frame.contains(l)) {
            return Err(Error::UnknownElement(unknown.clone()));
        }
        if masses.contains_key(&set) {
            return Err(Error::DuplicateLabel(set.to_string()));
        }
        sum += mass;
        if mass > 0.0 {
            masses.insert(set, mass);
        }
    }
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::MassSumMismatch { sum });
    }
    Ok(BeliefAssignment { frame, masses })
}

/// A finite distribution over labelled outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    labels: Vec<String>,
    probabilities: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new<S: Into<String>>(labels: Vec<S>, probabilities: Vec<f64>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != probabilities.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels but {} probabilities",
                labels.len(),
                probabilities.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidDistribution(format!("probability {p} outside [0, 1]")));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("sums to {sum}")));
        }
        Ok(Self { labels, probabilities })
    }

    /// Unlabelled convenience constructor; outcomes are named `0`, `1`, ...
    pub fn from_probabilities(probabilities: Vec<f64>) -> Result<Self> {
        let labels = (0..probabilities.len()).map(|i| i.to_string()).collect();
        Self::new(labels, probabilities)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probabilities[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.probabilities.iter().copied())
    }
}

/// Shannon entropy `-Σ p log_b p` with `0 log 0 = 0`.
pub fn shannon_entropy(dist: &DiscreteDistribution, log_base: f64) -> Result<f64> {
    if log_base.is_nan() || log_base <= 0.0 || log_base == 1.0 || !log_base.is_finite() {
        return Err(Error::InvalidBase(log_base));
    }
    let ln_base = log_base.ln();
    let h: f64 = dist
        .probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln() / ln_base)
        .sum();
    // -0.0 from a degenerate distribution prints badly
    Ok(h.max(0.0))
}

/// Shannon entropy in bits.
pub fn shannon_entropy_bits(dist: &DiscreteDistribution) -> f64 {
    shannon_entropy(dist, 2.0).expect("base 2 is valid")
}

/// One term of Deng entropy, `-m log2(m / (2^|A| - 1))`, with zero mass
/// contributing zero.
pub fn deng_term(mass: f64, cardinality: u32) -> f64 {
    if mass == 0.0 {
        return 0.0;
    }
    let states = 2f64.powi(cardinality as i32) - 1.0;
    -mass * (mass / states).log2()
}

/// Deng (belief) entropy in bits.
pub fn deng_entropy(bba: &BeliefAssignment) -> f64 {
    let e: f64 = bba
        .masses()
        .map(|(set, m)| deng_term(m, set.cardinality() as u32))
        .sum();
    e.max(0.0)
}

/// Parses the line-oriented mass-function format:
///
/// ```text
/// # comment
/// frame: a, b, c
/// a = 0.5
/// b,c = 0.5
/// ```
///
/// Each focal set is a comma-joined label list (optionally wrapped in
/// braces; `{}` is the empty set) followed by `=` and a decimal mass. The
/// `frame:` line is optional; without it the frame is every label seen, in
/// order of first appearance.
pub fn parse_bba(text: &str) -> Result<BeliefAssignment> {
    let mut frame: Option<Frame> = None;
    let mut entries: Vec<(usize, Vec<String>, f64)> = Vec::new();
    let at = |line: usize, e: Error| Error::Parse(format!("line {line}: {e}"));
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("frame:") {
            if frame.is_some() {
                return Err(at(n, Error::Parse("second frame line".into())));
            }
            let labels = rest.split(',').map(|l| l.trim().to_string());
            frame = Some(Frame::new(labels).map_err(|e| at(n, e))?);
            continue;
        }
        let (set, mass) = line
            .rsplit_once('=')
            .ok_or_else(|| at(n, Error::Parse(format!("expected `labels = mass`, got `{line}`"))))?;
        let mass: f64 = mass
            .trim()
            .parse()
            .map_err(|_| at(n, Error::Parse(format!("bad mass `{}`", mass.trim()))))?;
        let set = set.trim();
        let set = set
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(set)
            .trim();
        let labels: Vec<String> = if set.is_empty() || set == "∅" {
            Vec::new()
        } else {
            set.split(',').map(|l| l.trim().to_string()).collect()
        };
        if labels.iter().any(String::is_empty) {
            return Err(at(n, Error::EmptyLabel));
        }
        entries.push((n, labels, mass));
    }
    let frame = match frame {
        Some(f) => f,
        None => {
            let mut seen: Vec<String> = Vec::new();
            for l in entries.iter().flat_map(|(_, ls, _)| ls) {
                if !seen.contains(l) {
                    seen.push(l.clone());
                }
            }
            Frame::new(seen)?
        }
    };
    // per-line checks first so the diagnostic can point at the line
    for (n, labels, mass) in &entries {
        if labels.is_empty() && *mass != 0.0 {
            return Err(at(*n, Error::EmptySetMass(*mass)));
        }
        if !(0.0..=1.0).contains(mass) {
            return Err(at(
                *n,
                Error::MassOutOfRange {
                    set: labels.join(","),
                    mass: *mass,
                },
            ));
        }
        if let Some(l) = labels.iter().find(|l| !frame.contains(l)) {
            return Err(at(*n, Error::UnknownElement(l.clone())));
        }
    }
    validate_bba(entries.into_iter().map(|(_, l, m)| (l, m)), frame)
}
