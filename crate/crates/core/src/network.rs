//! Discrete Bayesian networks with exact inference by enumeration.
//!
//! A [`Network`] is built from a [`NetworkDef`], the serde image of the
//! network definition file:
//!
//! ```json
//! {
//!   "variables": [{"name": "S1", "outcomes": ["T", "F"]}, ...],
//!   "edges": [["S1", "S2"]],
//!   "cpts": {
//!     "S1": [{"given": {}, "dist": {"T": 0.9, "F": 0.1}}],
//!     "S2": [{"given": {"S1": "T"}, "dist": {"T": "0.7", "F": "0.3"}}, ...]
//!   }
//! }
//! ```
//!
//! Probabilities may be JSON numbers or decimal strings; both are converted
//! with correct rounding. A variable's parent order is the order in which its
//! incoming edges are listed.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::belief::{DiscreteDistribution, SUM_TOLERANCE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub outcomes: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>>(name: impl Into<String>, outcomes: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            outcomes: outcomes.into_iter().map(Into::into).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == label)
    }
}

/// A probability as found in a definition file: a JSON number or a decimal
/// string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Prob(pub f64);

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(x) => Ok(Prob(x)),
            Raw::Text(s) => s
                .trim()
                .parse::<f64>()
                .map(Prob)
                .map_err(|e| serde::de::Error::custom(format!("bad decimal `{s}`: {e}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptRowDef {
    #[serde(default)]
    pub given: BTreeMap<String, String>,
    pub dist: BTreeMap<String, Prob>,
}

/// On-disk form of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDef {
    pub variables: Vec<Variable>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    pub cpts: BTreeMap<String, Vec<CptRowDef>>,
}

impl NetworkDef {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network definitions always serialize")
    }
}

/// A (full or partial) assignment of outcomes to variables, by name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment(BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, variable: impl Into<String>, outcome: impl Into<String>) -> Self {
        self.0.insert(variable.into(), outcome.into());
        self
    }

    pub fn insert(&mut self, variable: impl Into<String>, outcome: impl Into<String>) {
        self.0.insert(variable.into(), outcome.into());
    }

    pub fn get(&self, variable: &str) -> Option<&str> {
        self.0.get(variable).map(String::as_str)
    }

    pub fn contains(&self, variable: &str) -> bool {
        self.0.contains_key(variable)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        Self(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Read-only view of one full assignment during enumeration.
pub struct FullAssignment<'a> {
    net: &'a Network,
    states: &'a [usize],
}

impl FullAssignment<'_> {
    /// Outcome label of `variable`, or `None` for an unknown name.
    pub fn outcome(&self, variable: &str) -> Option<&str> {
        let i = *self.net.index.get(variable)?;
        Some(self.net.variables[i].outcomes[self.states[i]].as_str())
    }

    pub fn is(&self, variable: &str, outcome: &str) -> bool {
        self.outcome(variable) == Some(outcome)
    }

    pub fn states(&self) -> &[usize] {
        self.states
    }
}

/// A validated discrete Bayesian network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    variables: Vec<Variable>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    /// `cpts[v][row][outcome]`; the row is the mixed-radix index of the
    /// parent states, last parent fastest.
    cpts: Vec<Vec<Vec<f64>>>,
}

impl Network {
    pub fn from_def(def: &NetworkDef) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in def.variables.iter().enumerate() {
            if v.name.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(v.name.clone()));
            }
            if v.outcomes.len() < 2 {
                return Err(Error::TooFewOutcomes(v.name.clone()));
            }
            let mut seen = std::collections::HashSet::new();
            for o in &v.outcomes {
                if o.is_empty() {
                    return Err(Error::EmptyLabel);
                }
                if !seen.insert(o) {
                    return Err(Error::DuplicateLabel(format!("{}={o}", v.name)));
                }
            }
        }

        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let mut parents = vec![Vec::new(); def.variables.len()];
        for (p, c) in &def.edges {
            let (p, c) = (lookup(p)?, lookup(c)?);
            if parents[c].contains(&p) {
                return Err(Error::Parse(format!(
                    "duplicate edge {} -> {}",
                    def.variables[p].name, def.variables[c].name
                )));
            }
            parents[c].push(p);
        }
        check_acyclic(&def.variables, &parents)?;

        for name in def.cpts.keys() {
            lookup(name)?;
        }
        let mut cpts = Vec::with_capacity(def.variables.len());
        for (v, var) in def.variables.iter().enumerate() {
            let radices: Vec<usize> = parents[v].iter().map(|&p| def.variables[p].arity()).collect();
            let n_rows: usize = radices.iter().product();
            let mut rows: Vec<Option<Vec<f64>>> = vec![None; n_rows];
            let defs = def.cpts.get(&var.name).map(Vec::as_slice).unwrap_or(&[]);
            for row_def in defs {
                let bad = |reason: String| Error::InvalidCptRow {
                    variable: var.name.clone(),
                    row: describe_given(&row_def.given),
                    reason,
                };
                if row_def.given.len() != parents[v].len() {
                    return Err(bad(format!("expected {} parent outcomes", parents[v].len())));
                }
                let mut row = 0;
                for &p in &parents[v] {
                    let pvar = &def.variables[p];
                    let label = row_def
                        .given
                        .get(&pvar.name)
                        .ok_or_else(|| bad(format!("missing parent `{}`", pvar.name)))?;
                    let s = pvar.outcome_index(label).ok_or_else(|| Error::UnknownOutcome {
                        variable: pvar.name.clone(),
                        outcome: label.clone(),
                    })?;
                    row = row * pvar.arity() + s;
                }
                if rows[row].is_some() {
                    return Err(bad("duplicate row".into()));
                }
                let mut dist = vec![f64::NAN; var.arity()];
                for (label, &Prob(p)) in &row_def.dist {
                    let k = var.outcome_index(label).ok_or_else(|| Error::UnknownOutcome {
                        variable: var.name.clone(),
                        outcome: label.clone(),
                    })?;
                    if !(0.0..=1.0).contains(&p) {
                        return Err(bad(format!("probability {p} outside [0, 1]")));
                    }
                    dist[k] = p;
                }
                if let Some(k) = dist.iter().position(|p| p.is_nan()) {
                    return Err(bad(format!("no probability for outcome `{}`", var.outcomes[k])));
                }
                let sum: f64 = dist.iter().sum();
                if (sum - 1.0).abs() > SUM_TOLERANCE {
                    return Err(bad(format!("sums to {sum}")));
                }
                rows[row] = Some(dist);
            }
            let rows = rows
                .into_iter()
                .enumerate()
                .map(|(r, row)| {
                    row.ok_or_else(|| Error::MissingCptRow {
                        variable: var.name.clone(),
                        row: describe_row(&def.variables, &parents[v], r),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            cpts.push(rows);
        }

        Ok(Self {
            variables: def.variables.clone(),
            index,
            parents,
            cpts,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_def(&NetworkDef::from_json(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_def(&self) -> NetworkDef {
        let edges = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| {
                ps.iter()
                    .map(move |&p| (self.variables[p].name.clone(), self.variables[c].name.clone()))
            })
            .collect();
        let cpts = self
            .variables
            .iter()
            .enumerate()
            .map(|(v, var)| {
                let rows = self.cpts[v]
                    .iter()
                    .enumerate()
                    .map(|(r, dist)| {
                        let states = self.row_states(v, r);
                        let given = self.parents[v]
                            .iter()
                            .zip(states)
                            .map(|(&p, s)| (self.variables[p].name.clone(), self.variables[p].outcomes[s].clone()))
                            .collect();
                        let dist = var
                            .outcomes
                            .iter()
                            .cloned()
                            .zip(dist.iter().map(|&p| Prob(p)))
                            .collect();
                        CptRowDef { given, dist }
                    })
                    .collect();
                (var.name.clone(), rows)
            })
            .collect();
        NetworkDef {
            variables: self.variables.clone(),
            edges,
            cpts,
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        Ok(&self.variables[self.var_index(name)?])
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn parents(&self, var: usize) -> &[usize] {
        &self.parents[var]
    }

    /// `Pr(var = outcome | parents)` for the parent states found in `states`.
    pub fn cpt_entry(&self, var: usize, states: &[usize]) -> f64 {
        self.cpts[var][self.row_index(var, states)][states[var]]
    }

    pub(crate) fn cpt_rows(&self, var: usize) -> &[Vec<f64>] {
        &self.cpts[var]
    }

    fn row_index(&self, var: usize, states: &[usize]) -> usize {
        self.parents[var]
            .iter()
            .fold(0, |row, &p| row * self.variables[p].arity() + states[p])
    }

    fn row_states(&self, var: usize, mut row: usize) -> Vec<usize> {
        let mut out = vec![0; self.parents[var].len()];
        for (slot, &p) in out.iter_mut().zip(&self.parents[var]).rev() {
            let k = self.variables[p].arity();
            *slot = row % k;
            row /= k;
        }
        out
    }

    /// Resolves a partial assignment to per-variable state indices.
    pub fn resolve(&self, a: &Assignment) -> Result<Vec<Option<usize>>> {
        let mut states = vec![None; self.variables.len()];
        for (name, label) in a.iter() {
            let v = self.var_index(name)?;
            let s = self.variables[v]
                .outcome_index(label)
                .ok_or_else(|| Error::UnknownOutcome {
                    variable: name.to_string(),
                    outcome: label.to_string(),
                })?;
            states[v] = Some(s);
        }
        Ok(states)
    }

    /// Product of CPT entries for a full assignment given as state indices.
    pub fn joint_states(&self, states: &[usize]) -> f64 {
        (0..self.variables.len()).map(|v| self.cpt_entry(v, states)).product()
    }

    /// Full joint probability: the product of each variable's CPT entry.
    pub fn full_joint(&self, a: &Assignment) -> Result<f64> {
        let states = self.resolve(a)?;
        let states = states
            .iter()
            .enumerate()
            .map(|(v, s)| s.ok_or_else(|| Error::IncompleteAssignment(self.variables[v].name.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.joint_states(&states))
    }

    /// Visits every full assignment that agrees with `fixed`, in mixed-radix
    /// order over the free variables (declaration order, last fastest).
    pub fn for_each_completion(&self, fixed: &[Option<usize>], mut f: impl FnMut(&[usize])) {
        let free: Vec<usize> = (0..self.variables.len()).filter(|&v| fixed[v].is_none()).collect();
        let mut states: Vec<usize> = fixed.iter().map(|s| s.unwrap_or(0)).collect();
        loop {
            f(&states);
            let mut carried = true;
            for &v in free.iter().rev() {
                states[v] += 1;
                if states[v] < self.variables[v].arity() {
                    carried = false;
                    break;
                }
                states[v] = 0;
            }
            if carried {
                return;
            }
        }
    }

    /// Posterior distribution of `query` given `evidence`, by summing the
    /// full joint over every completion of the unobserved variables and
    /// normalizing.
    pub fn infer(&self, query: &str, evidence: &Assignment) -> Result<DiscreteDistribution> {
        let q = self.var_index(query)?;
        if evidence.contains(query) {
            return Err(Error::QueryInEvidence(query.to_string()));
        }
        let mut fixed = self.resolve(evidence)?;
        let var = &self.variables[q];
        let mut masses = vec![0.0; var.arity()];
        for (x, mass) in masses.iter_mut().enumerate() {
            fixed[q] = Some(x);
            self.for_each_completion(&fixed, |states| *mass += self.joint_states(states));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::InconsistentEvidence);
        }
        let probs = masses.iter().map(|m| m / total).collect();
        DiscreteDistribution::new(var.outcomes.clone(), probs)
    }

    /// Total probability of the full assignments satisfying `event`.
    pub fn event_probability(&self, event: impl Fn(&FullAssignment<'_>) -> bool) -> f64 {
        let mut total = 0.0;
        let fixed = vec![None; self.variables.len()];
        self.for_each_completion(&fixed, |states| {
            if event(&FullAssignment { net: self, states }) {
                total += self.joint_states(states);
            }
        });
        total
    }
}

fn check_acyclic(variables: &[Variable], parents: &[Vec<usize>]) -> Result<()> {
    let n = variables.len();
    let mut children = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (c, ps) in parents.iter().enumerate() {
        indegree[c] = ps.len();
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut visited = 0;
    while let Some(v) = ready.pop() {
        visited += 1;
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    if visited == n {
        Ok(())
    } else {
        let stuck = (0..n).find(|&v| indegree[v] > 0).unwrap();
        Err(Error::CyclicGraph(variables[stuck].name.clone()))
    }
}

fn describe_given(given: &BTreeMap<String, String>) -> String {
    let parts: Vec<String> = given.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

fn describe_row(variables: &[Variable], parents: &[usize], mut row: usize) -> String {
    let mut parts = Vec::new();
    for &p in parents.iter().rev() {
        let k = variables[p].arity();
        parts.push(format!("{}={}", variables[p].name, variables[p].outcomes[row % k]));
        row /= k;
    }
    parts.reverse();
    format!("{{{}}}", parts.join(", "))
}
