//! Prisoner's-dilemma scenarios: two-player networks, predictions for the
//! "unknown" condition, fit errors and comparison reports.
//!
//! Player one moves first with prior `prior_defect`; player two's defection
//! probability depends on player one's move. The unknown condition is the
//! marginal of player two with player one unobserved, which is where the
//! interference term acts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristic::{belief_trace, BeliefTrace};
use crate::network::{Assignment, CptRowDef, Network, NetworkDef, Prob, Variable};
use crate::par::{try_map_ordered, Execution};
use crate::quantum::AmplitudeNetwork;

pub const FIRST_PLAYER: &str = "P1";
pub const SECOND_PLAYER: &str = "P2";
pub const COOPERATE: &str = "Cooperate";
pub const DEFECT: &str = "Defect";

const SCENARIOS_JSON: &str = include_str!("../data/scenarios.json");
const LITERATURE_JSON: &str = include_str!("../data/literature.json");

fn half() -> f64 {
    0.5
}

/// One experimental condition set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// `Pr(P2 = Defect | P1 = Defect)`; absent for rows whose conditionals
    /// were not published.
    #[serde(default)]
    pub p_defect_given_defect: Option<f64>,
    /// `Pr(P2 = Defect | P1 = Cooperate)`.
    #[serde(default)]
    pub p_defect_given_cooperate: Option<f64>,
    /// Observed `Pr(P2 = Defect)` when player one's move is unknown.
    pub observed_unknown: f64,
    #[serde(default = "half")]
    pub prior_defect: f64,
    /// Classical prediction as reported alongside the data, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_reported: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff_note: Option<String>,
}

impl Scenario {
    pub fn new(name: impl Into<String>, p_dd: f64, p_dc: f64, observed: f64) -> Self {
        Self {
            name: name.into(),
            p_defect_given_defect: Some(p_dd),
            p_defect_given_cooperate: Some(p_dc),
            observed_unknown: observed,
            prior_defect: 0.5,
            classical_reported: None,
            payoff_note: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_defect_given_defect", self.p_defect_given_defect),
            ("p_defect_given_cooperate", self.p_defect_given_cooperate),
            ("observed_unknown", Some(self.observed_unknown)),
            ("prior_defect", Some(self.prior_defect)),
        ];
        for (field, value) in fields {
            if let Some(value) = value {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::InvalidProbability {
                        field: format!("{}.{field}", self.name),
                        value,
                    });
                }
            }
        }
        Ok(())
    }

    fn conditionals(&self) -> Result<(f64, f64)> {
        match (self.p_defect_given_defect, self.p_defect_given_cooperate) {
            (Some(dd), Some(dc)) => Ok((dd, dc)),
            _ => Err(Error::MissingConditionals(self.name.clone())),
        }
    }
}

pub fn load_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let scenarios: Vec<Scenario> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    for s in &scenarios {
        s.validate()?;
    }
    Ok(scenarios)
}

/// The five rows of the aggregated prisoner's-dilemma data set (four
/// experiments plus their average).
pub fn builtin_scenarios() -> Vec<Scenario> {
    load_scenarios(SCENARIOS_JSON).expect("built-in scenarios are valid")
}

/// The built-in "Average" row.
pub fn average_scenario() -> Scenario {
    builtin_scenarios()
        .into_iter()
        .find(|s| s.name == "Average")
        .expect("built-in data has an Average row")
}

/// The two-node network `P1 → P2` of a scenario. Both players' outcomes are
/// declared `[Cooperate, Defect]`.
pub fn scenario_to_network(s: &Scenario) -> Result<Network> {
    s.validate()?;
    let (dd, dc) = s.conditionals()?;
    let dist = |defect: f64| -> BTreeMap<String, Prob> {
        [
            (COOPERATE.to_string(), Prob(1.0 - defect)),
            (DEFECT.to_string(), Prob(defect)),
        ]
        .into()
    };
    let given =
        |outcome: &str| -> BTreeMap<String, String> { [(FIRST_PLAYER.to_string(), outcome.to_string())].into() };
    let def = NetworkDef {
        variables: vec![
            Variable::new(FIRST_PLAYER, [COOPERATE, DEFECT]),
            Variable::new(SECOND_PLAYER, [COOPERATE, DEFECT]),
        ],
        edges: vec![(FIRST_PLAYER.into(), SECOND_PLAYER.into())],
        cpts: [
            (
                FIRST_PLAYER.to_string(),
                vec![CptRowDef {
                    given: BTreeMap::new(),
                    dist: dist(s.prior_defect),
                }],
            ),
            (
                SECOND_PLAYER.to_string(),
                vec![
                    CptRowDef {
                        given: given(COOPERATE),
                        dist: dist(dc),
                    },
                    CptRowDef {
                        given: given(DEFECT),
                        dist: dist(dd),
                    },
                ],
            ),
        ]
        .into(),
    };
    Network::from_def(&def)
}

/// Relative fit error `|predicted − observed| / observed`.
pub fn fit_error(predicted: f64, observed: f64) -> Result<f64> {
    if observed <= 0.0 {
        return Err(Error::ZeroObserved);
    }
    Ok((predicted - observed).abs() / observed)
}

/// A published model result carried for comparison; never recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub predicted: f64,
    pub fit_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiteratureModel {
    pub key: String,
    pub label: String,
    pub average_fit_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiteratureRow {
    pub scenario: String,
    pub observed: f64,
    pub results: BTreeMap<String, ModelResult>,
}

/// Published comparison-model results, keyed by scenario name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Literature {
    pub models: Vec<LiteratureModel>,
    pub rows: Vec<LiteratureRow>,
}

impl Literature {
    pub fn builtin() -> Self {
        serde_json::from_str(LITERATURE_JSON).expect("built-in literature table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn row(&self, scenario: &str) -> Option<&LiteratureRow> {
        self.rows.iter().find(|r| r.scenario == scenario)
    }

    /// Rows with observed values only; their conditionals must be supplied
    /// before they can be predicted.
    pub fn placeholder_scenarios(&self, known: &[Scenario]) -> Vec<Scenario> {
        self.rows
            .iter()
            .filter(|r| known.iter().all(|s| s.name != r.scenario))
            .map(|r| Scenario {
                name: r.scenario.clone(),
                p_defect_given_defect: None,
                p_defect_given_cooperate: None,
                observed_unknown: r.observed,
                prior_defect: 0.5,
                classical_reported: None,
                payoff_note: None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiteratureEntry {
    pub model: String,
    pub predicted: f64,
    pub fit_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRecord {
    pub scenario: String,
    pub observed: f64,
    pub classical_prediction: f64,
    pub quantum_prediction: f64,
    pub belief_degree: f64,
    pub fit_error_classical: f64,
    pub fit_error_quantum: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub literature: Vec<LiteratureEntry>,
    #[serde(skip)]
    pub trace: Option<BeliefTrace>,
}

impl PredictionRecord {
    pub fn literature(&self, model: &str) -> Option<&LiteratureEntry> {
        self.literature.iter().find(|e| e.model == model)
    }
}

/// Classical and belief-degree quantum predictions of `Pr(P2 = Defect)`
/// under the unknown condition.
pub fn predict_unknown(s: &Scenario) -> Result<PredictionRecord> {
    let net = scenario_to_network(s)?;
    let evidence = Assignment::new();
    let classical = net
        .infer(SECOND_PLAYER, &evidence)?
        .get(DEFECT)
        .expect("P2 has a Defect outcome");
    let anet = AmplitudeNetwork::from_network(&net)?;
    let trace = belief_trace(&anet, SECOND_PLAYER, &evidence)?;
    let result = anet.infer(SECOND_PLAYER, &evidence, &trace.degree.interference())?;
    let quantum = result.probability(DEFECT).expect("P2 has a Defect outcome");
    Ok(PredictionRecord {
        scenario: s.name.clone(),
        observed: s.observed_unknown,
        classical_prediction: classical,
        quantum_prediction: quantum,
        belief_degree: trace.degree.value,
        fit_error_classical: fit_error(classical, s.observed_unknown)?,
        fit_error_quantum: fit_error(quantum, s.observed_unknown)?,
        literature: Vec::new(),
        trace: Some(trace),
    })
}

/// Arithmetic means of the fit-error columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Averages {
    pub fit_classical: f64,
    pub fit_quantum: f64,
    /// Per literature model, over the records that carry it.
    pub literature: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub records: Vec<PredictionRecord>,
    /// Literature model keys present, in column order.
    pub models: Vec<String>,
    pub averages: Averages,
}

/// Predicts every scenario (in parallel when enabled) and attaches matching
/// literature results.
pub fn run_comparison(scenarios: &[Scenario], literature: Option<&Literature>) -> Result<Report> {
    run_comparison_with(scenarios, literature, Execution::default())
}

pub fn run_comparison_with(
    scenarios: &[Scenario],
    literature: Option<&Literature>,
    execution: Execution,
) -> Result<Report> {
    if scenarios.is_empty() {
        return Err(Error::NoScenarios);
    }
    let mut records = try_map_ordered(scenarios, execution, predict_unknown)?;
    let mut models = Vec::new();
    if let Some(lit) = literature {
        for record in &mut records {
            let Some(row) = lit.row(&record.scenario) else { continue };
            for model in &lit.models {
                if let Some(r) = row.results.get(&model.key) {
                    record.literature.push(LiteratureEntry {
                        model: model.key.clone(),
                        predicted: r.predicted,
                        fit_error: r.fit_error,
                    });
                    if !models.contains(&model.key) {
                        models.push(model.key.clone());
                    }
                }
            }
        }
        models.sort_by_key(|k| lit.models.iter().position(|m| &m.key == k));
    }
    let mean = |xs: Vec<f64>| xs.iter().sum::<f64>() / xs.len() as f64;
    let averages = Averages {
        fit_classical: mean(records.iter().map(|r| r.fit_error_classical).collect()),
        fit_quantum: mean(records.iter().map(|r| r.fit_error_quantum).collect()),
        literature: models
            .iter()
            .map(|m| {
                let xs = records
                    .iter()
                    .filter_map(|r| r.literature(m))
                    .map(|e| e.fit_error)
                    .collect();
                (m.clone(), mean(xs))
            })
            .collect(),
    };
    Ok(Report {
        records,
        models,
        averages,
    })
}

impl Report {
    pub fn record(&self, scenario: &str) -> Option<&PredictionRecord> {
        self.records.iter().find(|r| r.scenario == scenario)
    }

    /// CSV header; literature columns follow the fixed ones.
    pub fn csv_header(&self) -> Vec<String> {
        let mut h: Vec<String> = [
            "scenario",
            "observed",
            "classical",
            "quantum",
            "degree",
            "fit_classical",
            "fit_quantum",
        ]
        .map(String::from)
        .to_vec();
        for m in &self.models {
            h.push(format!("{m}_predicted"));
            h.push(format!("{m}_fit"));
        }
        h
    }

    /// Full-precision CSV, one row per record. Missing literature cells are
    /// empty.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.csv_header()).expect("in-memory write");
        for r in &self.records {
            let mut row = vec![
                r.scenario.clone(),
                full(r.observed),
                full(r.classical_prediction),
                full(r.quantum_prediction),
                full(r.belief_degree),
                full(r.fit_error_classical),
                full(r.fit_error_quantum),
            ];
            for m in &self.models {
                match r.literature(m) {
                    Some(e) => row.extend([full(e.predicted), full(e.fit_error)]),
                    None => row.extend([String::new(), String::new()]),
                }
            }
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Long-format bar-chart series: observed and each model's prediction
    /// per scenario.
    pub fn plot_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scenario", "series", "value"])
            .expect("in-memory write");
        for r in &self.records {
            let mut rows = vec![
                ("observed", r.observed),
                ("classical", r.classical_prediction),
                ("quantum", r.quantum_prediction),
            ];
            for e in &r.literature {
                rows.push((e.model.as_str(), e.predicted));
            }
            for (series, value) in rows {
                w.write_record([r.scenario.as_str(), series, &full(value)])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Aligned text table, 5 decimals.
    pub fn to_table(&self) -> String {
        let header = self.csv_header();
        let mut rows: Vec<Vec<String>> = self
            .records
            .iter()
            .map(|r| {
                let mut row = vec![
                    r.scenario.clone(),
                    fixed(r.observed),
                    fixed(r.classical_prediction),
                    fixed(r.quantum_prediction),
                    fixed(r.belief_degree),
                    fixed(r.fit_error_classical),
                    fixed(r.fit_error_quantum),
                ];
                for m in &self.models {
                    match r.literature(m) {
                        Some(e) => row.extend([fixed(e.predicted), fixed(e.fit_error)]),
                        None => row.extend(["-".to_string(), "-".to_string()]),
                    }
                }
                row
            })
            .collect();
        let mut avg = vec![
            "Average fit error".to_string(),
            "-".into(),
            "-".into(),
            "-".into(),
            "-".into(),
            fixed(self.averages.fit_classical),
            fixed(self.averages.fit_quantum),
        ];
        for (_, a) in &self.averages.literature {
            avg.extend(["-".to_string(), fixed(*a)]);
        }
        rows.push(avg);
        render_table(&header, &rows)
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn full(x: f64) -> String {
    format!("{x:?}")
}

pub fn fixed(x: f64) -> String {
    format!("{x:.5}")
}

pub(crate) fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| {
                let numeric = c == "-" || c.parse::<f64>().is_ok();
                if i == 0 || !numeric {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, header);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    let _ = writeln!(out, "{}", rule.join("  "));
    for row in rows {
        line(&mut out, row);
    }
    out
}

/// One reproduced value compared against a published one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenCheck {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl GoldenCheck {
    pub fn new(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            actual,
            tolerance,
            passed: (actual - expected).abs() <= tolerance,
        }
    }
}

/// Published values this crate reproduces, checked against a report of the
/// built-in scenarios. Rows missing from the report count as failures.
pub fn golden_checks(report: &Report) -> Vec<GoldenCheck> {
    let mut checks = Vec::new();
    let value = |name: &str, f: fn(&PredictionRecord) -> f64| report.record(name).map(f).unwrap_or(f64::NAN);
    for s in builtin_scenarios() {
        if let Some(expected) = s.classical_reported {
            checks.push(GoldenCheck::new(
                format!("classical {}", s.name),
                expected,
                value(&s.name, |r| r.classical_prediction),
                1e-4,
            ));
        }
    }
    checks.push(GoldenCheck::new(
        "belief degree Average",
        -0.9420,
        value("Average", |r| r.belief_degree),
        5e-4,
    ));
    checks.push(GoldenCheck::new(
        "quantum Average",
        0.6926,
        value("Average", |r| r.quantum_prediction),
        5e-4,
    ));
    checks.push(GoldenCheck::new(
        "fit error Average",
        0.082,
        value("Average", |r| r.fit_error_quantum),
        1e-3,
    ));
    checks.push(GoldenCheck::new(
        "quantum Hristova and Grinberg, 2008",
        0.9045,
        value("Hristova and Grinberg, 2008", |r| r.quantum_prediction),
        5e-3,
    ));
    checks.push(GoldenCheck::new(
        "quantum Busemeyer et al., 2006a",
        0.6069,
        value("Busemeyer et al., 2006a", |r| r.quantum_prediction),
        5e-3,
    ));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn average_network_matches_hand_built() {
        let net = scenario_to_network(&average_scenario()).unwrap();
        let a = Assignment::new().with(FIRST_PLAYER, DEFECT).with(SECOND_PLAYER, DEFECT);
        assert_abs_diff_eq!(net.full_joint(&a).unwrap(), 0.5 * 0.87, epsilon = 1e-15);
        let a = Assignment::new()
            .with(FIRST_PLAYER, COOPERATE)
            .with(SECOND_PLAYER, COOPERATE);
        assert_abs_diff_eq!(net.full_joint(&a).unwrap(), 0.5 * 0.26, epsilon = 1e-15);
    }

    #[test]
    fn deterministic_defection() {
        let net = scenario_to_network(&Scenario::new("sure", 1.0, 1.0, 0.9)).unwrap();
        let d = net.infer(SECOND_PLAYER, &Assignment::new()).unwrap();
        assert_eq!(d.get(DEFECT), Some(1.0));
    }

    #[test]
    fn fit_error_examples() {
        assert_abs_diff_eq!(fit_error(0.6926, 0.64).unwrap(), 0.0822, epsilon = 5e-5);
        assert_abs_diff_eq!(fit_error(0.8623, 0.8667).unwrap(), 0.0051, epsilon = 5e-5);
        assert_eq!(fit_error(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(fit_error(0.3, 0.0), Err(Error::ZeroObserved));
    }

    #[test]
    fn predict_average() {
        let r = predict_unknown(&average_scenario()).unwrap();
        assert_abs_diff_eq!(r.classical_prediction, 0.805, epsilon = 1e-12);
        assert_abs_diff_eq!(r.quantum_prediction, 0.6926, epsilon = 5e-4);
        assert_abs_diff_eq!(r.fit_error_quantum, 0.082, epsilon = 1e-3);
    }

    #[test]
    fn predict_comparison_rows() {
        let s = Scenario::new("H", 0.97, 0.93, 0.88);
        assert_abs_diff_eq!(predict_unknown(&s).unwrap().quantum_prediction, 0.9045, epsilon = 5e-3);
        let s = Scenario::new("B", 0.91, 0.84, 0.66);
        assert_abs_diff_eq!(predict_unknown(&s).unwrap().quantum_prediction, 0.6069, epsilon = 5e-3);
    }

    #[test]
    fn placeholders_need_conditionals() {
        let lit = Literature::builtin();
        let placeholders = lit.placeholder_scenarios(&builtin_scenarios());
        assert_eq!(placeholders.len(), 3);
        for p in &placeholders {
            assert_eq!(predict_unknown(p), Err(Error::MissingConditionals(p.name.clone())));
        }
    }

    #[test]
    fn invalid_scenario() {
        let s = Scenario::new("bad", 1.2, 0.5, 0.5);
        assert!(matches!(predict_unknown(&s), Err(Error::InvalidProbability { .. })));
        assert!(load_scenarios(r#"[{"name": "x"}]"#).is_err());
    }

    #[test]
    fn scenario_file_defaults() {
        let s = load_scenarios(
            r#"[{"name": "x", "p_defect_given_defect": 0.9,
                 "p_defect_given_cooperate": 0.8, "observed_unknown": 0.7}]"#,
        )
        .unwrap();
        assert_eq!(s[0].prior_defect, 0.5);
    }

    #[test]
    fn comparison_with_and_without_literature() {
        let scenarios = builtin_scenarios();
        let bare = run_comparison(&scenarios, None).unwrap();
        assert_eq!(bare.records.len(), 5);
        assert!(bare.models.is_empty());
        assert_eq!(bare.csv_header().len(), 7);

        let lit = Literature::builtin();
        let full = run_comparison(&scenarios, Some(&lit)).unwrap();
        assert_eq!(full.models, vec!["qpdt", "dynamic", "published"]);
        let h = full.record("Hristova and Grinberg, 2008").unwrap();
        assert_eq!(h.literature("dynamic").unwrap().predicted, 0.8968);
        assert!(full.record("Average").unwrap().literature.is_empty());
        // only Busemeyer and Hristova carry literature values
        let (_, qpdt) = &full.averages.literature[0];
        assert_abs_diff_eq!(*qpdt, (0.0531 + 0.2045) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn single_scenario_comparison_is_prediction() {
        let avg = average_scenario();
        let report = run_comparison(std::slice::from_ref(&avg), None).unwrap();
        assert_eq!(report.records[0], predict_unknown(&avg).unwrap());
        assert_eq!(run_comparison(&[], None), Err(Error::NoScenarios));
    }

    #[test]
    fn golden_checks_pass_on_builtin_data() {
        let report = run_comparison(&builtin_scenarios(), Some(&Literature::builtin())).unwrap();
        for c in golden_checks(&report) {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn table_renders_every_row() {
        let report = run_comparison(&builtin_scenarios(), None).unwrap();
        let table = report.to_table();
        assert_eq!(table.lines().count(), 2 + 5 + 1);
        assert!(table.contains("0.80500"));
    }
}
