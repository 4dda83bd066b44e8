//! The `qlbn` command-line front end.
//!
//! Exit codes: 0 success, 1 validation error, 2 inference error, 3 golden
//! mismatch (`reproduce` only).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::belief::{deng_entropy, parse_bba, shannon_entropy_bits, DiscreteDistribution};
use crate::error::Error;
use crate::heuristic::{belief_trace, BeliefTrace};
use crate::network::{Assignment, Network};
use crate::quantum::{AmplitudeNetwork, InterferenceDegree, QuantumInferenceResult};
use crate::scenario::{
    self, builtin_scenarios, fixed, full, golden_checks, load_scenarios, render_table, run_comparison, GoldenCheck,
    Literature, Report,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_INFERENCE: i32 = 2;
pub const EXIT_GOLDEN: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qlbn",
    version,
    about = "Quantum-like Bayesian network inference with belief-entropy interference"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shannon and Deng entropy of a mass function file.
    Entropy {
        #[arg(long)]
        bba: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Query a network, classically or with interference.
    Infer {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        query: String,
        /// `VAR=OUTCOME`, repeatable.
        #[arg(long = "evidence", value_parser = parse_evidence)]
        evidence: Vec<(String, String)>,
        #[arg(long, value_enum, default_value_t = Mode::Quantum)]
        mode: Mode,
        /// `auto` (belief heuristic), `zero`, or `fixed:<value>` in [-1, 1].
        #[arg(long, default_value = "auto")]
        degree: DegreePolicy,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        verbose: bool,
    },
    /// Predict the unknown condition for each scenario in a file.
    Predict {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        verbose: bool,
    },
    /// Comparison report with average fit errors.
    Compare {
        /// Scenario file; the built-in data set when omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Literature table; the built-in one when omitted.
        #[arg(long, conflicts_with = "no_literature")]
        literature: Option<PathBuf>,
        #[arg(long)]
        no_literature: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Rebuild the published tables from built-in data and check them.
    Reproduce {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Also write report.csv, plot.csv and report.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreePolicy {
    Auto,
    Zero,
    Fixed(InterferenceDegree),
}

impl FromStr for DegreePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Self::Auto),
            "zero" => Ok(Self::Zero),
            _ => {
                let v = s
                    .strip_prefix("fixed:")
                    .ok_or_else(|| format!("expected auto, zero or fixed:<value>, got `{s}`"))?;
                let v: f64 = v.parse().map_err(|_| format!("bad degree `{v}`"))?;
                InterferenceDegree::new(v).map(Self::Fixed).map_err(|e| e.to_string())
            }
        }
    }
}

fn parse_evidence(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => Ok((k.trim().into(), v.trim().into())),
        _ => Err(format!("expected VAR=OUTCOME, got `{s}`")),
    }
}

/// A failed command: message plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() {
            EXIT_VALIDATION
        } else {
            EXIT_INFERENCE
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_VALIDATION,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

/// Parses `args` (program name first), runs the command, writes output to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
        }
    };
    match execute(&cli.command) {
        Ok(Outcome { text, code }) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Command output and the exit code to finish with.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }
}

fn execute(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Entropy { bba, format } => cmd_entropy(bba, *format).map(Into::into),
        Command::Infer {
            network,
            query,
            evidence,
            mode,
            degree,
            format,
            verbose,
        } => {
            let net = Network::from_json(&read(network)?)?;
            let evidence: Assignment = evidence.iter().cloned().collect();
            cmd_infer(&net, query, &evidence, *mode, *degree, *format, *verbose).map(Into::into)
        }
        Command::Predict {
            scenario,
            format,
            verbose,
        } => {
            let scenarios = load_scenarios(&read(scenario)?)?;
            cmd_predict(&scenarios, *format, *verbose).map(Into::into)
        }
        Command::Compare {
            scenario,
            literature,
            no_literature,
            format,
        } => {
            let scenarios = match scenario {
                Some(p) => load_scenarios(&read(p)?)?,
                None => builtin_scenarios(),
            };
            let literature = match (literature, no_literature) {
                (_, true) => None,
                (Some(p), false) => Some(Literature::from_json(&read(p)?)?),
                (None, false) => Some(Literature::builtin()),
            };
            let report = run_comparison(&scenarios, literature.as_ref())?;
            Ok(render_report(&report, *format).into())
        }
        Command::Reproduce { format, out_dir } => cmd_reproduce(*format, out_dir.as_deref()),
    }
}

#[derive(Serialize)]
struct EntropyOutput {
    shannon: f64,
    deng: f64,
}

/// Shannon entropy of the mass vector and Deng entropy of the assignment,
/// both in bits.
pub fn cmd_entropy(path: &Path, format: Format) -> Result<String, Failure> {
    let bba = parse_bba(&read(path)?).map_err(|e| Failure {
        code: EXIT_VALIDATION,
        message: format!("{}: {e}", path.display()),
    })?;
    let masses: Vec<f64> = bba.masses().map(|(_, m)| m).collect();
    let shannon = shannon_entropy_bits(&DiscreteDistribution::from_probabilities(masses)?);
    let deng = deng_entropy(&bba);
    Ok(match format {
        Format::Table => format!("shannon={shannon:.5} deng={deng:.5}\n"),
        Format::Csv => format!("shannon,deng\n{},{}\n", full(shannon), full(deng)),
        Format::Json => json(&EntropyOutput { shannon, deng }),
    })
}

#[derive(Serialize)]
struct InferOutput<'a> {
    query: &'a str,
    mode: &'static str,
    distribution: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantum: Option<&'a QuantumInferenceResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    belief: Option<&'a BeliefTrace>,
}

pub fn cmd_infer(
    net: &Network,
    query: &str,
    evidence: &Assignment,
    mode: Mode,
    degree: DegreePolicy,
    format: Format,
    verbose: bool,
) -> Result<String, Failure> {
    let (dist, result, trace) = match mode {
        Mode::Classical => (net.infer(query, evidence)?, None, None),
        Mode::Quantum => {
            let anet = AmplitudeNetwork::from_network(net)?;
            let (d, trace) = match degree {
                DegreePolicy::Auto => {
                    let t = belief_trace(&anet, query, evidence)?;
                    (t.degree.interference(), Some(t))
                }
                DegreePolicy::Zero => (InterferenceDegree::ZERO, None),
                DegreePolicy::Fixed(d) => (d, None),
            };
            let r = anet.infer(query, evidence, &d)?;
            (r.distribution(), Some(r), trace)
        }
    };
    let mode_name = match mode {
        Mode::Classical => "classical",
        Mode::Quantum => "quantum",
    };
    let mut s = String::new();
    match format {
        Format::Json => {
            s = json(&InferOutput {
                query,
                mode: mode_name,
                distribution: dist.iter().map(|(l, p)| (l.to_string(), p)).collect(),
                quantum: result.as_ref(),
                belief: trace.as_ref(),
            })
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            match &result {
                Some(r) => {
                    w.write_record([
                        "outcome",
                        "probability",
                        "degree",
                        "classical_part",
                        "interference_part",
                        "unnormalized",
                        "normalizer",
                    ])
                    .expect("in-memory write");
                    for t in &r.outcomes {
                        w.write_record([
                            t.outcome.clone(),
                            full(t.probability),
                            full(t.degree),
                            full(t.classical_part),
                            full(t.interference_part),
                            full(t.unnormalized),
                            full(r.normalizer),
                        ])
                        .expect("in-memory write");
                    }
                }
                None => {
                    w.write_record(["outcome", "probability"]).expect("in-memory write");
                    for (l, p) in dist.iter() {
                        w.write_record([l.to_string(), full(p)]).expect("in-memory write");
                    }
                }
            }
            s = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8");
        }
        Format::Table => {
            let width = dist.labels().iter().map(|l| l.chars().count()).max().unwrap_or(0);
            let _ = writeln!(s, "{query} ({mode_name}, evidence {evidence})");
            for (l, p) in dist.iter() {
                let _ = writeln!(s, "{l:<width$}  {}", fixed(p));
            }
            if verbose {
                if let Some(t) = &trace {
                    write_trace(&mut s, t);
                }
                if let Some(r) = &result {
                    let _ = writeln!(s, "interference:");
                    for t in &r.outcomes {
                        let _ = writeln!(
                            s,
                            "  {:<width$}  degree={} classical={} interference={} unnormalized={}{}",
                            t.outcome,
                            fixed(t.degree),
                            fixed(t.classical_part),
                            fixed(t.interference_part),
                            fixed(t.unnormalized),
                            if t.clamped { " (clamped to 0)" } else { "" }
                        );
                    }
                    let _ = writeln!(s, "  normalizer={}", fixed(r.normalizer));
                }
            }
        }
    }
    Ok(s)
}

fn write_trace(s: &mut String, t: &BeliefTrace) {
    let _ = writeln!(s, "belief heuristic:");
    let w = t.pairs.iter().map(|p| p.outcome.len()).max().unwrap_or(0);
    for (p, d) in t.pairs.iter().zip(&t.distances) {
        let _ = writeln!(
            s,
            "  {:<w$}  alpha={} beta={} distance={}",
            p.outcome,
            fixed(p.alpha),
            fixed(p.beta),
            fixed(d.value())
        );
    }
    let _ = writeln!(
        s,
        "  degree raw={} clamped={}{}",
        fixed(t.degree.raw),
        fixed(t.degree.value),
        if t.degree.clamped { " (out of range)" } else { "" }
    );
}

pub fn cmd_predict(scenarios: &[scenario::Scenario], format: Format, verbose: bool) -> Result<String, Failure> {
    let report = run_comparison(scenarios, None)?;
    let mut s = render_report(&report, format);
    if verbose && format == Format::Table {
        for r in &report.records {
            let _ = writeln!(s, "\n{}", r.scenario);
            if let Some(t) = &r.trace {
                write_trace(&mut s, t);
            }
        }
    }
    Ok(s)
}

fn render_report(report: &Report, format: Format) -> String {
    match format {
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

#[derive(Serialize)]
struct Reproduction<'a> {
    report: &'a Report,
    golden: &'a [GoldenCheck],
    not_reproducible: Vec<&'a str>,
}

pub fn cmd_reproduce(format: Format, out_dir: Option<&Path>) -> Result<Outcome, Failure> {
    let literature = Literature::builtin();
    let scenarios = builtin_scenarios();
    let report = run_comparison(&scenarios, Some(&literature))?;
    let checks = golden_checks(&report);
    let excluded = literature.placeholder_scenarios(&scenarios);

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        for (name, body) in [
            ("report.csv", report.to_csv()),
            ("plot.csv", report.plot_csv()),
            ("report.json", report.to_json()),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| io_failure(&path, e))?;
        }
    }

    let text = match format {
        Format::Json => json(&Reproduction {
            report: &report,
            golden: &checks,
            not_reproducible: excluded.iter().map(|s| s.name.as_str()).collect(),
        }),
        Format::Csv => report.to_csv(),
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "Predicted Pr(P2 = Defect) under the unknown condition\n");
            s.push_str(&report.to_table());
            if let Some(avg) = report.record("Average") {
                let _ = writeln!(s, "\nWorked example: Average");
                if let Some(t) = &avg.trace {
                    write_trace(&mut s, t);
                }
                let _ = writeln!(
                    s,
                    "  quantum={} observed={} fit error={:.1}%",
                    fixed(avg.quantum_prediction),
                    fixed(avg.observed),
                    avg.fit_error_quantum * 100.0
                );
            }
            let _ = writeln!(s, "\nGolden checks");
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        if c.passed { "PASS" } else { "FAIL" }.to_string(),
                        c.name.clone(),
                        fixed(c.expected),
                        fixed(c.actual),
                        format!("{:.0e}", c.tolerance),
                    ]
                })
                .collect();
            let header = ["status", "check", "expected", "actual", "tolerance"].map(String::from);
            s.push_str(&render_table(&header, &rows));
            let _ = writeln!(
                s,
                "\nNot reproduced (conditional probabilities not published with these rows):"
            );
            for p in &excluded {
                let published = literature
                    .row(&p.name)
                    .and_then(|r| r.results.get("published"))
                    .map(|r| fixed(r.predicted))
                    .unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    s,
                    "  {}  observed={} published={published}",
                    p.name,
                    fixed(p.observed_unknown)
                );
            }
            let _ = writeln!(s, "\nPlot series\n");
            s.push_str(&report.plot_csv());
            s
        }
    };

    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(text.into())
    } else {
        Ok(Outcome {
            text: format!("{text}\nGolden mismatch: {}\n", failed.join(", ")),
            code: EXIT_GOLDEN,
        })
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs always serialize");
    s.push('\n');
    s
}
