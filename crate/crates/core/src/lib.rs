//! Quantum-like Bayesian network inference where the interference term's
//! phase cosine is replaced by a belief degree computed from the network's
//! own amplitudes via Deng entropy.
//!
//! - [`belief`]: mass functions, Shannon and Deng entropy.
//! - [`network`]: discrete Bayesian networks, exact enumeration.
//! - [`quantum`]: amplitude networks and interference-bearing marginals.
//! - [`heuristic`]: outcome vectors, belief distance, belief degree.
//! - [`scenario`]: prisoner's-dilemma predictions and comparison reports.
//! - [`cli`]: the `qlbn` command-line front end.
//!
//! ```
//! use qlbn::scenario::{average_scenario, predict_unknown};
//!
//! let record = predict_unknown(&average_scenario()).unwrap();
//! assert!((record.quantum_prediction - 0.6926).abs() < 5e-4);
//! ```

pub mod belief;
pub mod cli;
pub mod error;
pub mod heuristic;
pub mod network;
pub mod par;
pub mod quantum;
pub mod scenario;
pub mod sweep;

pub use belief::{deng_entropy, shannon_entropy, validate_bba, BeliefAssignment, DiscreteDistribution, Frame};
pub use error::{Error, Result};
pub use heuristic::{belief_degree, belief_distance, degree_for_query, extract_outcome_vectors};
pub use network::{Assignment, Network, NetworkDef};
pub use quantum::{interference_sum, AmplitudeNetwork, DegreeSource, InterferenceDegree, QuantumInferenceResult};
pub use scenario::{fit_error, predict_unknown, run_comparison, PredictionRecord, Report, Scenario};
