//! Batch prediction over a grid of conditional probabilities.

use serde::Serialize;

use crate::par::{map_ordered, Execution};
use crate::scenario::{predict_unknown, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub p_defect_given_defect: f64,
    pub p_defect_given_cooperate: f64,
    pub classical: f64,
    /// `None` where the belief heuristic is undefined (singular distance) or
    /// the interference cancels every outcome.
    pub quantum: Option<f64>,
    pub degree: Option<f64>,
}

/// `k · step` for `k = 1, 2, ...` while below one, rounded to 12 decimals so
/// grid values print cleanly.
pub fn grid_values(step: f64) -> Vec<f64> {
    assert!(step > 0.0 && step < 1.0, "step must lie in (0, 1)");
    (1..)
        .map(|k| (k as f64 * step * 1e12).round() / 1e12)
        .take_while(|&v| v < 1.0 - 1e-12)
        .collect()
}

/// Predicts every `(p_dd, p_dc)` pair from `values × values` under the
/// given prior. Row-major: `p_dd` outer, `p_dc` inner.
pub fn prediction_grid(values: &[f64], prior_defect: f64, execution: Execution) -> Vec<GridPoint> {
    let pairs: Vec<(f64, f64)> = values
        .iter()
        .flat_map(|&dd| values.iter().map(move |&dc| (dd, dc)))
        .collect();
    map_ordered(&pairs, execution, |&(dd, dc)| {
        let classical = prior_defect * dd + (1.0 - prior_defect) * dc;
        let mut s = Scenario::new("grid", dd, dc, 1.0);
        s.prior_defect = prior_defect;
        let record = predict_unknown(&s).ok();
        GridPoint {
            p_defect_given_defect: dd,
            p_defect_given_cooperate: dc,
            classical,
            quantum: record.as_ref().map(|r| r.quantum_prediction),
            degree: record.as_ref().map(|r| r.belief_degree),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(grid_values(0.25), vec![0.25, 0.5, 0.75]);
        assert_eq!(grid_values(0.1).len(), 9);
        assert_eq!(grid_values(0.1)[2], 0.3);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let v = grid_values(0.05);
        let a = prediction_grid(&v, 0.5, Execution::Sequential);
        let b = prediction_grid(&v, 0.5, Execution::Parallel);
        assert_eq!(a, b);
        assert_eq!(a.len(), v.len() * v.len());
        for p in &a {
            if let Some(q) = p.quantum {
                assert!((0.0..=1.0).contains(&q));
            }
        }
    }

    #[test]
    fn average_point() {
        let g = prediction_grid(&[0.74, 0.87], 0.5, Execution::Sequential);
        let p = g
            .iter()
            .find(|p| p.p_defect_given_defect == 0.87 && p.p_defect_given_cooperate == 0.74)
            .unwrap();
        assert!((p.quantum.unwrap() - 0.6926).abs() < 5e-4);
    }
}
