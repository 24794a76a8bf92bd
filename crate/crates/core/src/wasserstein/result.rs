use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Line,
    Circle,
    NetworkSimplex,
    Auction,
    Sinkhorn,
}

/// Outcome of one transport computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub value: f64,
    pub method: Method,
    /// Potentials on source atoms, when the solver certifies its value.
    pub dual_u: Option<Vec<f64>>,
    /// Potentials on target atoms.
    pub dual_v: Option<Vec<f64>>,
    /// Primal value minus the dual objective of (dual_u, dual_v).
    pub duality_gap: f64,
    pub iterations: u64,
    /// Nonzero entries (i, j, mass) of the returned plan.
    pub plan: Option<Vec<(usize, usize, f64)>>,
    pub converged: bool,
    /// Sinkhorn only: rounded-plan cost after each ε stage.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stage_values: Vec<f64>,
}

impl TransportResult {
    pub fn scalar(value: f64, method: Method) -> Self {
        TransportResult {
            value,
            method,
            dual_u: None,
            dual_v: None,
            duality_gap: 0.0,
            iterations: 0,
            plan: None,
            converged: true,
            stage_values: Vec::new(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}
