//! JSON run reports. Node and edge ids are 1-based, as in instance files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::EdgeId;
use crate::instance::Instance;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub kind: String,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stretch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<usize>,
}

impl InstanceSummary {
    pub fn of(inst: &Instance) -> Self {
        let g = inst.graph();
        let mut s = InstanceSummary {
            kind: inst.kind().to_string(),
            n: g.node_count(),
            m: g.edge_count(),
            ..Default::default()
        };
        match inst {
            Instance::Ndbd(i) => s.bound = Some(i.bound),
            Instance::Spanner(i) => s.stretch = Some(i.stretch.to_string()),
            Instance::Slst(i) => {
                s.root = Some(i.root + 1);
                s.terminals = Some(i.terminals.len());
            }
        }
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub eps: f64,
    pub level: usize,
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
    pub delta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_eps: Option<f64>,
}

/// Sizes of the intermediate edge sets of the two-stage solvers.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub lp_objective: f64,
    pub lp_rounds: usize,
    pub lp_columns: usize,
    pub thin_edges: usize,
    pub thin_cost: u64,
    pub roots: Vec<usize>,
    pub thick_edges: usize,
    pub thick_cost: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: InstanceSummary,
    pub params: ReportParams,
    pub edges: Vec<usize>,
    pub cost: u64,
    /// Largest `distance / bound` over constrained pairs; `null` when some
    /// pair is disconnected.
    pub max_violation_factor: Option<f64>,
    /// Empty unless timings were requested, so reports stay reproducible.
    pub per_stage_timings_ms: BTreeMap<String, f64>,
    pub settled_pairs: usize,
    pub total_pairs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_stretch: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal_violation: Option<BTreeMap<usize, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<StageSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn set_edges(&mut self, edges: &[EdgeId]) {
        self.edges = edges.iter().map(|&e| e + 1).collect();
    }

    /// Zero-based edge ids.
    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|&e| e - 1).collect()
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// `null` for infinite factors, which JSON cannot represent.
pub(crate) fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_keys() {
        let mut r = RunReport {
            cost: 7,
            max_violation_factor: Some(1.0),
            ..Default::default()
        };
        r.set_edges(&[0, 1]);
        let text = r.to_json();
        assert!(text.ends_with("}\n"));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in [
            "instance",
            "params",
            "edges",
            "cost",
            "max_violation_factor",
            "per_stage_timings_ms",
            "settled_pairs",
            "total_pairs",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        for key in ["eps", "level", "seed", "gamma", "delta"] {
            assert!(v["params"].get(key).is_some(), "{key}");
        }
        assert_eq!(v["edges"], serde_json::json!([1, 2]));
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.edge_ids(), vec![0, 1]);
    }
}
