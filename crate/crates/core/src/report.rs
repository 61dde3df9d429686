//! JSON report shared by the bound computation and simulated experiments.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Measured or computed lower bound with its diagnostics.
///
/// The first six fields are always present (`oracle` may be `null`); the
/// remaining ones are filled in by simulated experiments only.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: f64,
    pub raw_trace: f64,
    pub alpha1: f64,
    pub oracle: Option<f64>,
    pub certified: bool,
    pub violations: usize,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard_error: Option<f64>,
    /// Delta-method standard error of the rooted bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_standard_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_trace: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copy_oracles: Option<Vec<f64>>,
    /// Whether `C(ρ)ⁿ ≥ ∏ C(ρᵢ) ≥ Tr(⊗ρᵢ V)` held.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometric_mean_ok: Option<bool>,
}

impl BoundReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_fields_always_serialized() {
        let r = BoundReport { bound: 0.5, alpha1: 0.5, ..Default::default() };
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        for key in ["bound", "raw_trace", "alpha1", "oracle", "certified", "violations"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["oracle"].is_null());
        assert!(v.get("shots").is_none());
        assert_eq!(BoundReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    }
}
