use std::collections::BTreeMap;

use serde::Serialize;

use crate::tolerance;

/// Direction of the comparison a [`BoundReport`] makes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `achieved ≤ bound + tol`.
    Upper,
    /// `achieved ≥ bound − tol`.
    Achievability,
    /// `|achieved − bound| ≤ tol`.
    Exact,
}

/// One bound compared against a computed or optimized value.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub theorem: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub kind: BoundKind,
    pub bound: f64,
    pub achieved: f64,
    /// Value of a known protocol, when the report also checks that the
    /// search reached it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    /// Positive when the comparison holds with room to spare.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    pub fn new(theorem: &str, kind: BoundKind, bound: f64, achieved: f64, tolerance: f64) -> Self {
        let margin = match kind {
            BoundKind::Upper => bound - achieved,
            BoundKind::Achievability => achieved - bound,
            BoundKind::Exact => -(achieved - bound).abs(),
        };
        BoundReport {
            theorem: theorem.to_string(),
            params: BTreeMap::new(),
            kind,
            bound,
            achieved,
            floor: None,
            margin,
            tolerance,
            pass: margin >= -tolerance,
            seed: None,
            note: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
        self
    }

    /// Also require `achieved ≥ floor − tol`.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = Some(floor);
        self.pass &= self.achieved >= floor - self.tolerance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Upper bound at the certificate tolerance, for optimizer output.
    pub fn certificate(theorem: &str, bound: f64, achieved: f64) -> Self {
        Self::new(theorem, BoundKind::Upper, bound, achieved, tolerance::CERTIFICATE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_follow_the_kind() {
        let up = BoundReport::new("t", BoundKind::Upper, 0.75, 0.7, 1e-9);
        assert!(up.pass && (up.margin - 0.05).abs() < 1e-15);
        let ach = BoundReport::new("t", BoundKind::Achievability, 0.75, 0.7, 1e-9);
        assert!(!ach.pass);
        let ex = BoundReport::new("t", BoundKind::Exact, 0.75, 0.75 + 1e-13, 1e-12);
        assert!(ex.pass);
        let floored = BoundReport::new("t", BoundKind::Upper, 0.8, 0.69, 1e-6).with_floor(0.7);
        assert!(!floored.pass);
    }
}
