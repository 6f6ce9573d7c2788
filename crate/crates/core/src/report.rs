//! Machine-readable outcomes of theorem checks.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::matrix::IntMatrix;
use crate::modmatrix::ModMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Refuted,
    /// An exploration with no expected outcome.
    Finding,
    Skipped(String),
}

impl Status {
    /// Process exit code: 0 verified or finding, 1 refuted, 2 skipped.
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Verified | Status::Finding => 0,
            Status::Refuted => 1,
            Status::Skipped(_) => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool_version: String,
    pub claim: String,
    pub params: BTreeMap<String, Value>,
    pub predicted: BTreeMap<String, Value>,
    pub observed: BTreeMap<String, Value>,
    pub status: Status,
    pub witness: Option<Vec<Value>>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The same report with `elapsed_ms` zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> VerificationReport {
        VerificationReport { elapsed_ms: 0, ..self.clone() }
    }
}

/// Accumulates predicted and observed values and settles the status.
#[derive(Debug)]
pub struct ReportBuilder {
    claim: String,
    params: BTreeMap<String, Value>,
    predicted: BTreeMap<String, Value>,
    observed: BTreeMap<String, Value>,
    witness: Option<Vec<Value>>,
    fallback_witness: Vec<Value>,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(claim: &str) -> Self {
        ReportBuilder {
            claim: claim.to_string(),
            params: BTreeMap::new(),
            predicted: BTreeMap::new(),
            observed: BTreeMap::new(),
            witness: None,
            fallback_witness: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn predict(&mut self, key: &str, value: impl Into<Value>) {
        self.predicted.insert(key.to_string(), value.into());
    }

    pub fn observe(&mut self, key: &str, value: impl Into<Value>) {
        self.observed.insert(key.to_string(), value.into());
    }

    pub fn witness(&mut self, ms: &[ModMatrix]) {
        self.witness = Some(ms.iter().map(residue_json).collect());
    }

    /// Matrices reported if the check is refuted without a more specific
    /// witness, typically the generators of the group examined.
    pub fn fallback_witness(&mut self, ms: &[ModMatrix]) {
        self.fallback_witness = ms.iter().map(residue_json).collect();
    }

    pub fn matches(&self) -> bool {
        self.predicted.iter().all(|(k, v)| self.observed.get(k) == Some(v))
    }

    fn finish_with(self, status: Status) -> VerificationReport {
        let witness = match (&status, self.witness) {
            (Status::Refuted, None) => Some(self.fallback_witness),
            (_, w) => w,
        };
        VerificationReport {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            claim: self.claim,
            params: self.params,
            predicted: self.predicted,
            observed: self.observed,
            status,
            witness,
            elapsed_ms: self.started.elapsed().as_millis() as u64,
        }
    }

    /// Verified iff every predicted key matches its observation.
    pub fn finish(self) -> VerificationReport {
        let status = if self.matches() { Status::Verified } else { Status::Refuted };
        self.finish_with(status)
    }

    pub fn finding(self) -> VerificationReport {
        self.finish_with(Status::Finding)
    }

    pub fn skipped(self, reason: impl Into<String>) -> VerificationReport {
        self.finish_with(Status::Skipped(reason.into()))
    }
}

fn residue_json(m: &ModMatrix) -> Value {
    let mut v = m.to_int_matrix().to_json_value();
    v["modulus"] = Value::from(m.modulus());
    v
}

/// Integer matrix JSON for witnesses that live over `Z`.
pub fn int_json(m: &IntMatrix) -> Value {
    m.to_json_value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_serialization() {
        assert_eq!(serde_json::to_string(&Status::Verified).unwrap(), "\"verified\"");
        assert_eq!(serde_json::to_string(&Status::Skipped("too big".into())).unwrap(), "{\"skipped\":\"too big\"}");
        assert_eq!(Status::Refuted.exit_code(), 1);
    }

    #[test]
    fn refuted_reports_carry_a_witness() {
        let mut b = ReportBuilder::new("demo").param("n", 3);
        b.predict("order", "6");
        b.observe("order", "5");
        b.fallback_witness(&[ModMatrix::identity(2, 2)]);
        let r = b.finish();
        assert_eq!(r.status, Status::Refuted);
        assert_eq!(r.witness.as_ref().unwrap().len(), 1);

        let mut b = ReportBuilder::new("demo");
        b.predict("order", "6");
        b.observe("order", "6");
        b.observe("extra", true);
        let r = b.finish();
        assert_eq!(r.status, Status::Verified);
        assert!(r.witness.is_none());
        let json: Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        for k in ["tool_version", "claim", "params", "predicted", "observed", "status", "witness", "elapsed_ms"] {
            assert!(keys.contains(&k), "{k}");
        }
    }
}
