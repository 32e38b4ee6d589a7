//! Verdicts and machine-readable verification reports.

use std::fmt;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::action::Scale;
use crate::perturb::Provenance;

pub const SAMPLED_LABEL: &str = "sampled — not a proof";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check had nothing to quantify over (zero modulus, only the
    /// unperturbed action in scope).
    Vacuous,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Vacuous => "VACUOUS",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub anchor: String,
    pub scale: Option<Scale>,
    pub provenance: Option<Provenance>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub details: Value,
    pub counterexamples: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl CheckRecord {
    pub fn new(check: &str, anchor: &str) -> Self {
        CheckRecord {
            check: check.to_string(),
            anchor: anchor.to_string(),
            scale: None,
            provenance: None,
            verdict: Verdict::Pass,
            label: None,
            details: Value::Null,
            counterexamples: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn at(mut self, scale: Scale, provenance: Provenance) -> Self {
        if !provenance.is_exhaustive() {
            self.label = Some(SAMPLED_LABEL.to_string());
        }
        self.scale = Some(scale);
        self.provenance = Some(provenance);
        self
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    /// PASS when no counterexample was recorded, FAIL otherwise; `vacuous`
    /// overrides a clean pass.
    pub fn conclude(mut self, vacuous: bool) -> Self {
        self.verdict = if !self.counterexamples.is_empty() {
            Verdict::Fail
        } else if vacuous {
            Verdict::Vacuous
        } else {
            Verdict::Pass
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub instance_fingerprint: String,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
}

impl VerificationReport {
    pub fn new(instance_fingerprint: String, checks: Vec<CheckRecord>) -> Self {
        let mut summary = Summary::default();
        for c in &checks {
            match c.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::Vacuous => summary.vacuous += 1,
            }
        }
        VerificationReport {
            instance_fingerprint,
            checks,
            summary,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn fingerprint(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}
