//! Serializable scan and verification reports (JSON schema version 1) and
//! the CSV curve export.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;

pub const SCHEMA_VERSION: u32 = 1;

/// Per-`n` row of a sup scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerN {
    pub n: u32,
    pub sup: f64,
    pub argmax_x: f64,
}

/// Result of a sup search over `x` (and optionally `n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema: u32,
    pub kind: String,
    pub sup: f64,
    pub argmax_x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_n: Option<u32>,
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_n: Option<Vec<PerN>>,
}

impl ScanReport {
    /// Builds a multi-`n` report; the global sup is the largest row, ties
    /// going to the smaller `(n, x)`.
    pub(crate) fn from_rows(kind: &str, grid: GridSpec, rows: Vec<PerN>) -> Self {
        let best = rows.iter().copied().reduce(|a, b| {
            if b.sup > a.sup || (b.sup == a.sup && (b.n, b.argmax_x) < (a.n, a.argmax_x)) {
                b
            } else {
                a
            }
        });
        let (sup, argmax_x, argmax_n) = match best {
            Some(row) => (row.sup, row.argmax_x, Some(row.n)),
            None => (0.0, 0.0, None),
        };
        Self {
            schema: SCHEMA_VERSION,
            kind: kind.to_owned(),
            sup,
            argmax_x,
            argmax_n,
            grid,
            c_mode: None,
            function: None,
            operator: None,
            per_n: Some(rows),
        }
    }

    pub fn row(&self, n: u32) -> Option<PerN> {
        self.per_n.as_ref()?.iter().find(|r| r.n == n).copied()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Location of the worst sample of a verification sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
}

/// A named bound `value <= bound` inside a larger check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCheck {
    pub id: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_x: Option<f64>,
}

impl SubCheck {
    pub fn upper(id: &str, value: f64, bound: f64, witness_x: Option<f64>) -> Self {
        Self {
            id: id.to_owned(),
            value,
            bound,
            passed: value <= bound,
            witness_x,
        }
    }

    pub fn margin(&self) -> f64 {
        self.bound - self.value
    }
}

/// Pass/fail record for an inequality or identity sweep.
///
/// `passed` holds iff `worst_margin >= -tolerance` and no strictness
/// violations were counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub claim_id: String,
    pub passed: bool,
    pub tolerance: f64,
    pub worst_margin: f64,
    pub witness: Witness,
    pub samples_checked: u64,
    pub violations: u64,
    /// Set by exploratory checks when a counterexample was found.
    pub finding: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub subchecks: Vec<SubCheck>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Running minimum of a margin over a sweep.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MarginTracker {
    pub worst: f64,
    pub witness: Witness,
    pub samples: u64,
    pub violations: u64,
}

impl Default for MarginTracker {
    fn default() -> Self {
        Self {
            worst: f64::INFINITY,
            witness: Witness::default(),
            samples: 0,
            violations: 0,
        }
    }
}

impl MarginTracker {
    pub fn record(&mut self, margin: f64, witness: Witness) {
        self.samples += 1;
        // NaN margins count as worst possible
        let margin = if margin.is_nan() {
            f64::NEG_INFINITY
        } else {
            margin
        };
        if margin < self.worst {
            self.worst = margin;
            self.witness = witness;
        }
    }

    /// Combines two trackers; on equal margins the left one's witness wins,
    /// so folding in sweep order is deterministic.
    pub fn merge(mut self, other: MarginTracker) -> MarginTracker {
        if other.worst < self.worst {
            self.worst = other.worst;
            self.witness = other.witness;
        }
        self.samples += other.samples;
        self.violations += other.violations;
        self
    }

    pub fn into_report(self, claim_id: &str, tolerance: f64) -> VerificationReport {
        let worst_margin = if self.samples == 0 { 0.0 } else { self.worst };
        VerificationReport {
            schema: SCHEMA_VERSION,
            claim_id: claim_id.to_owned(),
            passed: worst_margin >= -tolerance && self.violations == 0,
            tolerance,
            worst_margin,
            witness: self.witness,
            samples_checked: self.samples,
            violations: self.violations,
            finding: false,
            subchecks: Vec::new(),
        }
    }
}

/// Writes `n,x,value` rows.
pub fn write_curve_csv<W: Write>(mut out: W, rows: &[(u32, f64, f64)]) -> io::Result<()> {
    writeln!(out, "n,x,value")?;
    for (n, x, v) in rows {
        writeln!(out, "{n},{x},{v}")?;
    }
    Ok(())
}
