use serde::Serialize;

use super::dataset::ChoiceProblemRecord;

/// Half a unit in the last printed place of a one-decimal table.
pub const HALF_ULP: f64 = 0.05;
/// Largest mismatch still explained by rounding of two printed values.
pub const ROUNDING_LIMIT: f64 = HALF_ULP + HALF_ULP;

// Absorbs binary representation error of printed decimals.
const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Rounding,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditFinding {
    pub label: String,
    pub field: String,
    pub stated: f64,
    pub recomputed: f64,
    pub severity: Severity,
}

fn classify(stated: f64, recomputed: f64) -> Option<Severity> {
    let diff = (stated - recomputed).abs();
    if diff <= HALF_ULP + SLACK {
        None
    } else if diff <= ROUNDING_LIMIT + SLACK {
        Some(Severity::Rounding)
    } else {
        Some(Severity::Inconsistent)
    }
}

/// Cross-checks printed columns against their definitions.
///
/// `g_time` is recomputed as `dx / exp_t` when the raw fields are present.
/// A printed gap is recomputed as `g_ens_ii − ḡ`, with ḡ taken from the raw
/// fields when available and from the printed column otherwise.
pub fn audit(records: &[ChoiceProblemRecord]) -> Vec<AuditFinding> {
    let mut findings = Vec::new();
    let mut check = |r: &ChoiceProblemRecord, field: &str, stated: f64, recomputed: f64| {
        if let Some(severity) = classify(stated, recomputed) {
            findings.push(AuditFinding {
                label: r.label.clone(),
                field: field.to_owned(),
                stated,
                recomputed,
                severity,
            });
        }
    };
    for r in records {
        let raw_time = r.recomputed_time_growth();
        if let Some(g) = raw_time {
            check(r, "g_time", r.g_time, g);
        }
        if let Some(gap) = r.printed_gap {
            let g_time = raw_time.unwrap_or(r.g_time);
            check(r, "gap", gap, r.g_ens_ii - g_time);
        }
    }
    findings
}
