//! Reanalysis of published time-lottery experiments.
//!
//! Two tables ship with the crate, transcribed as printed: the ten
//! questions of DeJarnette et al. (2020, Part I) in $/wk and the six cases
//! of Onay and Öncüler (2007, Study 1) in NTL/mth. Loss-framed Onay cases
//! are stored as absolute amounts. Records can be audited against their
//! defining formulas and regressed (RATL share on the Jensen gap).

mod audit;
mod dataset;
mod figure;
mod ols;

use std::fmt::Write as _;
use std::str::FromStr;

pub use audit::{audit, AuditFinding, Severity, HALF_ULP, ROUNDING_LIMIT};
pub use dataset::{load_dataset, write_rates, ChoiceProblemRecord, Schema, DEFAULT_UNIT_LABEL};
pub use figure::{emit_figure, FigureFormat};
pub use ols::{band_grid, confidence_band, fit_points, ols_fit, BandPoint, OlsFit, BAND_SIGMA};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dataset {
    DeJarnette,
    Onay,
}

impl Dataset {
    pub const ALL: [Dataset; 2] = [Dataset::DeJarnette, Dataset::Onay];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::DeJarnette => "dejarnette",
            Dataset::Onay => "onay",
        }
    }

    pub fn csv(self) -> &'static str {
        match self {
            Dataset::DeJarnette => include_str!("../../data/dejarnette.csv"),
            Dataset::Onay => include_str!("../../data/onay.csv"),
        }
    }

    pub fn load(self) -> Result<Vec<ChoiceProblemRecord>> {
        load_dataset(self.csv().as_bytes(), Schema::Rates)
    }
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dejarnette" => Ok(Dataset::DeJarnette),
            "onay" => Ok(Dataset::Onay),
            other => Err(Error::invalid(format!("unknown dataset `{other}`"))),
        }
    }
}

/// Plain-text table in the printed column order, plus `Δx/⟨t⟩` when the
/// raw fields are known.
pub fn render_table(records: &[ChoiceProblemRecord]) -> String {
    let has_raw = records.iter().any(|r| r.recomputed_time_growth().is_some());
    let width = records
        .iter()
        .map(|r| r.label.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut s = String::new();
    if let Some(first) = records.first() {
        let _ = writeln!(s, "unit: {}", first.unit_label);
    }
    let _ = write!(s, "{:<width$}", "label");
    if has_raw {
        let _ = write!(s, " {:>7} {:>7}", "<t>", "dx");
    }
    let _ = write!(
        s,
        " {:>8} {:>8} {:>8} {:>8} {:>7}",
        "<g>^I", "<g>^II", "g_time", "gap", "RATL%"
    );
    if has_raw {
        let _ = write!(s, " {:>9}", "dx/<t>");
    }
    s.push('\n');
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |x| format!("{x:.1}"));
    for r in records {
        let _ = write!(s, "{:<width$}", r.label);
        if has_raw {
            let _ = write!(s, " {:>7} {:>7}", cell(r.exp_t), cell(r.dx));
        }
        let _ = write!(
            s,
            " {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>7.1}",
            r.g_ens_i, r.g_ens_ii, r.g_time, r.gap, r.ratl_fraction
        );
        if has_raw {
            let _ = write!(
                s,
                " {:>9}",
                r.recomputed_time_growth()
                    .map_or("-".into(), |g| format!("{g:.2}"))
            );
        }
        s.push('\n');
    }
    s
}
