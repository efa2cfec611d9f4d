use std::collections::HashMap;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lottery::{BinaryTimeLottery, Unit};

/// Set by a leading `# unit: <label>` line.
pub const DEFAULT_UNIT_LABEL: &str = "unit/time";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schema {
    /// Printed growth-rate columns.
    Rates,
    /// Raw binary lottery parameters per option, rates computed on load.
    Lotteries,
}

/// One choice problem: option I is the less risky option, option II the
/// riskier one, and both share the same time-average rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChoiceProblemRecord {
    pub label: String,
    pub g_ens_i: f64,
    pub g_ens_ii: f64,
    pub g_time: f64,
    /// `⟨g⟩^II − ḡ`; the printed value when the source has one.
    pub gap: f64,
    pub ratl_fraction: f64,
    pub unit_label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exp_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed_gap: Option<f64>,
}

impl ChoiceProblemRecord {
    /// `Δx / ⟨t⟩` when both raw fields are present.
    pub fn recomputed_time_growth(&self) -> Option<f64> {
        Some(self.dx? / self.exp_t?)
    }
}

const RATES_REQUIRED: [&str; 5] = ["label", "g_ens_i", "g_ens_ii", "g_time", "ratl_pct"];
const LOTTERIES_REQUIRED: [&str; 10] = [
    "label", "t1_i", "t2_i", "p_i", "dx_i", "t1_ii", "t2_ii", "p_ii", "dx_ii", "ratl_pct",
];

fn unit_from_comments(text: &str) -> String {
    text.lines()
        .take_while(|l| l.trim_start().starts_with('#'))
        .find_map(|l| {
            l.trim_start()
                .trim_start_matches('#')
                .trim()
                .strip_prefix("unit:")
                .map(|u| u.trim().to_owned())
        })
        .unwrap_or_else(|| DEFAULT_UNIT_LABEL.to_owned())
}

struct Row<'a> {
    line: usize,
    record: &'a csv::StringRecord,
    columns: &'a HashMap<String, usize>,
}

impl Row<'_> {
    fn err(&self, column: &str, reason: impl Into<String>) -> Error {
        Error::Parse {
            row: self.line,
            column: column.to_owned(),
            reason: reason.into(),
        }
    }

    fn raw(&self, column: &str) -> Option<&str> {
        let idx = *self.columns.get(column)?;
        self.record
            .get(idx)
            .map(str::trim)
            .filter(|s| !s.is_empty())
    }

    fn text(&self, column: &str) -> Result<String> {
        self.raw(column)
            .map(str::to_owned)
            .ok_or_else(|| self.err(column, "missing value"))
    }

    fn number(&self, column: &str) -> Result<f64> {
        let s = self
            .raw(column)
            .ok_or_else(|| self.err(column, "missing value"))?;
        parse_number(s).ok_or_else(|| self.err(column, format!("not a finite number: `{s}`")))
    }

    fn optional_number(&self, column: &str) -> Result<Option<f64>> {
        match self.raw(column) {
            None => Ok(None),
            Some(s) => parse_number(s)
                .map(Some)
                .ok_or_else(|| self.err(column, format!("not a finite number: `{s}`"))),
        }
    }

    fn positive(&self, column: &str) -> Result<f64> {
        let v = self.number(column)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.err(column, format!("must be > 0, got {v}")))
        }
    }

    fn probability(&self, column: &str) -> Result<f64> {
        let v = self.number(column)?;
        if (0.0..=1.0).contains(&v) {
            Ok(v)
        } else {
            Err(self.err(column, format!("probability must lie in [0, 1], got {v}")))
        }
    }

    fn percentage(&self, column: &str) -> Result<f64> {
        let v = self.number(column)?;
        if (0.0..=100.0).contains(&v) {
            Ok(v)
        } else {
            Err(self.err(column, format!("percentage must lie in [0, 100], got {v}")))
        }
    }

    fn lottery(&self, suffix: &str) -> Result<BinaryTimeLottery<f64>> {
        let col = |name: &str| format!("{name}_{suffix}");
        let t1 = self.positive(&col("t1"))?;
        let t2 = self.positive(&col("t2"))?;
        if t2 < t1 {
            return Err(self.err(&col("t2"), format!("must be >= t1 ({t1}), got {t2}")));
        }
        let p = self.probability(&col("p"))?;
        let dx = self.positive(&col("dx"))?;
        BinaryTimeLottery::new(t1, t2, p, dx).map_err(|e| self.err(&col("t1"), e.to_string()))
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses a UTF-8 CSV choice-problem table.
pub fn load_dataset<R: Read>(mut source: R, schema: Schema) -> Result<Vec<ChoiceProblemRecord>> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let unit_label = unit_from_comments(&text);
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header_line = reader.position().line().max(1) as usize;
    let headers = reader.headers()?.clone();
    let columns: HashMap<String, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.to_owned(), i))
        .collect();
    let required: &[&str] = match schema {
        Schema::Rates => &RATES_REQUIRED,
        Schema::Lotteries => &LOTTERIES_REQUIRED,
    };
    if let Some(missing) = required.iter().find(|c| !columns.contains_key(**c)) {
        return Err(Error::Parse {
            row: header_line,
            column: (*missing).to_owned(),
            reason: "missing column".into(),
        });
    }

    let mut records = Vec::new();
    for result in reader.records() {
        let record = result?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = Row {
            line,
            record: &record,
            columns: &columns,
        };
        records.push(match schema {
            Schema::Rates => rates_record(&row, &unit_label)?,
            Schema::Lotteries => lotteries_record(&row, &unit_label)?,
        });
    }
    Ok(records)
}

fn rates_record(row: &Row<'_>, unit_label: &str) -> Result<ChoiceProblemRecord> {
    let g_ens_ii = row.number("g_ens_ii")?;
    let g_time = row.number("g_time")?;
    let exp_t = row.optional_number("exp_t")?;
    if let Some(t) = exp_t.filter(|t| *t <= 0.0) {
        return Err(row.err("exp_t", format!("must be > 0, got {t}")));
    }
    let dx = row.optional_number("dx")?;
    if let Some(v) = dx.filter(|v| *v <= 0.0) {
        return Err(row.err("dx", format!("must be > 0, got {v}")));
    }
    let printed_gap = row.optional_number("gap")?;
    Ok(ChoiceProblemRecord {
        label: row.text("label")?,
        g_ens_i: row.number("g_ens_i")?,
        g_ens_ii,
        g_time,
        gap: printed_gap.unwrap_or(g_ens_ii - g_time),
        ratl_fraction: row.percentage("ratl_pct")?,
        unit_label: unit_label.to_owned(),
        exp_t,
        dx,
        printed_gap,
    })
}

fn lotteries_record(row: &Row<'_>, unit_label: &str) -> Result<ChoiceProblemRecord> {
    let unit = Unit::new(unit_label);
    let first = row.lottery("i")?.with_unit(unit.clone()).to_lottery();
    let riskier = row.lottery("ii")?.with_unit(unit);
    let second = riskier.to_lottery();
    let g_ens_ii = second.ensemble_growth();
    let g_time = second.time_growth();
    Ok(ChoiceProblemRecord {
        label: row.text("label")?,
        g_ens_i: first.ensemble_growth(),
        g_ens_ii,
        g_time,
        gap: g_ens_ii - g_time,
        ratl_fraction: row.percentage("ratl_pct")?,
        unit_label: unit_label.to_owned(),
        exp_t: Some(riskier.expected_time()),
        dx: Some(*riskier.amount()),
        printed_gap: None,
    })
}

/// Writes records in the "rates" schema. Optional columns appear when any
/// record carries them.
pub fn write_rates<W: Write>(records: &[ChoiceProblemRecord], mut sink: W) -> Result<()> {
    let unit = records
        .first()
        .map_or(DEFAULT_UNIT_LABEL, |r| r.unit_label.as_str());
    writeln!(sink, "# unit: {unit}")?;
    let has_raw = records.iter().any(|r| r.exp_t.is_some() || r.dx.is_some());
    let has_gap = records.iter().any(|r| r.printed_gap.is_some());
    let mut header: Vec<&str> = RATES_REQUIRED.to_vec();
    if has_raw {
        header.extend(["exp_t", "dx"]);
    }
    if has_gap {
        header.push("gap");
    }
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.label.clone(),
            r.g_ens_i.to_string(),
            r.g_ens_ii.to_string(),
            r.g_time.to_string(),
            r.ratl_fraction.to_string(),
        ];
        if has_raw {
            row.push(opt(r.exp_t));
            row.push(opt(r.dx));
        }
        if has_gap {
            row.push(opt(r.printed_gap));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
