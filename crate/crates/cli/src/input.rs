use std::fs;
use std::path::Path;

use clap::Args;
use serde::Deserialize;
use timelottery::{BinaryTimeLottery, GeneralLottery, Outcome, Scalar, Unit, DEFAULT_UNIT};

/// A binary time lottery given on the command line.
#[derive(Debug, Clone, Args)]
pub struct BinaryArgs {
    /// Earlier payment time.
    #[arg(long)]
    pub t1: String,
    /// Later payment time.
    #[arg(long)]
    pub t2: String,
    /// Probability of the earlier time.
    #[arg(long)]
    pub p: String,
    /// Payment amount.
    #[arg(long)]
    pub dx: String,
    /// Unit label carried through to the output.
    #[arg(long, default_value = DEFAULT_UNIT)]
    pub unit: String,
}

/// A binary lottery via flags, or any lottery via a JSON file.
#[derive(Debug, Clone, Args)]
pub struct LotteryArgs {
    #[arg(long, required_unless_present = "lottery", requires_all = ["t2", "p", "dx"])]
    pub t1: Option<String>,
    #[arg(long)]
    pub t2: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub dx: Option<String>,
    #[arg(long, default_value = DEFAULT_UNIT)]
    pub unit: String,
    /// JSON file with either `{t1, t2, p, dx}` or `{outcomes: [{amount, time, prob}]}`.
    #[arg(long, conflicts_with_all = ["t1", "t2", "p", "dx"])]
    pub lottery: Option<std::path::PathBuf>,
}

/// Parses a decimal (`0.25`, `1e-3`) or a ratio of decimals (`1/3`).
pub fn parse_value<S: Scalar>(name: &str, text: &str) -> Result<S, String> {
    let bad = || format!("--{name}: cannot parse `{text}` as a number");
    match text.split_once('/') {
        Some((n, d)) => {
            let n = S::parse_decimal(n).ok_or_else(bad)?;
            let d = S::parse_decimal(d).ok_or_else(bad)?;
            if d == S::zero() {
                return Err(format!("--{name}: zero denominator in `{text}`"));
            }
            Ok(n / d)
        }
        None => S::parse_decimal(text).ok_or_else(bad),
    }
}

impl BinaryArgs {
    pub fn build<S: Scalar>(&self) -> Result<BinaryTimeLottery<S>, String> {
        binary(&self.t1, &self.t2, &self.p, &self.dx, &self.unit)
    }
}

fn binary<S: Scalar>(
    t1: &str,
    t2: &str,
    p: &str,
    dx: &str,
    unit: &str,
) -> Result<BinaryTimeLottery<S>, String> {
    let tl = BinaryTimeLottery::new(
        parse_value("t1", t1)?,
        parse_value("t2", t2)?,
        parse_value("p", p)?,
        parse_value("dx", dx)?,
    )
    .map_err(|e| e.to_string())?;
    Ok(tl.with_unit(Unit::new(unit)))
}

impl LotteryArgs {
    pub fn build<S: Scalar>(&self) -> Result<GeneralLottery<S>, String> {
        if let Some(path) = &self.lottery {
            return read_lottery(path);
        }
        match (&self.t1, &self.t2, &self.p, &self.dx) {
            (Some(t1), Some(t2), Some(p), Some(dx)) => {
                Ok(binary::<S>(t1, t2, p, dx, &self.unit)?.to_lottery())
            }
            _ => Err("give --t1 --t2 --p --dx or --lottery".into()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Num {
    Number(serde_json::Number),
    Text(String),
}

impl Num {
    fn value<S: Scalar>(&self, name: &str) -> Result<S, String> {
        match self {
            Num::Number(n) => parse_value(name, &n.to_string()),
            Num::Text(s) => parse_value(name, s),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomeFile {
    amount: Num,
    time: Num,
    prob: Num,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LotteryFile {
    Binary {
        t1: Num,
        t2: Num,
        p: Num,
        dx: Num,
        unit: Option<String>,
    },
    General {
        outcomes: Vec<OutcomeFile>,
        unit: Option<String>,
    },
}

pub fn read_lottery<S: Scalar>(path: &Path) -> Result<GeneralLottery<S>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file: LotteryFile = serde_json::from_str(&text)
        .map_err(|e| format!("{}: not a lottery document ({e})", path.display()))?;
    let unit = |u: Option<String>| Unit::new(u.unwrap_or_else(|| DEFAULT_UNIT.to_owned()));
    match file {
        LotteryFile::Binary {
            t1,
            t2,
            p,
            dx,
            unit: u,
        } => {
            let tl = BinaryTimeLottery::new(
                t1.value("t1")?,
                t2.value("t2")?,
                p.value("p")?,
                dx.value("dx")?,
            )
            .map_err(|e| e.to_string())?;
            Ok(tl.with_unit(unit(u)).to_lottery())
        }
        LotteryFile::General { outcomes, unit: u } => {
            let outcomes = outcomes
                .iter()
                .map(|o| {
                    Ok(Outcome::new(
                        o.amount.value("amount")?,
                        o.time.value("time")?,
                        o.prob.value("prob")?,
                    ))
                })
                .collect::<Result<Vec<_>, String>>()?;
            GeneralLottery::new(outcomes, unit(u)).map_err(|e| e.to_string())
        }
    }
}
