use serde::Serialize;
use serde_json::{json, Map, Value};
use timelottery::axioms::{
    axiom_suite, independence_counterexample_search, AxiomReport, SamplerConfig,
};
use timelottery::design::{amount_ratio_ceiling, design_adjust_amounts, design_adjust_times};
use timelottery::empirics::{
    audit, band_grid, confidence_band, emit_figure, load_dataset, ols_fit, render_table,
    write_rates, ChoiceProblemRecord, Dataset, FigureFormat, Schema, Severity,
};
use timelottery::simulate::{
    convergence_series, simulate_ensemble, simulate_sequential, SimConfig, SimMode,
};
use timelottery::{
    classify_pair, mix, Approach, Execution, GeneralLottery, IndependenceReport, Rational, Scalar,
};

use crate::input::{parse_value, read_lottery, BinaryArgs, LotteryArgs};
use crate::{Artifact, Command, DatasetArg, ExecArg, FormatArg, Report, SchemaArg, Setup};

const FIGURE_GRID: usize = 50;

/// Scalars that may have an exact textual form.
trait Exact: Scalar {
    fn exact(&self) -> Option<String>;
}

impl Exact for f64 {
    fn exact(&self) -> Option<String> {
        None
    }
}

impl Exact for Rational {
    fn exact(&self) -> Option<String> {
        Some(self.to_string())
    }
}

fn json_report<T: Serialize + ?Sized>(value: &T, code: u8) -> Result<Report, String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    s.push('\n');
    Ok(Report {
        body: s.into_bytes(),
        code,
    })
}

/// Calls `$f` with the backend chosen by `$exact`.
macro_rules! with_backend {
    ($exact:expr, $f:ident($($arg:expr),*)) => {
        if $exact {
            $f::<Rational>($($arg),*)
        } else {
            $f::<f64>($($arg),*)
        }
    };
}

pub fn run(cmd: Command) -> Result<Report, String> {
    match cmd {
        Command::Eval { lottery, exact } => with_backend!(exact.exact, eval(&lottery)),
        Command::Classify {
            binary,
            approach,
            exact,
        } => {
            let approaches = approach.map_or(Approach::ALL.to_vec(), |a| vec![a.into()]);
            with_backend!(exact.exact, classify(&binary, &approaches))
        }
        Command::Mix { a, b, theta, exact } => {
            with_backend!(exact.exact, mix_files(&a, &b, &theta))
        }
        Command::Simulate {
            lottery,
            mode,
            n,
            seed,
            checkpoints,
            exec,
        } => {
            let exec = match exec {
                ExecArg::Sequential => Execution::Sequential,
                ExecArg::Parallel => Execution::Parallel,
            };
            simulate(&lottery, mode.into(), n, seed, checkpoints.as_deref(), exec)
        }
        Command::Axioms {
            approach,
            samples,
            seed,
            payments,
            search,
            exact,
        } => {
            let cfg = SamplerConfig::default().with_payments(payments.into());
            with_backend!(
                exact.exact,
                axioms(approach.into(), samples, seed, &cfg, search)
            )
        }
        Command::Reproduce {
            artifact,
            dataset,
            format,
        } => reproduce(artifact, dataset, format),
        Command::Audit {
            dataset,
            input,
            schema,
        } => {
            let records = match (dataset, input) {
                (Some(d), _) => load_shipped(d)?,
                (None, Some(path)) => {
                    let file = std::fs::File::open(&path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let schema = match schema {
                        SchemaArg::Rates => Schema::Rates,
                        SchemaArg::Lotteries => Schema::Lotteries,
                    };
                    load_dataset(file, schema).map_err(|e| format!("{}: {e}", path.display()))?
                }
                (None, None) => return Err("give --dataset or --input".into()),
            };
            let findings = audit(&records);
            let inconsistent = findings
                .iter()
                .any(|f| f.severity == Severity::Inconsistent);
            json_report(&findings, if inconsistent { 2 } else { 0 })
        }
        Command::Design {
            setup,
            binary,
            placement,
            ratio,
            exact,
        } => {
            with_backend!(
                exact.exact,
                design(setup, &binary, &placement, ratio.as_deref())
            )
        }
    }
}

fn summary<S: Exact>(l: &GeneralLottery<S>) -> Map<String, Value> {
    let g = l.growth_summary();
    let mut m = Map::new();
    m.insert("unit".into(), json!(l.unit()));
    m.insert("numeric_mode".into(), json!(S::MODE));
    m.insert("time_avg".into(), json!(g.time_avg.to_f64()));
    m.insert("ensemble_avg".into(), json!(g.ensemble_avg.to_f64()));
    m.insert("jensen_gap".into(), json!(g.jensen_gap.to_f64()));
    if let (Some(t), Some(e), Some(j)) = (
        g.time_avg.exact(),
        g.ensemble_avg.exact(),
        g.jensen_gap.exact(),
    ) {
        m.insert(
            "exact".into(),
            json!({ "time_avg": t, "ensemble_avg": e, "jensen_gap": j }),
        );
    }
    m
}

fn eval<S: Exact>(args: &LotteryArgs) -> Result<Report, String> {
    json_report(&summary(&args.build::<S>()?), 0)
}

fn classify<S: Exact>(args: &BinaryArgs, approaches: &[Approach]) -> Result<Report, String> {
    let tl = args.build::<S>()?;
    let classes: Map<String, Value> = approaches
        .iter()
        .map(|&a| (a.to_string(), json!(classify_pair(&tl, a))))
        .collect();
    json_report(&classes, 0)
}

fn mix_files<S: Exact>(
    a: &std::path::Path,
    b: &std::path::Path,
    theta: &str,
) -> Result<Report, String> {
    let la = read_lottery::<S>(a)?;
    let lb = read_lottery::<S>(b)?;
    let theta: S = parse_value("theta", theta)?;
    let m = mix(&la, &lb, &theta).map_err(|e| e.to_string())?;
    let mut out = summary(&m);
    out.insert("theta".into(), json!(theta.to_f64()));
    out.insert(
        "outcomes".into(),
        json!(m.map_scalar(|v| v.to_f64()).outcomes()),
    );
    json_report(&out, 0)
}

fn simulate(
    args: &LotteryArgs,
    mode: SimMode,
    n: u64,
    seed: u64,
    checkpoints: Option<&[u64]>,
    exec: Execution,
) -> Result<Report, String> {
    let lottery = args.build::<f64>()?;
    if let Some(points) = checkpoints {
        let series = convergence_series(&lottery, mode, points, seed).map_err(|e| e.to_string())?;
        let mut csv = String::from("count,empirical_rate\n");
        for p in series {
            csv.push_str(&format!("{},{}\n", p.count, p.empirical_rate));
        }
        return Ok(Report::ok(csv));
    }
    let cfg = SimConfig::new(seed, n, mode).map_err(|e| e.to_string())?;
    let result = match mode {
        SimMode::Sequential => simulate_sequential(&lottery, &cfg, exec),
        SimMode::Ensemble => simulate_ensemble(&lottery, &cfg, exec),
    }
    .map_err(|e| e.to_string())?;
    json_report(&result, 0)
}

#[derive(Serialize)]
struct SearchOut {
    budget: u64,
    violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    first: Option<IndependenceReport<f64>>,
}

#[derive(Serialize)]
struct AxiomsOut {
    #[serde(flatten)]
    report: AxiomReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    independence_search: Option<SearchOut>,
}

fn axioms<S: Exact>(
    approach: Approach,
    samples: u64,
    seed: u64,
    cfg: &SamplerConfig,
    search: Option<u64>,
) -> Result<Report, String> {
    let exec = Execution::default();
    let report = axiom_suite::<S>(samples, seed, approach, cfg, exec).map_err(|e| e.to_string())?;
    let independence_search = match search {
        Some(budget) => {
            let found = independence_counterexample_search::<S>(cfg, budget, seed, exec)
                .map_err(|e| e.to_string())?;
            Some(SearchOut {
                budget,
                violations: found.len(),
                first: found.first().map(IndependenceReport::to_f64),
            })
        }
        None => None,
    };
    let failed = !report.all_passed()
        || independence_search
            .as_ref()
            .is_some_and(|s| s.violations > 0);
    json_report(
        &AxiomsOut {
            report,
            independence_search,
        },
        if failed { 2 } else { 0 },
    )
}

fn load_shipped(d: DatasetArg) -> Result<Vec<ChoiceProblemRecord>, String> {
    let ds = match d {
        DatasetArg::Dejarnette => Dataset::DeJarnette,
        DatasetArg::Onay => Dataset::Onay,
    };
    ds.load().map_err(|e| e.to_string())
}

fn reproduce(
    artifact: Artifact,
    dataset: DatasetArg,
    format: Option<FormatArg>,
) -> Result<Report, String> {
    let records = load_shipped(dataset)?;
    let mut buf = Vec::new();
    match (artifact, format) {
        (Artifact::Tables, None | Some(FormatArg::Text)) => {
            buf = render_table(&records).into_bytes()
        }
        (Artifact::Tables, Some(FormatArg::Csv)) => {
            write_rates(&records, &mut buf).map_err(|e| e.to_string())?
        }
        (Artifact::Figure, None | Some(FormatArg::Svg | FormatArg::Csv)) => {
            let fit = ols_fit(&records).map_err(|e| e.to_string())?;
            let band = confidence_band(&fit, &band_grid(&records, FIGURE_GRID));
            let fmt = if format == Some(FormatArg::Csv) {
                FigureFormat::Csv
            } else {
                FigureFormat::Svg
            };
            emit_figure(&records, &fit, &band, &mut buf, fmt).map_err(|e| e.to_string())?;
        }
        (Artifact::Tables, Some(FormatArg::Svg)) => {
            return Err("tables support --format text|csv".into())
        }
        (Artifact::Figure, Some(FormatArg::Text)) => {
            return Err("the figure supports --format svg|csv".into())
        }
    }
    Ok(Report::ok(buf))
}

fn design<S: Exact>(
    setup: Setup,
    args: &BinaryArgs,
    placement: &str,
    ratio: Option<&str>,
) -> Result<Report, String> {
    let tl = args.build::<S>()?;
    let pair = match setup {
        Setup::Times => design_adjust_times(&tl, &parse_value::<S>("placement", placement)?),
        Setup::Amounts => {
            let ratio = match ratio {
                Some(r) => parse_value::<S>("ratio", r)?,
                None => (S::one() + amount_ratio_ceiling(&tl)) / S::from_ratio(2, 1),
            };
            design_adjust_amounts(&tl, &ratio)
        }
    }
    .map_err(|e| e.to_string())?;
    json_report(&pair.to_f64(), 0)
}
