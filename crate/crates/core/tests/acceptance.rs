//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use timelottery::axioms::{
    axiom_suite, independence_counterexample_search, lottery_from_spec, proposition_suite,
    PaymentMode, SamplerConfig,
};
use timelottery::design::{design_adjust_times, DEFAULT_PLACEMENT};
use timelottery::empirics::{audit, ols_fit, Dataset, Severity};
use timelottery::rng::substream;
use timelottery::simulate::{simulate_ensemble, simulate_sequential, SimConfig, SimMode};
use timelottery::{
    independence_check, mix, Approach, BinaryTimeLottery, Execution, GeneralLottery, Rational,
    Scalar, TimedPayment,
};

type Check = std::result::Result<String, String>;

type Criterion = (&'static str, fn() -> Check, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn table_audit() -> Check {
    let dj = Dataset::DeJarnette.load().map_err(|e| e.to_string())?;
    ensure!(dj.len() == 10, "DeJarnette has {} records", dj.len());
    for r in &dj {
        let recomputed = r.g_ens_ii - r.g_time;
        ensure!(
            close(r.gap, recomputed, 0.1 + 1e-9),
            "{}: gap {} vs {}",
            r.label,
            r.gap,
            recomputed
        );
    }
    let onay = Dataset::Onay.load().map_err(|e| e.to_string())?;
    ensure!(onay.len() == 6, "Onay has {} records", onay.len());
    for r in &onay[1..] {
        let g = r.recomputed_time_growth().ok_or("missing raw fields")?;
        ensure!(
            close(r.g_time, g, 0.1 + 1e-9),
            "{}: g_time {} vs {}",
            r.label,
            r.g_time,
            g
        );
    }
    let inconsistent: Vec<_> = audit(&onay)
        .into_iter()
        .filter(|f| f.severity == Severity::Inconsistent)
        .collect();
    ensure!(
        inconsistent.len() == 1,
        "{} inconsistent findings",
        inconsistent.len()
    );
    let f = &inconsistent[0];
    ensure!(
        f.label == onay[0].label
            && f.field == "g_time"
            && close(f.stated, 27.8, 1e-9)
            && close(f.recomputed, 17.8, 0.05),
        "unexpected finding {f:?}"
    );
    Ok(format!(
        "10 + 6 records; one inconsistent finding ({} stated {} vs {:.2})",
        f.label, f.stated, f.recomputed
    ))
}

fn ols_reproduction() -> Check {
    let dj = ols_fit(&Dataset::DeJarnette.load().map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let onay =
        ols_fit(&Dataset::Onay.load().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure!(
        close(dj.r_squared, 0.67, 0.02),
        "DeJarnette R² = {:.4}",
        dj.r_squared
    );
    ensure!(
        close(onay.r_squared, 0.76, 0.02),
        "Onay R² = {:.4}",
        onay.r_squared
    );
    ensure!(
        dj.slope > 0.0 && onay.slope > 0.0,
        "slopes {} {}",
        dj.slope,
        onay.slope
    );
    Ok(format!(
        "R² {:.3} / {:.3}, slopes {:.3} / {:.3}",
        dj.r_squared, onay.r_squared, dj.slope, onay.slope
    ))
}

fn counterexample() -> Check {
    let load = |s| lottery_from_spec::<Rational>(&s).map_err(|e| e.to_string());
    let a = load((1.0, 2.0, 0.5, 10.0))?;
    let b = load((0.5, 2.0, 0.7, 8.0))?;
    let c = load((2.0, 4.0, 0.3, 2.0))?;
    let theta = Rational::from_ratio(1, 10);
    let g = |l: &GeneralLottery<Rational>| l.time_growth().to_f64();
    ensure!(close(g(&a), 6.67, 0.01), "TLa {}", g(&a));
    ensure!(close(g(&b), 8.42, 0.01), "TLb {}", g(&b));
    let ma = g(&mix(&a, &c, &theta).map_err(|e| e.to_string())?);
    let mb = g(&mix(&b, &c, &theta).map_err(|e| e.to_string())?);
    ensure!(close(ma, 0.87, 0.01), "mixture A {ma}");
    ensure!(close(mb, 0.82, 0.01), "mixture B {mb}");
    let time = independence_check(&a, &b, &c, &theta, Approach::Time).map_err(|e| e.to_string())?;
    let ens =
        independence_check(&a, &b, &c, &theta, Approach::Ensemble).map_err(|e| e.to_string())?;
    ensure!(!time.holds, "time approach did not violate independence");
    ensure!(ens.holds, "ensemble approach violated independence");
    Ok(format!(
        "ḡ {:.3} < {:.3}, mixtures {ma:.3} > {mb:.3}",
        g(&a),
        g(&b)
    ))
}

fn propositions() -> Check {
    let cfg = SamplerConfig {
        degenerate_fraction: 0.1,
        ..SamplerConfig::default()
    };
    let r = proposition_suite::<Rational>(100_000, 42, &cfg, Execution::default())
        .map_err(|e| e.to_string())?;
    ensure!(r.samples == 100_000, "ran {} samples", r.samples);
    ensure!(r.degenerate > 0, "no degenerate samples drawn");
    ensure!(r.all_passed(), "{r:?}");
    Ok(format!(
        "{} lotteries ({} degenerate), no failures",
        r.samples, r.degenerate
    ))
}

fn axioms() -> Check {
    let n = 10_000;
    let unequal = SamplerConfig::default();
    let equal = SamplerConfig::default().with_payments(PaymentMode::Equal);
    let exec = Execution::default();
    let mut summary = Vec::new();
    for approach in Approach::ALL {
        let r =
            axiom_suite::<Rational>(n, 7, approach, &unequal, exec).map_err(|e| e.to_string())?;
        ensure!(r.exact, "suite not run in exact mode");
        for (name, t) in [
            ("completeness", r.completeness),
            ("transitivity", r.transitivity),
            ("continuity", r.continuity),
        ] {
            ensure!(t.all_passed() && t.checked > 0, "{approach} {name}: {t:?}");
        }
        if approach == Approach::Ensemble {
            ensure!(
                r.independence.all_passed(),
                "ensemble independence: {:?}",
                r.independence
            );
        }
        summary.push(format!(
            "{approach}: continuity {}/{}",
            r.continuity.passed, r.continuity.checked
        ));
    }
    let eq =
        axiom_suite::<Rational>(n, 7, Approach::Time, &equal, exec).map_err(|e| e.to_string())?;
    ensure!(
        eq.independence.all_passed() && eq.independence.checked > 0,
        "equal-payment time independence: {:?}",
        eq.independence
    );
    let found = independence_counterexample_search::<Rational>(&unequal, n, 7, exec)
        .map_err(|e| e.to_string())?;
    ensure!(
        !found.is_empty(),
        "no independence violation in {n} triples"
    );
    summary.push(format!("{} time-approach violations found", found.len()));
    Ok(summary.join("; "))
}

fn monte_carlo() -> Check {
    let tl = BinaryTimeLottery::new(1.0, 2.0, 0.5, 10.0)
        .map_err(|e| e.to_string())?
        .to_lottery();
    let n = 1_000_000;
    let seq = SimConfig::new(42, n, SimMode::Sequential).map_err(|e| e.to_string())?;
    let ens = SimConfig::new(42, n, SimMode::Ensemble).map_err(|e| e.to_string())?;
    let run = |exec| -> Result<_, String> {
        Ok((
            simulate_sequential(&tl, &seq, exec).map_err(|e| e.to_string())?,
            simulate_ensemble(&tl, &ens, exec).map_err(|e| e.to_string())?,
        ))
    };
    let (s, e) = run(Execution::default())?;
    ensure!(
        close(s.analytic_target, 20.0 / 3.0, 1e-12),
        "time target {}",
        s.analytic_target
    );
    ensure!(
        close(e.analytic_target, 7.5, 1e-12),
        "ensemble target {}",
        e.analytic_target
    );
    ensure!(
        s.rel_error < 0.005,
        "sequential {} off by {:.4}%",
        s.empirical_rate,
        100.0 * s.rel_error
    );
    ensure!(
        e.rel_error < 0.005,
        "ensemble {} off by {:.4}%",
        e.empirical_rate,
        100.0 * e.rel_error
    );
    let (s2, e2) = run(Execution::default())?;
    let (s3, e3) = run(Execution::Sequential)?;
    for (x, y) in [(&s, &s2), (&e, &e2), (&s, &s3), (&e, &e3)] {
        ensure!(
            x.empirical_rate.to_bits() == y.empirical_rate.to_bits() && x.tallies == y.tallies,
            "rerun differs: {} vs {}",
            x.empirical_rate,
            y.empirical_rate
        );
    }
    Ok(format!(
        "time {:.5}, ensemble {:.5}, reruns bit-identical",
        s.empirical_rate, e.empirical_rate
    ))
}

fn random_lottery(rng: &mut impl Rng) -> BinaryTimeLottery<Rational> {
    let decimal = |x: f64| Rational::parse_decimal(&format!("{x:.4}")).expect("finite");
    loop {
        let a = 10f64.powf(rng.random_range(-1.0..2.0));
        let b = 10f64.powf(rng.random_range(-1.0..2.0));
        let (t1, t2) = (decimal(a.min(b)), decimal(a.max(b)));
        let p = decimal(rng.random_range(0.01..0.99));
        let dx = decimal(10f64.powf(rng.random_range(-1.0..3.0)));
        if let Ok(tl) = BinaryTimeLottery::new(t1, t2, p, dx) {
            if !tl.is_degenerate() {
                return tl;
            }
        }
    }
}

fn designs() -> Check {
    let mut rng = substream(42, 0);
    let placement = Rational::parse_decimal(&DEFAULT_PLACEMENT.to_string()).ok_or("placement")?;
    for i in 0..1000 {
        let tl = random_lottery(&mut rng);
        let d = design_adjust_times(&tl, &placement).map_err(|e| e.to_string())?;
        ensure!(d.disagree, "instance {i} does not disagree: {tl:?}");
        let risky = tl.to_lottery();
        let safe = d.riskless.to_lottery();
        let (g_tl, e_tl) = (risky.time_growth(), risky.ensemble_growth());
        let (g_tp, e_tp) = (safe.time_growth(), safe.ensemble_growth());
        ensure!(
            g_tl < g_tp && g_tp == e_tp && e_tp < e_tl,
            "chain broken at instance {i}: {tl:?}"
        );
    }
    let tl = BinaryTimeLottery::new(1.0, 2.0, 0.5, 10.0).map_err(|e| e.to_string())?;
    let tp = TimedPayment::new(10.0, 1.4).map_err(|e| e.to_string())?;
    let g = tp.growth_rate();
    let l = tl.to_lottery();
    ensure!(close(g, 7.143, 0.001), "worked example {g}");
    ensure!(
        l.time_growth() < g && g < l.ensemble_growth(),
        "worked example outside window"
    );
    Ok(format!(
        "1000 designs disagree; worked example {:.3} < {g:.3} < {:.3}",
        l.time_growth(),
        l.ensemble_growth()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        (
            "AC1 table reproduction and audit",
            table_audit,
            Duration::from_secs(1),
        ),
        (
            "AC2 OLS reproduction",
            ols_reproduction,
            Duration::from_secs(1),
        ),
        (
            "AC3 independence counterexample",
            counterexample,
            Duration::from_secs(1),
        ),
        (
            "AC4 proposition suite",
            propositions,
            Duration::from_secs(30),
        ),
        ("AC5 vNM axiom suite", axioms, Duration::from_secs(60)),
        (
            "AC6 Monte Carlo convergence",
            monte_carlo,
            Duration::from_secs(5),
        ),
        (
            "AC7 distinguishing designs",
            designs,
            Duration::from_secs(5),
        ),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > budget => {
                Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {name} [{elapsed:.2?}]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name} [{elapsed:.2?}]: {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
