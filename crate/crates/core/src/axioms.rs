//! Randomised verification of the expected-utility axioms for
//! growth-optimal preferences, and a search for independence violations.
//!
//! Sampled values are rounded to a few significant decimal digits, so the
//! same draw is representable in both numeric backends. Each shard of
//! samples pulls from its own `(seed, shard)` substream.

use std::cmp::Ordering;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{shard_lengths, Execution};
use crate::lottery::{mix, BinaryTimeLottery, GeneralLottery};
use crate::num::{cmp_rates, Scalar};
use crate::preference::{
    classify_pair, compare, continuity_weight, independence_check, Approach, IndependenceReport,
    Relation, RiskClass,
};
use crate::rng::{substream, StreamRng};

const SHARD_SIZE: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PaymentMode {
    /// All lotteries in a sampled pair or triple pay the same amount.
    Equal,
    Unequal,
}

/// Fixed binary lottery given as decimal parameters `(t1, t2, p, amount)`.
pub type BinarySpec = (f64, f64, f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// Log-uniform range for payment times.
    pub time_range: (f64, f64),
    /// Log-uniform range for amounts.
    pub amount_range: (f64, f64),
    /// Uniform range for the early-payment probability.
    pub prob_range: (f64, f64),
    pub payments: PaymentMode,
    /// Significant digits kept for times and amounts.
    pub sig_digits: u32,
    /// Share of sampled binary lotteries forced onto the degenerate boundary.
    pub degenerate_fraction: f64,
    /// Triples with a mixing weight evaluated before any random draw.
    pub include: Vec<([BinarySpec; 3], f64)>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            time_range: (0.1, 100.0),
            amount_range: (0.1, 1000.0),
            prob_range: (0.01, 0.99),
            payments: PaymentMode::Unequal,
            sig_digits: 4,
            degenerate_fraction: 0.0,
            include: Vec::new(),
        }
    }
}

impl SamplerConfig {
    pub fn with_payments(mut self, payments: PaymentMode) -> Self {
        self.payments = payments;
        self
    }

    /// Lotteries from the classic independence counterexample, mixed at 0.1.
    pub fn with_reference_counterexample(mut self) -> Self {
        self.include.push((
            [
                (1.0, 2.0, 0.5, 10.0),
                (0.5, 2.0, 0.7, 8.0),
                (2.0, 4.0, 0.3, 2.0),
            ],
            0.1,
        ));
        self
    }
}

fn decimal<S: Scalar>(x: f64) -> S {
    S::parse_decimal(&x.to_string()).expect("finite decimal")
}

pub fn lottery_from_spec<S: Scalar>(spec: &BinarySpec) -> Result<GeneralLottery<S>> {
    let (t1, t2, p, dx) = *spec;
    Ok(BinaryTimeLottery::new(decimal(t1), decimal(t2), decimal(p), decimal(dx))?.to_lottery())
}

/// Value drawn log-uniformly from `range`, as `(mantissa, exp10)` with
/// `sig` significant digits.
fn log_uniform_decimal(rng: &mut StreamRng, range: (f64, f64), sig: u32) -> (i64, i32) {
    let (lo, hi) = (range.0.ln(), range.1.ln());
    let x = (lo + (hi - lo) * rng.random::<f64>()).exp();
    let exp10 = x.log10().floor() as i32 - (sig as i32 - 1);
    let mantissa = (x / 10f64.powi(exp10)).round() as i64;
    (mantissa, exp10)
}

fn uniform_decimal(rng: &mut StreamRng, range: (f64, f64)) -> (i64, i32) {
    let x = range.0 + (range.1 - range.0) * rng.random::<f64>();
    ((x * 1e4).round() as i64, -4)
}

/// Mixing weight in `(0, 1]` on a 1e-4 grid.
fn sample_theta<S: Scalar>(rng: &mut StreamRng) -> S {
    S::from_decimal(rng.random_range(1..=10_000), -4)
}

struct Sampler<'a> {
    cfg: &'a SamplerConfig,
    rng: StreamRng,
}

impl Sampler<'_> {
    fn amount<S: Scalar>(&mut self) -> S {
        let (m, e) = log_uniform_decimal(&mut self.rng, self.cfg.amount_range, self.cfg.sig_digits);
        S::from_decimal(m, e)
    }

    fn binary<S: Scalar>(&mut self, amount: S) -> BinaryTimeLottery<S> {
        let sig = self.cfg.sig_digits;
        let a = log_uniform_decimal(&mut self.rng, self.cfg.time_range, sig);
        let b = log_uniform_decimal(&mut self.rng, self.cfg.time_range, sig);
        let (mut t1, mut t2): (S, S) = (S::from_decimal(a.0, a.1), S::from_decimal(b.0, b.1));
        if t2 < t1 {
            std::mem::swap(&mut t1, &mut t2);
        }
        let pm = uniform_decimal(&mut self.rng, self.cfg.prob_range);
        let mut p = S::from_decimal(pm.0, pm.1);
        if self.rng.random::<f64>() < self.cfg.degenerate_fraction {
            match self.rng.random_range(0..3u8) {
                0 => t2 = t1.clone(),
                1 => p = S::zero(),
                _ => p = S::one(),
            }
        }
        BinaryTimeLottery::new(t1, t2, p, amount).expect("sampled values are valid")
    }

    fn triple<S: Scalar>(&mut self) -> [GeneralLottery<S>; 3] {
        match self.cfg.payments {
            PaymentMode::Equal => {
                let dx: S = self.amount();
                std::array::from_fn(|_| self.binary(dx.clone()).to_lottery())
            }
            PaymentMode::Unequal => std::array::from_fn(|_| {
                let dx = self.amount();
                self.binary(dx).to_lottery()
            }),
        }
    }
}

/// Orders the first two lotteries so that `a ≺ b`; `None` on a tie.
fn order_pair<S: Scalar>(
    [a, b, c]: [GeneralLottery<S>; 3],
    approach: Approach,
) -> Option<[GeneralLottery<S>; 3]> {
    match cmp_rates(&approach.rate(&a), &approach.rate(&b)) {
        Ordering::Less => Some([a, b, c]),
        Ordering::Greater => Some([b, a, c]),
        Ordering::Equal => None,
    }
}

/// Random search for independence violations under the time approach.
///
/// Evaluates `cfg.include` first, then `budget` random triples, each with one
/// mixing weight. Returns the violations in draw order; deterministic for a
/// given seed regardless of `exec`.
pub fn independence_counterexample_search<S: Scalar>(
    cfg: &SamplerConfig,
    budget: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<IndependenceReport<S>>> {
    if budget == 0 {
        return Err(Error::invalid("search budget must be >= 1"));
    }
    let approach = Approach::Time;
    let mut found = Vec::new();
    for (specs, theta) in &cfg.include {
        let triple = [
            lottery_from_spec::<S>(&specs[0])?,
            lottery_from_spec(&specs[1])?,
            lottery_from_spec(&specs[2])?,
        ];
        if let Some([a, b, c]) = order_pair(triple, approach) {
            let rep = independence_check(&a, &b, &c, &decimal(*theta), approach)?;
            if !rep.holds {
                found.push(rep);
            }
        }
    }
    let shards: Vec<(u64, u64)> = shard_lengths(budget, SHARD_SIZE).collect();
    let per_shard = exec.map_shards(shards.len() as u64, |i| {
        let (shard, len) = shards[i as usize];
        let mut sampler = Sampler {
            cfg,
            rng: substream(seed, shard),
        };
        let mut violations = Vec::new();
        for _ in 0..len {
            let triple = sampler.triple::<S>();
            let theta: S = sample_theta(&mut sampler.rng);
            if let Some([a, b, c]) = order_pair(triple, approach) {
                let rep = independence_check(&a, &b, &c, &theta, approach)
                    .expect("ordered triple with theta in (0, 1]");
                if !rep.holds {
                    violations.push(rep);
                }
            }
        }
        violations
    });
    found.extend(per_shard.into_iter().flatten());
    Ok(found)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AxiomTally {
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    /// Samples where the axiom's premise did not apply (e.g. ties).
    pub skipped: u64,
}

impl AxiomTally {
    fn record(&mut self, ok: Option<bool>) {
        match ok {
            None => self.skipped += 1,
            Some(true) => {
                self.checked += 1;
                self.passed += 1;
            }
            Some(false) => {
                self.checked += 1;
                self.failed += 1;
            }
        }
    }

    fn merge(&mut self, other: &AxiomTally) {
        self.checked += other.checked;
        self.passed += other.passed;
        self.failed += other.failed;
        self.skipped += other.skipped;
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub approach: Approach,
    pub payments: PaymentMode,
    pub exact: bool,
    pub samples: u64,
    pub completeness: AxiomTally,
    pub transitivity: AxiomTally,
    pub continuity: AxiomTally,
    pub independence: AxiomTally,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        [
            self.completeness,
            self.transitivity,
            self.continuity,
            self.independence,
        ]
        .iter()
        .all(AxiomTally::all_passed)
    }
}

fn check_completeness<S: Scalar>(
    a: &GeneralLottery<S>,
    b: &GeneralLottery<S>,
    approach: Approach,
) -> bool {
    let (Ok(ab), Ok(ba)) = (compare(a, b, approach), compare(b, a, approach)) else {
        return false;
    };
    matches!(
        (ab.relation, ba.relation),
        (Relation::PrefersFirst, Relation::PrefersSecond)
            | (Relation::Indifferent, Relation::Indifferent)
            | (Relation::PrefersSecond, Relation::PrefersFirst)
    )
}

fn check_transitivity<S: Scalar>(triple: &[GeneralLottery<S>; 3], approach: Approach) -> bool {
    let g: Vec<S> = triple.iter().map(|l| approach.rate(l)).collect();
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS.iter().all(|&[i, j, k]| {
        let ij = cmp_rates(&g[i], &g[j]);
        let jk = cmp_rates(&g[j], &g[k]);
        let ik = cmp_rates(&g[i], &g[k]);
        let weak = |o: Ordering| o != Ordering::Greater;
        let strict_ok = !(ij == Ordering::Less && jk == Ordering::Less) || ik == Ordering::Less;
        let weak_ok = !(weak(ij) && weak(jk)) || weak(ik);
        let tie_ok = !(ij == Ordering::Equal && jk == Ordering::Equal) || ik == Ordering::Equal;
        strict_ok && weak_ok && tie_ok
    })
}

fn check_continuity<S: Scalar>(
    triple: &[GeneralLottery<S>; 3],
    approach: Approach,
) -> Option<bool> {
    let mut sorted: Vec<&GeneralLottery<S>> = triple.iter().collect();
    sorted.sort_by(|x, y| cmp_rates(&approach.rate(*x), &approach.rate(*y)));
    let [a, b, c] = [sorted[0], sorted[1], sorted[2]];
    let strict = |x: &GeneralLottery<S>, y: &GeneralLottery<S>| {
        cmp_rates(&approach.rate(x), &approach.rate(y)) == Ordering::Less
    };
    if !(strict(a, b) && strict(b, c)) {
        return None;
    }
    let Ok(theta) = continuity_weight(a, b, c, approach) else {
        return Some(false);
    };
    if !(theta >= S::zero() && theta <= S::one()) {
        return Some(false);
    }
    let Ok(mixed) = mix(a, c, &theta) else {
        return Some(false);
    };
    Some(matches!(
        compare(&mixed, b, approach).map(|o| o.relation),
        Ok(Relation::Indifferent)
    ))
}

/// Samples `samples` triples and checks completeness, transitivity,
/// continuity, and independence on each.
pub fn axiom_suite<S: Scalar>(
    samples: u64,
    seed: u64,
    approach: Approach,
    cfg: &SamplerConfig,
    exec: Execution,
) -> Result<AxiomReport> {
    if samples == 0 {
        return Err(Error::invalid("sample size must be >= 1"));
    }
    let shards: Vec<(u64, u64)> = shard_lengths(samples, SHARD_SIZE).collect();
    let tallies = exec.map_shards(shards.len() as u64, |i| {
        let (shard, len) = shards[i as usize];
        let mut sampler = Sampler {
            cfg,
            rng: substream(seed, shard),
        };
        let mut t = [AxiomTally::default(); 4];
        for _ in 0..len {
            let triple = sampler.triple::<S>();
            let theta: S = sample_theta(&mut sampler.rng);
            t[0].record(Some(check_completeness(&triple[0], &triple[1], approach)));
            t[1].record(Some(check_transitivity(&triple, approach)));
            t[2].record(check_continuity(&triple, approach));
            let indep = order_pair(triple, approach).map(|[a, b, c]| {
                independence_check(&a, &b, &c, &theta, approach)
                    .map(|r| r.holds)
                    .unwrap_or(false)
            });
            t[3].record(indep);
        }
        t
    });
    let mut total = [AxiomTally::default(); 4];
    for t in &tallies {
        for (acc, x) in total.iter_mut().zip(t) {
            acc.merge(x);
        }
    }
    Ok(AxiomReport {
        approach,
        payments: cfg.payments,
        exact: S::is_exact(),
        samples,
        completeness: total[0],
        transitivity: total[1],
        continuity: total[2],
        independence: total[3],
    })
}

/// Outcome of checking the growth-rate propositions on random binary
/// lotteries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PropositionReport {
    pub samples: u64,
    pub degenerate: u64,
    /// `⟨g⟩ ≥ ḡ`, with equality exactly when degenerate.
    pub jensen_failures: u64,
    /// Time approach classified anything other than RNTL.
    pub time_failures: u64,
    /// Ensemble approach missed RSTL (non-degenerate) or RNTL (degenerate).
    pub ensemble_failures: u64,
}

impl PropositionReport {
    pub fn all_passed(&self) -> bool {
        self.jensen_failures == 0 && self.time_failures == 0 && self.ensemble_failures == 0
    }
}

pub fn proposition_suite<S: Scalar>(
    samples: u64,
    seed: u64,
    cfg: &SamplerConfig,
    exec: Execution,
) -> Result<PropositionReport> {
    if samples == 0 {
        return Err(Error::invalid("sample size must be >= 1"));
    }
    let shards: Vec<(u64, u64)> = shard_lengths(samples, SHARD_SIZE).collect();
    let parts = exec.map_shards(shards.len() as u64, |i| {
        let (shard, len) = shards[i as usize];
        let mut sampler = Sampler {
            cfg,
            rng: substream(seed, shard),
        };
        let mut r = PropositionReport::default();
        for _ in 0..len {
            let dx: S = sampler.amount();
            let tl = sampler.binary(dx);
            let degenerate = tl.is_degenerate();
            r.samples += 1;
            r.degenerate += u64::from(degenerate);
            let l = tl.to_lottery();
            let (g_time, g_ens) = (l.time_growth(), l.ensemble_growth());
            let jensen_ok = match cmp_rates(&g_ens, &g_time) {
                Ordering::Greater => !degenerate,
                Ordering::Equal => degenerate,
                Ordering::Less => false,
            };
            r.jensen_failures += u64::from(!jensen_ok);
            r.time_failures += u64::from(classify_pair(&tl, Approach::Time) != RiskClass::Rntl);
            let expected = if degenerate {
                RiskClass::Rntl
            } else {
                RiskClass::Rstl
            };
            r.ensemble_failures += u64::from(classify_pair(&tl, Approach::Ensemble) != expected);
        }
        r
    });
    Ok(parts
        .iter()
        .fold(PropositionReport::default(), |mut acc, r| {
            acc.samples += r.samples;
            acc.degenerate += r.degenerate;
            acc.jensen_failures += r.jensen_failures;
            acc.time_failures += r.time_failures;
            acc.ensemble_failures += r.ensemble_failures;
            acc
        }))
}
