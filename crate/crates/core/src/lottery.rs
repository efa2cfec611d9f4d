//! Timed payments, time lotteries, and their two growth-rate functionals.
//!
//! All times are durations measured from a decision point at zero. A payment
//! of `amount` at `time` grows wealth at the rate `amount / time`; a lottery
//! over such payments has a *time-average* rate (expected amount over expected
//! time, the rate realised by repeating the lottery back to back) and an
//! *ensemble-average* rate (the probability-weighted mean of the per-outcome
//! rates). The ensemble rate is never below the time rate, and the
//! difference is the Jensen gap.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

pub const DEFAULT_UNIT: &str = "unit/time";

/// Opaque unit label carried alongside amounts and rates. Never converted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Unit(String);

impl Unit {
    pub fn new(label: impl Into<String>) -> Self {
        Unit(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub(crate) fn ensure_same(&self, other: &Unit) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::UnitMismatch {
                left: self.0.clone(),
                right: other.0.clone(),
            })
        }
    }
}

impl Default for Unit {
    fn default() -> Self {
        Unit(DEFAULT_UNIT.to_owned())
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn ensure_positive<S: Scalar>(what: &str, v: &S) -> Result<()> {
    if *v > S::zero() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be > 0, got {v:?}")))
    }
}

fn ensure_probability<S: Scalar>(what: &str, v: &S) -> Result<()> {
    if *v >= S::zero() && *v <= S::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what} must lie in [0, 1], got {v:?}"
        )))
    }
}

/// A certain amount paid at a certain future time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimedPayment<S> {
    amount: S,
    time: S,
    unit: Unit,
}

impl<S: Scalar> TimedPayment<S> {
    pub fn new(amount: S, time: S) -> Result<Self> {
        ensure_positive("amount", &amount)?;
        ensure_positive("time", &time)?;
        Ok(Self {
            amount,
            time,
            unit: Unit::default(),
        })
    }

    pub fn with_unit(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }

    pub fn amount(&self) -> &S {
        &self.amount
    }

    pub fn time(&self) -> &S {
        &self.time
    }

    pub fn unit(&self) -> &Unit {
        &self.unit
    }

    /// `amount / time`.
    pub fn growth_rate(&self) -> S {
        self.amount.clone() / self.time.clone()
    }

    pub fn to_lottery(&self) -> GeneralLottery<S> {
        GeneralLottery {
            outcomes: vec![Outcome {
                amount: self.amount.clone(),
                time: self.time.clone(),
                prob: S::one(),
            }],
            unit: self.unit.clone(),
        }
    }
}

/// Pays `amount` at `t1` with probability `p`, otherwise at `t2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryTimeLottery<S> {
    t1: S,
    t2: S,
    p: S,
    amount: S,
    unit: Unit,
}

impl<S: Scalar> BinaryTimeLottery<S> {
    pub fn new(t1: S, t2: S, p: S, amount: S) -> Result<Self> {
        ensure_positive("t1", &t1)?;
        if t2 < t1 {
            return Err(Error::invalid(format!(
                "t2 must be >= t1, got t1={t1:?} t2={t2:?}"
            )));
        }
        ensure_probability("p", &p)?;
        ensure_positive("amount", &amount)?;
        Ok(Self {
            t1,
            t2,
            p,
            amount,
            unit: Unit::default(),
        })
    }

    pub fn with_unit(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }

    pub fn t1(&self) -> &S {
        &self.t1
    }

    pub fn t2(&self) -> &S {
        &self.t2
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    pub fn amount(&self) -> &S {
        &self.amount
    }

    pub fn unit(&self) -> &Unit {
        &self.unit
    }

    pub fn is_degenerate(&self) -> bool {
        self.t1 == self.t2 || self.p.clone() == S::zero() || self.p.clone() == S::one()
    }

    /// `⟨t⟩ = p·t1 + (1−p)·t2`, returned exactly on the degenerate boundary.
    pub fn expected_time(&self) -> S {
        if self.t1 == self.t2 || self.p == S::one() {
            return self.t1.clone();
        }
        if self.p == S::zero() {
            return self.t2.clone();
        }
        self.p.clone() * self.t1.clone() + (S::one() - self.p.clone()) * self.t2.clone()
    }

    /// The degenerate lottery: the same amount paid for certain at `⟨t⟩`.
    pub fn degenerate(&self) -> TimedPayment<S> {
        TimedPayment {
            amount: self.amount.clone(),
            time: self.expected_time(),
            unit: self.unit.clone(),
        }
    }

    /// Time at which growth at the ensemble-average rate would deliver the
    /// amount: `t1·t2 / (t1 + p·(t2 − t1))`. Never exceeds `⟨t⟩`.
    pub fn effective_time(&self) -> S {
        if self.t1 == self.t2 || self.p == S::one() {
            return self.t1.clone();
        }
        if self.p == S::zero() {
            return self.t2.clone();
        }
        self.t1.clone() * self.t2.clone()
            / (self.t1.clone() + self.p.clone() * (self.t2.clone() - self.t1.clone()))
    }

    pub fn to_lottery(&self) -> GeneralLottery<S> {
        let outcomes = vec![
            Outcome {
                amount: self.amount.clone(),
                time: self.t1.clone(),
                prob: self.p.clone(),
            },
            Outcome {
                amount: self.amount.clone(),
                time: self.t2.clone(),
                prob: S::one() - self.p.clone(),
            },
        ];
        GeneralLottery {
            outcomes: canonicalize(outcomes),
            unit: self.unit.clone(),
        }
    }
}

/// One branch of a lottery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome<S> {
    pub amount: S,
    pub time: S,
    pub prob: S,
}

impl<S: Scalar> Outcome<S> {
    pub fn new(amount: S, time: S, prob: S) -> Self {
        Self { amount, time, prob }
    }

    pub fn rate(&self) -> S {
        self.amount.clone() / self.time.clone()
    }
}

/// Drops zero-probability outcomes and merges outcomes with equal keys,
/// keeping the position of the first occurrence.
fn canonicalize<S: Scalar>(outcomes: Vec<Outcome<S>>) -> Vec<Outcome<S>> {
    let mut merged: Vec<Outcome<S>> = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        if o.prob == S::zero() {
            continue;
        }
        match merged
            .iter_mut()
            .find(|m| m.amount.same_key(&o.amount) && m.time.same_key(&o.time))
        {
            Some(m) => m.prob = m.prob.clone() + o.prob,
            None => merged.push(o),
        }
    }
    merged
}

/// Finite distribution over `(amount, time)` outcomes.
///
/// Zero-probability outcomes are dropped at construction, so every stored
/// outcome is in the support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralLottery<S> {
    outcomes: Vec<Outcome<S>>,
    unit: Unit,
}

impl<S: Scalar> GeneralLottery<S> {
    pub fn new(outcomes: Vec<Outcome<S>>, unit: Unit) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::invalid("a lottery needs at least one outcome"));
        }
        let mut total = S::zero();
        for (i, o) in outcomes.iter().enumerate() {
            ensure_positive(&format!("outcome {i} amount"), &o.amount)?;
            ensure_positive(&format!("outcome {i} time"), &o.time)?;
            ensure_probability(&format!("outcome {i} prob"), &o.prob)?;
            total = total + o.prob.clone();
        }
        if !total.is_unit_total() {
            return Err(Error::invalid(format!(
                "probabilities must sum to 1, got {total:?}"
            )));
        }
        let outcomes: Vec<Outcome<S>> = outcomes
            .into_iter()
            .filter(|o| o.prob != S::zero())
            .collect();
        Ok(Self { outcomes, unit })
    }

    pub fn outcomes(&self) -> &[Outcome<S>] {
        &self.outcomes
    }

    pub fn unit(&self) -> &Unit {
        &self.unit
    }

    pub fn expected_amount(&self) -> S {
        self.outcomes
            .iter()
            .fold(S::zero(), |acc, o| acc + o.prob.clone() * o.amount.clone())
    }

    pub fn expected_time(&self) -> S {
        self.outcomes
            .iter()
            .fold(S::zero(), |acc, o| acc + o.prob.clone() * o.time.clone())
    }

    /// `Σ pᵢ·Δxᵢ/tᵢ`.
    pub fn ensemble_growth(&self) -> S {
        self.outcomes
            .iter()
            .fold(S::zero(), |acc, o| acc + o.prob.clone() * o.rate())
    }

    /// `(Σ pᵢ·Δxᵢ) / (Σ pᵢ·tᵢ)`.
    pub fn time_growth(&self) -> S {
        self.expected_amount() / self.expected_time()
    }

    /// True when every outcome in the support has the same rate `Δx/t`.
    pub fn has_uniform_rates(&self) -> bool {
        let first = self.outcomes[0].rate();
        self.outcomes[1..]
            .iter()
            .all(|o| o.rate().same_rate(&first))
    }

    pub fn growth_summary(&self) -> GrowthSummary<S> {
        let time_avg = self.time_growth();
        let ensemble_avg = self.ensemble_growth();
        let mut jensen_gap = ensemble_avg.clone() - time_avg.clone();
        // Float rounding can push a zero gap slightly negative.
        if jensen_gap < S::zero() {
            jensen_gap = S::zero();
        }
        GrowthSummary {
            time_avg,
            ensemble_avg,
            jensen_gap,
        }
    }

    /// Maps every value into another backend.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GeneralLottery<T> {
        GeneralLottery {
            outcomes: self
                .outcomes
                .iter()
                .map(|o| Outcome {
                    amount: f(&o.amount),
                    time: f(&o.time),
                    prob: f(&o.prob),
                })
                .collect(),
            unit: self.unit.clone(),
        }
    }
}

impl<S: Scalar> From<&BinaryTimeLottery<S>> for GeneralLottery<S> {
    fn from(tl: &BinaryTimeLottery<S>) -> Self {
        tl.to_lottery()
    }
}

impl<S: Scalar> From<&TimedPayment<S>> for GeneralLottery<S> {
    fn from(tp: &TimedPayment<S>) -> Self {
        tp.to_lottery()
    }
}

/// Time-average rate, ensemble-average rate, and their difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSummary<S> {
    pub time_avg: S,
    pub ensemble_avg: S,
    pub jensen_gap: S,
}

impl<S: Scalar> GrowthSummary<S> {
    pub fn to_f64(&self) -> GrowthSummary<f64> {
        GrowthSummary {
            time_avg: self.time_avg.to_f64(),
            ensemble_avg: self.ensemble_avg.to_f64(),
            jensen_gap: self.jensen_gap.to_f64(),
        }
    }
}

/// The combined lottery `θ·a + (1−θ)·b`.
///
/// Outcomes of `a` come first, scaled by `θ`, followed by those of `b`
/// scaled by `1 − θ`; equal `(amount, time)` keys are merged and
/// zero-probability outcomes are dropped.
pub fn mix<S: Scalar>(
    a: &GeneralLottery<S>,
    b: &GeneralLottery<S>,
    theta: &S,
) -> Result<GeneralLottery<S>> {
    ensure_probability("theta", theta)?;
    a.unit.ensure_same(&b.unit)?;
    let rest = S::one() - theta.clone();
    let scaled = a
        .outcomes
        .iter()
        .map(|o| Outcome {
            prob: theta.clone() * o.prob.clone(),
            ..o.clone()
        })
        .chain(b.outcomes.iter().map(|o| Outcome {
            prob: rest.clone() * o.prob.clone(),
            ..o.clone()
        }))
        .collect();
    Ok(GeneralLottery {
        outcomes: canonicalize(scaled),
        unit: a.unit.clone(),
    })
}
