//! Choice problems on which the two approaches predict opposite choices.
//!
//! A lottery and its degenerate lottery are indistinguishable to the time
//! approach, so existing experiments cannot reject it. Two setups fix that
//! by pairing a risky lottery with a riskless payment that differs either in
//! its payment time or in its amount.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lottery::{BinaryTimeLottery, TimedPayment};
use crate::num::Scalar;
use crate::preference::{compare, Approach, PreferenceOutcome, Relation};

pub const DEFAULT_PLACEMENT: f64 = 0.5;

/// A risky lottery against a riskless payment, with both predictions.
/// In each prediction the risky lottery is the first option.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignedPair<S> {
    pub risky: BinaryTimeLottery<S>,
    pub riskless: TimedPayment<S>,
    pub prediction_time: PreferenceOutcome<S>,
    pub prediction_ensemble: PreferenceOutcome<S>,
    pub disagree: bool,
    /// `g_TP − ḡ_TL`: positive when the time approach prefers the payment.
    pub time_margin: S,
    /// `⟨g⟩_TL − g_TP`: positive when the ensemble approach prefers the lottery.
    pub ensemble_margin: S,
}

fn ensure_non_degenerate<S: Scalar>(tl: &BinaryTimeLottery<S>) -> Result<()> {
    if tl.is_degenerate() {
        Err(Error::EmptyInterval(
            "a degenerate lottery has no disagreement window".into(),
        ))
    } else {
        Ok(())
    }
}

/// Open interval of riskless payment times on which the approaches disagree:
/// `((p/t1 + (1−p)/t2)⁻¹, ⟨t⟩)`.
pub fn disagreement_interval<S: Scalar>(tl: &BinaryTimeLottery<S>) -> Result<(S, S)> {
    ensure_non_degenerate(tl)?;
    Ok((tl.effective_time(), tl.expected_time()))
}

fn build<S: Scalar>(tl: &BinaryTimeLottery<S>, riskless: TimedPayment<S>) -> DesignedPair<S> {
    let risky = tl.to_lottery();
    let safe = riskless.to_lottery();
    let prediction_time = compare(&risky, &safe, Approach::Time).expect("shared unit");
    let prediction_ensemble = compare(&risky, &safe, Approach::Ensemble).expect("shared unit");
    let disagree = prediction_time.relation.is_strict()
        && prediction_ensemble.relation.is_strict()
        && prediction_time.relation != prediction_ensemble.relation;
    let g_tp = riskless.growth_rate();
    DesignedPair {
        time_margin: g_tp.clone() - prediction_time.g_first.clone(),
        ensemble_margin: prediction_ensemble.g_first.clone() - g_tp,
        risky: tl.clone(),
        riskless,
        prediction_time,
        prediction_ensemble,
        disagree,
    }
}

/// Adjusting times: same amount, paid for certain at
/// `t_lo + placement·(t_hi − t_lo)` inside the disagreement interval.
pub fn design_adjust_times<S: Scalar>(
    tl: &BinaryTimeLottery<S>,
    placement: &S,
) -> Result<DesignedPair<S>> {
    if !(*placement > S::zero() && *placement < S::one()) {
        return Err(Error::invalid("placement must lie in (0, 1)"));
    }
    let (lo, hi) = disagreement_interval(tl)?;
    let t_tp = lo.clone() + placement.clone() * (hi - lo);
    let riskless = TimedPayment::new(tl.amount().clone(), t_tp)?.with_unit(tl.unit().clone());
    Ok(build(tl, riskless))
}

/// Adjusting amounts: `amount_ratio·Δx` paid for certain at `⟨t⟩`. The
/// approaches disagree exactly when `1 < amount_ratio < ⟨g⟩·⟨t⟩/Δx`.
pub fn design_adjust_amounts<S: Scalar>(
    tl: &BinaryTimeLottery<S>,
    amount_ratio: &S,
) -> Result<DesignedPair<S>> {
    if *amount_ratio <= S::zero() {
        return Err(Error::invalid("amount_ratio must be > 0"));
    }
    if *amount_ratio == S::one() {
        return Err(Error::invalid(
            "amount_ratio = 1 reproduces the degenerate lottery",
        ));
    }
    ensure_non_degenerate(tl)?;
    let riskless = TimedPayment::new(
        amount_ratio.clone() * tl.amount().clone(),
        tl.expected_time(),
    )?
    .with_unit(tl.unit().clone());
    Ok(build(tl, riskless))
}

/// Upper end of the amount-ratio window on which the approaches disagree.
pub fn amount_ratio_ceiling<S: Scalar>(tl: &BinaryTimeLottery<S>) -> S {
    tl.to_lottery().ensemble_growth() * tl.expected_time() / tl.amount().clone()
}

impl<S: Scalar> DesignedPair<S> {
    /// Whether the time approach prefers the riskless payment.
    pub fn time_prefers_riskless(&self) -> bool {
        self.prediction_time.relation == Relation::PrefersSecond
    }

    pub fn ensemble_prefers_risky(&self) -> bool {
        self.prediction_ensemble.relation == Relation::PrefersFirst
    }

    pub fn to_f64(&self) -> DesignedPair<f64> {
        let r = &self.risky;
        let t = &self.riskless;
        DesignedPair {
            risky: BinaryTimeLottery::new(
                r.t1().to_f64(),
                r.t2().to_f64(),
                r.p().to_f64(),
                r.amount().to_f64(),
            )
            .expect("valid lottery stays valid")
            .with_unit(r.unit().clone()),
            riskless: TimedPayment::new(t.amount().to_f64(), t.time().to_f64())
                .expect("valid payment stays valid")
                .with_unit(t.unit().clone()),
            prediction_time: self.prediction_time.to_f64(),
            prediction_ensemble: self.prediction_ensemble.to_f64(),
            disagree: self.disagree,
            time_margin: self.time_margin.to_f64(),
            ensemble_margin: self.ensemble_margin.to_f64(),
        }
    }
}
