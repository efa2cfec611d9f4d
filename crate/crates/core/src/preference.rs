//! Growth-optimal preferences over time lotteries.
//!
//! A growth-optimal decision maker ranks lotteries by a single scalar rate:
//! the time-average rate under [`Approach::Time`], the ensemble-average rate
//! under [`Approach::Ensemble`]. The ordering therefore inherits
//! completeness and transitivity from the reals. Continuity holds under both
//! approaches; independence holds under the ensemble approach, and under the
//! time approach only when all payments are equal.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lottery::{mix, BinaryTimeLottery, GeneralLottery};
use crate::num::{cmp_rates, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    Time,
    Ensemble,
}

impl Approach {
    pub const ALL: [Approach; 2] = [Approach::Time, Approach::Ensemble];

    /// The scalar this approach maximises.
    pub fn rate<S: Scalar>(self, lottery: &GeneralLottery<S>) -> S {
        match self {
            Approach::Time => lottery.time_growth(),
            Approach::Ensemble => lottery.ensemble_growth(),
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approach::Time => "time",
            Approach::Ensemble => "ensemble",
        })
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(Approach::Time),
            "ensemble" => Ok(Approach::Ensemble),
            other => Err(Error::invalid(format!("unknown approach `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    PrefersFirst,
    Indifferent,
    PrefersSecond,
}

impl Relation {
    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Greater => Relation::PrefersFirst,
            Ordering::Equal => Relation::Indifferent,
            Ordering::Less => Relation::PrefersSecond,
        }
    }

    pub fn is_strict(self) -> bool {
        self != Relation::Indifferent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreferenceOutcome<S> {
    pub relation: Relation,
    pub g_first: S,
    pub g_second: S,
}

impl<S: Scalar> PreferenceOutcome<S> {
    pub fn to_f64(&self) -> PreferenceOutcome<f64> {
        PreferenceOutcome {
            relation: self.relation,
            g_first: self.g_first.to_f64(),
            g_second: self.g_second.to_f64(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RiskClass {
    /// Prefers the degenerate lottery.
    Ratl,
    /// Indifferent between the lottery and its degenerate lottery.
    Rntl,
    /// Prefers the risky lottery.
    Rstl,
}

impl fmt::Display for RiskClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RiskClass::Ratl => "RATL",
            RiskClass::Rntl => "RNTL",
            RiskClass::Rstl => "RSTL",
        })
    }
}

/// Ranks `a` against `b`. Indifference is exact in rational mode and within
/// a relative 1e-9 in float mode; under the time approach an indifferent
/// pair stays indifferent, no tie is broken.
pub fn compare<S: Scalar>(
    a: &GeneralLottery<S>,
    b: &GeneralLottery<S>,
    approach: Approach,
) -> Result<PreferenceOutcome<S>> {
    a.unit().ensure_same(b.unit())?;
    let g_first = approach.rate(a);
    let g_second = approach.rate(b);
    Ok(PreferenceOutcome {
        relation: Relation::from_ordering(cmp_rates(&g_first, &g_second)),
        g_first,
        g_second,
    })
}

/// Risk attitude implied by comparing `tl` with its degenerate lottery.
pub fn classify_pair<S: Scalar>(tl: &BinaryTimeLottery<S>, approach: Approach) -> RiskClass {
    let risky = tl.to_lottery();
    let safe = tl.degenerate().to_lottery();
    let outcome =
        compare(&risky, &safe, approach).expect("a lottery shares its unit with its degenerate");
    match outcome.relation {
        Relation::PrefersFirst => RiskClass::Rstl,
        Relation::Indifferent => RiskClass::Rntl,
        Relation::PrefersSecond => RiskClass::Ratl,
    }
}

/// Weight `θ ∈ [0, 1]` making `θ·a + (1−θ)·c` indifferent to `b`.
///
/// Requires `g(a) ≤ g(b) ≤ g(c)` with `g(a) < g(c)` under the approach. The
/// ensemble rate is linear in θ, so `θ = (g_c − g_b)/(g_c − g_a)`. The
/// time rate of the mixture is the mediant
/// `(θ·Δx_a + (1−θ)·Δx_c)/(θ·t_a + (1−θ)·t_c)` of expected amounts and
/// times, which solves to
/// `θ = (Δx_c − g_b·t_c) / ((Δx_c − Δx_a) + g_b·(t_a − t_c))`.
pub fn continuity_weight<S: Scalar>(
    a: &GeneralLottery<S>,
    b: &GeneralLottery<S>,
    c: &GeneralLottery<S>,
    approach: Approach,
) -> Result<S> {
    a.unit().ensure_same(b.unit())?;
    a.unit().ensure_same(c.unit())?;
    let (ga, gb, gc) = (approach.rate(a), approach.rate(b), approach.rate(c));
    if cmp_rates(&ga, &gc) == Ordering::Equal {
        return Err(Error::DegenerateOrdering(
            "outer lotteries are indifferent".into(),
        ));
    }
    if cmp_rates(&ga, &gb) == Ordering::Greater || cmp_rates(&gb, &gc) == Ordering::Greater {
        return Err(Error::invalid(format!(
            "continuity needs g(a) <= g(b) <= g(c), got {ga:?}, {gb:?}, {gc:?}"
        )));
    }
    let theta = match approach {
        Approach::Ensemble => (gc.clone() - gb) / (gc - ga),
        Approach::Time => {
            let (dx_a, t_a) = (a.expected_amount(), a.expected_time());
            let (dx_c, t_c) = (c.expected_amount(), c.expected_time());
            let numer = dx_c.clone() - gb.clone() * t_c.clone();
            let denom = (dx_c - dx_a) + gb * (t_a - t_c);
            numer / denom
        }
    };
    Ok(clamp_unit(theta))
}

// Float rounding at the boundary can land a hair outside [0, 1].
fn clamp_unit<S: Scalar>(theta: S) -> S {
    if theta < S::zero() {
        S::zero()
    } else if theta > S::one() {
        S::one()
    } else {
        theta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceReport<S> {
    pub holds: bool,
    pub theta: S,
    /// Rate of `θ·a + (1−θ)·c`.
    pub g_mix_ab: S,
    /// Rate of `θ·b + (1−θ)·c`.
    pub g_mix_cb: S,
    pub triple: [GeneralLottery<S>; 3],
}

impl<S: Scalar> IndependenceReport<S> {
    pub fn to_f64(&self) -> IndependenceReport<f64> {
        IndependenceReport {
            holds: self.holds,
            theta: self.theta.to_f64(),
            g_mix_ab: self.g_mix_ab.to_f64(),
            g_mix_cb: self.g_mix_cb.to_f64(),
            triple: self.triple.clone().map(|l| l.map_scalar(|v| v.to_f64())),
        }
    }
}

/// Checks that `a ≺ b` carries over to `θ·b + (1−θ)·c ≻ θ·a + (1−θ)·c`.
pub fn independence_check<S: Scalar>(
    a: &GeneralLottery<S>,
    b: &GeneralLottery<S>,
    c: &GeneralLottery<S>,
    theta: &S,
    approach: Approach,
) -> Result<IndependenceReport<S>> {
    if !(*theta > S::zero() && *theta <= S::one()) {
        return Err(Error::invalid(format!(
            "independence needs 0 < theta <= 1, got {theta:?}"
        )));
    }
    if compare(a, b, approach)?.relation != Relation::PrefersSecond {
        return Err(Error::invalid("independence needs a strictly below b"));
    }
    let mixed_a = mix(a, c, theta)?;
    let mixed_b = mix(b, c, theta)?;
    let outcome = compare(&mixed_b, &mixed_a, approach)?;
    Ok(IndependenceReport {
        holds: outcome.relation == Relation::PrefersFirst,
        theta: theta.clone(),
        g_mix_ab: outcome.g_second,
        g_mix_cb: outcome.g_first,
        triple: [a.clone(), b.clone(), c.clone()],
    })
}
