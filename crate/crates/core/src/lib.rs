//! Time lotteries evaluated by time-average and ensemble-average growth.
//!
//! A time lottery pays a fixed amount at a random delay. Its ensemble
//! growth rate `⟨Δx/t⟩` averages per-outcome rates; its time growth rate
//! `E[Δx]/E[t]` is what a repeated sequence of draws actually realizes.
//! The two disagree whenever the delay is uncertain, and that gap is the
//! quantity this crate computes, tests axiomatically, simulates, fits to
//! experimental data and exploits to design discriminating questions.
//!
//! Every deterministic computation is generic over [`Scalar`], with `f64`
//! and exact [`Rational`] backends.
//!
//! ```
//! use timelottery::BinaryTimeLottery;
//!
//! let tl = BinaryTimeLottery::new(1.0, 10.0, 0.5, 10.0).unwrap();
//! let g = tl.to_lottery().growth_summary();
//! assert!((g.time_avg - 10.0 / 5.5).abs() < 1e-12);
//! assert!((g.ensemble_avg - 5.5).abs() < 1e-12);
//! ```

pub mod axioms;
pub mod design;
pub mod empirics;
mod error;
pub mod exec;
pub mod kunstgriff;
pub mod lottery;
pub mod num;
pub mod preference;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
pub use exec::Execution;
pub use kunstgriff::{kunstgriff_factor, kunstgriff_sweep, KunstgriffSweep, SweepRow};
pub use lottery::{
    mix, BinaryTimeLottery, GeneralLottery, GrowthSummary, Outcome, TimedPayment, Unit,
    DEFAULT_UNIT,
};
pub use num::{NumericMode, Rational, Scalar};
pub use preference::{
    classify_pair, compare, continuity_weight, independence_check, Approach, IndependenceReport,
    PreferenceOutcome, Relation, RiskClass,
};
