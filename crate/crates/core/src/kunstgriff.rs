//! Whether a wealth-only utility could reconcile the two growth rates.
//!
//! For a binary time lottery the ensemble-average rate equals the
//! time-average rate only if the utility increment is scaled by
//! `t1·t2 / ((p·t1 + (1−p)·t2)·(p·t2 + (1−p)·t1))`. The factor depends on
//! the payment times and probability, not on wealth, so no such utility
//! exists. A sweep over setups makes the dependence visible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Multiplier the utility increment would need. In `(0, 1]`, and exactly one
/// on the degenerate boundary.
pub fn kunstgriff_factor<S: Scalar>(t1: &S, t2: &S, p: &S) -> Result<S> {
    if !(*t1 > S::zero() && *t2 > S::zero()) {
        return Err(Error::invalid("payment times must be > 0"));
    }
    if !(*p >= S::zero() && *p <= S::one()) {
        return Err(Error::invalid("p must lie in [0, 1]"));
    }
    if t1 == t2 || *p == S::zero() || *p == S::one() {
        return Ok(S::one());
    }
    let q = S::one() - p.clone();
    let expected_t = p.clone() * t1.clone() + q.clone() * t2.clone();
    let swapped_t = p.clone() * t2.clone() + q * t1.clone();
    Ok(t1.clone() * t2.clone() / (expected_t * swapped_t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow<S> {
    pub t1: S,
    pub t2: S,
    pub p: S,
    pub factor: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KunstgriffSweep<S> {
    pub rows: Vec<SweepRow<S>>,
    pub min_factor: S,
    pub max_factor: S,
    /// Set when the factor varies across the grid.
    pub setup_dependent: bool,
}

pub fn kunstgriff_sweep<S: Scalar>(grid: &[(S, S, S)]) -> Result<KunstgriffSweep<S>> {
    if grid.is_empty() {
        return Err(Error::invalid("kunstgriff sweep needs a nonempty grid"));
    }
    let rows = grid
        .iter()
        .map(|(t1, t2, p)| {
            Ok(SweepRow {
                t1: t1.clone(),
                t2: t2.clone(),
                p: p.clone(),
                factor: kunstgriff_factor(t1, t2, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut min_factor = rows[0].factor.clone();
    let mut max_factor = rows[0].factor.clone();
    for row in &rows[1..] {
        if row.factor < min_factor {
            min_factor = row.factor.clone();
        }
        if row.factor > max_factor {
            max_factor = row.factor.clone();
        }
    }
    let setup_dependent = !max_factor.same_rate(&min_factor);
    Ok(KunstgriffSweep {
        rows,
        min_factor,
        max_factor,
        setup_dependent,
    })
}
