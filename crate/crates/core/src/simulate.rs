//! Monte Carlo realisation of the two growth rates.
//!
//! Sequential mode plays the lottery `T` times back to back and reports
//! total payment over total elapsed time, which converges to the
//! time-average rate. Ensemble mode plays `N` independent copies at once and
//! averages the per-copy rates, which converges to the ensemble-average rate.
//!
//! Draws are split into shards of [`SHARD_SIZE`]; shard `i` draws from
//! substream `(seed, i)` and shard sums are merged in shard order with
//! compensated summation, so results do not depend on [`Execution`].

use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{shard_lengths, Execution};
use crate::lottery::GeneralLottery;
use crate::num::CompensatedSum;
use crate::rng::{substream, StreamRng};

pub const SHARD_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    Sequential,
    Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub seed: u64,
    pub rounds_or_copies: u64,
    pub mode: SimMode,
}

impl SimConfig {
    pub fn new(seed: u64, rounds_or_copies: u64, mode: SimMode) -> Result<Self> {
        if rounds_or_copies == 0 {
            return Err(Error::invalid("rounds_or_copies must be >= 1"));
        }
        Ok(Self {
            seed,
            rounds_or_copies,
            mode,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub empirical_rate: f64,
    pub analytic_target: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    /// Realisations per outcome, in the lottery's outcome order.
    pub tallies: Vec<u64>,
}

/// Cumulative distribution for drawing outcome indices.
struct Draw<'a> {
    lottery: &'a GeneralLottery<f64>,
    cumulative: Vec<f64>,
}

impl<'a> Draw<'a> {
    fn new(lottery: &'a GeneralLottery<f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = lottery
            .outcomes()
            .iter()
            .map(|o| {
                acc += o.prob;
                acc
            })
            .collect();
        Self {
            lottery,
            cumulative,
        }
    }

    fn index(&self, rng: &mut StreamRng) -> usize {
        let u: f64 = rng.random();
        let last = self.cumulative.len() - 1;
        self.cumulative[..last]
            .iter()
            .position(|&c| u < c)
            .unwrap_or(last)
    }
}

/// Running totals for one stream of draws.
#[derive(Debug, Clone)]
struct Accumulator {
    mode: SimMode,
    /// Amounts (sequential) or per-copy rates (ensemble).
    numer: CompensatedSum,
    /// Times (sequential) or copy count (ensemble).
    denom: CompensatedSum,
    tallies: Vec<u64>,
}

impl Accumulator {
    fn new(mode: SimMode, outcomes: usize) -> Self {
        Self {
            mode,
            numer: CompensatedSum::new(),
            denom: CompensatedSum::new(),
            tallies: vec![0; outcomes],
        }
    }

    fn push(&mut self, lottery: &GeneralLottery<f64>, idx: usize) {
        let o = &lottery.outcomes()[idx];
        match self.mode {
            SimMode::Sequential => {
                self.numer.add(o.amount);
                self.denom.add(o.time);
            }
            SimMode::Ensemble => {
                self.numer.add(o.amount / o.time);
                self.denom.add(1.0);
            }
        }
        self.tallies[idx] += 1;
    }

    fn merge(&mut self, other: &Accumulator) {
        self.numer.merge(&other.numer);
        self.denom.merge(&other.denom);
        for (a, b) in self.tallies.iter_mut().zip(&other.tallies) {
            *a += b;
        }
    }

    fn rate(&self) -> f64 {
        self.numer.value() / self.denom.value()
    }
}

fn run_shard(draw: &Draw<'_>, mode: SimMode, seed: u64, shard: u64, len: u64) -> Accumulator {
    let mut rng = substream(seed, shard);
    let mut acc = Accumulator::new(mode, draw.lottery.outcomes().len());
    for _ in 0..len {
        let idx = draw.index(&mut rng);
        acc.push(draw.lottery, idx);
    }
    acc
}

fn target(lottery: &GeneralLottery<f64>, mode: SimMode) -> f64 {
    match mode {
        SimMode::Sequential => lottery.time_growth(),
        SimMode::Ensemble => lottery.ensemble_growth(),
    }
}

fn simulate(lottery: &GeneralLottery<f64>, cfg: &SimConfig, exec: Execution) -> SimResult {
    let draw = Draw::new(lottery);
    let shards: Vec<(u64, u64)> = shard_lengths(cfg.rounds_or_copies, SHARD_SIZE).collect();
    let parts = exec.map_shards(shards.len() as u64, |i| {
        let (shard, len) = shards[i as usize];
        run_shard(&draw, cfg.mode, cfg.seed, shard, len)
    });
    let mut total = Accumulator::new(cfg.mode, lottery.outcomes().len());
    for p in &parts {
        total.merge(p);
    }
    let empirical_rate = total.rate();
    let analytic_target = target(lottery, cfg.mode);
    let abs_error = (empirical_rate - analytic_target).abs();
    SimResult {
        empirical_rate,
        analytic_target,
        abs_error,
        rel_error: abs_error / analytic_target.abs(),
        tallies: total.tallies,
    }
}

fn require_mode(cfg: &SimConfig, mode: SimMode) -> Result<()> {
    if cfg.mode != mode {
        return Err(Error::invalid(format!(
            "config mode is {:?}, expected {mode:?}",
            cfg.mode
        )));
    }
    if cfg.rounds_or_copies == 0 {
        return Err(Error::invalid("rounds_or_copies must be >= 1"));
    }
    Ok(())
}

/// Total payment over total time after `T` sequential rounds.
pub fn simulate_sequential(
    lottery: &GeneralLottery<f64>,
    cfg: &SimConfig,
    exec: Execution,
) -> Result<SimResult> {
    require_mode(cfg, SimMode::Sequential)?;
    Ok(simulate(lottery, cfg, exec))
}

/// Mean per-copy rate over `N` simultaneous copies.
pub fn simulate_ensemble(
    lottery: &GeneralLottery<f64>,
    cfg: &SimConfig,
    exec: Execution,
) -> Result<SimResult> {
    require_mode(cfg, SimMode::Ensemble)?;
    Ok(simulate(lottery, cfg, exec))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub count: u64,
    pub empirical_rate: f64,
}

/// Running estimate at each checkpoint from one pass over the draws.
///
/// Uses the same shards and merge order as the batch simulation, so the
/// last entry equals the batch result for `rounds_or_copies` equal to the
/// last checkpoint.
pub fn convergence_series(
    lottery: &GeneralLottery<f64>,
    mode: SimMode,
    checkpoints: &[u64],
    seed: u64,
) -> Result<Vec<ConvergencePoint>> {
    if checkpoints.is_empty() {
        return Err(Error::invalid("checkpoint list is empty"));
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "checkpoints must be strictly ascending and >= 1",
        ));
    }
    let draw = Draw::new(lottery);
    let total = *checkpoints.last().expect("nonempty");
    let n = lottery.outcomes().len();
    let mut merged = Accumulator::new(mode, n);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let mut drawn = 0u64;
    for (shard, len) in shard_lengths(total, SHARD_SIZE) {
        let mut rng = substream(seed, shard);
        let mut current = Accumulator::new(mode, n);
        for _ in 0..len {
            let idx = draw.index(&mut rng);
            current.push(lottery, idx);
            drawn += 1;
            if next.peek() == Some(&&drawn) {
                next.next();
                let mut snapshot = merged.clone();
                snapshot.merge(&current);
                out.push(ConvergencePoint {
                    count: drawn,
                    empirical_rate: snapshot.rate(),
                });
            }
        }
        merged.merge(&current);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lottery::{BinaryTimeLottery, TimedPayment};

    fn tl(t1: f64, t2: f64, p: f64, dx: f64) -> GeneralLottery<f64> {
        BinaryTimeLottery::new(t1, t2, p, dx).unwrap().to_lottery()
    }

    #[test]
    fn degenerate_single_draw_is_exact() {
        let l = TimedPayment::new(8.0, 2.0).unwrap().to_lottery();
        let cfg = SimConfig::new(1, 1, SimMode::Sequential).unwrap();
        let r = simulate_sequential(&l, &cfg, Execution::Sequential).unwrap();
        assert_eq!(r.empirical_rate, 4.0);
        assert_eq!(r.tallies, vec![1]);
        let cfg = SimConfig::new(1, 1, SimMode::Ensemble).unwrap();
        assert_eq!(
            simulate_ensemble(&l, &cfg, Execution::Sequential)
                .unwrap()
                .empirical_rate,
            4.0
        );
    }

    #[test]
    fn p_zero_pays_late_every_round() {
        let l = tl(1.0, 4.0, 0.0, 10.0);
        let cfg = SimConfig::new(9, 1000, SimMode::Sequential).unwrap();
        let r = simulate_sequential(&l, &cfg, Execution::Sequential).unwrap();
        assert_eq!(r.empirical_rate, 2.5);
        assert_eq!(r.abs_error, 0.0);
    }

    #[test]
    fn mode_mismatch_and_zero_count_rejected() {
        let l = tl(1.0, 2.0, 0.5, 10.0);
        let cfg = SimConfig::new(1, 10, SimMode::Ensemble).unwrap();
        assert!(simulate_sequential(&l, &cfg, Execution::Sequential).is_err());
        assert!(SimConfig::new(1, 0, SimMode::Ensemble).is_err());
    }

    #[test]
    fn tallies_sum_to_count_and_runs_repeat() {
        let l = tl(1.0, 2.0, 0.5, 10.0);
        let cfg = SimConfig::new(42, 200_003, SimMode::Ensemble).unwrap();
        let a = simulate_ensemble(&l, &cfg, Execution::Sequential).unwrap();
        let b = simulate_ensemble(&l, &cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tallies.iter().sum::<u64>(), 200_003);
    }

    #[test]
    fn series_shape_and_final_entry() {
        let l = tl(1.0, 2.0, 0.5, 10.0);
        let s = convergence_series(&l, SimMode::Sequential, &[10, 100, 1000], 7).unwrap();
        assert_eq!(
            s.iter().map(|p| p.count).collect::<Vec<_>>(),
            vec![10, 100, 1000]
        );

        let checkpoints = [1_000, SHARD_SIZE + 17, 3 * SHARD_SIZE];
        let s = convergence_series(&l, SimMode::Ensemble, &checkpoints, 7).unwrap();
        let cfg = SimConfig::new(7, 3 * SHARD_SIZE, SimMode::Ensemble).unwrap();
        let full = simulate_ensemble(&l, &cfg, Execution::default()).unwrap();
        assert_eq!(s.last().unwrap().empirical_rate, full.empirical_rate);

        let cfg = SimConfig::new(7, SHARD_SIZE + 17, SimMode::Ensemble).unwrap();
        let mid = simulate_ensemble(&l, &cfg, Execution::default()).unwrap();
        assert_eq!(s[1].empirical_rate, mid.empirical_rate);
    }

    #[test]
    fn series_rejects_bad_checkpoints() {
        let l = tl(1.0, 2.0, 0.5, 10.0);
        assert!(convergence_series(&l, SimMode::Sequential, &[], 1).is_err());
        assert!(convergence_series(&l, SimMode::Sequential, &[10, 10], 1).is_err());
        assert!(convergence_series(&l, SimMode::Sequential, &[0, 10], 1).is_err());
    }
}
