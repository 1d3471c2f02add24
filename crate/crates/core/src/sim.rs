//! Monte Carlo check of the reward formulas.
//!
//! Blocks are drawn round by round in proportion to honest power. Pools settle
//! once per epoch: the manager hands `1 - alpha` of the pot to the miner who
//! found the block and splits the rest over registered power, infiltrators
//! included. What infiltrators earn in epoch `t` reaches their home pool's pot
//! in epoch `t + 1`, so the recursion between pool revenues becomes a
//! geometric carry that settles onto the analytic fixed point.

use rand::distributions::{Distribution, WeightedIndex};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{RewardBreakdown, StrategyProfile, ValidatedGame};

/// What the `1 - alpha` award is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AwardBase {
    /// The whole pot, carried-in infiltration income included. This is the
    /// reading the analytic utility uses.
    #[default]
    TotalRevenue,
    /// Only the pool's own blocks. Results are not comparable with the
    /// analytic utilities.
    DirectOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub rounds_per_epoch: u64,
    pub epochs: usize,
    pub seed: u64,
    pub burn_in_epochs: usize,
    #[serde(default)]
    pub award_base: AwardBase,
}

impl SimConfig {
    /// `total_rounds` split evenly over `epochs`.
    pub fn new(total_rounds: u64, epochs: usize, burn_in_epochs: usize, seed: u64) -> Self {
        Self {
            rounds_per_epoch: total_rounds / epochs.max(1) as u64,
            epochs,
            seed,
            burn_in_epochs,
            award_base: AwardBase::TotalRevenue,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds_per_epoch == 0 {
            return Err(Error::InvalidSimConfig("rounds_per_epoch must be positive".into()));
        }
        // batch-means standard errors need two measured epochs
        if self.epochs < self.burn_in_epochs + 2 {
            return Err(Error::InvalidSimConfig(format!(
                "epochs ({}) must exceed burn_in_epochs ({}) by at least 2",
                self.epochs, self.burn_in_epochs
            )));
        }
        Ok(())
    }
}

/// Money flow of one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLedger {
    pub blocks: Vec<u64>,
    pub outside_blocks: u64,
    /// Infiltration income settled last epoch, entering each pool's pot now.
    pub carry_in: Vec<f64>,
    /// `blocks + carry_in`.
    pub booked: Vec<f64>,
    /// Award plus proportional share paid to each pool's own miners.
    pub honest_income: Vec<f64>,
    /// Paid out to each pool's infiltrators elsewhere; next epoch's carry-in.
    pub infiltration_income: Vec<f64>,
}

impl EpochLedger {
    /// Largest of the two conservation gaps, relative to the epoch's revenue.
    pub fn conservation_gap(&self) -> f64 {
        let blocks: f64 = self.blocks.iter().map(|&b| b as f64).sum();
        let carry: f64 = self.carry_in.iter().sum();
        let booked: f64 = self.booked.iter().sum();
        let settled: f64 = self.honest_income.iter().sum::<f64>() + self.infiltration_income.iter().sum::<f64>();
        let scale = booked.max(1.0);
        ((booked - blocks - carry).abs()).max((settled - booked).abs()) / scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Mean per-round pool revenue, estimating `r`.
    pub empirical_r: Vec<f64>,
    /// Mean per-round income of each pool's own miners, estimating `U`.
    pub empirical_u: Vec<f64>,
    pub std_err_r: Vec<f64>,
    pub std_err_u: Vec<f64>,
    pub rounds_total: u64,
    pub rounds_measured: u64,
    pub award_base: AwardBase,
    pub ledgers: Vec<EpochLedger>,
}

impl SimResult {
    /// Only the total-revenue award base estimates the analytic utilities.
    pub fn canonical(&self) -> bool {
        self.award_base == AwardBase::TotalRevenue
    }
}

/// Settles one epoch's pot for every pool.
fn settle(game: &ValidatedGame, x: &StrategyProfile, base: AwardBase, blocks: &[u64], carry_in: &[f64]) -> EpochLedger {
    let n = game.n();
    let mut honest_income = vec![0.0; n];
    let mut infiltration_income = vec![0.0; n];
    let booked: Vec<f64> = (0..n).map(|i| blocks[i] as f64 + carry_in[i]).collect();
    for i in 0..n {
        let alpha = game.alpha(i);
        let award = match base {
            AwardBase::TotalRevenue => (1.0 - alpha) * booked[i],
            AwardBase::DirectOnly => (1.0 - alpha) * blocks[i] as f64,
        };
        let shared = booked[i] - award;
        let registered = game.pool_power(i) + x.incoming(i);
        honest_income[i] += award + shared * game.pool_power(i) / registered;
        for j in (0..n).filter(|&j| j != i) {
            infiltration_income[j] += shared * x.get(j, i) / registered;
        }
    }
    EpochLedger {
        blocks: blocks.to_vec(),
        outside_blocks: 0,
        carry_in: carry_in.to_vec(),
        booked,
        honest_income,
        infiltration_income,
    }
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

pub fn simulate(game: &ValidatedGame, x: &StrategyProfile, cfg: &SimConfig) -> Result<SimResult> {
    game.check_strategy(x)?;
    cfg.validate()?;
    let n = game.n();
    let mut weights: Vec<f64> = (0..n).map(|i| game.pool_power(i) - x.outgoing(i)).collect();
    let outside = game.total_power() - game.pool_powers().iter().sum::<f64>();
    weights.push(outside.max(0.0));
    let draw = WeightedIndex::new(&weights).map_err(|_| Error::DegenerateDenominator {
        infiltration: x.total(),
        total: game.total_power(),
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let rounds = cfg.rounds_per_epoch as f64;
    let mut carry = vec![0.0; n];
    let mut ledgers = Vec::with_capacity(cfg.epochs);
    let mut per_epoch_r: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut per_epoch_u: Vec<Vec<f64>> = vec![Vec::new(); n];
    for epoch in 0..cfg.epochs {
        let mut blocks = vec![0u64; n + 1];
        for _ in 0..cfg.rounds_per_epoch {
            blocks[draw.sample(&mut rng)] += 1;
        }
        let outside_blocks = blocks.pop().expect("outside slot");
        let mut ledger = settle(game, x, cfg.award_base, &blocks, &carry);
        ledger.outside_blocks = outside_blocks;
        if epoch >= cfg.burn_in_epochs {
            for i in 0..n {
                per_epoch_r[i].push(ledger.booked[i] / rounds);
                per_epoch_u[i].push(ledger.honest_income[i] / rounds);
            }
        }
        carry.clone_from(&ledger.infiltration_income);
        ledgers.push(ledger);
    }

    let (empirical_r, std_err_r): (Vec<f64>, Vec<f64>) = per_epoch_r.iter().map(|s| mean_and_se(s)).unzip();
    let (empirical_u, std_err_u): (Vec<f64>, Vec<f64>) = per_epoch_u.iter().map(|s| mean_and_se(s)).unzip();
    Ok(SimResult {
        empirical_r,
        empirical_u,
        std_err_r,
        std_err_u,
        rounds_total: cfg.rounds_per_epoch * cfg.epochs as u64,
        rounds_measured: cfg.rounds_per_epoch * (cfg.epochs - cfg.burn_in_epochs) as u64,
        award_base: cfg.award_base,
        ledgers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    Reward,
    Utility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolComparison {
    pub pool: usize,
    pub quantity: Quantity,
    pub empirical: f64,
    pub analytic: f64,
    pub std_err: f64,
    /// `max(k_sigma * std_err, 0.01 * analytic + 1e-6)`.
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<PoolComparison>,
    pub passed: bool,
}

impl Comparison {
    pub fn failures(&self) -> impl Iterator<Item = &PoolComparison> {
        self.rows.iter().filter(|r| !r.passed)
    }
}

pub fn compare(sim: &SimResult, analytic: &RewardBreakdown, k_sigma: f64) -> Result<Comparison> {
    let n = analytic.total.len();
    for (what, got) in [
        ("empirical_r", sim.empirical_r.len()),
        ("empirical_u", sim.empirical_u.len()),
        ("std_err_r", sim.std_err_r.len()),
        ("std_err_u", sim.std_err_u.len()),
    ] {
        if got != n {
            return Err(Error::DimensionMismatch { what, expected: n, got });
        }
    }
    let mut rows = Vec::with_capacity(2 * n);
    for (quantity, emp, se, ana) in [
        (Quantity::Reward, &sim.empirical_r, &sim.std_err_r, &analytic.total),
        (Quantity::Utility, &sim.empirical_u, &sim.std_err_u, &analytic.utility),
    ] {
        for pool in 0..n {
            let bound = (k_sigma * se[pool]).max(0.01 * ana[pool] + 1e-6);
            rows.push(PoolComparison {
                pool,
                quantity,
                empirical: emp[pool],
                analytic: ana[pool],
                std_err: se[pool],
                bound,
                passed: (emp[pool] - ana[pool]).abs() <= bound,
            });
        }
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(Comparison { rows, passed })
}

/// Expected per-round pot of every pool over `epochs` epochs of the
/// settlement recursion, without sampling noise. Row `t` is epoch `t`.
pub fn settlement_transient(
    game: &ValidatedGame,
    x: &StrategyProfile,
    epochs: usize,
    base: AwardBase,
) -> Result<Vec<Vec<f64>>> {
    game.check_strategy(x)?;
    let n = game.n();
    let direct = game.direct_rewards(x)?;
    let mut carry = vec![0.0; n];
    let mut out = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        let booked: Vec<f64> = (0..n).map(|i| direct[i] + carry[i]).collect();
        let mut next = vec![0.0; n];
        for i in 0..n {
            let alpha = game.alpha(i);
            let award = match base {
                AwardBase::TotalRevenue => (1.0 - alpha) * booked[i],
                AwardBase::DirectOnly => (1.0 - alpha) * direct[i],
            };
            let registered = game.pool_power(i) + x.incoming(i);
            for j in (0..n).filter(|&j| j != i) {
                next[j] += (booked[i] - award) * x.get(j, i) / registered;
            }
        }
        out.push(booked);
        carry = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameConfig;

    fn gstar() -> ValidatedGame {
        GameConfig::new(18.0, vec![2.0, 3.0], vec![0.8, 0.8]).validate().unwrap()
    }

    #[test]
    fn zero_profile_is_binomial() {
        let g = gstar();
        let cfg = SimConfig::new(1_000_000, 50, 5, 42);
        let res = simulate(&g, &StrategyProfile::zeros(2), &cfg).unwrap();
        for (i, want) in [1.0 / 9.0, 1.0 / 6.0].into_iter().enumerate() {
            assert!((res.empirical_r[i] - want).abs() <= 3.0 * res.std_err_r[i], "pool {i}");
            assert!(res.std_err_r[i] > 0.0);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let g = gstar();
        let x = StrategyProfile::two_pool(1.0, 0.0);
        let cfg = SimConfig::new(100_000, 10, 2, 7);
        let a = simulate(&g, &x, &cfg).unwrap();
        let b = simulate(&g, &x, &cfg).unwrap();
        assert_eq!(a, b);
        let bits = |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.empirical_r), bits(&b.empirical_r));
    }

    #[test]
    fn config_needs_two_measured_epochs() {
        let g = gstar();
        let cfg = SimConfig::new(1000, 5, 4, 1);
        assert!(matches!(
            simulate(&g, &StrategyProfile::zeros(2), &cfg),
            Err(Error::InvalidSimConfig(_))
        ));
    }

    #[test]
    fn every_epoch_conserves_revenue() {
        let g = gstar();
        let x = StrategyProfile::two_pool(1.0, 0.5);
        for base in [AwardBase::TotalRevenue, AwardBase::DirectOnly] {
            let cfg = SimConfig {
                award_base: base,
                ..SimConfig::new(50_000, 10, 2, 3)
            };
            let res = simulate(&g, &x, &cfg).unwrap();
            for l in &res.ledgers {
                assert!(l.conservation_gap() <= 1e-9);
            }
        }
    }

    #[test]
    fn transient_converges_to_rewards() {
        let g = gstar();
        let x = StrategyProfile::two_pool(1.0, 0.5);
        let t = settlement_transient(&g, &x, 40, AwardBase::TotalRevenue).unwrap();
        let r = g.solve_rewards(&x).unwrap().total;
        for i in 0..2 {
            assert!((t[39][i] - r[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn compare_flags_named_pool() {
        let analytic = gstar().solve_rewards(&StrategyProfile::zeros(2)).unwrap();
        let mut sim = SimResult {
            empirical_r: analytic.total.clone(),
            empirical_u: analytic.utility.clone(),
            std_err_r: vec![1e-5; 2],
            std_err_u: vec![1e-5; 2],
            rounds_total: 0,
            rounds_measured: 0,
            award_base: AwardBase::TotalRevenue,
            ledgers: Vec::new(),
        };
        assert!(compare(&sim, &analytic, 3.0).unwrap().passed);
        sim.empirical_r[1] *= 1.1;
        let cmp = compare(&sim, &analytic, 3.0).unwrap();
        assert!(!cmp.passed);
        let bad: Vec<_> = cmp.failures().map(|r| (r.pool, r.quantity)).collect();
        assert_eq!(bad, vec![(1, Quantity::Reward)]);
        sim.std_err_u.pop();
        assert!(matches!(compare(&sim, &analytic, 3.0), Err(Error::DimensionMismatch { .. })));
    }
}
