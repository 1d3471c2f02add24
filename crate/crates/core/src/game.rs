//! The n-pool game: configurations, infiltration profiles and the coupled
//! reward system.
//!
//! Rewards are normalised so that the worldwide expected block reward per unit
//! time is 1. Pool `i` books a direct reward from its honest power
//!
//! ```text
//! DR_i = (m_i - sum_l x_il) / (m - sum_jl x_jl)
//! ```
//!
//! plus an infiltration reward collected by its infiltrators from every pool
//! `j` it attacks, `IR_i = sum_j alpha_j x_ij r_j / (m_j + sum_l x_lj)`. The
//! totals `r = DR + M r` form a linear system with
//! `M_ij = alpha_j x_ij / (m_j + sum_l x_lj)`. Each column of `M` sums to less
//! than one, so `I - M` is always invertible and the fixed-point iteration
//! `r <- DR + M r` contracts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Lu;

/// Relative slack allowed on budget and range checks.
pub const FEASIBILITY_SLACK: f64 = 1e-12;
/// Maximum accepted residual of the direct linear solve.
pub const SOLVER_RESIDUAL_TOL: f64 = 1e-12;
/// Default stopping tolerance of the fixed-point cross-check.
pub const FIXED_POINT_TOL: f64 = 1e-12;
/// Default iteration cap of the fixed-point cross-check.
pub const FIXED_POINT_MAX_ITER: usize = 100_000;

/// Raw description of a game, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Worldwide mining power `m`.
    pub total_power: f64,
    /// Pool powers `m_1..m_n`.
    pub pool_powers: Vec<f64>,
    /// Fraction of revenue each manager shares proportionally; the rest
    /// rewards the miner who found the block.
    pub alphas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_names: Option<Vec<String>>,
}

impl GameConfig {
    pub fn new(total_power: f64, pool_powers: Vec<f64>, alphas: Vec<f64>) -> Self {
        Self {
            total_power,
            pool_powers,
            alphas,
            pool_names: None,
        }
    }

    pub fn validate(self) -> Result<ValidatedGame> {
        ValidatedGame::new(self)
    }
}

/// Preconditions of the two-pool uniqueness result:
/// `alpha_1 <= 1 - m_2/m`, `alpha_2 <= 1 - m_1/m` and `m > 3 (m_1 + m_2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPoolConditions {
    pub alpha1_bound: bool,
    pub alpha2_bound: bool,
    pub minority_pools: bool,
}

impl TwoPoolConditions {
    pub fn evaluate(m: f64, m1: f64, m2: f64, alpha1: f64, alpha2: f64) -> Self {
        Self {
            alpha1_bound: alpha1 <= 1.0 - m2 / m + FEASIBILITY_SLACK,
            alpha2_bound: alpha2 <= 1.0 - m1 / m + FEASIBILITY_SLACK,
            minority_pools: m > 3.0 * (m1 + m2),
        }
    }

    pub fn holds(&self) -> bool {
        self.alpha1_bound && self.alpha2_bound && self.minority_pools
    }
}

/// Which equilibrium preconditions a validated game satisfies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preconditions {
    /// Per pool: `alpha_i <= 1 - m_max/m`.
    pub zero_profile_bound: Vec<bool>,
    /// Present for two-pool games only.
    pub two_pool: Option<TwoPoolConditions>,
}

impl Preconditions {
    /// The zero profile is guaranteed to be an equilibrium.
    pub fn zero_profile_holds(&self) -> bool {
        self.zero_profile_bound.iter().all(|&b| b)
    }

    /// Two pools and the zero profile is guaranteed to be the unique equilibrium.
    pub fn two_pool_holds(&self) -> bool {
        self.two_pool.is_some_and(|c| c.holds())
    }
}

/// A game whose configuration passed every invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedGame {
    config: GameConfig,
    max_power: f64,
    preconditions: Preconditions,
}

impl ValidatedGame {
    pub fn new(config: GameConfig) -> Result<Self> {
        let n = config.pool_powers.len();
        if n < 2 {
            return Err(Error::TooFewPools(n));
        }
        if config.alphas.len() != n {
            return Err(Error::DimensionMismatch {
                what: "alphas",
                expected: n,
                got: config.alphas.len(),
            });
        }
        if let Some(names) = &config.pool_names {
            if names.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "pool_names",
                    expected: n,
                    got: names.len(),
                });
            }
        }
        if !config.total_power.is_finite() {
            return Err(Error::NonFinite {
                what: "total_power",
                value: config.total_power,
            });
        }
        for (pool, &power) in config.pool_powers.iter().enumerate() {
            if !power.is_finite() {
                return Err(Error::NonFinite {
                    what: "pool power",
                    value: power,
                });
            }
            if power <= 0.0 {
                return Err(Error::NonPositivePower { pool, power });
            }
        }
        for (pool, &alpha) in config.alphas.iter().enumerate() {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::AlphaOutOfRange { pool, alpha });
            }
        }
        let pools: f64 = config.pool_powers.iter().sum();
        if pools > config.total_power * (1.0 + FEASIBILITY_SLACK) {
            return Err(Error::PowerBudgetExceeded {
                pools,
                total: config.total_power,
            });
        }

        let m = config.total_power;
        let max_power = config.pool_powers.iter().copied().fold(0.0, f64::max);
        let bound = 1.0 - max_power / m;
        let zero_profile_bound = config
            .alphas
            .iter()
            .map(|&a| a <= bound + FEASIBILITY_SLACK)
            .collect();
        let two_pool = (n == 2).then(|| {
            TwoPoolConditions::evaluate(
                m,
                config.pool_powers[0],
                config.pool_powers[1],
                config.alphas[0],
                config.alphas[1],
            )
        });
        Ok(Self {
            config,
            max_power,
            preconditions: Preconditions {
                zero_profile_bound,
                two_pool,
            },
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.pool_powers.len()
    }

    pub fn total_power(&self) -> f64 {
        self.config.total_power
    }

    pub fn pool_power(&self, i: usize) -> f64 {
        self.config.pool_powers[i]
    }

    pub fn pool_powers(&self) -> &[f64] {
        &self.config.pool_powers
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.config.alphas[i]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.config.alphas
    }

    pub fn max_power(&self) -> f64 {
        self.max_power
    }

    /// `1 - m_max / m`, the largest alpha for which no pool profits from
    /// leaving the zero profile.
    pub fn zero_profile_alpha_bound(&self) -> f64 {
        1.0 - self.max_power / self.config.total_power
    }

    pub fn preconditions(&self) -> &Preconditions {
        &self.preconditions
    }

    /// Same powers, different alphas.
    pub fn with_alphas(&self, alphas: Vec<f64>) -> Result<Self> {
        Self::new(GameConfig {
            alphas,
            ..self.config.clone()
        })
    }

    /// Checks every profile invariant against this game.
    pub fn check_strategy(&self, x: &StrategyProfile) -> Result<()> {
        let n = self.n();
        if x.n() != n {
            return Err(Error::DimensionMismatch {
                what: "infiltration matrix",
                expected: n,
                got: x.n(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = x.get(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        what: "infiltration",
                        value: v,
                    });
                }
                if i == j {
                    if v != 0.0 {
                        return Err(Error::SelfInfiltration { pool: i, value: v });
                    }
                } else if v < 0.0 {
                    return Err(Error::NegativeInfiltration {
                        from: i,
                        to: j,
                        value: v,
                    });
                }
            }
        }
        for i in 0..n {
            let used = x.outgoing(i);
            let budget = self.pool_power(i);
            if used > budget * (1.0 + FEASIBILITY_SLACK) {
                return Err(Error::BudgetExceeded {
                    pool: i,
                    used,
                    budget,
                });
            }
        }
        let infiltration = x.total();
        if infiltration >= self.total_power() {
            return Err(Error::DegenerateDenominator {
                infiltration,
                total: self.total_power(),
            });
        }
        Ok(())
    }

    pub fn direct_rewards(&self, x: &StrategyProfile) -> Result<Vec<f64>> {
        self.check_strategy(x)?;
        Ok(self.direct_rewards_unchecked(x))
    }

    pub(crate) fn direct_rewards_unchecked(&self, x: &StrategyProfile) -> Vec<f64> {
        let honest_world = self.total_power() - x.total();
        (0..self.n())
            .map(|i| ((self.pool_power(i) - x.outgoing(i)) / honest_world).max(0.0))
            .collect()
    }

    /// Registered power of pool `j`: its own miners plus every infiltrator.
    fn registered_power(&self, x: &StrategyProfile, j: usize) -> f64 {
        self.pool_power(j) + x.incoming(j)
    }

    /// The infiltration operator `M` (row-major).
    pub(crate) fn infiltration_operator(&self, x: &StrategyProfile) -> Vec<f64> {
        let n = self.n();
        let registered: Vec<f64> = (0..n).map(|j| self.registered_power(x, j)).collect();
        let mut op = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    op[i * n + j] = self.alpha(j) * x.get(i, j) / registered[j];
                }
            }
        }
        op
    }

    fn factor_system(&self, op: &[f64]) -> Result<Lu> {
        let n = self.n();
        let mut a: Vec<f64> = op.iter().map(|v| -v).collect();
        for i in 0..n {
            a[i * n + i] += 1.0;
        }
        Lu::factor(n, a)
    }

    /// Total rewards `r` without profile validation; callers guarantee feasibility.
    pub(crate) fn rewards_unchecked(&self, x: &StrategyProfile) -> Result<Vec<f64>> {
        let dr = self.direct_rewards_unchecked(x);
        let op = self.infiltration_operator(x);
        Ok(self.factor_system(&op)?.solve(&dr))
    }

    /// Solves the coupled reward system by a direct LU solve and fills in utilities.
    pub fn solve_rewards(&self, x: &StrategyProfile) -> Result<RewardBreakdown> {
        self.check_strategy(x)?;
        let n = self.n();
        let direct = self.direct_rewards_unchecked(x);
        let op = self.infiltration_operator(x);
        let total = self.factor_system(&op)?.solve(&direct);
        let infiltration: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| op[i * n + j] * total[j]).sum())
            .collect();
        let solver_residual = (0..n)
            .map(|i| (total[i] - direct[i] - infiltration[i]).abs())
            .fold(0.0, f64::max);
        if !(solver_residual <= SOLVER_RESIDUAL_TOL) {
            return Err(Error::ResidualTooLarge {
                residual: solver_residual,
                tolerance: SOLVER_RESIDUAL_TOL,
            });
        }
        let utility = self
            .utility_coefficients(x)
            .iter()
            .zip(&total)
            .map(|(c, r)| c * r)
            .collect();
        Ok(RewardBreakdown {
            direct,
            infiltration,
            total,
            utility,
            solver_residual,
        })
    }

    /// Independent route to the same rewards: iterate `r <- DR + M r` from `DR`.
    pub fn solve_rewards_fixed_point(
        &self,
        x: &StrategyProfile,
        tol: f64,
        max_iter: usize,
    ) -> Result<FixedPointSolution> {
        self.check_strategy(x)?;
        let n = self.n();
        let direct = self.direct_rewards_unchecked(x);
        let op = self.infiltration_operator(x);
        let mut r = direct.clone();
        let mut change = f64::INFINITY;
        for iteration in 1..=max_iter {
            let next: Vec<f64> = (0..n)
                .map(|i| direct[i] + (0..n).map(|j| op[i * n + j] * r[j]).sum::<f64>())
                .collect();
            change = next
                .iter()
                .zip(&r)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            r = next;
            if change <= tol {
                return Ok(FixedPointSolution {
                    rewards: r,
                    iterations: iteration,
                });
            }
        }
        Err(Error::FixedPointDiverged {
            iterations: max_iter,
            change,
        })
    }

    /// Utility factor in front of `r_i`: `1 - alpha_i + m_i alpha_i / (m_i + sum_j x_ji)`.
    pub fn utility_coefficients(&self, x: &StrategyProfile) -> Vec<f64> {
        (0..self.n())
            .map(|i| {
                let incoming = x.incoming(i);
                if incoming == 0.0 {
                    return 1.0;
                }
                let a = self.alpha(i);
                let mi = self.pool_power(i);
                1.0 - a + mi * a / (mi + incoming)
            })
            .collect()
    }

    /// Derivative of every pool's total reward with respect to `x_ij`, by
    /// implicit differentiation of `(I - M) r = DR`.
    pub fn reward_gradient(&self, x: &StrategyProfile, i: usize, j: usize) -> Result<Vec<f64>> {
        self.check_strategy(x)?;
        if i == j || i >= self.n() || j >= self.n() {
            return Err(Error::Domain {
                what: "gradient coordinate",
                value: (i * self.n() + j) as f64,
                lo: 0.0,
                hi: (self.n() * self.n()) as f64,
            });
        }
        self.reward_gradient_unchecked(x, i, j)
    }

    pub(crate) fn reward_gradient_unchecked(
        &self,
        x: &StrategyProfile,
        i: usize,
        j: usize,
    ) -> Result<Vec<f64>> {
        let n = self.n();
        let dr = self.direct_rewards_unchecked(x);
        let op = self.infiltration_operator(x);
        let lu = self.factor_system(&op)?;
        let r = lu.solve(&dr);
        let honest_world = self.total_power() - x.total();
        let registered = self.registered_power(x, j);
        let alpha = self.alpha(j);
        // d DR_k / d x_ij = (DR_k - [k == i]) / (m - S)
        // d M_kj / d x_ij = alpha_j ([k == i] T_j - x_kj) / T_j^2, other columns fixed
        let rhs: Vec<f64> = (0..n)
            .map(|k| {
                let d_direct = (dr[k] - if k == i { 1.0 } else { 0.0 }) / honest_world;
                let d_op = if k == j {
                    0.0
                } else {
                    let own = if k == i { registered } else { 0.0 };
                    alpha * (own - x.get(k, j)) / (registered * registered)
                };
                d_direct + d_op * r[j]
            })
            .collect();
        Ok(lu.solve(&rhs))
    }

    /// Total power used for honest mining: `m - sum_ij x_ij`. Power outside
    /// the modelled pools counts.
    pub fn social_welfare(&self, x: &StrategyProfile) -> Result<f64> {
        self.check_strategy(x)?;
        Ok(self.total_power() - x.total())
    }
}

/// Output of the fixed-point cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSolution {
    pub rewards: Vec<f64>,
    pub iterations: usize,
}

/// Per-pool rewards for one profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub direct: Vec<f64>,
    pub infiltration: Vec<f64>,
    pub total: Vec<f64>,
    pub utility: Vec<f64>,
    pub solver_residual: f64,
}

/// Infiltration matrix: `x_ij` is the power pool `i` registers inside pool `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct StrategyProfile {
    n: usize,
    entries: Vec<f64>,
}

impl StrategyProfile {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// Two-pool shorthand: pool 0 sends `x1` into pool 1, pool 1 sends `x2` into pool 0.
    pub fn two_pool(x1: f64, x2: f64) -> Self {
        Self {
            n: 2,
            entries: vec![0.0, x1, x2, 0.0],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "infiltration row",
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn set_row(&mut self, i: usize, row: &[f64]) {
        self.entries[i * self.n..(i + 1) * self.n].copy_from_slice(row);
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Power pool `i` sends out.
    pub fn outgoing(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    /// Power registered inside pool `j` by other pools.
    pub fn incoming(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, j)).sum()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    /// Largest absolute entry-wise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

impl From<StrategyProfile> for Vec<Vec<f64>> {
    fn from(x: StrategyProfile) -> Self {
        x.rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for StrategyProfile {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gstar() -> ValidatedGame {
        GameConfig::new(18.0, vec![2.0, 3.0], vec![0.8, 0.8])
            .validate()
            .unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn validate_records_preconditions() {
        let g = gstar();
        assert!(g.preconditions().zero_profile_holds());
        assert!(g.preconditions().two_pool_holds());
        assert!(close(g.zero_profile_alpha_bound(), 5.0 / 6.0, 1e-15));

        let loose = GameConfig::new(18.0, vec![2.0, 3.0], vec![0.9, 0.9])
            .validate()
            .unwrap();
        assert_eq!(loose.preconditions().zero_profile_bound, vec![false, false]);
    }

    #[test]
    fn validate_rejects_bad_configs() {
        let over = GameConfig::new(4.0, vec![2.0, 3.0], vec![0.8, 0.8]).validate();
        assert!(matches!(over, Err(Error::PowerBudgetExceeded { .. })));
        let neg = GameConfig::new(18.0, vec![2.0, 0.0], vec![0.8, 0.8]).validate();
        assert!(matches!(neg, Err(Error::NonPositivePower { pool: 1, .. })));
        let alpha = GameConfig::new(18.0, vec![2.0, 3.0], vec![1.2, 0.8]).validate();
        assert!(matches!(alpha, Err(Error::AlphaOutOfRange { pool: 0, .. })));
        let single = GameConfig::new(18.0, vec![2.0], vec![0.8]).validate();
        assert!(matches!(single, Err(Error::TooFewPools(1))));
    }

    #[test]
    fn strategy_errors() {
        let g = gstar();
        assert!(g.check_strategy(&StrategyProfile::zeros(2)).is_ok());
        let over = StrategyProfile::two_pool(2.5, 0.0);
        assert!(matches!(
            g.check_strategy(&over),
            Err(Error::BudgetExceeded { pool: 0, .. })
        ));
        let mut selfish = StrategyProfile::zeros(2);
        selfish.set(0, 0, 0.1);
        assert!(matches!(
            g.check_strategy(&selfish),
            Err(Error::SelfInfiltration { pool: 0, .. })
        ));
        let neg = StrategyProfile::two_pool(-0.1, 0.0);
        assert!(matches!(
            g.check_strategy(&neg),
            Err(Error::NegativeInfiltration { .. })
        ));
    }

    #[test]
    fn degenerate_denominator_rejected() {
        let g = GameConfig::new(5.0, vec![2.0, 3.0], vec![0.5, 0.5])
            .validate()
            .unwrap();
        let all_in = StrategyProfile::two_pool(2.0, 3.0);
        assert!(matches!(
            g.check_strategy(&all_in),
            Err(Error::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn direct_reward_examples() {
        let g = gstar();
        let dr = g.direct_rewards(&StrategyProfile::zeros(2)).unwrap();
        assert!(close(dr[0], 2.0 / 18.0, 1e-15) && close(dr[1], 3.0 / 18.0, 1e-15));
        let dr = g.direct_rewards(&StrategyProfile::two_pool(1.0, 0.0)).unwrap();
        assert!(close(dr[0], 1.0 / 17.0, 1e-15) && close(dr[1], 3.0 / 17.0, 1e-15));
        let dr = g.direct_rewards(&StrategyProfile::two_pool(2.0, 0.0)).unwrap();
        assert_eq!(dr[0], 0.0);
    }

    #[test]
    fn solve_rewards_examples() {
        let g = gstar();
        let b = g.solve_rewards(&StrategyProfile::zeros(2)).unwrap();
        assert!(close(b.total[0], 1.0 / 9.0, 1e-12) && close(b.total[1], 1.0 / 6.0, 1e-12));
        assert_eq!(b.utility, b.total);

        // back-substitution: IR_2 = 0 so r_2 = 3/17, r_1 = 1/17 + 0.8 (3/17)(1/4)
        let b = g.solve_rewards(&StrategyProfile::two_pool(1.0, 0.0)).unwrap();
        let r2 = 3.0 / 17.0;
        let r1 = 1.0 / 17.0 + 0.8 * r2 * 0.25;
        assert!(close(b.total[0], r1, 1e-12) && close(r1, 1.6 / 17.0, 1e-15));
        assert!(close(b.total[1], r2, 1e-12));
        assert!(close(b.utility[0], 1.6 / 17.0, 1e-12));
        assert!(close(b.utility[1], 2.4 / 17.0, 1e-12));
        assert!(b.total[0] < 1.0 / 9.0);
        assert!(b.solver_residual <= SOLVER_RESIDUAL_TOL);
    }

    #[test]
    fn social_welfare_examples() {
        let g = gstar();
        assert_eq!(g.social_welfare(&StrategyProfile::zeros(2)).unwrap(), 18.0);
        assert_eq!(g.social_welfare(&StrategyProfile::two_pool(1.0, 0.0)).unwrap(), 17.0);
        assert_eq!(g.social_welfare(&StrategyProfile::two_pool(2.0, 3.0)).unwrap(), 13.0);
    }

    #[test]
    fn fixed_point_matches_direct_solve() {
        let g = GameConfig::new(30.0, vec![2.0, 3.0, 4.0], vec![0.9, 0.6, 1.0])
            .validate()
            .unwrap();
        let x = StrategyProfile::from_rows(vec![
            vec![0.0, 1.0, 0.5],
            vec![0.3, 0.0, 2.0],
            vec![1.0, 1.5, 0.0],
        ])
        .unwrap();
        let direct = g.solve_rewards(&x).unwrap();
        let fp = g
            .solve_rewards_fixed_point(&x, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER)
            .unwrap();
        for (a, b) in direct.total.iter().zip(&fp.rewards) {
            assert!(close(*a, *b, 1e-10));
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let g = GameConfig::new(30.0, vec![2.0, 3.0, 4.0], vec![0.9, 0.6, 1.0])
            .validate()
            .unwrap();
        let x = StrategyProfile::from_rows(vec![
            vec![0.0, 0.7, 0.5],
            vec![0.3, 0.0, 1.0],
            vec![1.0, 1.5, 0.0],
        ])
        .unwrap();
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            let grad = g.reward_gradient(&x, i, j).unwrap();
            let h = 1e-5;
            let mut up = x.clone();
            up.set(i, j, x.get(i, j) + h);
            let mut down = x.clone();
            down.set(i, j, x.get(i, j) - h);
            let ru = g.solve_rewards(&up).unwrap().total;
            let rd = g.solve_rewards(&down).unwrap().total;
            for k in 0..3 {
                let fd = (ru[k] - rd[k]) / (2.0 * h);
                assert!(close(grad[k], fd, 1e-8), "{i}{j} pool {k}: {} vs {fd}", grad[k]);
            }
        }
    }

    #[test]
    fn profile_serde_as_rows() {
        let x = StrategyProfile::two_pool(1.0, 0.5);
        let rows: Vec<Vec<f64>> = x.clone().into();
        assert_eq!(rows, vec![vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(StrategyProfile::from_rows(vec![vec![0.0, 1.0], vec![0.5]]).is_err());
    }
}
