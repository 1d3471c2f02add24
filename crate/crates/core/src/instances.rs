//! Seeded random games and profiles for property suites and campaigns.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::{GameConfig, StrategyProfile, ValidatedGame};
use crate::two_pool::TwoPoolGame;

/// How pool alphas are drawn once powers are fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaRule {
    /// Every alpha sits exactly on the zero-profile bound `1 - m_max / m`.
    AtBound,
    /// Uniform on `(1/2, bound]`, the bound being `1 - m_max / m` for n-pool
    /// games and the pool's own two-pool bound for two pools.
    AboveHalf,
    /// Uniform on `[lo, hi]`, for exploratory runs.
    Range(f64, f64),
}

/// Recipe for random games.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameSampler {
    pub total_power: (f64, f64),
    /// Range of `sum_i m_i / m`.
    pub pool_share: (f64, f64),
    pub alpha: AlphaRule,
}

impl Default for GameSampler {
    fn default() -> Self {
        Self {
            total_power: (10.0, 1000.0),
            pool_share: (0.05, 1.0 / 3.0),
            alpha: AlphaRule::AboveHalf,
        }
    }
}

impl GameSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> ValidatedGame {
        assert!(n >= 2);
        let m = rng.gen_range(self.total_power.0..=self.total_power.1);
        let share = rng.gen_range(self.pool_share.0..=self.pool_share.1);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..=1.0)).collect();
        let sum: f64 = weights.iter().sum();
        let powers: Vec<f64> = weights.iter().map(|w| w / sum * share * m).collect();
        let max = powers.iter().copied().fold(0.0, f64::max);
        let bound = 1.0 - max / m;
        let alphas = (0..n).map(|_| draw_alpha(rng, self.alpha, bound)).collect();
        GameConfig::new(m, powers, alphas)
            .validate()
            .expect("sampled game is valid")
    }
}

fn draw_alpha<R: Rng + ?Sized>(rng: &mut R, rule: AlphaRule, bound: f64) -> f64 {
    match rule {
        AlphaRule::AtBound => bound,
        // 1 - u lies in (0, 1], so the draw lands in (1/2, bound]
        AlphaRule::AboveHalf => 0.5 + (bound - 0.5) * (1.0 - rng.gen::<f64>()),
        AlphaRule::Range(lo, hi) => rng.gen_range(lo..=hi),
    }
}

/// Recipe for two-pool games that meet the uniqueness bounds.
///
/// The combined share `(m1 + m2) / m` stays in `[0.2, 0.33]` and each pool
/// holds 20–80% of it. Below a combined share of about 0.2 the classical
/// game's incentive to attack at the zero profile becomes tiny, so these
/// ranges keep the alpha = 1 contrast measurable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPoolSampler {
    pub total_power: (f64, f64),
    pub combined_share: (f64, f64),
    pub split: (f64, f64),
}

impl Default for TwoPoolSampler {
    fn default() -> Self {
        Self {
            total_power: (10.0, 1000.0),
            combined_share: (0.2, 0.33),
            split: (0.2, 0.8),
        }
    }
}

impl TwoPoolSampler {
    /// Draws a game with `alpha_i` uniform on `(1/2, bound_i]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TwoPoolGame {
        let m = rng.gen_range(self.total_power.0..=self.total_power.1);
        let s = rng.gen_range(self.combined_share.0..=self.combined_share.1);
        let f = rng.gen_range(self.split.0..=self.split.1);
        let m1 = s * f * m;
        let m2 = s * m - m1;
        let a1 = draw_alpha(rng, AlphaRule::AboveHalf, 1.0 - m2 / m);
        let a2 = draw_alpha(rng, AlphaRule::AboveHalf, 1.0 - m1 / m);
        TwoPoolGame::new(m, m1, m2, a1, a2).expect("sampled two-pool game is valid")
    }
}

/// `count` two-pool games from one seed.
pub fn two_pool_campaign(seed: u64, count: usize) -> Vec<TwoPoolGame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = TwoPoolSampler::default();
    (0..count).map(|_| sampler.sample(&mut rng)).collect()
}

/// `count` games with `n` uniform on `2..=6`, every alpha on the zero-profile bound.
pub fn theorem1_campaign(seed: u64, count: usize) -> Vec<ValidatedGame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = GameSampler {
        alpha: AlphaRule::AtBound,
        ..GameSampler::default()
    };
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=6);
            sampler.sample(&mut rng, n)
        })
        .collect()
}

/// Uniform point of `{v >= 0 : sum v <= budget}` in `dims` dimensions
/// (normalised exponential spacings, with one slack coordinate).
pub fn sample_budget_simplex<R: Rng + ?Sized>(rng: &mut R, dims: usize, budget: f64) -> Vec<f64> {
    let mut e: Vec<f64> = (0..=dims).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let sum: f64 = e.iter().sum();
    e.truncate(dims);
    e.iter().map(|v| v / sum * budget).collect()
}

/// A feasible profile: each pool's row is uniform on its budget simplex.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R, game: &ValidatedGame) -> StrategyProfile {
    let n = game.n();
    let mut x = StrategyProfile::zeros(n);
    loop {
        for i in 0..n {
            let v = sample_budget_simplex(rng, n - 1, game.pool_power(i));
            let mut it = v.into_iter();
            for j in (0..n).filter(|&j| j != i) {
                x.set(i, j, it.next().expect("n - 1 coordinates"));
            }
        }
        // only binds when the pools own all of the power
        if x.total() < game.total_power() * (1.0 - 1e-9) {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pool_games_meet_bounds() {
        for g in two_pool_campaign(7, 200) {
            let c = g.conditions();
            assert!(c.holds(), "{g:?}");
            for p in crate::two_pool::Player::BOTH {
                assert!(g.alpha(p) > 0.5);
            }
        }
    }

    #[test]
    fn theorem1_games_sit_on_bound() {
        for g in theorem1_campaign(3, 100) {
            assert!((2..=6).contains(&g.n()));
            assert!(g.preconditions().zero_profile_holds());
            let sum: f64 = g.pool_powers().iter().sum();
            assert!(sum <= g.total_power() / 3.0 + 1e-9);
        }
    }

    #[test]
    fn simplex_samples_respect_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let v = sample_budget_simplex(&mut rng, 4, 2.5);
            assert!(v.iter().all(|&c| c >= 0.0));
            assert!(v.iter().sum::<f64>() <= 2.5);
        }
    }

    #[test]
    fn random_profiles_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sampler = GameSampler::default();
        for n in 2..=6 {
            let g = sampler.sample(&mut rng, n);
            for _ in 0..50 {
                let x = random_profile(&mut rng, &g);
                g.check_strategy(&x).unwrap();
            }
        }
    }
}
