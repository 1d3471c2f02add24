//! Pool block withholding games in which each pool manager keeps back a
//! `1 - alpha` share of revenue to award the miner who finds a block.
//!
//! [`ValidatedGame`] solves the coupled reward system for any infiltration
//! matrix, [`two_pool`] holds the closed forms for two pools, and
//! [`equilibrium`] searches for and certifies Nash equilibria. [`sim`] is an
//! independent Monte Carlo check of the reward formulas.
//!
//! ```
//! use dpbw_core::{GameConfig, StrategyProfile};
//!
//! let game = GameConfig::new(18.0, vec![2.0, 3.0], vec![0.8, 0.8]).validate()?;
//! let rewards = game.solve_rewards(&StrategyProfile::two_pool(1.0, 0.0))?;
//! assert!((rewards.total[1] - 3.0 / 17.0).abs() < 1e-15);
//! # Ok::<(), dpbw_core::Error>(())
//! ```

mod error;
mod linalg;
mod par;

pub mod equilibrium;
pub mod game;
pub mod instances;
pub mod scalar;
pub mod sim;
pub mod two_pool;

pub use error::{Error, Result};
pub use game::{
    FixedPointSolution, GameConfig, Preconditions, RewardBreakdown, StrategyProfile, TwoPoolConditions,
    ValidatedGame,
};
pub use two_pool::{Player, TwoPoolGame};
