use thiserror::Error;

/// Everything that can go wrong while building, solving or verifying a game.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a game needs at least two pools, got {0}")]
    TooFewPools(usize),

    #[error("expected {expected} entries for {what}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("pool {pool} has non-positive mining power {power}")]
    NonPositivePower { pool: usize, power: f64 },

    #[error("pool powers sum to {pools}, exceeding the total power {total}")]
    PowerBudgetExceeded { pools: f64, total: f64 },

    #[error("alpha of pool {pool} is {alpha}, outside [0, 1]")]
    AlphaOutOfRange { pool: usize, alpha: f64 },

    #[error("negative infiltration {value} from pool {from} into pool {to}")]
    NegativeInfiltration { from: usize, to: usize, value: f64 },

    #[error("pool {pool} cannot infiltrate itself (x[{pool}][{pool}] = {value})")]
    SelfInfiltration { pool: usize, value: f64 },

    #[error("pool {pool} sends {used} but only owns {budget}")]
    BudgetExceeded { pool: usize, used: f64, budget: f64 },

    #[error("total infiltration {infiltration} leaves no honest power out of {total}")]
    DegenerateDenominator { infiltration: f64, total: f64 },

    #[error("reward system is singular (pivot {pivot:e})")]
    SingularSystem { pivot: f64 },

    #[error("reward system residual {residual:e} exceeds {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("fixed-point iteration did not converge in {iterations} iterations (last change {change:e})")]
    FixedPointDiverged { iterations: usize, change: f64 },

    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("coordinate ascent for pool {player} stopped after {sweeps} sweeps without converging")]
    NoConvergence {
        player: usize,
        sweeps: usize,
        best_value: f64,
        best_strategy: Vec<f64>,
    },

    #[error("no certified equilibrium to measure")]
    NoCertifiedEquilibrium,

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
