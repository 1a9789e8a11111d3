use thiserror::Error;

/// Errors produced by the equity engines and analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("at least one player is required")]
    EmptyStacks,
    #[error("stack of player {player} is {value}; every stack must be strictly positive")]
    NonPositiveStack { player: usize, value: u64 },
    #[error("{prizes} prizes given for {players} players; at most one prize per player")]
    TooManyPrizes { prizes: usize, players: usize },
    #[error("at least one prize is required")]
    NoPrizes,
    #[error("prize {index} ({value}) is larger than the prize before it; prizes must be listed best first")]
    IncreasingPrizes { index: usize, value: f64 },
    #[error("prize {index} is {value}; prizes must be finite and non-negative")]
    InvalidPrize { index: usize, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("win and lose branches pay the hero the same amount; call and fold never cross")]
    NoCrossing,
    #[error("compute budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("state budget of {budget} states exceeded")]
    StateBudgetExceeded { budget: usize },
    #[error("value iteration did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by resource limits.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::BudgetExceeded(_)
                | Error::StateBudgetExceeded { .. }
                | Error::NotConverged { .. }
                | Error::Invariant(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
