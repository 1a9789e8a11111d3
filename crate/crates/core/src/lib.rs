//! Prize equity for poker tournament final tables.
//!
//! Two models are provided. The Independent Chip Model weights every podium
//! ordering by chip-share quotients. The dependent chip model plays out an
//! idealized game tree where every active player is all-in each hand and wins
//! it with equal probability, so finishing chances follow from how chips
//! actually move between stacks.

pub mod analysis;
pub mod dcm;
pub mod error;
pub mod hand;
pub mod icm;
pub mod oracle;
pub mod report;
pub mod stacks;
pub mod two_player;
pub mod wire;

pub use dcm::{dcm_equities, dcm_run, Budget, DcmConfig, DcmOutcome, Execution, LeafPolicy};
pub use error::{Error, Result};
pub use hand::{redistribute_chips, resolve_bankruptcy, tie_blocks, TieBlock};
pub use icm::{icm_equities, icm_finish_distribution};
pub use report::{EquityReport, Model};
pub use stacks::{canonicalize, Canonical, Chips, PrizeSchedule, StackVector};
pub use two_player::{
    two_player_expected_prize, two_player_win_probability, two_player_win_probability_recursive,
    RecursiveEstimate, TruncationTerm,
};
