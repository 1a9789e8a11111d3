//! Heads-up closed forms and the truncated recursive evaluation they replace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stacks::Chips;

/// Value substituted for an unresolved node when the recursion is cut off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationTerm {
    /// 1 if the player is chip leader, 0 if behind, 1/2 when even.
    #[default]
    StackOrder,
    /// The chip share `x / (x + y)`.
    Proportional,
}

/// Result of the truncated recursion for a heads-up match.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursiveEstimate {
    pub probability: f64,
    /// Probability mass still unresolved at the cut; the estimate is within this of the limit.
    pub error_bound: f64,
    /// Hands expanded along the recursion.
    pub hands: u32,
}

fn check_pair(a: Chips, b: Chips) -> Result<()> {
    if a.checked_add(b).is_none_or(|t| t == 0) {
        return Err(Error::InvalidInput(
            "heads-up stacks must have a positive total".into(),
        ));
    }
    Ok(())
}

/// Probability that the player holding `a` chips wins a heads-up all-in race
/// against `b` chips.
pub fn two_player_win_probability(a: Chips, b: Chips) -> Result<f64> {
    check_pair(a, b)?;
    Ok(a as f64 / (a as f64 + b as f64))
}

/// Evaluates `p(a,b) = p(a+e, b-e)/2 + p(a-e, b+e)/2` with `e = min(a,b)`,
/// expanding at most `max_depth - 1` hands (the root is depth 1).
///
/// One child of every node is terminal, so the tree is a single chain and the
/// unresolved mass halves with every hand.
pub fn two_player_win_probability_recursive(
    a: Chips,
    b: Chips,
    max_depth: u32,
    truncation: TruncationTerm,
) -> Result<RecursiveEstimate> {
    check_pair(a, b)?;
    if max_depth == 0 {
        return Err(Error::InvalidConfig("max_depth must be at least 1".into()));
    }
    let (mut x, mut y) = (a, b);
    let mut resolved = 0.0;
    let mut mass = 1.0;
    let mut depth = 1;
    loop {
        if y == 0 {
            resolved += mass;
            break;
        }
        if x == 0 {
            break;
        }
        if x == y {
            resolved += mass * 0.5;
            break;
        }
        if depth == max_depth {
            let term = match truncation {
                TruncationTerm::StackOrder if x > y => 1.0,
                TruncationTerm::StackOrder => 0.0,
                TruncationTerm::Proportional => x as f64 / (x + y) as f64,
            };
            return Ok(RecursiveEstimate {
                probability: resolved + mass * term,
                error_bound: mass,
                hands: depth - 1,
            });
        }
        let e = x.min(y);
        mass *= 0.5;
        if x > y {
            // the branch where the leader wins ends the match
            resolved += mass;
            (x, y) = (x - e, y + e);
        } else {
            (x, y) = (x + e, y - e);
        }
        depth += 1;
    }
    Ok(RecursiveEstimate {
        probability: resolved,
        error_bound: 0.0,
        hands: depth - 1,
    })
}

/// Expected prize `p·P1 + (1 − p)·P2` for the player holding `a` chips.
pub fn two_player_expected_prize(a: Chips, b: Chips, first: f64, second: f64) -> Result<f64> {
    if !(first.is_finite() && second.is_finite()) || second < 0.0 || first < second {
        return Err(Error::InvalidInput(format!(
            "heads-up prizes must satisfy first >= second >= 0 (got {first}, {second})"
        )));
    }
    let p = two_player_win_probability(a, b)?;
    Ok(p * first + (1.0 - p) * second)
}
