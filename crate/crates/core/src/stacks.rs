//! Table state: chip stacks, prize schedules and seat canonicalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A chip count. Chips are integral so tie detection is exact.
pub type Chips = u64;

/// Chip counts of the players still at the table, indexed by seat.
///
/// Player identities are the seat indices `0..n` (shown to users as `1..=n`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StackVector(Vec<Chips>);

impl StackVector {
    /// Validates that there is at least one player and every stack is positive.
    pub fn new(stacks: Vec<Chips>) -> Result<Self> {
        if stacks.is_empty() {
            return Err(Error::EmptyStacks);
        }
        if let Some(seat) = stacks.iter().position(|&s| s == 0) {
            return Err(Error::NonPositiveStack {
                player: seat + 1,
                value: 0,
            });
        }
        let total = stacks
            .iter()
            .try_fold(0u64, |acc, &s| acc.checked_add(s))
            .ok_or_else(|| Error::InvalidInput("total chip count overflows".into()))?;
        // keep the total exactly representable as f64 so probability ratios stay exact
        if total > (1u64 << 53) {
            return Err(Error::InvalidInput(format!(
                "total chip count {total} exceeds 2^53"
            )));
        }
        Ok(Self(stacks))
    }

    pub fn as_slice(&self) -> &[Chips] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Chips {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<Chips> {
        self.0
    }
}

impl AsRef<[Chips]> for StackVector {
    fn as_ref(&self) -> &[Chips] {
        &self.0
    }
}

/// Prize amounts for the paid podium positions, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrizeSchedule(Vec<f64>);

impl PrizeSchedule {
    pub fn new(prizes: Vec<f64>) -> Result<Self> {
        if prizes.is_empty() {
            return Err(Error::NoPrizes);
        }
        for (index, &value) in prizes.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidPrize {
                    index: index + 1,
                    value,
                });
            }
            if index > 0 && value > prizes[index - 1] {
                return Err(Error::IncreasingPrizes {
                    index: index + 1,
                    value,
                });
            }
        }
        Ok(Self(prizes))
    }

    /// Best-first prizes as supplied.
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Prize for podium position `position` (1 = winner); unpaid positions get 0.
    pub fn prize_at(&self, position: usize) -> f64 {
        position
            .checked_sub(1)
            .and_then(|i| self.0.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// Checks the schedule against a table of `players` players.
    pub fn check_fits(&self, players: usize) -> Result<()> {
        if self.0.len() > players {
            return Err(Error::TooManyPrizes {
                prizes: self.0.len(),
                players,
            });
        }
        Ok(())
    }

    /// Best-first prizes padded with zeros to `players` entries.
    pub fn padded_best_first(&self, players: usize) -> Vec<f64> {
        (1..=players).map(|pos| self.prize_at(pos)).collect()
    }

    /// Worst-first prizes padded with zeros to `players` entries.
    ///
    /// This is the working order of the tree search: busted players consume
    /// the list from the front and the last entry is the first prize.
    pub fn padded_worst_first(&self, players: usize) -> Vec<f64> {
        let mut p = self.padded_best_first(players);
        p.reverse();
        p
    }
}

/// Seats sorted by ascending stack, with the original identities dragged along.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub stacks: Vec<Chips>,
    /// `ids[k]` is the original seat of the k-th smallest stack.
    pub ids: Vec<usize>,
}

impl Canonical {
    /// Maps per-canonical-position values back to original seats.
    pub fn restore<T: Clone + Default>(&self, values: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); values.len()];
        for (k, &seat) in self.ids.iter().enumerate() {
            out[seat] = values[k].clone();
        }
        out
    }
}

/// Sorts stacks ascending. Equal stacks keep their seat order.
pub fn canonicalize(stacks: &[Chips]) -> Canonical {
    let mut ids: Vec<usize> = (0..stacks.len()).collect();
    ids.sort_by_key(|&i| stacks[i]);
    Canonical {
        stacks: ids.iter().map(|&i| stacks[i]).collect(),
        ids,
    }
}

/// Replace the values of players holding equal stacks by their common mean.
///
/// Players with equal stacks are interchangeable in both models, so their
/// values agree mathematically; this makes them agree bit for bit.
pub(crate) fn symmetrize_ties(stacks: &[Chips], values: &mut [f64]) {
    let canon = canonicalize(stacks);
    let mut start = 0;
    while start < canon.stacks.len() {
        let mut end = start + 1;
        while end < canon.stacks.len() && canon.stacks[end] == canon.stacks[start] {
            end += 1;
        }
        if end - start > 1 {
            let members = &canon.ids[start..end];
            let sum: f64 = members.iter().map(|&s| values[s]).sum();
            let mean = sum / (end - start) as f64;
            for &s in members {
                values[s] = mean;
            }
        }
        start = end;
    }
}
