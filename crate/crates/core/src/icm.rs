//! Independent Chip Model: podium orderings weighted by chip-share quotients.

use crate::error::{Error, Result};
use crate::report::{EquityReport, Model};
use crate::stacks::{canonicalize, symmetrize_ties, Chips, PrizeSchedule, StackVector};

struct Enumerator<'a> {
    stacks: &'a [Chips],
    taken: Vec<bool>,
    depth: usize,
    /// `positions[player][k]` is the probability of finishing at position k + 1.
    positions: Vec<Vec<f64>>,
    nodes: u64,
}

impl Enumerator<'_> {
    fn visit(&mut self, position: usize, remaining: Chips, prob: f64) {
        let remaining_f = remaining as f64;
        for seat in 0..self.stacks.len() {
            if self.taken[seat] {
                continue;
            }
            self.nodes += 1;
            let stack = self.stacks[seat];
            let p = prob * (stack as f64 / remaining_f);
            self.positions[seat][position] += p;
            if position + 1 < self.depth {
                self.taken[seat] = true;
                self.visit(position + 1, remaining - stack, p);
                self.taken[seat] = false;
            }
        }
    }
}

/// Finish-position probabilities for the first `depth` podium positions.
///
/// Returns the matrix and the number of podium prefixes enumerated. Inputs are
/// assumed valid; stacks must be positive.
pub(crate) fn positions_unchecked(stacks: &[Chips], depth: usize) -> (Vec<Vec<f64>>, u64) {
    let n = stacks.len();
    let canon = canonicalize(stacks);
    let mut e = Enumerator {
        stacks: &canon.stacks,
        taken: vec![false; n],
        depth: depth.min(n),
        positions: vec![vec![0.0; n]; n],
        nodes: 0,
    };
    let total = canon.stacks.iter().sum();
    if e.depth > 0 {
        e.visit(0, total, 1.0);
    }
    let mut positions = canon.restore(&e.positions);
    for k in 0..n {
        let mut column: Vec<f64> = positions.iter().map(|row| row[k]).collect();
        symmetrize_ties(stacks, &mut column);
        for (row, v) in positions.iter_mut().zip(column) {
            row[k] = v;
        }
    }
    (positions, e.nodes)
}

/// Number of leading positions that carry a non-zero prize.
fn paid_depth(prizes: &PrizeSchedule) -> usize {
    prizes
        .as_slice()
        .iter()
        .rposition(|&p| p > 0.0)
        .map_or(0, |i| i + 1)
}

/// ICM money expectation of every player.
pub fn icm_equities(stacks: &StackVector, prizes: &PrizeSchedule) -> Result<EquityReport> {
    prizes.check_fits(stacks.len())?;
    let s = stacks.as_slice();
    let (positions, nodes) = positions_unchecked(s, paid_depth(prizes).max(1));
    let mut equity: Vec<f64> = positions
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(k, q)| q * prizes.prize_at(k + 1))
                .sum()
        })
        .collect();
    symmetrize_ties(s, &mut equity);
    let total = stacks.total() as f64;
    Ok(EquityReport {
        model: Model::Icm,
        equity,
        win_prob: s.iter().map(|&x| x as f64 / total).collect(),
        explored_mass: 1.0,
        nodes_visited: nodes,
        pruned_nodes: 0,
    })
}

/// Probability that each player finishes at each of the first `podium_depth`
/// positions; `result[player][k]` is position k + 1. Columns past the depth are 0.
pub fn icm_finish_distribution(stacks: &StackVector, podium_depth: usize) -> Result<Vec<Vec<f64>>> {
    if podium_depth == 0 || podium_depth > stacks.len() {
        return Err(Error::InvalidInput(format!(
            "podium depth {podium_depth} must be between 1 and {}",
            stacks.len()
        )));
    }
    Ok(positions_unchecked(stacks.as_slice(), podium_depth).0)
}
