//! One all-in hand: chip transfer by effective stacks and payment of busted players.

use crate::error::{Error, Result};
use crate::stacks::Chips;

/// Stacks after `winner` takes `min(S_winner, S_i)` from every other player,
/// and the seats left with no chips.
pub fn redistribute_chips(stacks: &[Chips], winner: usize) -> Result<(Vec<Chips>, Vec<usize>)> {
    if winner >= stacks.len() {
        return Err(Error::InvalidInput(format!(
            "winner seat {} out of range for {} players",
            winner + 1,
            stacks.len()
        )));
    }
    if let Some(seat) = stacks.iter().position(|&s| s == 0) {
        return Err(Error::NonPositiveStack {
            player: seat + 1,
            value: 0,
        });
    }
    let mut next = stacks.to_vec();
    transfer(&mut next, winner);
    let busted = next
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 0)
        .map(|(i, _)| i)
        .collect();
    Ok((next, busted))
}

/// In-place chip transfer; returns the number of players busted.
pub(crate) fn transfer(stacks: &mut [Chips], winner: usize) -> usize {
    let w = stacks[winner];
    let mut gain = 0;
    let mut busted = 0;
    for (seat, s) in stacks.iter_mut().enumerate() {
        if seat == winner {
            continue;
        }
        let lost = (*s).min(w);
        *s -= lost;
        gain += lost;
        if *s == 0 {
            busted += 1;
        }
    }
    stacks[winner] += gain;
    busted
}

/// A run of busted players with equal entering stacks sharing consecutive prizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieBlock {
    /// First index into the ascending-sorted busted list.
    pub start: usize,
    /// One past the last index.
    pub end: usize,
    /// Money each member receives before weighting by the node probability.
    pub share: f64,
}

impl TieBlock {
    pub fn size(&self) -> usize {
        self.end - self.start
    }
}

/// Visits maximal runs of equal values in an ascending slice as `(start, end)`.
pub(crate) fn for_each_run(sorted: &[Chips], mut f: impl FnMut(usize, usize)) {
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        f(start, end);
        start = end;
    }
}

/// Splits `prizes` (worst first, one per player) over the tie groups of
/// `sorted_stacks` (ascending).
pub fn tie_blocks(sorted_stacks: &[Chips], prizes: &[f64]) -> Result<Vec<TieBlock>> {
    if sorted_stacks.len() != prizes.len() {
        return Err(Error::Invariant(format!(
            "{} busted players but {} prizes in the block",
            sorted_stacks.len(),
            prizes.len()
        )));
    }
    if sorted_stacks.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Invariant("busted stacks must be sorted ascending".into()));
    }
    let mut blocks = Vec::new();
    for_each_run(sorted_stacks, |start, end| {
        let sum: f64 = prizes[start..end].iter().sum();
        blocks.push(TieBlock {
            start,
            end,
            share: sum / (end - start) as f64,
        });
    });
    Ok(blocks)
}

/// Pays players busted in the same hand.
///
/// `busted` holds `(player, stack when entering the hand)`; `prizes` are the
/// `L` worst prizes still unassigned, worst first. Smaller entering stacks
/// finish lower; equal stacks split their prizes evenly. Each payout is
/// weighted by `node_prob`. The result is ordered by ascending entering stack.
pub fn resolve_bankruptcy(
    busted: &[(usize, Chips)],
    prizes: &[f64],
    node_prob: f64,
) -> Result<Vec<(usize, f64)>> {
    if busted.is_empty() {
        return Err(Error::Invariant("bankruptcy with no busted players".into()));
    }
    let mut sorted = busted.to_vec();
    sorted.sort_by_key(|&(_, s)| s);
    let mut prizes = prizes.to_vec();
    prizes.sort_by(f64::total_cmp);
    let stacks: Vec<Chips> = sorted.iter().map(|&(_, s)| s).collect();
    let blocks = tie_blocks(&stacks, &prizes)?;
    let mut out = Vec::with_capacity(sorted.len());
    for b in blocks {
        for &(player, _) in &sorted[b.start..b.end] {
            out.push((player, node_prob * b.share));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heads_up_transfers() {
        assert_eq!(redistribute_chips(&[1000, 500], 0).unwrap(), (vec![1500, 0], vec![1]));
        assert_eq!(redistribute_chips(&[1000, 500], 1).unwrap(), (vec![500, 1000], vec![]));
    }

    #[test]
    fn short_stack_doubles_through_everyone() {
        assert_eq!(
            redistribute_chips(&[1000, 500, 100], 2).unwrap(),
            (vec![900, 400, 300], vec![])
        );
        assert_eq!(
            redistribute_chips(&[1000, 500, 100], 1).unwrap(),
            (vec![500, 1100, 0], vec![2])
        );
    }

    #[test]
    fn equal_stacks_bust_together() {
        assert_eq!(
            redistribute_chips(&[300, 300, 300], 1).unwrap(),
            (vec![0, 900, 0], vec![0, 2])
        );
    }

    #[test]
    fn redistribution_preconditions() {
        assert!(redistribute_chips(&[10, 20], 2).is_err());
        assert!(redistribute_chips(&[10, 0], 0).is_err());
    }

    #[test]
    fn bankruptcy_orders_by_stack() {
        let paid = resolve_bankruptcy(&[(4, 500), (7, 100)], &[20.0, 30.0], 1.0).unwrap();
        assert_eq!(paid, vec![(7, 20.0), (4, 30.0)]);
    }

    #[test]
    fn bankruptcy_splits_ties() {
        let paid = resolve_bankruptcy(&[(0, 100), (1, 100)], &[0.0, 20.0], 0.25).unwrap();
        assert_eq!(paid, vec![(0, 2.5), (1, 2.5)]);
        let paid = resolve_bankruptcy(&[(0, 300), (1, 300), (2, 300)], &[0.0, 20.0, 30.0], 1.0).unwrap();
        for (_, v) in paid {
            assert!((v - 50.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bankruptcy_mixed_blocks() {
        let blocks = tie_blocks(&[1, 2, 2, 5], &[0.0, 10.0, 20.0, 40.0]).unwrap();
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[1].size(), 2);
        assert_eq!(blocks[1].share, 15.0);
        assert_eq!(blocks[2].share, 40.0);
    }

    #[test]
    fn bankruptcy_block_length_must_match() {
        assert!(matches!(
            resolve_bankruptcy(&[(0, 1)], &[1.0, 2.0], 1.0),
            Err(Error::Invariant(_))
        ));
        assert!(resolve_bankruptcy(&[], &[], 1.0).is_err());
    }
}
