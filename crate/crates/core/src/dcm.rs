//! Dependent Chip Model: depth-first expansion of the all-in game tree.
//!
//! Every node holds the surviving players sorted by ascending stack. Each of
//! the `n` players wins the hand with probability `1/n`; the winner takes the
//! effective stack from everyone else, busted players are paid from the
//! worst prizes still open, and the survivors play on. Branches are cut when
//! they reach the depth limit or their per-branch probability drops below
//! the floor, and the cut node is settled by the configured leaf policy.

use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hand::{for_each_run, transfer};
use crate::icm;
use crate::report::{EquityReport, Model};
use crate::stacks::{canonicalize, symmetrize_ties, Chips, PrizeSchedule, StackVector};

/// How a node cut off by the depth or probability limit is settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafPolicy {
    /// All active players go bust at once and share the open prizes by stack.
    #[default]
    ForcedBankruptcy,
    /// Open prizes are paid by ICM on the cut node's stacks.
    IcmTail,
    /// Heads-up cut nodes use the exact closed form; others fall back to forced bankruptcy.
    AnalyticTwoPlayer,
}

impl LeafPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            LeafPolicy::ForcedBankruptcy => "forced-bankruptcy",
            LeafPolicy::IcmTail => "icm-tail",
            LeafPolicy::AnalyticTwoPlayer => "analytic-two-player",
        }
    }
}

impl FromStr for LeafPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forced-bankruptcy" | "forced" => Ok(LeafPolicy::ForcedBankruptcy),
            "icm-tail" | "icm" => Ok(LeafPolicy::IcmTail),
            "analytic-two-player" | "analytic2" => Ok(LeafPolicy::AnalyticTwoPlayer),
            other => Err(Error::InvalidConfig(format!(
                "unknown leaf policy '{other}' (expected forced, icm or analytic2)"
            ))),
        }
    }
}

/// Sibling branches below the root can be explored on the rayon pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    /// Single-threaded; bit-reproducible.
    #[default]
    Deterministic,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DcmConfig {
    /// Depth at which branches are cut; the root is depth 1.
    pub max_depth: u32,
    /// Branches whose per-branch probability falls below this are cut.
    pub min_prob: f64,
    pub leaf_policy: LeafPolicy,
    /// Replace every heads-up subtree by its closed form.
    pub two_player_shortcut: bool,
    pub execution: Execution,
}

impl Default for DcmConfig {
    fn default() -> Self {
        Self {
            max_depth: 50,
            min_prob: 1e-15,
            leaf_policy: LeafPolicy::ForcedBankruptcy,
            two_player_shortcut: false,
            execution: Execution::Deterministic,
        }
    }
}

impl DcmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 {
            return Err(Error::InvalidConfig("max_depth must be at least 1".into()));
        }
        if !(self.min_prob > 0.0 && self.min_prob <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "min_prob must lie in (0, 1], got {}",
                self.min_prob
            )));
        }
        Ok(())
    }
}

/// Optional limits on a single run.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
}

/// Full result of one tree pass.
#[derive(Debug, Clone, PartialEq)]
pub struct DcmOutcome {
    pub report: EquityReport,
    /// `positions[player][k]`: probability mass of finishing at position k + 1.
    pub positions: Vec<Vec<f64>>,
}

const FLUSH_EVERY: u64 = 4096;
const PARALLEL_LEVELS: u32 = 2;

struct Shared<'a> {
    config: &'a DcmConfig,
    /// Padded prize list, worst first; the last entry is the first prize.
    prizes: &'a [f64],
    players: usize,
    budget: Budget,
    nodes: AtomicU64,
}

impl Shared<'_> {
    /// Worst-first index of the lowest prize still open at a node with `n` players.
    fn open_from(&self, n: usize) -> usize {
        self.players - n
    }
}

#[derive(Clone)]
struct Accumulator {
    equity: Vec<f64>,
    win: Vec<f64>,
    /// Row-major `players x players`, indexed by `player * players + position`.
    positions: Vec<f64>,
    nodes: u64,
    pruned: u64,
    unflushed: u64,
}

impl Accumulator {
    fn new(players: usize) -> Self {
        Self {
            equity: vec![0.0; players],
            win: vec![0.0; players],
            positions: vec![0.0; players * players],
            nodes: 0,
            pruned: 0,
            unflushed: 0,
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        for (a, b) in self.equity.iter_mut().zip(&other.equity) {
            *a += b;
        }
        for (a, b) in self.win.iter_mut().zip(&other.win) {
            *a += b;
        }
        for (a, b) in self.positions.iter_mut().zip(&other.positions) {
            *a += b;
        }
        self.nodes += other.nodes;
        self.pruned += other.pruned;
    }
}

struct Walker<'a> {
    shared: &'a Shared<'a>,
    acc: Accumulator,
}

impl<'a> Walker<'a> {
    fn new(shared: &'a Shared<'a>) -> Self {
        Self {
            shared,
            acc: Accumulator::new(shared.players),
        }
    }

    fn count_node(&mut self) -> Result<()> {
        self.acc.nodes += 1;
        self.acc.unflushed += 1;
        if self.acc.unflushed >= FLUSH_EVERY {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let total = self
            .shared
            .nodes
            .fetch_add(self.acc.unflushed, Ordering::Relaxed)
            + self.acc.unflushed;
        self.acc.unflushed = 0;
        let budget = &self.shared.budget;
        if let Some(cap) = budget.max_nodes {
            if total > cap {
                return Err(Error::BudgetExceeded(format!("node cap of {cap} exceeded")));
            }
        }
        if let Some(deadline) = budget.deadline {
            if Instant::now() >= deadline {
                return Err(Error::BudgetExceeded("time limit reached".into()));
            }
        }
        Ok(())
    }

    /// Pays the players in `ids[..]` (ascending `stacks`) as if they all went bust
    /// together, consuming the worst open prizes from worst-first index `from`.
    fn pay_bust(&mut self, ids: &[usize], stacks: &[Chips], from: usize, prob: f64) {
        let players = self.shared.players;
        let prizes = self.shared.prizes;
        let acc = &mut self.acc;
        for_each_run(stacks, |start, end| {
            let size = (end - start) as f64;
            let sum: f64 = prizes[from + start..from + end].iter().sum();
            let share = prob * (sum / size);
            let mass = prob / size;
            for &id in &ids[start..end] {
                acc.equity[id] += share;
                for w in from + start..from + end {
                    acc.positions[id * players + (players - 1 - w)] += mass;
                }
            }
        });
    }

    fn pay_winner(&mut self, id: usize, prob: f64) {
        let players = self.shared.players;
        self.acc.equity[id] += prob * self.shared.prizes[players - 1];
        self.acc.win[id] += prob;
        self.acc.positions[id * players] += prob;
    }

    /// Exact heads-up settlement: the two players hold the top two prizes.
    fn pay_heads_up(&mut self, ids: &[usize], stacks: &[Chips], prob: f64) {
        let players = self.shared.players;
        let (second, first) = (
            self.shared.prizes[players - 2],
            self.shared.prizes[players - 1],
        );
        let total = (stacks[0] + stacks[1]) as f64;
        for k in 0..2 {
            let p = stacks[k] as f64 / total;
            let id = ids[k];
            self.acc.equity[id] += prob * (p * first + (1.0 - p) * second);
            self.acc.win[id] += prob * p;
            self.acc.positions[id * players] += prob * p;
            self.acc.positions[id * players + 1] += prob * (1.0 - p);
        }
    }

    fn pay_icm_tail(&mut self, ids: &[usize], stacks: &[Chips], prob: f64) {
        let players = self.shared.players;
        let n = ids.len();
        let (q, _) = icm::positions_unchecked(stacks, n);
        for (row, &id) in q.iter().zip(ids) {
            for (k, &mass) in row.iter().enumerate() {
                self.acc.equity[id] += prob * mass * self.shared.prizes[players - 1 - k];
                self.acc.positions[id * players + k] += prob * mass;
            }
        }
    }

    fn settle_leaf(&mut self, ids: &[usize], stacks: &[Chips], reach: f64) {
        self.acc.pruned += 1;
        let n = ids.len();
        match self.shared.config.leaf_policy {
            LeafPolicy::AnalyticTwoPlayer if n == 2 => self.pay_heads_up(ids, stacks, reach),
            LeafPolicy::IcmTail => self.pay_icm_tail(ids, stacks, reach),
            _ => self.pay_bust(ids, stacks, self.shared.open_from(n), reach),
        }
    }

    fn node(&mut self, depth: u32, reach: f64, ids: &[usize], stacks: &[Chips]) -> Result<()> {
        self.count_node()?;
        let n = ids.len();
        if n == 1 {
            self.pay_winner(ids[0], reach);
            return Ok(());
        }
        let config = self.shared.config;
        if n == 2 && config.two_player_shortcut {
            self.pay_heads_up(ids, stacks, reach);
            return Ok(());
        }
        let branch = reach / n as f64;
        if depth >= config.max_depth || branch < config.min_prob {
            self.settle_leaf(ids, stacks, reach);
            return Ok(());
        }
        let parallel_here =
            config.execution == Execution::Parallel && depth <= PARALLEL_LEVELS && n > 2;
        if parallel_here {
            let shared = self.shared;
            let children: Vec<Result<Accumulator>> = (0..n)
                .into_par_iter()
                .map(|winner| {
                    let mut w = Walker::new(shared);
                    w.branch(depth, branch, ids, stacks, winner)?;
                    w.flush()?;
                    Ok(w.acc)
                })
                .collect();
            for child in children {
                self.acc.merge(&child?);
            }
        } else {
            for winner in 0..n {
                self.branch(depth, branch, ids, stacks, winner)?;
            }
        }
        Ok(())
    }

    /// Plays the hand won by sorted seat `winner` and descends into the child.
    fn branch(
        &mut self,
        depth: u32,
        prob: f64,
        ids: &[usize],
        stacks: &[Chips],
        winner: usize,
    ) -> Result<()> {
        let n = ids.len();
        let mut after = stacks.to_vec();
        let busted = transfer(&mut after, winner);
        if busted > 0 {
            // entering stacks are sorted, so the busted players keep ascending order
            let mut bust_ids = Vec::with_capacity(busted);
            let mut bust_stacks = Vec::with_capacity(busted);
            for k in 0..n {
                if after[k] == 0 {
                    bust_ids.push(ids[k]);
                    bust_stacks.push(stacks[k]);
                }
            }
            self.pay_bust(&bust_ids, &bust_stacks, self.shared.open_from(n), prob);
        }
        let mut survivors: Vec<(Chips, usize)> = after
            .iter()
            .zip(ids)
            .filter(|(&s, _)| s > 0)
            .map(|(&s, &id)| (s, id))
            .collect();
        survivors.sort_by_key(|&(s, _)| s);
        let child_ids: Vec<usize> = survivors.iter().map(|&(_, id)| id).collect();
        let child_stacks: Vec<Chips> = survivors.iter().map(|&(s, _)| s).collect();
        self.node(depth + 1, prob, &child_ids, &child_stacks)
    }
}

/// Runs the tree search and returns equities together with finish-position mass.
pub fn dcm_run(
    stacks: &StackVector,
    prizes: &PrizeSchedule,
    config: &DcmConfig,
    budget: Budget,
) -> Result<DcmOutcome> {
    config.validate()?;
    prizes.check_fits(stacks.len())?;
    let players = stacks.len();
    let worst_first = prizes.padded_worst_first(players);
    let shared = Shared {
        config,
        prizes: &worst_first,
        players,
        budget,
        nodes: AtomicU64::new(0),
    };
    let canon = canonicalize(stacks.as_slice());
    let mut walker = Walker::new(&shared);
    walker.node(1, 1.0, &canon.ids, &canon.stacks)?;
    walker.flush()?;
    let acc = walker.acc;

    let s = stacks.as_slice();
    let mut equity = acc.equity;
    let mut win_prob = acc.win;
    symmetrize_ties(s, &mut equity);
    symmetrize_ties(s, &mut win_prob);
    let mut positions: Vec<Vec<f64>> = acc
        .positions
        .chunks(players)
        .map(<[f64]>::to_vec)
        .collect();
    for k in 0..players {
        let mut column: Vec<f64> = positions.iter().map(|r| r[k]).collect();
        symmetrize_ties(s, &mut column);
        for (row, v) in positions.iter_mut().zip(column) {
            row[k] = v;
        }
    }
    let explored_mass = win_prob.iter().sum();
    Ok(DcmOutcome {
        report: EquityReport {
            model: Model::Dcm,
            equity,
            win_prob,
            explored_mass,
            nodes_visited: acc.nodes,
            pruned_nodes: acc.pruned,
        },
        positions,
    })
}

/// DCM money expectation of every player.
pub fn dcm_equities(
    stacks: &StackVector,
    prizes: &PrizeSchedule,
    config: &DcmConfig,
) -> Result<EquityReport> {
    dcm_run(stacks, prizes, config, Budget::default()).map(|o| o.report)
}
