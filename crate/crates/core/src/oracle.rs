//! Brute-force cross-check of the tree search.
//!
//! The reachable stack configurations form a finite absorbing Markov chain
//! whose only absorbing state is one player holding every chip. Expected
//! payouts are the solution of the chain's linear reward equations, solved
//! either exactly over the rationals or by value iteration. Nothing here
//! walks tree paths, so agreement with the DCM engine is a real check.
//!
//! States are canonical: stacks sorted ascending, with the seat permutation
//! of every transition recorded so values can be carried between states.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hand::{for_each_run, redistribute_chips, resolve_bankruptcy};
use crate::report::{EquityReport, Model};
use crate::stacks::{canonicalize, Chips, PrizeSchedule, StackVector};

pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;
pub const DEFAULT_EXACT_LIMIT: usize = 10_000;

/// One hand outcome leaving a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    /// Winning seat, in the parent's canonical order.
    pub winner: usize,
    pub successor: usize,
    /// `seat_map[t]` is the parent seat that becomes successor seat `t`.
    pub seat_map: Vec<usize>,
    /// Parent seats that went bust, with their entering stacks, ascending.
    pub busted: Vec<(usize, Chips)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateGraph {
    /// Canonical states: positive stacks sorted ascending.
    pub states: Vec<Vec<Chips>>,
    /// Outgoing hands per state, each with probability `1 / n`. Empty when absorbing.
    pub transitions: Vec<Vec<Transition>>,
    pub initial: usize,
    /// `initial_ids[k]` is the original seat of canonical seat `k` of the initial state.
    pub initial_ids: Vec<usize>,
    /// Number of players at the start; sets how prizes are padded.
    pub players: usize,
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_absorbing(&self, state: usize) -> bool {
        self.states[state].len() == 1
    }

    /// Looks up a state by its (unsorted) stacks.
    pub fn find(&self, stacks: &[Chips]) -> Option<usize> {
        let canon = canonicalize(stacks);
        self.states.iter().position(|s| *s == canon.stacks)
    }
}

/// Reachable-state closure of `initial` under the all-in transfer rule.
pub fn enumerate_states(initial: &StackVector, state_budget: usize) -> Result<StateGraph> {
    let canon = canonicalize(initial.as_slice());
    let mut index: HashMap<Vec<Chips>, usize> = HashMap::new();
    let mut states = vec![canon.stacks.clone()];
    let mut transitions: Vec<Vec<Transition>> = vec![Vec::new()];
    index.insert(canon.stacks, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let stacks = states[s].clone();
        if stacks.len() == 1 {
            continue;
        }
        let mut out = Vec::with_capacity(stacks.len());
        for winner in 0..stacks.len() {
            let (after, busted_seats) = redistribute_chips(&stacks, winner)?;
            let busted = busted_seats.iter().map(|&i| (i, stacks[i])).collect();
            let survivors: Vec<usize> = (0..stacks.len()).filter(|&i| after[i] > 0).collect();
            let raw: Vec<Chips> = survivors.iter().map(|&i| after[i]).collect();
            let c = canonicalize(&raw);
            let seat_map = c.ids.iter().map(|&k| survivors[k]).collect();
            let successor = match index.get(&c.stacks) {
                Some(&id) => id,
                None => {
                    if states.len() >= state_budget {
                        return Err(Error::StateBudgetExceeded {
                            budget: state_budget,
                        });
                    }
                    let id = states.len();
                    index.insert(c.stacks.clone(), id);
                    states.push(c.stacks);
                    transitions.push(Vec::new());
                    queue.push_back(id);
                    id
                }
            };
            out.push(Transition {
                winner,
                successor,
                seat_map,
                busted,
            });
        }
        transitions[s] = out;
    }
    Ok(StateGraph {
        states,
        transitions,
        initial: 0,
        initial_ids: canon.ids,
        players: initial.len(),
    })
}

/// How the oracle solves the reward equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMethod {
    /// Exact solve when the state count is within the exact limit, otherwise iterate.
    #[default]
    Auto,
    Exact,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub method: OracleMethod,
    /// Value-iteration stopping tolerance on the largest per-sweep change.
    pub tol: f64,
    pub max_iterations: usize,
    pub state_budget: usize,
    pub exact_limit: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            method: OracleMethod::Auto,
            tol: 1e-12,
            max_iterations: 100_000,
            state_budget: DEFAULT_STATE_BUDGET,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub report: EquityReport,
    /// Exact payouts per original seat, present when the rational solver ran.
    pub exact_equity: Option<Vec<BigRational>>,
    pub exact_win_prob: Option<Vec<BigRational>>,
    pub states: usize,
    /// Sweeps used by value iteration, when it ran.
    pub iterations: Option<usize>,
}

/// Expected payout of every player, from the absorbing chain.
pub fn oracle_equities(
    stacks: &StackVector,
    prizes: &PrizeSchedule,
    config: &OracleConfig,
) -> Result<OracleReport> {
    prizes.check_fits(stacks.len())?;
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(Error::InvalidConfig("oracle tolerance must be positive".into()));
    }
    // hands only compare and move whole stacks, so a common factor changes nothing
    let g = stacks.as_slice().iter().fold(0, |g, &s| num::integer::gcd(g, s));
    let reduced = StackVector::new(stacks.as_slice().iter().map(|&s| s / g).collect())?;
    let graph = enumerate_states(&reduced, config.state_budget)?;
    let players = stacks.len();
    let best_first = prizes.padded_best_first(players);
    let mut winner_only = vec![0.0; players];
    winner_only[0] = 1.0;
    let exact = match config.method {
        OracleMethod::Exact => true,
        OracleMethod::Iterative => false,
        OracleMethod::Auto => graph.len() <= config.exact_limit,
    };
    let restore = |values: &[f64]| {
        let mut out = vec![0.0; players];
        for (k, &seat) in graph.initial_ids.iter().enumerate() {
            out[seat] = values[k];
        }
        out
    };
    let (equity, win_prob, exact_equity, exact_win_prob, iterations) = if exact {
        let eq = solve_exact(&graph, &best_first)?;
        let wp = solve_exact(&graph, &winner_only)?;
        let to_seats = |v: &[BigRational]| {
            let mut out = vec![BigRational::zero(); players];
            for (k, &seat) in graph.initial_ids.iter().enumerate() {
                out[seat] = v[k].clone();
            }
            out
        };
        let (eq, wp) = (to_seats(&eq[graph.initial]), to_seats(&wp[graph.initial]));
        let float = |v: &[BigRational]| v.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>();
        (float(&eq), float(&wp), Some(eq), Some(wp), None)
    } else {
        let stop = Stop::Tolerance {
            tol: config.tol,
            max_iterations: config.max_iterations,
        };
        let eq = solve_iterative(&graph, &best_first, stop)?;
        let wp = solve_iterative(&graph, &winner_only, stop)?;
        (
            restore(&eq.values[graph.initial]),
            restore(&wp.values[graph.initial]),
            None,
            None,
            Some(eq.iterations.max(wp.iterations)),
        )
    };
    let explored_mass = win_prob.iter().sum();
    Ok(OracleReport {
        report: EquityReport {
            model: Model::Dcm,
            equity,
            win_prob,
            explored_mass,
            nodes_visited: graph.len() as u64,
            pruned_nodes: 0,
        },
        exact_equity,
        exact_win_prob,
        states: graph.len(),
        iterations,
    })
}

/// States grouped by player count, fewest players first. Hands never add
/// players, so each group only depends on itself and earlier groups.
fn layers(graph: &StateGraph) -> Vec<Vec<usize>> {
    let mut by_n: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, stacks) in graph.states.iter().enumerate() {
        by_n.entry(stacks.len()).or_default().push(s);
    }
    by_n.into_values().collect()
}

/// Inverse of a transition's seat map: parent seat -> successor seat.
fn parent_to_successor(t: &Transition, n: usize) -> Vec<Option<usize>> {
    let mut inv = vec![None; n];
    for (succ_seat, &parent) in t.seat_map.iter().enumerate() {
        inv[parent] = Some(succ_seat);
    }
    inv
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("prizes are finite")
}

/// Exact bust payouts in a state with `n` players; prizes are best first.
fn exact_bust_payouts(t: &Transition, n: usize, best_first: &[f64]) -> Vec<(usize, BigRational)> {
    let players = best_first.len();
    // worst-first index w is podium position players - w
    let stacks: Vec<Chips> = t.busted.iter().map(|&(_, s)| s).collect();
    let from = players - n;
    let mut out = Vec::new();
    for_each_run(&stacks, |start, end| {
        let mut sum = BigRational::zero();
        for w in from + start..from + end {
            sum += rational(best_first[players - 1 - w]);
        }
        let share = sum / BigRational::from_integer(BigInt::from(end - start));
        for &(seat, _) in &t.busted[start..end] {
            out.push((seat, share.clone()));
        }
    });
    out
}

/// Solves the reward equations exactly. Returns per-state values by canonical seat.
pub fn solve_exact(graph: &StateGraph, best_first: &[f64]) -> Result<Vec<Vec<BigRational>>> {
    let mut values: Vec<Option<Vec<BigRational>>> = vec![None; graph.len()];
    for layer in layers(graph) {
        let n = graph.states[layer[0]].len();
        if n == 1 {
            for &s in &layer {
                values[s] = Some(vec![rational(best_first[0])]);
            }
            continue;
        }
        let local: HashMap<usize, usize> = layer.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let weight = BigRational::new(BigInt::one(), BigInt::from(n));
        let mut system = SparseSystem::new(layer.len() * n);
        for (li, &s) in layer.iter().enumerate() {
            let mut rows: Vec<BTreeMap<usize, BigRational>> = (0..n)
                .map(|seat| BTreeMap::from([(li * n + seat, BigRational::one())]))
                .collect();
            let mut rhs = vec![BigRational::zero(); n];
            for t in &graph.transitions[s] {
                for (seat, pay) in exact_bust_payouts(t, n, best_first) {
                    rhs[seat] += &weight * pay;
                }
                let inv = parent_to_successor(t, n);
                for seat in 0..n {
                    let Some(succ_seat) = inv[seat] else { continue };
                    if let Some(&lj) = local.get(&t.successor) {
                        let entry = rows[seat].entry(lj * n + succ_seat).or_insert_with(BigRational::zero);
                        *entry -= &weight;
                    } else {
                        let known = values[t.successor]
                            .as_ref()
                            .ok_or_else(|| Error::Invariant("successor layer unsolved".into()))?;
                        rhs[seat] += &weight * &known[succ_seat];
                    }
                }
            }
            for (row, b) in rows.into_iter().zip(rhs) {
                system.push(row, b);
            }
        }
        let x = system.solve()?;
        for (li, &s) in layer.iter().enumerate() {
            values[s] = Some(x[li * n..(li + 1) * n].to_vec());
        }
    }
    values
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::Invariant("state left unsolved".into())))
        .collect()
}

/// Sparse Gauss-Jordan elimination over the rationals.
struct SparseSystem {
    rows: Vec<BTreeMap<usize, BigRational>>,
    rhs: Vec<BigRational>,
    unknowns: usize,
}

impl SparseSystem {
    fn new(unknowns: usize) -> Self {
        Self {
            rows: Vec::with_capacity(unknowns),
            rhs: Vec::with_capacity(unknowns),
            unknowns,
        }
    }

    fn push(&mut self, mut row: BTreeMap<usize, BigRational>, rhs: BigRational) {
        row.retain(|_, v| !v.is_zero());
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    fn solve(mut self) -> Result<Vec<BigRational>> {
        if self.rows.len() != self.unknowns {
            return Err(Error::Invariant("system is not square".into()));
        }
        let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.unknowns];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row.keys() {
                col_rows[c].insert(r);
            }
        }
        let mut used = vec![false; self.rows.len()];
        let mut pivot_of = vec![usize::MAX; self.unknowns];
        for c in 0..self.unknowns {
            let pivot = col_rows[c]
                .iter()
                .copied()
                .filter(|&r| !used[r])
                .min_by_key(|&r| self.rows[r].len())
                .ok_or_else(|| Error::Invariant("singular absorption system".into()))?;
            used[pivot] = true;
            pivot_of[c] = pivot;
            let inv = self.rows[pivot][&c].recip();
            for v in self.rows[pivot].values_mut() {
                *v *= &inv;
            }
            self.rhs[pivot] *= &inv;
            let pivot_row = self.rows[pivot].clone();
            let pivot_rhs = self.rhs[pivot].clone();
            let targets: Vec<usize> = col_rows[c].iter().copied().filter(|&r| r != pivot).collect();
            for r in targets {
                let factor = self.rows[r][&c].clone();
                for (&k, v) in &pivot_row {
                    let entry = self.rows[r].entry(k).or_insert_with(BigRational::zero);
                    *entry -= &factor * v;
                    if entry.is_zero() {
                        self.rows[r].remove(&k);
                        col_rows[k].remove(&r);
                    } else {
                        col_rows[k].insert(r);
                    }
                }
                self.rhs[r] -= &factor * &pivot_rhs;
            }
        }
        Ok(pivot_of.into_iter().map(|r| self.rhs[r].clone()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Sweep until the largest change is at most `tol`.
    Tolerance { tol: f64, max_iterations: usize },
    /// Run exactly this many sweeps per layer.
    Iterations(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterativeSolution {
    pub values: Vec<Vec<f64>>,
    /// Largest number of sweeps any layer needed.
    pub iterations: usize,
}

/// Jacobi value iteration, one player-count layer at a time.
pub fn solve_iterative(graph: &StateGraph, best_first: &[f64], stop: Stop) -> Result<IterativeSolution> {
    let mut values: Vec<Vec<f64>> = graph.states.iter().map(|s| vec![0.0; s.len()]).collect();
    let mut solved = vec![false; graph.len()];
    let mut iterations = 0;
    for layer in layers(graph) {
        let n = graph.states[layer[0]].len();
        if n == 1 {
            for &s in &layer {
                values[s] = vec![best_first[0]];
                solved[s] = true;
            }
            continue;
        }
        let weight = 1.0 / n as f64;
        // the part of each value that does not depend on this layer
        let mut base: Vec<Vec<f64>> = Vec::with_capacity(layer.len());
        for &s in &layer {
            let mut b = vec![0.0; n];
            for t in graph.transitions[s].iter().filter(|t| !t.busted.is_empty()) {
                let from = best_first.len() - n;
                let players = best_first.len();
                let block: Vec<f64> = (0..t.busted.len())
                    .map(|m| best_first[players - 1 - (from + m)])
                    .collect();
                for (seat, pay) in resolve_bankruptcy(&t.busted, &block, weight)? {
                    b[seat] += pay;
                }
            }
            for t in &graph.transitions[s] {
                if solved[t.successor] {
                    for (succ_seat, &parent) in t.seat_map.iter().enumerate() {
                        b[parent] += weight * values[t.successor][succ_seat];
                    }
                }
            }
            base.push(b);
        }
        let mut sweeps = 0;
        loop {
            let mut next = base.clone();
            for (li, &s) in layer.iter().enumerate() {
                for t in &graph.transitions[s] {
                    if solved[t.successor] {
                        continue;
                    }
                    for (succ_seat, &parent) in t.seat_map.iter().enumerate() {
                        next[li][parent] += weight * values[t.successor][succ_seat];
                    }
                }
            }
            let mut change: f64 = 0.0;
            for (li, &s) in layer.iter().enumerate() {
                for (old, new) in values[s].iter().zip(&next[li]) {
                    change = change.max((old - new).abs());
                }
                values[s].clone_from(&next[li]);
            }
            sweeps += 1;
            match stop {
                Stop::Tolerance { tol, .. } if change <= tol => break,
                Stop::Tolerance { max_iterations, .. } if sweeps >= max_iterations => {
                    return Err(Error::NotConverged {
                        iterations: max_iterations,
                    })
                }
                Stop::Iterations(k) if sweeps >= k => break,
                _ => {}
            }
        }
        iterations = iterations.max(sweeps);
        for &s in &layer {
            solved[s] = true;
        }
    }
    Ok(IterativeSolution { values, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[u64]) -> StackVector {
        StackVector::new(v.to_vec()).unwrap()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn two_one_closure() {
        let g = enumerate_states(&sv(&[2, 1]), 100).unwrap();
        assert_eq!(g.states, vec![vec![1, 2], vec![3]]);
        // seat 0 (1 chip) doubling swaps the seats but stays in the same state
        let t = &g.transitions[0][0];
        assert_eq!(t.successor, 0);
        assert_eq!(t.seat_map, vec![1, 0]);
        assert!(t.busted.is_empty());
        assert_eq!(g.transitions[0][1].busted, vec![(0, 1)]);
        assert!(g.is_absorbing(1));
        assert_eq!(g.initial_ids, vec![1, 0]);
    }

    #[test]
    fn even_closure() {
        let g = enumerate_states(&sv(&[1, 1]), 100).unwrap();
        assert_eq!(g.states, vec![vec![1, 1], vec![2]]);
    }

    #[test]
    fn three_player_closure() {
        let g = enumerate_states(&sv(&[2, 1, 1]), 100).unwrap();
        assert!(g.find(&[4]).is_some());
        assert!(g.find(&[2, 2]).is_some());
        assert!(g.find(&[3, 1]).is_some());
        for (s, out) in g.transitions.iter().enumerate() {
            let total: u64 = g.states[s].iter().sum();
            assert_eq!(total, 4);
            assert_eq!(out.len(), if g.is_absorbing(s) { 0 } else { g.states[s].len() });
        }
    }

    #[test]
    fn state_budget_is_reported() {
        assert_eq!(
            enumerate_states(&sv(&[5, 3, 2]), 2),
            Err(Error::StateBudgetExceeded { budget: 2 })
        );
    }

    #[test]
    fn exact_two_thirds() {
        let r = oracle_equities(
            &sv(&[2, 1]),
            &PrizeSchedule::new(vec![1.0]).unwrap(),
            &OracleConfig {
                method: OracleMethod::Exact,
                ..OracleConfig::default()
            },
        )
        .unwrap();
        assert_eq!(r.exact_equity.unwrap(), vec![ratio(2, 3), ratio(1, 3)]);
        assert_eq!(r.exact_win_prob.unwrap(), vec![ratio(2, 3), ratio(1, 3)]);
    }

    #[test]
    fn exact_three_player_single_prize() {
        let r = oracle_equities(
            &sv(&[2, 1, 1]),
            &PrizeSchedule::new(vec![1.0]).unwrap(),
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(r.exact_equity.unwrap(), vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]);
    }

    #[test]
    fn iteration_matches_exact() {
        let stacks = sv(&[5, 3, 2, 1]);
        let prizes = PrizeSchedule::new(vec![10.0, 6.0, 3.0]).unwrap();
        let exact = oracle_equities(&stacks, &prizes, &OracleConfig { method: OracleMethod::Exact, ..OracleConfig::default() }).unwrap();
        let iter = oracle_equities(&stacks, &prizes, &OracleConfig { method: OracleMethod::Iterative, ..OracleConfig::default() }).unwrap();
        for (a, b) in exact.report.equity.iter().zip(&iter.report.equity) {
            assert!((a - b).abs() < 1e-10);
        }
        let sum: BigRational = exact.exact_equity.unwrap().into_iter().sum();
        assert_eq!(sum, BigRational::from_integer(BigInt::from(19)));
        assert!(iter.iterations.unwrap() > 1);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let r = oracle_equities(
            &sv(&[2, 1]),
            &PrizeSchedule::new(vec![1.0]).unwrap(),
            &OracleConfig {
                method: OracleMethod::Iterative,
                max_iterations: 3,
                ..OracleConfig::default()
            },
        );
        assert_eq!(r, Err(Error::NotConverged { iterations: 3 }));
    }

    #[test]
    fn common_factor_is_divided_out() {
        let prizes = PrizeSchedule::new(vec![100.0, 50.0]).unwrap();
        let small = oracle_equities(&sv(&[10, 5, 1]), &prizes, &OracleConfig::default()).unwrap();
        let big = oracle_equities(&sv(&[1000, 500, 100]), &prizes, &OracleConfig::default()).unwrap();
        assert_eq!(small.exact_equity, big.exact_equity);
        assert_eq!(small.states, big.states);
    }
}
