//! Analyses built on the two models: finish-position matrices, prize
//! reconstruction, model comparison and call/fold decisions.

use serde::{Deserialize, Serialize};

use crate::dcm::{dcm_run, Budget, DcmConfig};
use crate::error::{Error, Result};
use crate::icm::{icm_equities, icm_finish_distribution};
use crate::report::{EquityReport, Model};
use crate::stacks::{Chips, PrizeSchedule, StackVector};

/// `q[player][k]` is the probability that the player finishes at position k + 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinishMatrix {
    pub model: Model,
    pub q: Vec<Vec<f64>>,
}

impl FinishMatrix {
    pub fn players(&self) -> usize {
        self.q.len()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.q.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let n = self.q.first().map_or(0, Vec::len);
        (0..n).map(|k| self.q.iter().map(|r| r[k]).sum()).collect()
    }
}

pub fn finish_distribution(
    stacks: &StackVector,
    model: Model,
    config: &DcmConfig,
    budget: Budget,
) -> Result<FinishMatrix> {
    let q = match model {
        Model::Icm => icm_finish_distribution(stacks, stacks.len())?,
        Model::Dcm => {
            let prizes = PrizeSchedule::new(vec![0.0])?;
            dcm_run(stacks, &prizes, config, budget)?.positions
        }
    };
    Ok(FinishMatrix { model, q })
}

/// Finish-position mass from a single DCM tree pass.
pub fn dcm_finish_distribution(stacks: &StackVector, config: &DcmConfig) -> Result<FinishMatrix> {
    finish_distribution(stacks, Model::Dcm, config, Budget::default())
}

/// `equity[i] = Σ_k q[i][k] · prize(k + 1)`.
pub fn reconstruct_equity(matrix: &FinishMatrix, prizes: &PrizeSchedule) -> Result<Vec<f64>> {
    let n = matrix.players();
    if matrix.q.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch("finish matrix must be square".into()));
    }
    if prizes.len() > n {
        return Err(Error::DimensionMismatch(format!(
            "{} prizes for a {n}-position finish matrix",
            prizes.len()
        )));
    }
    Ok(matrix
        .q
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(k, q)| q * prizes.prize_at(k + 1))
                .sum()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub icm: EquityReport,
    pub dcm: EquityReport,
    /// `100 · (dcm − icm) / icm`; `None` where the ICM equity is zero.
    pub percent_diff: Vec<Option<f64>>,
}

pub fn compare_models(
    stacks: &StackVector,
    prizes: &PrizeSchedule,
    config: &DcmConfig,
    budget: Budget,
) -> Result<ComparisonReport> {
    let icm = icm_equities(stacks, prizes)?;
    let dcm = dcm_run(stacks, prizes, config, budget)?.report;
    let percent_diff = icm
        .equity
        .iter()
        .zip(&dcm.equity)
        .map(|(&i, &d)| (i != 0.0).then(|| 100.0 * (d - i) / i))
        .collect();
    Ok(ComparisonReport {
        icm,
        dcm,
        percent_diff,
    })
}

fn format_percent(p: Option<f64>) -> String {
    match p {
        // avoid printing "-0.0%"
        Some(v) if v.abs() < 0.05 => "+0.0%".to_string(),
        Some(v) => format!("{v:+.1}%"),
        None => "n/a".to_string(),
    }
}

/// Text table: stacks, ICM split, DCM split and percent differences.
pub fn render_comparison(stacks: &StackVector, prizes: &PrizeSchedule, report: &ComparisonReport) -> String {
    let n = stacks.len();
    let prize_label = prizes
        .padded_best_first(n)
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(" / ");
    let rows: Vec<(String, Vec<String>)> = vec![
        ("players & prizes".into(), (1..=n).map(|i| format!("player {i}")).collect()),
        (format!("{n} players"), stacks.as_slice().iter().map(|s| s.to_string()).collect()),
        ("icm".into(), report.icm.equity.iter().map(|e| format!("{e:.2}")).collect()),
        (format!("dcm {prize_label}"), report.dcm.equity.iter().map(|e| format!("{e:.2}")).collect()),
        ("dcm vs icm".into(), report.percent_diff.iter().map(|&p| format_percent(p)).collect()),
    ];
    let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (label, cells) in rows {
        out.push_str(&format!("{label:<width$}"));
        for c in cells {
            out.push_str(&format!(" {c:>10}"));
        }
        out.push('\n');
    }
    out
}

/// A facing-all-in spot: the stacks after folding, after calling and winning,
/// and after calling and losing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionScenario {
    pub prizes: PrizeSchedule,
    /// Seat index of the deciding player.
    pub hero: usize,
    pub fold_stacks: Vec<Chips>,
    pub win_stacks: Vec<Chips>,
    /// The hero may hold 0 chips here, meaning busted in this hand.
    pub lose_stacks: Vec<Chips>,
    /// Probability that the hero wins the confrontation when calling.
    pub hero_equity: f64,
}

impl DecisionScenario {
    pub fn validate(&self) -> Result<()> {
        let n = self.fold_stacks.len();
        if n == 0 {
            return Err(Error::EmptyStacks);
        }
        if self.win_stacks.len() != n || self.lose_stacks.len() != n {
            return Err(Error::InvalidInput(
                "fold, win and lose stacks must list the same players".into(),
            ));
        }
        if self.hero >= n {
            return Err(Error::InvalidInput(format!(
                "hero seat {} out of range for {n} players",
                self.hero + 1
            )));
        }
        self.prizes.check_fits(n)?;
        let total = |v: &[Chips]| v.iter().sum::<Chips>();
        let t = total(&self.fold_stacks);
        if total(&self.win_stacks) != t || total(&self.lose_stacks) != t {
            return Err(Error::InvalidInput(
                "all three branches must hold the same number of chips".into(),
            ));
        }
        if self.fold_stacks[self.hero] == 0 || self.win_stacks[self.hero] == 0 {
            return Err(Error::InvalidInput(
                "the hero must keep chips after folding and after winning".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.hero_equity) {
            return Err(Error::InvalidInput(format!(
                "hero equity {} must lie in [0, 1]",
                self.hero_equity
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Call,
    Fold,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Call => "call",
            Action::Fold => "fold",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub model: Model,
    pub ev_call: f64,
    pub ev_fold: f64,
    /// Hero equity of the call-and-win branch.
    pub e_win: f64,
    /// Hero equity of the call-and-lose branch.
    pub e_lose: f64,
    pub recommendation: Action,
    /// Hand equity at which calling and folding are worth the same.
    pub threshold: Option<f64>,
}

impl DecisionReport {
    /// EV of calling at any hand equity; linear in `equity`.
    pub fn ev_call_at(&self, equity: f64) -> f64 {
        equity * self.e_win + (1.0 - equity) * self.e_lose
    }
}

/// Hero's model equity in a branch. Players with no chips went bust in the
/// hand and share the bottom positions equally; the rest play for the top prizes.
pub fn branch_equity(
    stacks: &[Chips],
    prizes: &PrizeSchedule,
    hero: usize,
    model: Model,
    config: &DcmConfig,
    budget: Budget,
) -> Result<f64> {
    let n = stacks.len();
    let best_first = prizes.padded_best_first(n);
    let active: Vec<usize> = (0..n).filter(|&i| stacks[i] > 0).collect();
    if active.is_empty() {
        return Err(Error::InvalidInput("a branch needs at least one player with chips".into()));
    }
    let survivors = active.len();
    if stacks[hero] == 0 {
        let busted = n - survivors;
        return Ok(best_first[survivors..].iter().sum::<f64>() / busted as f64);
    }
    let sub_stacks = StackVector::new(active.iter().map(|&i| stacks[i]).collect())?;
    let top = best_first[..survivors].to_vec();
    let sub_prizes = PrizeSchedule::new(top)?;
    let hero_pos = active.iter().position(|&i| i == hero).expect("hero is active");
    let report = match model {
        Model::Icm => icm_equities(&sub_stacks, &sub_prizes)?,
        Model::Dcm => dcm_run(&sub_stacks, &sub_prizes, config, budget)?.report,
    };
    Ok(report.equity[hero_pos])
}

pub fn decision_ev(
    scenario: &DecisionScenario,
    model: Model,
    config: &DcmConfig,
    budget: Budget,
) -> Result<DecisionReport> {
    scenario.validate()?;
    let eval = |stacks: &[Chips]| {
        branch_equity(stacks, &scenario.prizes, scenario.hero, model, config, budget)
    };
    let ev_fold = eval(&scenario.fold_stacks)?;
    let e_win = eval(&scenario.win_stacks)?;
    let e_lose = eval(&scenario.lose_stacks)?;
    let e = scenario.hero_equity;
    let ev_call = e * e_win + (1.0 - e) * e_lose;
    let recommendation = if ev_call > ev_fold { Action::Call } else { Action::Fold };
    let threshold = (e_win != e_lose).then(|| (ev_fold - e_lose) / (e_win - e_lose));
    Ok(DecisionReport {
        model,
        ev_call,
        ev_fold,
        e_win,
        e_lose,
        recommendation,
        threshold,
    })
}

/// The hand equity at which calling starts to beat folding.
pub fn threshold_equity(scenario: &DecisionScenario, model: Model, config: &DcmConfig) -> Result<f64> {
    decision_ev(scenario, model, config, Budget::default())?
        .threshold
        .ok_or(Error::NoCrossing)
}
