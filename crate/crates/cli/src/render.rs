//! Plain-text tables. Money has 2 decimals, percentages 1 unless noted.

use chipsplit_core::wire::{DecisionOutput, DecisionResponse, EquityResponse, PositionsResponse};
use chipsplit_core::StackVector;

use crate::OracleOutput;

fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        for (k, cell) in row.iter().enumerate() {
            if k == 0 {
                out.push_str(&format!("{cell:<w$}", w = widths[0]));
            } else {
                out.push_str(&format!("  {cell:>w$}", w = widths[k]));
            }
        }
        debug_assert_eq!(row.len(), cols);
        out.push('\n');
    }
    out
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn money(x: f64) -> String {
    format!("{x:.2}")
}

fn percent(p: f64) -> String {
    format!("{:.1}%", 100.0 * p)
}

pub fn equity(stacks: &StackVector, r: &EquityResponse) -> String {
    let mut rows: Vec<Vec<String>> = stacks
        .as_slice()
        .iter()
        .zip(r.equity.iter().zip(&r.win_prob))
        .enumerate()
        .map(|(i, (s, (e, w)))| vec![format!("player {}", i + 1), s.to_string(), money(*e), percent(*w)])
        .collect();
    rows.push(vec![
        "total".into(),
        stacks.total().to_string(),
        money(r.equity.iter().sum()),
        percent(r.win_prob.iter().sum()),
    ]);
    let mut out = table(&strings(&[r.model.as_str(), "stack", "equity", "win"]), &rows);
    out.push_str(&format!(
        "explored mass {:.6}, {} nodes, {} pruned\n",
        r.explored_mass, r.nodes_visited, r.pruned_nodes
    ));
    out
}

pub fn positions(r: &PositionsResponse) -> String {
    let n = r.positions.len();
    let mut header = vec![format!("{} position", r.model)];
    header.extend((1..=n).map(|i| format!("player {i}")));
    let rows: Vec<Vec<String>> = (0..n)
        .map(|pos| {
            let mut row = vec![(pos + 1).to_string()];
            row.extend(r.positions.iter().map(|p| format!("{:.2}%", 100.0 * p[pos])));
            row
        })
        .collect();
    table(&header, &rows)
}

fn decision_row(r: &DecisionResponse) -> Vec<String> {
    vec![
        r.model.clone(),
        money(r.ev_call),
        money(r.ev_fold),
        money(r.e_win),
        money(r.e_lose),
        r.threshold.map_or_else(|| "none".into(), |t| format!("{:.2}%", 100.0 * t)),
        r.recommendation.clone(),
    ]
}

pub fn decision(d: &DecisionOutput) -> String {
    let rows = match d {
        DecisionOutput::Both { icm, dcm } => vec![decision_row(icm), decision_row(dcm)],
        DecisionOutput::Single(r) => vec![decision_row(r)],
    };
    table(
        &strings(&["model", "ev call", "ev fold", "if won", "if lost", "break-even", "action"]),
        &rows,
    )
}

pub fn oracle(o: &OracleOutput) -> String {
    let rows: Vec<Vec<String>> = o
        .equity
        .iter()
        .zip(&o.dcm.equity)
        .enumerate()
        .map(|(i, (a, b))| vec![format!("player {}", i + 1), format!("{a:.6}"), format!("{b:.6}"), format!("{:.1e}", (a - b).abs())])
        .collect();
    let mut out = table(&strings(&["", "markov", "dcm tree", "diff"]), &rows);
    let how = match o.iterations {
        Some(k) => format!("{} after {k} sweeps", o.method),
        None => o.method.clone(),
    };
    out.push_str(&format!("{} states, {how}; max diff {:.1e}\n", o.states, o.max_abs_diff));
    if let Some(exact) = &o.exact_equity {
        out.push_str(&format!("exact: {}\n", exact.join(", ")));
    }
    out
}
