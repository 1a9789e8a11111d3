//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain strings and numbers and returns a JSON string,
//! either the wire response or `{"error": {"code", "message"}}`. The node cap
//! keeps a careless input from freezing the tab.

use chipsplit_core::wire::{self, ConfigBody, DecisionRequest, EquityRequest, ErrorBody, PositionsRequest};
use chipsplit_core::{Budget, Error};
use serde_json::json;
use wasm_bindgen::prelude::*;

const NODE_CAP: u64 = 20_000_000;

fn budget() -> Budget {
    Budget {
        max_nodes: Some(NODE_CAP),
        deadline: None,
    }
}

fn list<T: std::str::FromStr>(field: &str, raw: &str) -> Result<Vec<T>, Error> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::InvalidInput(format!("{field}: '{s}' is not a number"))))
        .collect()
}

fn respond<T: serde::Serialize>(result: Result<T, Error>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).expect("responses serialize"),
        Err(e) => serde_json::to_string(&ErrorBody::new(wire::error_code(&e), e.to_string()))
            .expect("errors serialize"),
    }
}

/// ICM and DCM equities plus the percent difference per player.
pub fn compare_json(stacks: &str, prizes: &str) -> String {
    respond((|| {
        let stacks: Vec<u64> = list("stacks", stacks)?;
        let prizes: Vec<f64> = list("prizes", prizes)?;
        let run = |model: &str| {
            wire::equity(
                &EquityRequest {
                    stacks: stacks.clone(),
                    prizes: prizes.clone(),
                    config: ConfigBody::default(),
                    model: model.into(),
                },
                budget(),
            )
        };
        let icm = run("icm")?;
        let dcm = run("dcm")?;
        let diff: Vec<Option<f64>> = icm
            .equity
            .iter()
            .zip(&dcm.equity)
            .map(|(&i, &d)| (i != 0.0).then(|| 100.0 * (d - i) / i))
            .collect();
        Ok(json!({ "icm": icm, "dcm": dcm, "percent_diff": diff }))
    })())
}

/// Finish-position matrix for one model ("icm" or "dcm").
pub fn positions_json(stacks: &str, model: &str) -> String {
    respond((|| {
        wire::positions(
            &PositionsRequest {
                stacks: list("stacks", stacks)?,
                config: ConfigBody::default(),
                model: model.into(),
            },
            budget(),
        )
    })())
}

/// Call/fold analysis under both models. `hero` counts from 1.
pub fn decision_json(prizes: &str, hero: usize, fold: &str, win: &str, lose: &str, hero_equity: f64) -> String {
    respond((|| {
        wire::decision(
            &DecisionRequest {
                prizes: list("prizes", prizes)?,
                hero,
                fold_stacks: list("fold stacks", fold)?,
                win_stacks: list("win stacks", win)?,
                lose_stacks: list("lose stacks", lose)?,
                hero_equity,
                model: "both".into(),
                config: ConfigBody::default(),
            },
            budget(),
        )
    })())
}

#[wasm_bindgen]
pub fn compare(stacks: &str, prizes: &str) -> String {
    compare_json(stacks, prizes)
}

#[wasm_bindgen]
pub fn positions(stacks: &str, model: &str) -> String {
    positions_json(stacks, model)
}

#[wasm_bindgen]
pub fn decision(prizes: &str, hero: usize, fold: &str, win: &str, lose: &str, hero_equity: f64) -> String {
    decision_json(prizes, hero, fold, win, lose, hero_equity)
}
