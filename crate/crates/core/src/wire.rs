//! JSON request and response bodies shared by the command line, the HTTP
//! service and the browser demo. Field names are part of the public format.
//! Player ids on the wire are 1-based.

use serde::{Deserialize, Serialize};

use crate::analysis::{decision_ev, finish_distribution, DecisionReport, DecisionScenario};
use crate::dcm::{dcm_run, Budget, DcmConfig, Execution};
use crate::error::{Error, Result};
use crate::icm::icm_equities;
use crate::report::{EquityReport, Model};
use crate::stacks::{PrizeSchedule, StackVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigBody {
    pub max_depth: u32,
    pub min_prob: f64,
    pub leaf_policy: String,
    pub two_player_shortcut: bool,
}

impl Default for ConfigBody {
    fn default() -> Self {
        Self::from(&DcmConfig::default())
    }
}

impl From<&DcmConfig> for ConfigBody {
    fn from(c: &DcmConfig) -> Self {
        Self {
            max_depth: c.max_depth,
            min_prob: c.min_prob,
            leaf_policy: c.leaf_policy.as_str().to_string(),
            two_player_shortcut: c.two_player_shortcut,
        }
    }
}

impl ConfigBody {
    /// Always deterministic: identical requests must give identical bytes.
    pub fn to_config(&self) -> Result<DcmConfig> {
        let config = DcmConfig {
            max_depth: self.max_depth,
            min_prob: self.min_prob,
            leaf_policy: self.leaf_policy.parse()?,
            two_player_shortcut: self.two_player_shortcut,
            execution: Execution::Deterministic,
        };
        config.validate()?;
        Ok(config)
    }
}

fn parse_model(model: &str) -> Result<Model> {
    model.parse().map_err(Error::InvalidInput)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquityRequest {
    pub stacks: Vec<u64>,
    pub prizes: Vec<f64>,
    #[serde(default)]
    pub config: ConfigBody,
    #[serde(default = "default_model")]
    pub model: String,
}

fn default_model() -> String {
    "dcm".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquityResponse {
    pub model: String,
    pub equity: Vec<f64>,
    pub win_prob: Vec<f64>,
    pub explored_mass: f64,
    pub nodes_visited: u64,
    pub pruned_nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl From<&EquityReport> for EquityResponse {
    fn from(r: &EquityReport) -> Self {
        Self {
            model: r.model.as_str().to_string(),
            equity: r.equity.clone(),
            win_prob: r.win_prob.clone(),
            explored_mass: r.explored_mass,
            nodes_visited: r.nodes_visited,
            pruned_nodes: r.pruned_nodes,
            elapsed_ms: None,
        }
    }
}

pub fn equity(req: &EquityRequest, budget: Budget) -> Result<EquityResponse> {
    let model = parse_model(&req.model)?;
    let stacks = StackVector::new(req.stacks.clone())?;
    let prizes = PrizeSchedule::new(req.prizes.clone())?;
    let config = req.config.to_config()?;
    let report = match model {
        Model::Icm => icm_equities(&stacks, &prizes)?,
        Model::Dcm => dcm_run(&stacks, &prizes, &config, budget)?.report,
    };
    Ok(EquityResponse::from(&report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionsRequest {
    pub stacks: Vec<u64>,
    #[serde(default)]
    pub config: ConfigBody,
    #[serde(default = "default_model")]
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionsResponse {
    pub model: String,
    /// `positions[player][k]`: probability of finishing at position k + 1.
    pub positions: Vec<Vec<f64>>,
    pub row_sums: Vec<f64>,
    pub column_sums: Vec<f64>,
}

pub fn positions(req: &PositionsRequest, budget: Budget) -> Result<PositionsResponse> {
    let model = parse_model(&req.model)?;
    let stacks = StackVector::new(req.stacks.clone())?;
    let config = req.config.to_config()?;
    let m = finish_distribution(&stacks, model, &config, budget)?;
    Ok(PositionsResponse {
        model: model.as_str().to_string(),
        row_sums: m.row_sums(),
        column_sums: m.column_sums(),
        positions: m.q,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRequest {
    pub prizes: Vec<f64>,
    /// 1-based seat of the deciding player.
    pub hero: usize,
    pub fold_stacks: Vec<u64>,
    pub win_stacks: Vec<u64>,
    pub lose_stacks: Vec<u64>,
    pub hero_equity: f64,
    #[serde(default = "default_decision_model")]
    pub model: String,
    #[serde(default)]
    pub config: ConfigBody,
}

fn default_decision_model() -> String {
    "both".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionResponse {
    pub model: String,
    pub ev_call: f64,
    pub ev_fold: f64,
    pub e_win: f64,
    pub e_lose: f64,
    pub recommendation: String,
    pub threshold: Option<f64>,
}

impl From<&DecisionReport> for DecisionResponse {
    fn from(r: &DecisionReport) -> Self {
        Self {
            model: r.model.as_str().to_string(),
            ev_call: r.ev_call,
            ev_fold: r.ev_fold,
            e_win: r.e_win,
            e_lose: r.e_lose,
            recommendation: r.recommendation.as_str().to_string(),
            threshold: r.threshold,
        }
    }
}

/// One model's decision, or both side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecisionOutput {
    Both {
        icm: DecisionResponse,
        dcm: DecisionResponse,
    },
    Single(DecisionResponse),
}

impl DecisionRequest {
    pub fn scenario(&self) -> Result<DecisionScenario> {
        if self.hero == 0 {
            return Err(Error::InvalidInput("hero is a 1-based seat number".into()));
        }
        let scenario = DecisionScenario {
            prizes: PrizeSchedule::new(self.prizes.clone())?,
            hero: self.hero - 1,
            fold_stacks: self.fold_stacks.clone(),
            win_stacks: self.win_stacks.clone(),
            lose_stacks: self.lose_stacks.clone(),
            hero_equity: self.hero_equity,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn decision(req: &DecisionRequest, budget: Budget) -> Result<DecisionOutput> {
    let scenario = req.scenario()?;
    let config = req.config.to_config()?;
    let run = |model| decision_ev(&scenario, model, &config, budget).map(|r| DecisionResponse::from(&r));
    if req.model.eq_ignore_ascii_case("both") {
        Ok(DecisionOutput::Both {
            icm: run(Model::Icm)?,
            dcm: run(Model::Dcm)?,
        })
    } else {
        Ok(DecisionOutput::Single(run(parse_model(&req.model)?)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

impl ErrorBody {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            error: ErrorDetail {
                code: code.to_string(),
                message: message.into(),
            },
        }
    }
}

/// Stable machine-readable code for an engine error.
pub fn error_code(err: &Error) -> &'static str {
    match err {
        Error::BudgetExceeded(_) => "budget_exceeded",
        Error::StateBudgetExceeded { .. } | Error::NotConverged { .. } => "resource_exhausted",
        Error::Invariant(_) => "internal",
        _ => "validation_error",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_defaults() {
        let req: EquityRequest =
            serde_json::from_str(r#"{"stacks":[1000,500],"prizes":[100]}"#).unwrap();
        assert_eq!(req.model, "dcm");
        assert_eq!(req.config.to_config().unwrap(), DcmConfig::default());
        let resp = equity(&req, Budget::default()).unwrap();
        assert!((resp.equity[0] - 200.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn config_round_trip_and_validation() {
        let body: ConfigBody = serde_json::from_str(
            r#"{"max_depth":20,"min_prob":1e-9,"leaf_policy":"icm-tail","two_player_shortcut":true}"#,
        )
        .unwrap();
        let c = body.to_config().unwrap();
        assert_eq!(ConfigBody::from(&c), body);
        let bad = ConfigBody {
            leaf_policy: "nope".into(),
            ..ConfigBody::default()
        };
        assert!(bad.to_config().is_err());
        assert!(serde_json::from_str::<ConfigBody>(r#"{"depth":3}"#).is_err());
    }

    #[test]
    fn response_omits_elapsed_unless_set() {
        let req = EquityRequest {
            stacks: vec![1000, 1000],
            prizes: vec![100.0, 0.0],
            config: ConfigBody::default(),
            model: "icm".into(),
        };
        let json = serde_json::to_string(&equity(&req, Budget::default()).unwrap()).unwrap();
        assert_eq!(
            json,
            r#"{"model":"icm","equity":[50.0,50.0],"win_prob":[0.5,0.5],"explored_mass":1.0,"nodes_visited":2,"pruned_nodes":0}"#
        );
    }

    #[test]
    fn decision_both_models() {
        let req: DecisionRequest = serde_json::from_str(
            r#"{"prizes":[50,30,20],"hero":2,"fold_stacks":[1200,800,2000,3000],
                "win_stacks":[0,2000,2000,3000],"lose_stacks":[2000,0,2000,3000],"hero_equity":0.4}"#,
        )
        .unwrap();
        let DecisionOutput::Both { icm, dcm } = decision(&req, Budget::default()).unwrap() else {
            panic!("expected both models");
        };
        assert_eq!(icm.recommendation, "fold");
        assert_eq!(dcm.recommendation, "call");
        let json = serde_json::to_value(DecisionOutput::Single(icm.clone())).unwrap();
        assert_eq!(json["model"], "icm");
    }

    #[test]
    fn error_codes() {
        assert_eq!(error_code(&Error::EmptyStacks), "validation_error");
        assert_eq!(error_code(&Error::BudgetExceeded("x".into())), "budget_exceeded");
        assert_eq!(error_code(&Error::Invariant("x".into())), "internal");
        let body = serde_json::to_string(&ErrorBody::new("validation_error", "bad")).unwrap();
        assert_eq!(body, r#"{"error":{"code":"validation_error","message":"bad"}}"#);
    }
}
