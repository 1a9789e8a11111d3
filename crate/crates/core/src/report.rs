use serde::{Deserialize, Serialize};

/// Which prize-equity model produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Icm,
    Dcm,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Icm => "icm",
            Model::Dcm => "dcm",
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "icm" => Ok(Model::Icm),
            "dcm" => Ok(Model::Dcm),
            other => Err(format!("unknown model '{other}' (expected icm or dcm)")),
        }
    }
}

/// Per-player money expectation and win probability, indexed by seat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquityReport {
    pub model: Model,
    pub equity: Vec<f64>,
    pub win_prob: Vec<f64>,
    /// Total win probability actually accumulated; 1 when nothing was pruned.
    pub explored_mass: f64,
    pub nodes_visited: u64,
    pub pruned_nodes: u64,
}

impl EquityReport {
    pub fn total_equity(&self) -> f64 {
        self.equity.iter().sum()
    }
}
