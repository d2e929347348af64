//! JSON records written by `rate` and `simulate`.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub const TOOL: &str = "cvqkd";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Asymptotic,
    Finite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    pub eta: f64,
    pub eta_db: f64,
    pub eps: f64,
    pub nbar: f64,
    pub m: f64,
    /// Absent in asymptotic mode.
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effective {
    pub mu: Option<f64>,
    pub eta: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateOutputs {
    /// Secret key rate in bits per channel use; may be negative.
    pub rate: f64,
    /// Mutual information, finite mode only (it diverges with `mu`).
    pub i_ab: Option<f64>,
    /// Holevo bound, finite mode only.
    pub holevo: Option<f64>,
    pub k: f64,
    pub effective: Effective,
    /// Absent when the bound diverges (`eta = 1`).
    pub plob: Option<f64>,
}

/// One `rate` evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub timestamp: DateTime<Utc>,
    pub mode: Mode,
    pub inputs: RateInputs,
    pub outputs: RateOutputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationInputs {
    pub mu: f64,
    pub eta: f64,
    pub eps: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationEstimates {
    pub eta: Estimate,
    pub eps: Estimate,
    pub i_ab: Estimate,
    pub mu: Estimate,
    pub sample_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    /// Finite-modulation mutual information at the true parameters.
    pub i_ab: f64,
}

/// One `simulate` run. Carries no timestamp so that a fixed seed gives
/// byte-identical output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub tool: String,
    pub version: String,
    pub inputs: SimulationInputs,
    pub estimate: SimulationEstimates,
    pub closed_form: ClosedForm,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunRecord {
        RunRecord {
            tool: TOOL.into(),
            version: VERSION.into(),
            timestamp: Utc::now(),
            mode: Mode::Finite,
            inputs: RateInputs {
                eta: 0.1,
                eta_db: 10.0,
                eps: 0.01,
                nbar: 1.0 / 3.0,
                m: 1.0,
                mu: Some(10.0),
            },
            outputs: RateOutputs {
                rate: -1.234_567_890_123_456_7e-5,
                i_ab: Some(0.1 + 0.2),
                holevo: None,
                k: 2f64.sqrt(),
                effective: Effective {
                    mu: Some(std::f64::consts::PI),
                    eta: 1e-300,
                    eps: 5e-324,
                },
                plob: None,
            },
        }
    }

    #[test]
    fn json_round_trips_exactly() {
        let rec = sample();
        let text = serde_json::to_string_pretty(&rec).unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.outputs.rate.to_bits(), rec.outputs.rate.to_bits());
    }

    #[test]
    fn nulls_are_explicit() {
        let text = serde_json::to_string(&sample()).unwrap();
        assert!(text.contains("\"holevo\":null"));
        assert!(text.contains("\"mode\":\"finite\""));
    }
}
