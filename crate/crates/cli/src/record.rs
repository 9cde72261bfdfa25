//! Result records written to `results.json` and `phases.csv`.

use serde::Serialize;

use crate::config::Scenario;

#[derive(Clone, Debug, Serialize)]
pub struct PointValue {
    pub theta: f64,
    pub phi: f64,
    /// Reduced phase in `[0, 1)` revolutions.
    pub phase_rev: f64,
    pub kappa_re: f64,
    pub kappa_im: f64,
    /// Unreduced action representative, for the `action` task.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<f64>,
    pub chart_transitions: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaRow {
    pub s: f64,
    pub values: Vec<f64>,
    pub spread: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindingSummary {
    pub winding: i64,
    pub deg: i64,
    pub samples: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    /// `None` when the check itself failed to evaluate.
    pub residual: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SuiteEntry {
    pub fn new(name: &str, n: Option<i64>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            n,
            residual: Some(residual),
            threshold,
            pass: residual <= threshold,
            value: None,
            error: None,
        }
    }

    pub fn failed(name: &str, n: Option<i64>, threshold: f64, error: String) -> Self {
        Self {
            name: name.into(),
            n,
            residual: None,
            threshold,
            pass: false,
            value: None,
            error: Some(error),
        }
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }
}

/// One row of `phases.csv`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PlotRow {
    pub s: f64,
    /// Continuous lift of the phase, in revolutions.
    pub phase_rev: f64,
    pub kappa_re: f64,
    pub kappa_im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
}

impl Metadata {
    pub fn new(seed: u64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultRecord {
    pub task: String,
    pub scenario: Scenario,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub omega: Vec<OmegaRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<WindingSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deg: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demo: Option<serde_json::Value>,
    pub suite: Vec<SuiteEntry>,
    pub pass: bool,
    pub metadata: Metadata,
    #[serde(skip)]
    pub plot: Vec<PlotRow>,
}

impl ResultRecord {
    pub fn new(scenario: &Scenario) -> Self {
        Self {
            task: scenario.task.name().into(),
            scenario: scenario.clone(),
            points: Vec::new(),
            spread: None,
            omega: Vec::new(),
            winding: None,
            deg: None,
            demo: None,
            suite: Vec::new(),
            pass: true,
            metadata: Metadata::new(scenario.seed),
            plot: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: SuiteEntry) {
        self.pass &= entry.pass;
        self.suite.push(entry);
    }
}
