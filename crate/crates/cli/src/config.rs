//! Scenario schema and validation.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use preq_core::points::fibonacci_seeded;
use preq_core::Point;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Kappa,
    Action,
    Omega,
    Winding,
    Verify,
    Su2Demo,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Kappa => "kappa",
            Task::Action => "action",
            Task::Omega => "omega",
            Task::Winding => "winding",
            Task::Verify => "verify",
            Task::Su2Demo => "su2-demo",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    #[default]
    Constant,
    /// `ρ(t) = 1 − cos 2πt`
    CosineRamp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Zero,
    Invariant {
        a: f64,
        b: f64,
        #[serde(default)]
        z: f64,
    },
    Mix {
        weights: [f64; 2],
        #[serde(default)]
        profile: Profile,
    },
    Scaled {
        base: Box<HamiltonianSpec>,
        factor: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// The scenario's Hamiltonian loop for every `s`.
    Constant,
    SubgroupRotation {
        #[serde(default)]
        start: f64,
        #[serde(default = "full_turn")]
        sweep: f64,
    },
    TwoAxisMix,
    PerturbedSubgroup {
        #[serde(default = "default_eps")]
        eps: f64,
    },
    /// `f + c·s` added to the scenario's Hamiltonian, unnormalized.
    Offset { c: f64 },
}

fn full_turn() -> f64 {
    2.0 * PI
}

fn default_eps() -> f64 {
    0.3
}

#[derive(Clone, Debug, PartialEq)]
pub enum BasePoints {
    List(Vec<[f64; 2]>),
    Auto(usize),
}

impl Default for BasePoints {
    fn default() -> Self {
        BasePoints::Auto(10)
    }
}

impl BasePoints {
    pub fn resolve(&self, seed: u64) -> Vec<Point> {
        match self {
            BasePoints::List(v) => v.iter().map(|[t, p]| Point::from_spherical(*t, *p)).collect(),
            BasePoints::Auto(count) => fibonacci_seeded(*count, seed),
        }
    }
}

impl Serialize for BasePoints {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BasePoints::List(v) => v.serialize(s),
            BasePoints::Auto(c) => format!("auto:{c}").serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for BasePoints {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<[f64; 2]>),
            Auto(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(BasePoints::List(v)),
            Raw::Auto(s) => s
                .strip_prefix("auto:")
                .and_then(|c| c.parse().ok())
                .map(BasePoints::Auto)
                .ok_or_else(|| serde::de::Error::custom(format!("expected \"auto:<count>\", got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub flow_rel_tol: f64,
    pub phase_tol: f64,
    pub closure_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            flow_rel_tol: 1e-10,
            phase_tol: 1e-6,
            closure_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub n: i64,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub base_points: BasePoints,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_s_samples")]
    pub s_samples: usize,
    /// Parameter values for the `omega` task.
    #[serde(default = "default_s_values")]
    pub s_values: Vec<f64>,
    /// Orbit sizes for the `verify` task; defaults to `[n]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<i64>>,
    /// Not echoed into results.
    #[serde(default, skip_serializing)]
    pub output: Output,
}

fn default_s_samples() -> usize {
    64
}

fn default_s_values() -> Vec<f64> {
    vec![0.25, 0.5, 0.75]
}

fn config_err(element: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        element: element.into(),
        message: message.into(),
    }
}

impl Scenario {
    pub fn minimal(n: i64, task: Task) -> Self {
        Self {
            n,
            task,
            hamiltonian: None,
            family: None,
            base_points: BasePoints::default(),
            tolerances: Tolerances::default(),
            seed: 0,
            s_samples: default_s_samples(),
            s_values: default_s_values(),
            n_values: None,
            output: Output::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| config_err("config", e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(config_err("n", "n must be nonzero"));
        }
        let t = &self.tolerances;
        if !(1e-13..=1e-3).contains(&t.flow_rel_tol) {
            return Err(config_err("tolerances.flow_rel_tol", "must lie in [1e-13, 1e-3]"));
        }
        if !(t.phase_tol > 0.0) {
            return Err(config_err("tolerances.phase_tol", "must be positive"));
        }
        if !(t.closure_tol > 0.0) {
            return Err(config_err("tolerances.closure_tol", "must be positive"));
        }
        match &self.base_points {
            BasePoints::Auto(0) => return Err(config_err("base_points", "need at least one point")),
            BasePoints::List(v) if v.is_empty() => return Err(config_err("base_points", "need at least one point")),
            BasePoints::List(v) => {
                if let Some(i) = v.iter().position(|p| !p.iter().all(|x| x.is_finite())) {
                    return Err(config_err(&format!("base_points[{i}]"), "coordinates must be finite"));
                }
            }
            _ => {}
        }
        if let Some(h) = &self.hamiltonian {
            check_hamiltonian(h, "hamiltonian")?;
        }
        match self.task {
            Task::Kappa | Task::Action if self.hamiltonian.is_none() => {
                return Err(config_err("hamiltonian", format!("task {} needs a hamiltonian", self.task.name())));
            }
            Task::Omega | Task::Winding => {
                let fam = self
                    .family
                    .as_ref()
                    .ok_or_else(|| config_err("family", format!("task {} needs a family", self.task.name())))?;
                if matches!(fam, FamilySpec::Constant | FamilySpec::Offset { .. }) && self.hamiltonian.is_none() {
                    return Err(config_err("hamiltonian", "this family is built from the scenario hamiltonian"));
                }
                if self.task == Task::Winding {
                    if self.s_samples == 0 {
                        return Err(config_err("s_samples", "must be positive"));
                    }
                    if !family_is_closed(fam) {
                        return Err(config_err("family", "winding needs a closed family"));
                    }
                }
                if self.task == Task::Omega && self.s_values.is_empty() {
                    return Err(config_err("s_values", "need at least one value"));
                }
            }
            Task::Verify => {
                if let Some(ns) = &self.n_values {
                    if ns.is_empty() || ns.contains(&0) {
                        return Err(config_err("n_values", "need nonzero orbit sizes"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn orbit_sizes(&self) -> Vec<i64> {
        self.n_values.clone().unwrap_or_else(|| vec![self.n])
    }
}

fn check_hamiltonian(h: &HamiltonianSpec, at: &str) -> Result<(), CliError> {
    let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
    match h {
        HamiltonianSpec::Zero => Ok(()),
        HamiltonianSpec::Invariant { a, b, z } if !finite(&[*a, *b, *z]) => {
            Err(config_err(at, "direction must be finite"))
        }
        HamiltonianSpec::Mix { weights, .. } if !finite(weights) => Err(config_err(&format!("{at}.weights"), "must be finite")),
        HamiltonianSpec::Scaled { base, factor } => {
            if !factor.is_finite() {
                return Err(config_err(&format!("{at}.factor"), "must be finite"));
            }
            check_hamiltonian(base, &format!("{at}.base"))
        }
        _ => Ok(()),
    }
}

fn family_is_closed(f: &FamilySpec) -> bool {
    match f {
        FamilySpec::Constant | FamilySpec::PerturbedSubgroup { .. } => true,
        FamilySpec::SubgroupRotation { sweep, .. } => {
            let turns = sweep / (2.0 * PI);
            (turns - turns.round()).abs() < 1e-12
        }
        FamilySpec::TwoAxisMix | FamilySpec::Offset { .. } => false,
    }
}
