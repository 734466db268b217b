//! Scenario files: parameters, agents with their regions and tasks, and the
//! switching protocol. JSON or TOML.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{epsilon_bounds, r_s, ControlParams};
use crate::error::SimError;
use crate::network::ConnectivityGraph;
use crate::planner::{build_region_graph, synthesize_plan, AgentMission, DiscretePlan, RegionSpec};
use crate::protocol::{DetectorParams, FProb, ProtocolKind};
use crate::scalar::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    pub r: f64,
    pub delta: f64,
    pub eps: f64,
    pub c_max: f64,
    pub r_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: usize,
    pub start: Vec2<f64>,
    pub regions: Vec<RegionSpec>,
    pub formula: String,
}

/// Detector thresholds; missing entries take the defaults of
/// [`DetectorParams::with_defaults`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    pub dt_window: Option<f64>,
    pub du: Option<f64>,
    pub dd: Option<f64>,
}

/// Optional run defaults stored with the scenario; command-line flags win.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub params: ScenarioParams,
    pub agents: Vec<AgentSpec>,
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub detector: DetectorSpec,
    #[serde(default)]
    pub fprob: FProb,
    #[serde(default)]
    pub run: RunSpec,
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Reads a scenario; `.toml` files are TOML, anything else JSON.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: shown.clone(),
            source,
        })?;
        let parsed = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml_str(&text),
            _ => Self::from_json_str(&text),
        };
        parsed.map_err(|message| SimError::Format {
            path: shown,
            message,
        })
    }

    pub fn control_params(&self) -> ControlParams<f64> {
        let p = self.params;
        ControlParams {
            r: p.r,
            delta: p.delta,
            eps: p.eps,
            c_max: p.c_max,
            r_min: p.r_min,
            n: self.agents.len(),
        }
    }

    pub fn detector_params(&self) -> DetectorParams {
        let d = self.detector;
        DetectorParams::with_defaults(&self.control_params(), d.dt_window, d.du, d.dd)
    }

    pub fn starts(&self) -> Vec<Vec2<f64>> {
        self.agents.iter().map(|a| a.start).collect()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.agents.iter().map(|a| a.id).collect()
    }
}

/// One failed check and the entity it concerns.
#[derive(Clone, Debug, PartialEq)]
pub struct Issue {
    pub entity: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

/// Outcome of [`validate_scenario`]: violations make the scenario unusable,
/// notes are diagnostics only.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Issue>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn violation(&mut self, entity: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Issue {
            entity: entity.into(),
            message: message.into(),
        });
    }
}

fn is_plain_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Checks everything a run relies on: parameters, region layout, formulas,
/// a connected initial graph and the protocol constants.
pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let p = s.control_params();
    let params_ok = match p.validate() {
        Ok(()) => true,
        Err(e) => {
            rep.violation("params", e.to_string());
            false
        }
    };
    if s.agents.is_empty() {
        rep.violation("agents", "at least one agent is required");
        return rep;
    }
    if s.agents.windows(2).any(|w| w[0].id >= w[1].id) {
        rep.violation("agents", "ids must be listed in strictly ascending order");
    }

    let mut layout_ok = true;
    for a in &s.agents {
        let who = format!("agent {}", a.id);
        for (k, r) in a.regions.iter().enumerate() {
            if !is_plain_id(&r.id) {
                rep.violation(&who, format!("region id `{}` must be alphanumeric", r.id));
            }
            if a.regions[..k].iter().any(|o| o.id == r.id) {
                rep.violation(&who, format!("duplicate region id `{}`", r.id));
            }
        }
        match AgentMission::new(a.id, a.start, &a.regions, &a.formula) {
            Ok(m) => {
                if params_ok {
                    if let Err(e) = build_region_graph(&m, p.c_max, p.r_min) {
                        rep.violation(&who, e.to_string());
                        layout_ok = false;
                    }
                }
                if s.protocol == ProtocolKind::Scltl && !m.is_cosafe() {
                    rep.notes.push(format!(
                        "{who}: `{}` is not co-safe; the co-safe protocol will not finish it",
                        a.formula
                    ));
                }
            }
            Err(e) => {
                rep.violation(&who, e.to_string());
                layout_ok = false;
            }
        }
    }

    // Regions of different agents must be separated as well.
    for (ia, a) in s.agents.iter().enumerate() {
        for b in &s.agents[ia + 1..] {
            for ra in &a.regions {
                for rb in &b.regions {
                    let d = (ra.center - rb.center).norm();
                    if d <= 2.0 * p.r_min {
                        layout_ok = false;
                        rep.violation(
                            format!("agent {} region {}", a.id, ra.id),
                            format!(
                                "center is {d} from agent {} region {}, need more than {}",
                                b.id,
                                rb.id,
                                2.0 * p.r_min
                            ),
                        );
                    }
                }
            }
        }
    }
    if layout_ok && params_ok {
        rep.notes.push(format!(
            "region layout satisfied with c_max={} and r_min={}",
            p.c_max, p.r_min
        ));
    }

    if params_ok && ConnectivityGraph::init(&s.starts(), p.r).is_err() {
        rep.violation("starts", format!("initial graph with radius {} is disconnected", p.r));
    }

    let d = s.detector_params();
    if !d.is_valid() {
        rep.violation(
            "detector",
            format!(
                "need positive thresholds with du < dd (dt_window={}, du={}, dd={})",
                d.dt_window, d.du, d.dd
            ),
        );
    }
    if !(s.fprob.chi_bar > 0.0 && s.fprob.alpha >= 0.0) {
        rep.violation("fprob", "chi_bar must be positive and alpha non-negative");
    }
    if let Some(dt) = s.run.dt {
        if !(dt > 0.0) {
            rep.violation("run", "dt must be positive");
        }
    }
    if let Some(h) = s.run.horizon {
        if !(h > 0.0) {
            rep.violation("run", "horizon must be positive");
        }
    }

    if params_ok {
        let rs = r_s(p.eps, &p);
        if rs > p.r_min {
            rep.notes.push(format!(
                "r_S(eps)={rs:.4} exceeds r_min={}; convergence into the goal is not guaranteed by the analysis",
                p.r_min
            ));
        }
        if let Ok(b) = epsilon_bounds(&p) {
            if p.eps >= b.eps_min {
                rep.notes.push(format!(
                    "eps={} is not below eps_min={:.4e}",
                    p.eps, b.eps_min
                ));
            }
        }
    }
    rep
}

/// A validated scenario with missions and plans.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub scenario: Scenario,
    pub params: ControlParams<f64>,
    pub detector: DetectorParams,
    pub missions: Vec<AgentMission>,
    pub plans: Vec<DiscretePlan>,
}

impl Compiled {
    pub fn n(&self) -> usize {
        self.missions.len()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.scenario.ids()
    }
}

/// Validates and synthesizes one plan per agent.
pub fn compile(s: &Scenario) -> Result<Compiled, SimError> {
    let rep = validate_scenario(s);
    if !rep.is_valid() {
        return Err(SimError::Validation(
            rep.violations.iter().map(Issue::to_string).collect(),
        ));
    }
    let params = s.control_params();
    let mut missions = Vec::new();
    let mut plans = Vec::new();
    for a in &s.agents {
        let wrap = |source| SimError::Synthesis {
            agent: a.id,
            source,
        };
        let m = AgentMission::new(a.id, a.start, &a.regions, &a.formula).map_err(wrap)?;
        let g = build_region_graph(&m, params.c_max, params.r_min).map_err(wrap)?;
        plans.push(synthesize_plan(&m, &g).map_err(wrap)?);
        missions.push(m);
    }
    Ok(Compiled {
        scenario: s.clone(),
        params,
        detector: s.detector_params(),
        missions,
        plans,
    })
}
