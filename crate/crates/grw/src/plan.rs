//! Plan records and replay validation.

use grw_core::search::Plan;
use grw_core::{ActionId, ModelError, Problem, State};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub length: usize,
    pub actions: Vec<PlanStep>,
    pub problem: String,
    pub algorithm: String,
    #[serde(default)]
    pub optimal: Option<bool>,
    #[serde(default)]
    pub wall_ms: Option<f64>,
}

impl PlanRecord {
    pub fn new(p: &Problem, plan: &[ActionId], algorithm: &str) -> Self {
        let actions = plan
            .iter()
            .map(|&a| PlanStep {
                name: p.action_schema_name(a).to_string(),
                args: p.action(a).args.iter().map(|&o| p.objects[o as usize].name.clone()).collect(),
            })
            .collect();
        PlanRecord {
            length: plan.len(),
            actions,
            problem: p.name.clone(),
            algorithm: algorithm.to_string(),
            optimal: None,
            wall_ms: None,
        }
    }

    /// Action ids of the steps in `p`.
    pub fn resolve(&self, p: &Problem) -> Result<Plan, String> {
        self.actions
            .iter()
            .map(|s| {
                let args: Vec<&str> = s.args.iter().map(String::as_str).collect();
                p.find_action(&s.name, &args).ok_or_else(|| format!("no action {}({})", s.name, s.args.join(", ")))
            })
            .collect()
    }
}

/// Compact JSON with fields in declaration order.
pub fn emit_plan(r: &PlanRecord) -> String {
    serde_json::to_string(r).expect("plan records serialize")
}

pub fn read_plan(text: &str) -> Result<PlanRecord, serde_json::Error> {
    serde_json::from_str(text)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub valid: bool,
    /// Steps applied before failing (the plan length when valid).
    pub steps: usize,
    pub failed_step: Option<usize>,
    pub reason: Option<String>,
}

/// Replays `plan` from the initial state and checks the goal.
pub fn validate_plan(p: &Problem, plan: &[ActionId]) -> Verdict {
    validate_from(p, &p.init, plan)
}

pub fn validate_from(p: &Problem, s0: &State, plan: &[ActionId]) -> Verdict {
    let mut s = s0.clone();
    for (i, &a) in plan.iter().enumerate() {
        if a as usize >= p.actions.len() {
            return Verdict { valid: false, steps: i, failed_step: Some(i), reason: Some(format!("unknown action id {a}")) };
        }
        match p.apply(&s, a) {
            Ok(next) => s = next,
            Err(ModelError::PreconditionUnsatisfied { action, missing }) => {
                let names: Vec<String> = missing.iter().map(|&m| p.atom_name(m)).collect();
                return Verdict {
                    valid: false,
                    steps: i,
                    failed_step: Some(i),
                    reason: Some(format!("{action}: missing {}", names.join(", "))),
                };
            }
            Err(e) => return Verdict { valid: false, steps: i, failed_step: Some(i), reason: Some(e.to_string()) },
        }
    }
    if s.contains(p.goal) || s.contains_all(&p.goal_conj) {
        Verdict { valid: true, steps: plan.len(), failed_step: None, reason: None }
    } else {
        let missing: Vec<String> = p.goal_conj.iter().filter(|&&g| !s.contains(g)).map(|&g| p.atom_name(g)).collect();
        Verdict { valid: false, steps: plan.len(), failed_step: None, reason: Some(format!("goal not reached: {}", missing.join(", "))) }
    }
}
