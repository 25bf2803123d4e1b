//! Uniform entry points for the planners and circuit compilers.

use std::fmt;

use grw_core::circuit::{self, CircuitError, CompileOptions, DepthExpr, RelationalCircuit, Rollout};
use grw_core::regression::{Sgrs, SgrsConfig, WidthMode, DEFAULT_SGRS_BUDGET};
use grw_core::search::{bwd, iw, opt_search, Plan, SearchError, DEFAULT_BWD_BUDGET, DEFAULT_STATE_CAP};
use grw_core::selector::{Selector, TrSelect, DEFAULT_SELECT_BUDGET};
use grw_core::width::{estimate_sos_width, WidthCertificate, WidthOptions};
use grw_core::Problem;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Opt,
    Bwd,
    Sgrs,
    SgrsMemo,
    Iw,
    Select,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Opt => "opt",
            Algo::Bwd => "bwd",
            Algo::Sgrs => "sgrs",
            Algo::SgrsMemo => "sgrs-memo",
            Algo::Iw => "iw",
            Algo::Select => "select",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircuitKind {
    Bwd,
    Sgrs,
    Selector,
}

impl CircuitKind {
    pub fn name(self) -> &'static str {
        match self {
            CircuitKind::Bwd => "bwd",
            CircuitKind::Sgrs => "sgrs",
            CircuitKind::Selector => "selector",
        }
    }
}

/// Limits shared by every command. `None` means the algorithm's default.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    #[serde(default)]
    pub state_cap: Option<usize>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub breadth_cap: Option<usize>,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub k_max: Option<usize>,
}

pub const DEFAULT_MAX_STEPS: usize = 500;

impl Caps {
    pub fn compile_options(&self) -> CompileOptions {
        let mut o = CompileOptions::default();
        if let Some(b) = self.breadth_cap {
            o.breadth_cap = b;
        }
        if let Some(b) = self.budget {
            o.depth_budget = b;
        }
        o
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps.unwrap_or(DEFAULT_MAX_STEPS)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunError {
    Search(SearchError),
    Circuit(CircuitError),
    Input(String),
}

impl RunError {
    /// Caps and budgets, as opposed to malformed input.
    pub fn is_limit(&self) -> bool {
        match self {
            RunError::Search(_) => true,
            RunError::Circuit(e) => matches!(
                e,
                CircuitError::BreadthCapExceeded { .. } | CircuitError::DepthBudgetExceeded { .. } | CircuitError::RuleCapExceeded { .. }
            ),
            RunError::Input(_) => false,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Search(e) => e.fmt(f),
            RunError::Circuit(e) => e.fmt(f),
            RunError::Input(m) => f.write_str(m),
        }
    }
}

impl From<SearchError> for RunError {
    fn from(e: SearchError) -> Self {
        RunError::Search(e)
    }
}

impl From<CircuitError> for RunError {
    fn from(e: CircuitError) -> Self {
        RunError::Circuit(e)
    }
}

/// Plans for the problem's goal; `Ok(None)` when the algorithm finds none.
pub fn plan_with(algo: Algo, p: &Problem, k: usize, sel: Option<&Selector>, caps: &Caps) -> Result<Option<Plan>, RunError> {
    Ok(match algo {
        Algo::Opt => opt_search(p, &p.init, &[p.goal], &[], caps.state_cap.unwrap_or(DEFAULT_STATE_CAP))?.first_plan(),
        Algo::Bwd => bwd(p, &p.init, &p.goal_set(), caps.budget.unwrap_or(DEFAULT_BWD_BUDGET))?,
        Algo::Sgrs | Algo::SgrsMemo => {
            let mode = if algo == Algo::Sgrs { WidthMode::Strict } else { WidthMode::Memo };
            let cfg = SgrsConfig { mode, budget: caps.budget.unwrap_or(DEFAULT_SGRS_BUDGET), ..SgrsConfig::default() };
            Sgrs::new(p).with_config(cfg).solve(&p.init, p.goal, &[])?.map(|f| f.plan)
        }
        Algo::Iw => match iw(p, k) {
            Ok((plan, _)) => Some(plan),
            Err(SearchError::Exhausted) => None,
            Err(e) => return Err(e.into()),
        },
        Algo::Select => {
            let sel = sel.ok_or_else(|| RunError::Input("the select algorithm needs a selector".into()))?;
            let mut t = TrSelect::new(sel, p);
            t.budget = caps.budget.unwrap_or(DEFAULT_SELECT_BUDGET);
            t.run(&p.init, p.goal, &[])?
        }
    })
}

pub fn width_certificate(p: &Problem, caps: &Caps) -> Result<Option<WidthCertificate>, RunError> {
    let mut o = WidthOptions::default();
    if let Some(k) = caps.k_max {
        o.k_max = k;
    }
    if let Some(c) = caps.state_cap {
        o.oracle_cap = c;
    }
    if let Some(b) = caps.budget {
        o.budget = b;
    }
    Ok(estimate_sos_width(p, &o)?)
}

pub fn compile(
    kind: CircuitKind,
    p: &Problem,
    depth: DepthExpr,
    k: usize,
    sel: Option<&Selector>,
    caps: &Caps,
) -> Result<RelationalCircuit, RunError> {
    let o = caps.compile_options();
    Ok(match kind {
        CircuitKind::Bwd => circuit::compile_bwd(p, depth, k, &o)?,
        CircuitKind::Sgrs => circuit::compile_sgrs(p, depth, k, &o)?,
        CircuitKind::Selector => {
            let sel = sel.ok_or_else(|| RunError::Input("selector circuits need a selector".into()))?;
            circuit::compile_selector(sel, &p.domain, depth, &o)?
        }
    })
}

pub fn rollout(c: &RelationalCircuit, p: &Problem, caps: &Caps) -> Result<Rollout, RunError> {
    Ok(circuit::rollout(c, p, caps.max_steps())?)
}

/// Default regression width per circuit kind: bwd needs one more atom per
/// goal set than the selector-free serialized search.
pub fn default_k(kind: CircuitKind) -> usize {
    match kind {
        CircuitKind::Bwd => 3,
        CircuitKind::Sgrs => 1,
        CircuitKind::Selector => 0,
    }
}
