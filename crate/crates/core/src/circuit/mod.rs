//! Layered relational circuits: a stratified rule language over typed
//! object tuples, an exact boolean executor, closed-loop rollout, and
//! compilers from backward search, width-bounded serialized regression and
//! rule selectors.
//!
//! A circuit has an initial block (layer 0) and a recurrent block applied
//! once per layer. Register relations are per layer: rule bodies read the
//! previous layer (`prev`) or registers already derived in an earlier
//! stratum of the current layer. Monotone registers start each layer as a
//! copy of the previous one. Action heads name ground actions; the policy
//! answer is the smallest action at the first layer where any fires.

mod bwd;
mod exec;
mod select;
mod sgrs;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use bwd::compile_bwd;
pub use exec::{execute_step, execute_step_with, rollout, rollout_with, ExecOptions, Executor, Outcome, Rollout, StepResult};
pub use select::compile_selector;
pub use sgrs::compile_sgrs;

use crate::model::{Domain, ModelError};

pub const DEFAULT_BREADTH_CAP: usize = 6;
pub const DEFAULT_RULE_CAP: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RelKind {
    /// Atoms of the current state, by predicate.
    State,
    /// Atoms of the state the rollout started from.
    Init,
    /// Goal atoms, by predicate.
    Goal,
    /// Objects of a type (subtypes included).
    Type,
    /// Ground actions of a schema that exist in the problem.
    Exists,
    Register,
    /// Ground actions proposed by the circuit.
    Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Relation {
    pub name: String,
    pub kind: RelKind,
    pub arity: usize,
    /// Predicate, type or schema name for non-register relations.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub symbol: Option<String>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CAtom {
    pub rel: u32,
    pub args: Vec<u32>,
    /// Read the register at the previous layer.
    #[cfg_attr(feature = "serde", serde(default))]
    pub prev: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Lit {
    Pos(CAtom),
    Neg(CAtom),
    /// At least one pair of variables differs.
    Distinct(Vec<(u32, u32)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Term {
    Var(u32),
    Const(u32),
}

/// Rules sharing a group keep, per key, only the derivation with the
/// smallest order vector (ties: rule position, then head tuple).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Choice {
    pub group: u32,
    pub key: Vec<u32>,
    pub order: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LiftedRule {
    pub head: CAtom,
    pub body: Vec<Lit>,
    pub vars: usize,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub choice: Option<Choice>,
    /// Body literal (a monotone register read at the previous layer) that
    /// may be restricted to the facts new at that layer.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub driver: Option<usize>,
}

impl LiftedRule {
    pub fn new(head: CAtom, body: Vec<Lit>) -> Self {
        let mut vars = head.args.iter().copied().max().map_or(0, |m| m as usize + 1);
        for l in &body {
            let m = match l {
                Lit::Pos(a) | Lit::Neg(a) => a.args.iter().copied().max(),
                Lit::Distinct(ps) => ps.iter().map(|&(a, b)| a.max(b)).max(),
            };
            if let Some(m) = m {
                vars = vars.max(m as usize + 1);
            }
        }
        LiftedRule { head, body, vars, choice: None, driver: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stratum {
    pub rules: Vec<LiftedRule>,
}

/// Layer count as a function of the object count `n`:
/// `const(c)` or `linear(a, b)` = floor(a·n + b), `a` given as `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DepthExpr {
    Const(usize),
    Linear { num: u64, den: u64, b: i64 },
}

impl DepthExpr {
    pub fn eval(&self, n: usize) -> usize {
        match *self {
            DepthExpr::Const(c) => c,
            DepthExpr::Linear { num, den, b } => {
                let v = (num as i128 * n as i128).div_euclid(den.max(1) as i128) + b as i128;
                v.max(0) as usize
            }
        }
    }

    /// Parses `const(3)`, `linear(0.1, 3)`, `linear(1/5, 1)` or a bare integer.
    pub fn parse(text: &str) -> Result<DepthExpr, ModelError> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ModelError::Syntax(format!("bad depth expression `{text}`"));
        if let Ok(c) = t.parse::<usize>() {
            return Ok(DepthExpr::Const(c));
        }
        if let Some(inner) = t.strip_prefix("const(").and_then(|r| r.strip_suffix(')')) {
            return inner.parse().map(DepthExpr::Const).map_err(|_| bad());
        }
        let inner = t.strip_prefix("linear(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let (num, den) = parse_ratio(a).ok_or_else(bad)?;
        let b: i64 = b.parse().map_err(|_| bad())?;
        Ok(DepthExpr::Linear { num, den, b })
    }
}

fn parse_ratio(s: &str) -> Option<(u64, u64)> {
    if let Some((n, d)) = s.split_once('/') {
        let d: u64 = d.parse().ok()?;
        return (d > 0).then_some((n.parse().ok()?, d));
    }
    match s.split_once('.') {
        None => Some((s.parse().ok()?, 1)),
        Some((int, frac)) => {
            if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let den = 10u64.pow(frac.len() as u32);
            let int: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
            let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
            Some((int * den + frac, den))
        }
    }
}

impl fmt::Display for DepthExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DepthExpr::Const(c) => write!(f, "const({c})"),
            DepthExpr::Linear { num, den, b } if den == 1 => write!(f, "linear({num}, {b})"),
            DepthExpr::Linear { num, den, b } => write!(f, "linear({num}/{den}, {b})"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CircuitStats {
    pub method: String,
    /// Layers for the problem the circuit was compiled from.
    pub depth: usize,
    /// Breadth bound of the construction: β·k_bwd, (k+1)·β or max(B_r, β).
    pub breadth: usize,
    /// Largest arity of a register holding goal sets, tuples or goals.
    pub tuple_arity: usize,
    /// Largest arity of any register (snapshots and choice witnesses included).
    pub max_register_arity: usize,
    /// Largest variable count of a rule.
    pub max_rule_vars: usize,
    pub beta: usize,
    /// k_bwd, k, or the largest constraint set a selector rule keeps.
    pub width: usize,
    pub rules: usize,
    pub registers: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RelationalCircuit {
    pub name: String,
    pub domain: String,
    pub relations: Vec<Relation>,
    pub init: Vec<Stratum>,
    pub layer: Vec<Stratum>,
    pub depth: DepthExpr,
    pub stats: CircuitStats,
}

impl RelationalCircuit {
    pub fn rule_count(&self) -> usize {
        self.init.iter().chain(&self.layer).map(|s| s.rules.len()).sum()
    }

    fn all_rules(&self) -> impl Iterator<Item = &LiftedRule> {
        self.init.iter().chain(&self.layer).flat_map(|s| s.rules.iter())
    }

    /// Structural checks: arities, register-only heads and `prev` reads,
    /// range-restricted rules, and choice keys bound by the head.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let bad = |m: String| Err(CircuitError::Invalid(m));
        for (bi, block) in [&self.init, &self.layer].into_iter().enumerate() {
            for st in block {
                for (ri, r) in st.rules.iter().enumerate() {
                    let at = |m: &str| format!("{} rule {ri}: {m}", if bi == 0 { "init" } else { "layer" });
                    let check = |a: &CAtom| -> Result<(), CircuitError> {
                        let Some(rel) = self.relations.get(a.rel as usize) else {
                            return Err(CircuitError::Invalid(at("unknown relation")));
                        };
                        if rel.arity != a.args.len() {
                            return Err(CircuitError::Invalid(at(&format!("arity of `{}`", rel.name))));
                        }
                        if a.prev && rel.kind != RelKind::Register {
                            return Err(CircuitError::Invalid(at("prev on a non-register")));
                        }
                        if a.args.iter().any(|&v| v as usize >= r.vars) {
                            return Err(CircuitError::Invalid(at("variable out of range")));
                        }
                        Ok(())
                    };
                    check(&r.head)?;
                    let hk = self.relations[r.head.rel as usize].kind;
                    if hk != RelKind::Register && hk != RelKind::Action || r.head.prev {
                        return bad(at("head must be a current register or an action"));
                    }
                    let mut bound = alloc::vec![false; r.vars];
                    for l in &r.body {
                        match l {
                            Lit::Pos(a) => {
                                check(a)?;
                                for &v in &a.args {
                                    bound[v as usize] = true;
                                }
                            }
                            Lit::Neg(a) => check(a)?,
                            Lit::Distinct(_) => {}
                        }
                    }
                    let needs = r.head.args.iter().chain(r.body.iter().flat_map(|l| match l {
                        Lit::Pos(_) => [].iter(),
                        Lit::Neg(a) => a.args.iter(),
                        Lit::Distinct(_) => [].iter(),
                    }));
                    for &v in needs {
                        if !bound[v as usize] {
                            return bad(at("variable not bound by a positive literal"));
                        }
                    }
                    for l in &r.body {
                        if let Lit::Distinct(ps) = l {
                            if ps.iter().any(|&(a, b)| !bound[a as usize] || !bound[b as usize]) {
                                return bad(at("unbound variable in distinct"));
                            }
                        }
                    }
                    if let Some(d) = r.driver {
                        match r.body.get(d) {
                            Some(Lit::Pos(a)) if a.prev && self.relations[a.rel as usize].monotone => {}
                            _ => return bad(at("driver must be a positive prev read of a monotone register")),
                        }
                    }
                    if let Some(c) = &r.choice {
                        if c.key.iter().any(|k| !r.head.args.contains(k)) {
                            return bad(at("choice key not in head"));
                        }
                        if c.order.iter().any(|t| matches!(t, Term::Var(v) if !bound[*v as usize])) {
                            return bad(at("choice order uses an unbound variable"));
                        }
                    }
                }
            }
            // Stratification: a current-layer register is read only after
            // every stratum writing it; a driver rule's head is monotone and
            // its other literals are inputs.
            let mut last_write: crate::Map<u32, usize> = crate::Map::new();
            for (si, st) in block.iter().enumerate() {
                for r in &st.rules {
                    last_write.insert(r.head.rel, si);
                }
            }
            for (si, st) in block.iter().enumerate() {
                for r in &st.rules {
                    for (li, l) in r.body.iter().enumerate() {
                        let (Lit::Pos(a) | Lit::Neg(a)) = l else { continue };
                        let kind = self.relations[a.rel as usize].kind;
                        if !a.prev && matches!(kind, RelKind::Register | RelKind::Action)
                            && last_write.get(&a.rel).is_some_and(|&w| w >= si) {
                                return bad(format!("`{}` read before its last write", self.relations[a.rel as usize].name));
                            }
                        if r.driver.is_some() && r.driver != Some(li) && kind == RelKind::Register {
                            return bad(format!("driver rule for `{}` reads another register", self.relations[r.head.rel as usize].name));
                        }
                    }
                    if r.driver.is_some() && !self.relations[r.head.rel as usize].monotone {
                        return bad(format!("driver rule for non-monotone `{}`", self.relations[r.head.rel as usize].name));
                    }
                }
            }
        }
        Ok(())
    }

    /// Readable listing of the rules.
    pub fn to_text(&self) -> String {
        let mut out = format!("circuit {} ({}) depth {}\n", self.name, self.stats.method, self.depth);
        let var = |v: u32| format!("x{v}");
        let atom = |a: &CAtom| {
            let args: Vec<String> = a.args.iter().map(|&v| var(v)).collect();
            let name = &self.relations[a.rel as usize].name;
            format!("{}{}({})", name, if a.prev { "'" } else { "" }, args.join(", "))
        };
        for (label, block) in [("init", &self.init), ("layer", &self.layer)] {
            for (si, st) in block.iter().enumerate() {
                out.push_str(&format!("{label} stratum {si}\n"));
                for r in &st.rules {
                    let body: Vec<String> = r
                        .body
                        .iter()
                        .map(|l| match l {
                            Lit::Pos(a) => atom(a),
                            Lit::Neg(a) => format!("not {}", atom(a)),
                            Lit::Distinct(ps) => {
                                let v: Vec<String> = ps.iter().map(|&(a, b)| format!("{} != {}", var(a), var(b))).collect();
                                format!("({})", v.join(" or "))
                            }
                        })
                        .collect();
                    out.push_str(&format!("  {} <- {}\n", atom(&r.head), body.join(", ")));
                }
            }
        }
        out
    }

    pub(crate) fn measure(&mut self) {
        let regs = self.relations.iter().filter(|r| r.kind == RelKind::Register);
        self.stats.max_register_arity = regs.clone().map(|r| r.arity).max().unwrap_or(0);
        self.stats.registers = regs.count();
        self.stats.max_rule_vars = self.all_rules().map(|r| r.vars).max().unwrap_or(0);
        self.stats.rules = self.rule_count();
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitError {
    BreadthCapExceeded { breadth: usize, cap: usize },
    DepthBudgetExceeded { depth: usize, budget: usize },
    RuleCapExceeded { cap: usize },
    Unsupported(String),
    Invalid(String),
    Model(ModelError),
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitError::BreadthCapExceeded { breadth, cap } => write!(f, "breadth {breadth} exceeds the cap of {cap}"),
            CircuitError::DepthBudgetExceeded { depth, budget } => write!(f, "depth {depth} exceeds the budget of {budget}"),
            CircuitError::RuleCapExceeded { cap } => write!(f, "more than {cap} rules"),
            CircuitError::Unsupported(m) => write!(f, "unsupported: {m}"),
            CircuitError::Invalid(m) => write!(f, "invalid circuit: {m}"),
            CircuitError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<ModelError> for CircuitError {
    fn from(e: ModelError) -> Self {
        CircuitError::Model(e)
    }
}

#[derive(Clone, Debug)]
pub struct CompileOptions {
    pub breadth_cap: usize,
    pub rule_cap: usize,
    /// Depth above which compile_selector refuses.
    pub depth_budget: usize,
    /// Drop backward-search goal sets with a pair that is mutex in every
    /// grounding (h² from the problem's initial state).
    pub mutex_prune: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { breadth_cap: DEFAULT_BREADTH_CAP, rule_cap: DEFAULT_RULE_CAP, depth_budget: 10_000, mutex_prune: true }
    }
}

/// Relation table under construction.
#[derive(Default)]
pub(crate) struct Rels {
    pub list: Vec<Relation>,
    index: crate::Map<(RelKind, String), u32>,
}

impl Rels {
    pub fn get(&mut self, kind: RelKind, name: &str, arity: usize, symbol: Option<&str>, monotone: bool) -> u32 {
        if let Some(&i) = self.index.get(&(kind, name.to_string())) {
            return i;
        }
        let i = self.list.len() as u32;
        self.list.push(Relation {
            name: name.to_string(),
            kind,
            arity,
            symbol: symbol.map(|s| s.to_string()),
            monotone,
        });
        self.index.insert((kind, name.to_string()), i);
        i
    }

    pub fn input(&mut self, kind: RelKind, symbol: &str, arity: usize) -> u32 {
        let prefix = match kind {
            RelKind::State => "",
            RelKind::Init => "init:",
            RelKind::Goal => "goal:",
            RelKind::Type => "type:",
            RelKind::Exists => "exists:",
            RelKind::Action => "act:",
            RelKind::Register => "",
        };
        self.get(kind, &format!("{prefix}{symbol}"), arity, Some(symbol), false)
    }

    pub fn state(&mut self, d: &Domain, pred: u32) -> u32 {
        let p = d.pred(pred);
        self.input(RelKind::State, &p.name, p.arity())
    }

    pub fn action(&mut self, d: &Domain, schema: usize) -> u32 {
        let s = &d.actions[schema];
        self.input(RelKind::Action, &s.name, s.params.len())
    }

    pub fn ty(&mut self, d: &Domain, ty: u32) -> u32 {
        self.input(RelKind::Type, &d.types[ty as usize].name, 1)
    }
}

pub(crate) fn pos(rel: u32, args: Vec<u32>) -> Lit {
    Lit::Pos(CAtom { rel, args, prev: false })
}

pub(crate) fn pos_prev(rel: u32, args: Vec<u32>) -> Lit {
    Lit::Pos(CAtom { rel, args, prev: true })
}

pub(crate) fn neg(rel: u32, args: Vec<u32>) -> Lit {
    Lit::Neg(CAtom { rel, args, prev: false })
}

pub(crate) fn neg_prev(rel: u32, args: Vec<u32>) -> Lit {
    Lit::Neg(CAtom { rel, args, prev: true })
}

pub(crate) fn head(rel: u32, args: Vec<u32>) -> CAtom {
    CAtom { rel, args, prev: false }
}

/// Maximum predicate arity, the synthetic goal predicate excluded.
pub(crate) fn beta(d: &Domain) -> usize {
    d.predicates.iter().filter(|p| p.name != crate::model::GOAL_PRED).map(|p| p.arity()).max().unwrap_or(0)
}
