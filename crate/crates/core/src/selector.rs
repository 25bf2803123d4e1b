//! Regression rule selectors: condition-guarded lifted rules that pick one
//! regression rule per (state, goal, cons) without search, and the
//! recursive plan extraction built on them.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::builder::split_call;
use crate::model::{
    apply_unchecked, AtomId, Domain, LiftedAtom, ModelError, ObjId, Param, Problem, State, TypeId,
};
use crate::regression::{RegressionRule, Subgoal};
use crate::search::{replay, Plan, SearchError};
use crate::width::Oracle;
use crate::Set;

pub const DEFAULT_SELECT_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LitKind {
    /// Atom of the state the rule is selected in.
    State,
    /// Atom of the root state of the extraction.
    Init,
    /// Member of the constraint set.
    Cons,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub kind: LitKind,
    pub negated: bool,
    /// Arguments index the rule's parameters.
    pub atom: LiftedAtom,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreItem {
    pub atom: LiftedAtom,
    /// Earlier subgoal positions kept while this one is pursued; `None`
    /// keeps all of them.
    pub keep: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SelectorRule {
    pub name: String,
    pub params: Vec<Param>,
    pub goal: LiftedAtom,
    pub when: Vec<Literal>,
    pub pre: Vec<PreItem>,
    /// Action schema index and its arguments as rule parameters.
    pub action: usize,
    pub action_args: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Selector {
    pub name: String,
    pub domain: String,
    pub rules: Vec<SelectorRule>,
}

fn atom_text(d: &Domain, params: &[Param], a: &LiftedAtom) -> String {
    let args: Vec<&str> = a.args.iter().map(|&v| params[v as usize].name.as_str()).collect();
    format!("{}({})", d.pred(a.pred).name, args.join(", "))
}

impl SelectorRule {
    pub fn literal_text(&self, d: &Domain, l: &Literal) -> String {
        let mut out = String::new();
        if l.negated {
            out.push_str("not ");
        }
        match l.kind {
            LitKind::State => {}
            LitKind::Init => out.push_str("init "),
            LitKind::Cons => out.push_str("cons "),
        }
        out.push_str(&atom_text(d, &self.params, &l.atom));
        out
    }

    pub fn pre_text(&self, d: &Domain, i: usize) -> String {
        let item = &self.pre[i];
        let mut out = atom_text(d, &self.params, &item.atom);
        if let Some(keep) = &item.keep {
            let kept: Vec<String> = keep.iter().map(|&j| atom_text(d, &self.params, &self.pre[j].atom)).collect();
            out.push_str(&format!(" {{{}}}", kept.join(", ")));
        }
        out
    }

    pub fn action_text(&self, d: &Domain) -> String {
        let args: Vec<&str> = self.action_args.iter().map(|&v| self.params[v as usize].name.as_str()).collect();
        format!("{}({})", d.actions[self.action].name, args.join(", "))
    }

    pub fn header_text(&self, d: &Domain) -> String {
        let ps: Vec<String> =
            self.params.iter().map(|p| format!("{}: {}", p.name, d.types[p.ty as usize].name)).collect();
        format!("{}({})", self.name, ps.join(", "))
    }

    pub fn goal_text(&self, d: &Domain) -> String {
        atom_text(d, &self.params, &self.goal)
    }
}

/// Builds selectors from atom strings. Parameters without a type get the
/// most specific type implied by the predicates and action they occur in.
pub struct SelectorBuilder<'d> {
    domain: &'d Domain,
    sel: Selector,
    err: Option<ModelError>,
}

fn syntax(msg: String) -> ModelError {
    ModelError::Syntax(msg)
}

struct Scope {
    names: Vec<String>,
    declared: Vec<Option<TypeId>>,
    implied: Vec<Vec<TypeId>>,
}

impl Scope {
    fn var(&mut self, name: &str) -> Result<u32, ModelError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u32)
            .ok_or_else(|| syntax(format!("variable `{name}` is not a rule parameter")))
    }
}

impl<'d> SelectorBuilder<'d> {
    pub fn new(domain: &'d Domain, name: &str) -> Self {
        SelectorBuilder {
            domain,
            sel: Selector { name: name.to_string(), domain: domain.name.clone(), rules: Vec::new() },
            err: None,
        }
    }

    fn atom(&self, scope: &mut Scope, text: &str) -> Result<LiftedAtom, ModelError> {
        let (p, args) = split_call(text)?;
        let pred = self.domain.pred_id(&p).ok_or(ModelError::UnknownPredicate(p.clone()))?;
        let sig = self.domain.pred(pred);
        if sig.arity() != args.len() {
            return Err(ModelError::ArityMismatch { pred: p, expected: sig.arity(), found: args.len() });
        }
        let mut ids = Vec::new();
        for (a, &t) in args.iter().zip(&sig.arg_types) {
            let v = scope.var(a)?;
            scope.implied[v as usize].push(t);
            ids.push(v);
        }
        Ok(LiftedAtom { pred, args: ids })
    }

    /// `header` is `name(x, y: block)`; `when` entries are atoms optionally
    /// prefixed by `not`, `init` or `cons`; `pre` entries are atoms with an
    /// optional `{earlier, subgoals}` keep list.
    pub fn rule(mut self, header: &str, goal: &str, when: &[&str], pre: &[&str], action: &str) -> Self {
        match self.make_rule(header, goal, when, pre, action) {
            Ok(r) => self.sel.rules.push(r),
            Err(e) => {
                if self.err.is_none() {
                    self.err = Some(e);
                }
            }
        }
        self
    }

    pub fn make_rule(
        &self,
        header: &str,
        goal: &str,
        when: &[&str],
        pre: &[&str],
        action: &str,
    ) -> Result<SelectorRule, ModelError> {
        let d = self.domain;
        let (name, raw) = split_call(header)?;
        let mut scope = Scope { names: Vec::new(), declared: Vec::new(), implied: Vec::new() };
        for r in raw {
            let (v, t) = match r.split_once(':') {
                Some((v, t)) => {
                    let t = t.trim();
                    (v.trim().to_string(), Some(d.type_id(t).ok_or_else(|| ModelError::UnknownType(t.to_string()))?))
                }
                None => (r, None),
            };
            if scope.names.contains(&v) {
                return Err(ModelError::DuplicateName(v));
            }
            scope.names.push(v);
            scope.declared.push(t);
            scope.implied.push(Vec::new());
        }
        let goal_text = goal;
        let goal = self.atom(&mut scope, goal)?;
        let mut lits = Vec::new();
        for w in when {
            let mut text = w.trim();
            let mut negated = false;
            let mut kind = LitKind::State;
            loop {
                if let Some(rest) = text.strip_prefix("not ") {
                    negated = true;
                    text = rest.trim_start();
                } else if let Some(rest) = text.strip_prefix("init ") {
                    kind = LitKind::Init;
                    text = rest.trim_start();
                } else if let Some(rest) = text.strip_prefix("cons ") {
                    kind = LitKind::Cons;
                    text = rest.trim_start();
                } else {
                    break;
                }
            }
            lits.push(Literal { kind, negated, atom: self.atom(&mut scope, text)? });
        }
        let mut items: Vec<PreItem> = Vec::new();
        for p in pre {
            let (atom_part, keep_part) = match p.find('{') {
                Some(i) => {
                    let k = p[i..].trim();
                    if !k.ends_with('}') {
                        return Err(syntax(format!("missing `}}` in `{p}`")));
                    }
                    (&p[..i], Some(&k[1..k.len() - 1]))
                }
                None => (&p[..], None),
            };
            let atom = self.atom(&mut scope, atom_part)?;
            let keep = match keep_part {
                None => None,
                Some(inner) => {
                    let mut keep = Vec::new();
                    for t in split_top(inner) {
                        let a = self.atom(&mut scope, &t)?;
                        let j = items
                            .iter()
                            .position(|it| it.atom == a)
                            .ok_or_else(|| syntax(format!("kept atom `{t}` is not an earlier subgoal")))?;
                        keep.push(j);
                    }
                    keep.sort_unstable();
                    keep.dedup();
                    Some(keep)
                }
            };
            items.push(PreItem { atom, keep });
        }
        let (an, aargs) = split_call(action)?;
        let schema = d.action_id(&an).ok_or_else(|| syntax(format!("unknown action `{an}`")))?;
        let sch = &d.actions[schema];
        if sch.params.len() != aargs.len() {
            return Err(ModelError::ArityMismatch { pred: an, expected: sch.params.len(), found: aargs.len() });
        }
        let mut action_args = Vec::new();
        for (a, p) in aargs.iter().zip(&sch.params) {
            let v = scope.var(a)?;
            scope.implied[v as usize].push(p.ty);
            action_args.push(v);
        }
        let adds_goal = sch.add.iter().any(|e| {
            e.pred == goal.pred && e.args.iter().zip(&goal.args).all(|(&sv, &gv)| action_args[sv as usize] == gv)
        });
        if !adds_goal {
            return Err(syntax(format!("`{action}` does not add `{goal_text}` in rule `{name}`")));
        }
        let mut params = Vec::new();
        for i in 0..scope.names.len() {
            let ty = match scope.declared[i] {
                Some(t) => t,
                None => most_specific(d, &scope.implied[i])
                    .ok_or_else(|| syntax(format!("conflicting types for `{}`", scope.names[i])))?,
            };
            params.push(Param { name: scope.names[i].clone(), ty });
        }
        Ok(SelectorRule { name, params, goal, when: lits, pre: items, action: schema, action_args })
    }

    pub fn build(self) -> Result<Selector, ModelError> {
        match self.err {
            Some(e) => Err(e),
            None => Ok(self.sel),
        }
    }
}

/// Splits on commas outside parentheses.
pub fn split_top(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push(cur.trim().to_string());
                }
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn most_specific(d: &Domain, ts: &[TypeId]) -> Option<TypeId> {
    if ts.is_empty() {
        return Some(0);
    }
    ts.iter().copied().find(|&t| ts.iter().all(|&o| d.is_subtype(t, o)))
}

struct Binder<'a> {
    problem: &'a Problem,
    rule: &'a SelectorRule,
    root: &'a State,
    s: &'a State,
    cons: &'a [AtomId],
    /// literal indices checkable once parameter `i` is bound
    ready: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl Binder<'_> {
    fn holds(&self, l: &Literal, b: &[ObjId]) -> bool {
        let args: Vec<ObjId> = l.atom.args.iter().map(|&v| b[v as usize]).collect();
        let a = self.problem.atom_of(l.atom.pred, &args);
        let v = match l.kind {
            LitKind::State => self.s.contains(a),
            LitKind::Init => self.root.contains(a),
            LitKind::Cons => self.cons.contains(&a),
        };
        v != l.negated
    }

    fn search(&self, depth: usize, b: &mut Vec<ObjId>, found: &mut dyn FnMut(&[ObjId]) -> bool) -> bool {
        if depth == self.order.len() {
            return found(b);
        }
        let v = self.order[depth];
        let ty = self.rule.params[v].ty;
        let d = &self.problem.domain;
        for (o, obj) in self.problem.objects.iter().enumerate() {
            if !d.is_subtype(obj.ty, ty) {
                continue;
            }
            b[v] = o as ObjId;
            if self.ready[depth].iter().all(|&li| self.holds(&self.rule.when[li], b)) && self.search(depth + 1, b, found) {
                return true;
            }
        }
        false
    }
}

const UNBOUND: ObjId = ObjId::MAX;

fn ground(problem: &Problem, a: &LiftedAtom, b: &[ObjId]) -> AtomId {
    let args: Vec<ObjId> = a.args.iter().map(|&v| b[v as usize]).collect();
    problem.atom_of(a.pred, &args)
}

/// Grounds `rule` for goal `g` under the first binding (lexicographic in
/// parameter order) satisfying its condition.
pub fn match_rule(
    problem: &Problem,
    rule: &SelectorRule,
    root: &State,
    s: &State,
    g: AtomId,
    cons: &[AtomId],
) -> Option<RegressionRule> {
    let (gp, gargs) = problem.atoms.decode(g);
    if gp != rule.goal.pred {
        return None;
    }
    let d = &problem.domain;
    let mut b = vec![UNBOUND; rule.params.len()];
    for (&v, &o) in rule.goal.args.iter().zip(&gargs) {
        let v = v as usize;
        if b[v] != UNBOUND && b[v] != o {
            return None;
        }
        if !d.is_subtype(problem.objects[o as usize].ty, rule.params[v].ty) {
            return None;
        }
        b[v] = o;
    }
    let order: Vec<usize> = (0..rule.params.len()).filter(|&v| b[v] == UNBOUND).collect();
    let mut ready = vec![Vec::new(); order.len() + 1];
    let mut at_start = Vec::new();
    for (li, l) in rule.when.iter().enumerate() {
        let last = l.atom.args.iter().filter_map(|&v| order.iter().position(|&o| o == v as usize)).max();
        match last {
            Some(depth) => ready[depth].push(li),
            None => at_start.push(li),
        }
    }
    let binder = Binder { problem, rule, root, s, cons, ready, order };
    if !at_start.iter().all(|&li| binder.holds(&rule.when[li], &b)) {
        return None;
    }
    let mut out = None;
    binder.search(0, &mut b, &mut |b: &[ObjId]| {
        let args: Vec<ObjId> = rule.action_args.iter().map(|&v| b[v as usize]).collect();
        let Some(a) = problem.find_action_ids(rule.action as u32, &args) else { return false };
        let atoms: Vec<AtomId> = rule.pre.iter().map(|p| ground(problem, &p.atom, b)).collect();
        let subgoals = rule
            .pre
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut keep: Vec<AtomId> = match &p.keep {
                    None => atoms[..i].to_vec(),
                    Some(ks) => ks.iter().map(|&j| atoms[j]).collect(),
                };
                keep.sort_unstable();
                keep.dedup();
                Subgoal { atom: atoms[i], keep }
            })
            .collect();
        let mut c = cons.to_vec();
        c.sort_unstable();
        out = Some(RegressionRule { goal: g, cons: c, subgoals, action: a });
        true
    });
    out
}

/// First rule, in declared order, that matches; `root` feeds `init` literals.
pub fn select_in(
    sel: &Selector,
    problem: &Problem,
    root: &State,
    s: &State,
    g: AtomId,
    cons: &[AtomId],
) -> Option<(usize, RegressionRule)> {
    sel.rules.iter().enumerate().find_map(|(i, r)| match_rule(problem, r, root, s, g, cons).map(|m| (i, m)))
}

pub fn select(sel: &Selector, problem: &Problem, s: &State, g: AtomId, cons: &[AtomId]) -> Option<RegressionRule> {
    select_in(sel, problem, s, s, g, cons).map(|(_, r)| r)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrStats {
    pub calls: usize,
    pub max_depth: usize,
    pub cycles: usize,
}

/// Recursive plan extraction with a selector.
pub struct TrSelect<'a> {
    sel: &'a Selector,
    problem: &'a Problem,
    pub budget: usize,
    pub stats: TrStats,
    active: Vec<(AtomId, Vec<AtomId>, State)>,
    root: State,
}

impl<'a> TrSelect<'a> {
    pub fn new(sel: &'a Selector, problem: &'a Problem) -> Self {
        TrSelect {
            sel,
            problem,
            budget: DEFAULT_SELECT_BUDGET,
            stats: TrStats::default(),
            active: Vec::new(),
            root: problem.init.clone(),
        }
    }

    /// `None` is the bottom result: no rule applies, a cycle was detected or
    /// the selected rule breaks a constraint.
    pub fn run(&mut self, s: &State, g: AtomId, cons: &[AtomId]) -> Result<Option<Plan>, SearchError> {
        self.stats = TrStats::default();
        self.active.clear();
        self.root = s.clone();
        let mut c = cons.to_vec();
        c.sort_unstable();
        c.dedup();
        if !s.contains_all(&c) {
            return Ok(None);
        }
        Ok(self.tr(s, g, &c)?.map(|(p, _)| p))
    }

    fn tr(&mut self, s: &State, g: AtomId, cons: &[AtomId]) -> Result<Option<(Plan, State)>, SearchError> {
        if s.contains(g) {
            return Ok(Some((Vec::new(), s.clone())));
        }
        self.stats.calls += 1;
        if self.stats.calls > self.budget {
            return Err(SearchError::RecursionBudgetExceeded { budget: self.budget });
        }
        let key = (g, cons.to_vec(), s.clone());
        if self.active.contains(&key) {
            self.stats.cycles += 1;
            return Ok(None);
        }
        self.active.push(key);
        self.stats.max_depth = self.stats.max_depth.max(self.active.len());
        let out = self.expand(s, g, cons);
        self.active.pop();
        out
    }

    fn expand(&mut self, s: &State, g: AtomId, cons: &[AtomId]) -> Result<Option<(Plan, State)>, SearchError> {
        let Some((_, r)) = select_in(self.sel, self.problem, &self.root.clone(), s, g, cons) else { return Ok(None) };
        let mut cur = s.clone();
        let mut plan = Vec::new();
        for i in 0..r.subgoals.len() {
            let sc = r.sub_cons(i);
            if !cur.contains_all(&sc) {
                return Ok(None);
            }
            let Some((sub, end)) = self.tr(&cur, r.subgoals[i].atom, &sc)? else { return Ok(None) };
            plan.extend(sub);
            cur = end;
        }
        let act = self.problem.action(r.action);
        if !cur.contains_all(&act.pre) || act.del_net.iter().any(|d| cons.contains(d)) {
            return Ok(None);
        }
        cur = apply_unchecked(&cur, act);
        plan.push(r.action);
        Ok(Some((plan, cur)))
    }
}

pub fn tr_select(
    sel: &Selector,
    problem: &Problem,
    s: &State,
    g: AtomId,
    cons: &[AtomId],
) -> Result<Option<Plan>, SearchError> {
    TrSelect::new(sel, problem).run(s, g, cons)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// The goal is achievable under the constraints but extraction failed.
    Bottom,
    InvalidPlan,
    ConstraintBroken,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub state: Vec<String>,
    pub goal: String,
    pub cons: Vec<String>,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RrsReport {
    pub states: usize,
    pub checked: usize,
    pub achievable: usize,
    /// Valid plans longer than the constrained optimum.
    pub suboptimal: usize,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug)]
pub struct RrsOptions {
    /// Reachable states beyond this count raise `StateSpaceCapExceeded`.
    pub state_cap: usize,
    /// Only the first states in breadth-first order are sampled.
    pub max_states: usize,
    /// Besides the empty set, try every single true atom as constraint.
    pub singleton_cons: bool,
    /// Restrict goals to these predicates (all fluents when empty).
    pub goal_preds: Vec<String>,
}

impl Default for RrsOptions {
    fn default() -> Self {
        RrsOptions { state_cap: 200_000, max_states: usize::MAX, singleton_cons: false, goal_preds: Vec::new() }
    }
}

/// Sampled check that extraction succeeds wherever the oracle finds the
/// goal achievable under the constraints, with instrumented replay.
pub fn check_rrs_serializable(sel: &Selector, problem: &Problem, opts: &RrsOptions) -> Result<RrsReport, SearchError> {
    let p = problem;
    let mut states = vec![p.init.clone()];
    let mut seen: Set<State> = Set::new();
    seen.insert(p.init.clone());
    let mut queue = VecDeque::from([p.init.clone()]);
    while let Some(s) = queue.pop_front() {
        for a in p.applicable(&s) {
            let t = apply_unchecked(&s, p.action(a));
            if seen.insert(t.clone()) {
                if seen.len() > opts.state_cap {
                    return Err(SearchError::StateSpaceCapExceeded { cap: opts.state_cap });
                }
                states.push(t.clone());
                queue.push_back(t);
            }
        }
    }
    states.truncate(opts.max_states);
    let statics = p.domain.static_preds();
    let goals: Vec<AtomId> = (0..p.n_atoms() as AtomId)
        .filter(|&a| {
            let pr = p.atoms.pred_of(a) as usize;
            let name = &p.domain.pred(pr as u32).name;
            pr < statics.len()
                && !statics[pr]
                && name != crate::model::GOAL_PRED
                && (opts.goal_preds.is_empty() || opts.goal_preds.contains(name))
        })
        .collect();
    let mut oracle = Oracle::new(p, opts.state_cap);
    let mut report = RrsReport { states: states.len(), ..Default::default() };
    let names = |atoms: &mut dyn Iterator<Item = AtomId>| -> Vec<String> { atoms.map(|a| p.atom_name(a)).collect() };
    for s in &states {
        let si = oracle.intern(s)?;
        let mut cons_sets: Vec<Vec<AtomId>> = vec![Vec::new()];
        if opts.singleton_cons {
            cons_sets.extend(s.iter().map(|a| vec![a]));
        }
        for &g in &goals {
            if s.contains(g) {
                continue;
            }
            for cons in &cons_sets {
                report.checked += 1;
                let Some(opt) = oracle.query(si, &[g], cons)?.length else { continue };
                report.achievable += 1;
                let kind = match tr_select(sel, p, s, g, cons) {
                    Err(_) => Some(ViolationKind::Budget),
                    Ok(None) => Some(ViolationKind::Bottom),
                    Ok(Some(plan)) => match replay(p, s, &plan) {
                        Err(_) => Some(ViolationKind::InvalidPlan),
                        Ok(trace) if !trace.last().unwrap().contains(g) => Some(ViolationKind::InvalidPlan),
                        Ok(trace) if trace.iter().any(|t| !t.contains_all(cons)) => Some(ViolationKind::ConstraintBroken),
                        Ok(_) => {
                            if plan.len() > opt {
                                report.suboptimal += 1;
                            }
                            None
                        }
                    },
                };
                if let Some(kind) = kind {
                    report.violations.push(Violation {
                        state: names(&mut s.iter()),
                        goal: p.atom_name(g),
                        cons: names(&mut cons.iter().copied()),
                        kind,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Selector for BlocksWorld built from the seven per-goal rules
/// (pick-table also lists handsfree, which its action requires).
pub fn blocksworld_selector(domain: &Domain) -> Result<Selector, ModelError> {
    SelectorBuilder::new(domain, "blocksworld")
        .rule("clear-unstack(x, y)", "clear(x)", &["on(y, x)"], &["on(y, x)", "clear(y)", "handsfree()"], "unstack(y, x)")
        .rule("clear-place(x)", "clear(x)", &["holding(x)"], &["holding(x)"], "place-table(x)")
        .rule("holding-unstack(x, y)", "holding(x)", &["on(x, y)"], &["on(x, y)", "clear(x)", "handsfree()"], "unstack(x, y)")
        .rule("holding-pick(x)", "holding(x)", &["on-table(x)"], &["on-table(x)", "clear(x)", "handsfree()"], "pick-table(x)")
        .rule("on-table-place(x)", "on-table(x)", &[], &["holding(x)"], "place-table(x)")
        .rule("on-stack(x, y)", "on(x, y)", &[], &["clear(y)", "holding(x)"], "stack(x, y)")
        .rule("handsfree-place(x)", "handsfree()", &["holding(x)"], &["holding(x)"], "place-table(x)")
        .build()
}

/// Selector for the road-graph Logistics domain: one-hop drives first,
/// otherwise drive from the first predecessor of the target.
pub fn logistics_selector(domain: &Domain) -> Result<Selector, ModelError> {
    SelectorBuilder::new(domain, "logistics")
        .rule("at-unload(o: package, l, v)", "at(o, l)", &[], &["in(o, v)", "at(v, l)"], "unload(o, v, l)")
        .rule("in-load(o, v, l)", "in(o, v)", &["at(o, l)"], &["at(o, l)", "at(v, l)"], "load(o, v, l)")
        .rule("at-drive-adjacent(v: truck, l2, l1)", "at(v, l2)", &["at(v, l1)", "road(l1, l2)"], &["at(v, l1)"], "drive(v, l1, l2)")
        .rule("at-drive(v: truck, l2, l1)", "at(v, l2)", &["road(l1, l2)"], &["at(v, l1)"], "drive(v, l1, l2)")
        .build()
}

/// Selector for Assembly3: pick the C-item of the unique matching triple,
/// then its B-item, then the A-item.
pub fn assembly3_selector(domain: &Domain) -> Result<Selector, ModelError> {
    SelectorBuilder::new(domain, "assembly3")
        .rule(
            "done-select-c(b, c, a)",
            "done()",
            &["is-a(a)", "match(a, b)", "is-b(b)", "match(b, c)", "is-c(c)"],
            &["sel-b(b)", "is-c(c)", "match(b, c)"],
            "select-c(b, c)",
        )
        .rule(
            "sel-b-select-b(b, a)",
            "sel-b(b)",
            &["is-a(a)", "match(a, b)"],
            &["sel-a(a)", "is-b(b)", "match(a, b)"],
            "select-b(a, b)",
        )
        .rule("sel-a-select-a(a)", "sel-a(a)", &[], &["is-a(a)", "ready()"], "select-a(a)")
        .build()
}
