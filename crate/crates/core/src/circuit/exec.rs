//! Exact boolean evaluation of circuits over a ground universe.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{CircuitError, Lit, RelKind, RelationalCircuit, Term};
use crate::model::{ActionId, AtomId, Problem, State};
use crate::{Map, Set};

type Row = Box<[u32]>;
const UNBOUND: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecOptions {
    /// Restrict driver literals to the facts new at the previous layer.
    pub semi_naive: bool,
    /// Layer count; `None` evaluates the circuit's depth expression on the
    /// problem's object count.
    pub layers: Option<usize>,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions { semi_naive: true, layers: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepResult {
    pub action: ActionId,
    /// First layer at which an action head fired.
    pub layer: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Stuck,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rollout {
    pub plan: Vec<ActionId>,
    /// Layer that produced each step.
    pub layers: Vec<usize>,
    pub outcome: Outcome,
    /// Set when the circuit proposed an inapplicable action (outcome Stuck).
    pub rejected: Option<ActionId>,
}

#[derive(Clone, Default)]
struct Facts {
    rows: Vec<Row>,
    set: Set<Row>,
}

impl Facts {
    fn insert(&mut self, r: Row) {
        if !self.set.contains(&r) {
            self.set.insert(r.clone());
            self.rows.push(r);
        }
    }

    fn contains(&self, r: &[u32]) -> bool {
        self.set.contains(r)
    }
}

type Index = Map<Row, Vec<u32>>;
type IndexCache = Map<(u32, Box<[usize]>), Index>;

fn build_index(f: &Facts, mask: &[usize]) -> Index {
    let mut idx: Index = Map::new();
    for (i, r) in f.rows.iter().enumerate() {
        let key: Row = mask.iter().map(|&p| r[p]).collect();
        idx.entry(key).or_default().push(i as u32);
    }
    idx
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum View {
    Static,
    Dynamic,
    Prev,
    Cur,
}

struct Step {
    lit: usize,
    view: View,
    rel: u32,
    delta: bool,
    mask: Box<[usize]>,
    binds: Vec<(usize, u32)>,
    eqs: Vec<(usize, usize)>,
    checks: Vec<usize>,
}

struct RulePlan {
    pre_checks: Vec<usize>,
    steps: Vec<Step>,
}

/// A circuit bound to a problem, reusable across states.
pub struct Executor<'c, 'p> {
    circuit: &'c RelationalCircuit,
    problem: &'p Problem,
    pub options: ExecOptions,
    /// pred, type or schema id per non-register relation.
    symbol: Vec<u32>,
    statics: Vec<Facts>,
    static_idx: IndexCache,
    plans: [Vec<Vec<RulePlan>>; 2],
}

struct Views<'a> {
    statics: &'a [Facts],
    dynamic: &'a [Facts],
    prev: &'a [Facts],
    cur: &'a [Facts],
    delta_start: &'a [usize],
    idx: [&'a IndexCache; 4],
}

impl Views<'_> {
    fn facts(&self, view: View, rel: u32) -> &Facts {
        let r = rel as usize;
        match view {
            View::Static => &self.statics[r],
            View::Dynamic => &self.dynamic[r],
            View::Prev => &self.prev[r],
            View::Cur => &self.cur[r],
        }
    }
}

fn view_of(c: &RelationalCircuit, rel: u32, prev: bool) -> View {
    match c.relations[rel as usize].kind {
        RelKind::Type | RelKind::Exists => View::Static,
        RelKind::State | RelKind::Init | RelKind::Goal => View::Dynamic,
        RelKind::Register | RelKind::Action if prev => View::Prev,
        RelKind::Register | RelKind::Action => View::Cur,
    }
}

fn view_slot(v: View) -> usize {
    match v {
        View::Static => 0,
        View::Dynamic => 1,
        View::Prev => 2,
        View::Cur => 3,
    }
}

fn kind_rank(c: &RelationalCircuit, rel: u32, prev: bool) -> u8 {
    match c.relations[rel as usize].kind {
        RelKind::Register if prev => 0,
        RelKind::Register => 1,
        RelKind::Goal => 2,
        RelKind::State | RelKind::Init => 3,
        RelKind::Exists => 4,
        RelKind::Type => 5,
        RelKind::Action => 6,
    }
}

fn lit_vars(l: &Lit) -> Vec<u32> {
    match l {
        Lit::Pos(a) | Lit::Neg(a) => a.args.clone(),
        Lit::Distinct(ps) => ps.iter().flat_map(|&(a, b)| [a, b]).collect(),
    }
}

fn plan_rule(c: &RelationalCircuit, rule: &super::LiftedRule, semi_naive: bool) -> RulePlan {
    let mut bound = vec![false; rule.vars];
    let mut pending: Vec<usize> = (0..rule.body.len()).collect();
    let ready = |bound: &[bool], l: &Lit| lit_vars(l).iter().all(|&v| bound[v as usize]);
    let take_checks = |bound: &[bool], pending: &mut Vec<usize>| -> Vec<usize> {
        let mut out = Vec::new();
        pending.retain(|&i| {
            if ready(bound, &rule.body[i]) {
                out.push(i);
                false
            } else {
                true
            }
        });
        out
    };
    let pre_checks = take_checks(&bound, &mut pending);
    let mut steps = Vec::new();
    let mut first = semi_naive.then_some(rule.driver).flatten().filter(|d| pending.contains(d));
    loop {
        let pick = first.take().or_else(|| {
            pending
                .iter()
                .copied()
                .filter(|&i| matches!(rule.body[i], Lit::Pos(_)))
                .min_by_key(|&i| {
                    let Lit::Pos(a) = &rule.body[i] else { unreachable!() };
                    let nb = a.args.iter().filter(|&&v| bound[v as usize]).count();
                    let free = a.args.len() - nb;
                    (nb == 0, kind_rank(c, a.rel, a.prev), free)
                })
        });
        let Some(li) = pick else { break };
        pending.retain(|&i| i != li);
        let Lit::Pos(a) = &rule.body[li] else { unreachable!() };
        let mut mask = Vec::new();
        let mut binds = Vec::new();
        let mut eqs = Vec::new();
        let mut first_pos: Map<u32, usize> = Map::new();
        for (pos, &v) in a.args.iter().enumerate() {
            if bound[v as usize] {
                mask.push(pos);
            } else if let Some(&fp) = first_pos.get(&v) {
                eqs.push((fp, pos));
            } else {
                first_pos.insert(v, pos);
                binds.push((pos, v));
            }
        }
        for &(_, v) in &binds {
            bound[v as usize] = true;
        }
        let checks = take_checks(&bound, &mut pending);
        steps.push(Step {
            lit: li,
            view: view_of(c, a.rel, a.prev),
            rel: a.rel,
            delta: steps.is_empty() && semi_naive && rule.driver == Some(li),
            mask: mask.into_boxed_slice(),
            binds,
            eqs,
            checks,
        });
    }
    debug_assert!(pending.is_empty());
    RulePlan { pre_checks, steps }
}

fn check(v: &Views, c: &RelationalCircuit, lit: &Lit, b: &[u32]) -> bool {
    match lit {
        Lit::Pos(a) | Lit::Neg(a) => {
            let row: Vec<u32> = a.args.iter().map(|&x| b[x as usize]).collect();
            let has = v.facts(view_of(c, a.rel, a.prev), a.rel).contains(&row);
            has == matches!(lit, Lit::Pos(_))
        }
        Lit::Distinct(ps) => ps.iter().any(|&(x, y)| b[x as usize] != b[y as usize]),
    }
}

fn join(v: &Views, c: &RelationalCircuit, rule: &super::LiftedRule, plan: &RulePlan, i: usize, b: &mut Vec<u32>, emit: &mut dyn FnMut(&[u32])) {
    let Some(step) = plan.steps.get(i) else {
        emit(b);
        return;
    };
    let f = v.facts(step.view, step.rel);
    let mut visit = |row: &Row, b: &mut Vec<u32>| {
        if step.eqs.iter().any(|&(x, y)| row[x] != row[y]) {
            return;
        }
        for &(pos, var) in &step.binds {
            b[var as usize] = row[pos];
        }
        if step.checks.iter().all(|&l| check(v, c, &rule.body[l], b)) {
            join(v, c, rule, plan, i + 1, b, emit);
        }
    };
    if step.delta {
        let start = v.delta_start[step.rel as usize];
        for row in &f.rows[start.min(f.rows.len())..] {
            visit(row, b);
        }
    } else if step.mask.is_empty() {
        for row in &f.rows {
            visit(row, b);
        }
    } else {
        let Lit::Pos(a) = &rule.body[step.lit] else { unreachable!() };
        let key: Vec<u32> = step.mask.iter().map(|&p| b[a.args[p] as usize]).collect();
        let idx = &v.idx[view_slot(step.view)][&(step.rel, step.mask.clone())];
        if let Some(ids) = idx.get(key.as_slice()) {
            for &id in ids {
                visit(&f.rows[id as usize], b);
            }
        }
    }
}

struct LayerRun {
    dynamic: Vec<Facts>,
    dyn_idx: IndexCache,
    prev: Vec<Facts>,
    prev_idx: IndexCache,
    cur: Vec<Facts>,
    cur_idx: IndexCache,
    delta_start: Vec<usize>,
}

impl<'c, 'p> Executor<'c, 'p> {
    pub fn new(circuit: &'c RelationalCircuit, problem: &'p Problem) -> Result<Self, CircuitError> {
        Self::with_options(circuit, problem, ExecOptions::default())
    }

    pub fn with_options(circuit: &'c RelationalCircuit, problem: &'p Problem, options: ExecOptions) -> Result<Self, CircuitError> {
        circuit.validate()?;
        let d = &problem.domain;
        let mut symbol = vec![u32::MAX; circuit.relations.len()];
        let mut statics = vec![Facts::default(); circuit.relations.len()];
        for (i, r) in circuit.relations.iter().enumerate() {
            let sym = r.symbol.as_deref().unwrap_or("");
            let missing = || CircuitError::Invalid(format!("`{}` is not in domain `{}`", r.name, d.name));
            match r.kind {
                RelKind::State | RelKind::Init | RelKind::Goal => {
                    let p = d.pred_id(sym).ok_or_else(missing)?;
                    if d.pred(p).arity() != r.arity {
                        return Err(missing());
                    }
                    symbol[i] = p;
                }
                RelKind::Type => {
                    let t = d.type_id(sym).ok_or_else(missing)?;
                    symbol[i] = t;
                    for (o, obj) in problem.objects.iter().enumerate() {
                        if d.is_subtype(obj.ty, t) {
                            statics[i].insert(Box::new([o as u32]));
                        }
                    }
                }
                RelKind::Exists | RelKind::Action => {
                    let a = d.action_id(sym).ok_or_else(missing)?;
                    if d.actions[a].params.len() != r.arity {
                        return Err(missing());
                    }
                    symbol[i] = a as u32;
                    if r.kind == RelKind::Exists {
                        for ga in problem.actions.iter().filter(|g| g.schema == a as u32) {
                            statics[i].insert(ga.args.clone().into_boxed_slice());
                        }
                    }
                }
                RelKind::Register => {}
            }
        }
        let mut ex = Executor { circuit, problem, options, symbol, statics, static_idx: Map::new(), plans: [Vec::new(), Vec::new()] };
        ex.replan();
        Ok(ex)
    }

    fn replan(&mut self) {
        let c = self.circuit;
        let sn = self.options.semi_naive;
        let plan_block = |b: &[super::Stratum]| b.iter().map(|s| s.rules.iter().map(|r| plan_rule(c, r, sn)).collect()).collect();
        self.plans = [plan_block(&c.init), plan_block(&c.layer)];
        let mut static_idx = IndexCache::new();
        for block in &self.plans {
            for st in block {
                for p in st {
                    for s in &p.steps {
                        if s.view == View::Static && !s.mask.is_empty() && s.mask.len() < c.relations[s.rel as usize].arity {
                            static_idx
                                .entry((s.rel, s.mask.clone()))
                                .or_insert_with(|| build_index(&self.statics[s.rel as usize], &s.mask));
                        }
                    }
                }
            }
        }
        self.static_idx = static_idx;
    }

    pub fn set_options(&mut self, options: ExecOptions) {
        self.options = options;
        self.replan();
    }

    pub fn layers(&self) -> usize {
        self.options.layers.unwrap_or_else(|| self.circuit.depth.eval(self.problem.objects.len()))
    }

    fn dynamic_inputs(&self, s: &State, goal: &[AtomId], root: &State) -> Vec<Facts> {
        let c = self.circuit;
        let mut out = vec![Facts::default(); c.relations.len()];
        let mut by_pred: [Map<u32, Vec<u32>>; 3] = [Map::new(), Map::new(), Map::new()];
        for (i, r) in c.relations.iter().enumerate() {
            let slot = match r.kind {
                RelKind::State => 0,
                RelKind::Init => 1,
                RelKind::Goal => 2,
                _ => continue,
            };
            by_pred[slot].entry(self.symbol[i]).or_default().push(i as u32);
        }
        let atoms = &self.problem.atoms;
        let mut fill = |slot: usize, it: &mut dyn Iterator<Item = AtomId>| {
            if by_pred[slot].is_empty() {
                return;
            }
            for a in it {
                let (p, args) = atoms.decode(a);
                if let Some(rels) = by_pred[slot].get(&p) {
                    let row: Row = args.into_boxed_slice();
                    for &r in rels {
                        out[r as usize].insert(row.clone());
                    }
                }
            }
        };
        fill(0, &mut s.iter());
        fill(1, &mut root.iter());
        fill(2, &mut goal.iter().copied());
        out
    }

    fn run_block(&self, block: usize, run: &mut LayerRun) {
        let c = self.circuit;
        let strata = if block == 0 { &c.init } else { &c.layer };
        for (si, st) in strata.iter().enumerate() {
            let plans = &self.plans[block][si];
            for p in plans {
                for s in &p.steps {
                    if s.delta || s.mask.is_empty() || s.mask.len() == c.relations[s.rel as usize].arity {
                        continue;
                    }
                    let key = (s.rel, s.mask.clone());
                    match s.view {
                        View::Dynamic => {
                            if !run.dyn_idx.contains_key(&key) {
                                let idx = build_index(&run.dynamic[s.rel as usize], &s.mask);
                                run.dyn_idx.insert(key, idx);
                            }
                        }
                        View::Prev => {
                            if !run.prev_idx.contains_key(&key) {
                                let idx = build_index(&run.prev[s.rel as usize], &s.mask);
                                run.prev_idx.insert(key, idx);
                            }
                        }
                        View::Cur => {
                            if !run.cur_idx.contains_key(&key) {
                                let idx = build_index(&run.cur[s.rel as usize], &s.mask);
                                run.cur_idx.insert(key, idx);
                            }
                        }
                        View::Static => {}
                    }
                }
            }
            let views = Views {
                statics: &self.statics,
                dynamic: &run.dynamic,
                prev: &run.prev,
                cur: &run.cur,
                delta_start: &run.delta_start,
                idx: [&self.static_idx, &run.dyn_idx, &run.prev_idx, &run.cur_idx],
            };
            let mut heads: Vec<(u32, Row)> = Vec::new();
            type Best = (Vec<u32>, usize, Row);
            let mut choice: Map<(u32, Row), (Best, u32)> = Map::new();
            for (ri, (rule, plan)) in st.rules.iter().zip(plans).enumerate() {
                let mut b = vec![UNBOUND; rule.vars];
                if !plan.pre_checks.iter().all(|&l| check(&views, c, &rule.body[l], &b)) {
                    continue;
                }
                let hrel = rule.head.rel;
                let mut emit = |b: &[u32]| {
                    let row: Row = rule.head.args.iter().map(|&x| b[x as usize]).collect();
                    match &rule.choice {
                        None => heads.push((hrel, row)),
                        Some(ch) => {
                            let key: Row = ch.key.iter().map(|&x| b[x as usize]).collect();
                            let order: Vec<u32> = ch
                                .order
                                .iter()
                                .map(|t| match *t {
                                    Term::Var(x) => b[x as usize],
                                    Term::Const(k) => k,
                                })
                                .collect();
                            let cand = (order, ri, row);
                            match choice.entry((ch.group, key)) {
                                hashbrown::hash_map::Entry::Vacant(e) => {
                                    e.insert((cand, hrel));
                                }
                                hashbrown::hash_map::Entry::Occupied(mut e) => {
                                    if cand < e.get().0 {
                                        e.insert((cand, hrel));
                                    }
                                }
                            }
                        }
                    }
                };
                join(&views, c, rule, plan, 0, &mut b, &mut emit);
            }
            let mut winners: Vec<(u32, Row)> = choice.into_values().map(|((_, _, row), rel)| (rel, row)).collect();
            winners.sort();
            heads.extend(winners);
            if !heads.is_empty() {
                run.cur_idx.clear();
            }
            for (rel, row) in heads {
                run.cur[rel as usize].insert(row);
            }
        }
    }

    fn fired(&self, run: &LayerRun) -> Option<ActionId> {
        let mut best: Option<ActionId> = None;
        for (i, r) in self.circuit.relations.iter().enumerate() {
            if r.kind != RelKind::Action {
                continue;
            }
            for row in &run.cur[i].rows {
                if let Some(a) = self.problem.find_action_ids(self.symbol[i], row) {
                    best = Some(best.map_or(a, |b| b.min(a)));
                }
            }
        }
        best
    }

    /// Evaluates layers until an action head fires, the registers reach a
    /// fixpoint, or the depth is used up. `observe` sees the registers
    /// after every layer (layer 0 is the initial block).
    fn evaluate(&self, s: &State, goal: &[AtomId], root: &State, observe: &mut dyn FnMut(usize, &[Facts])) -> Option<StepResult> {
        let c = self.circuit;
        let n = c.relations.len();
        let mut run = LayerRun {
            dynamic: self.dynamic_inputs(s, goal, root),
            dyn_idx: Map::new(),
            prev: vec![Facts::default(); n],
            prev_idx: Map::new(),
            cur: vec![Facts::default(); n],
            cur_idx: Map::new(),
            delta_start: vec![0; n],
        };
        self.run_block(0, &mut run);
        observe(0, &run.cur);
        if let Some(a) = self.fired(&run) {
            return Some(StepResult { action: a, layer: 0 });
        }
        let depth = self.layers();
        let mut last_start = vec![0; n];
        for layer in 1..=depth {
            let mut cur = vec![Facts::default(); n];
            let mut start = vec![0; n];
            for (i, r) in c.relations.iter().enumerate() {
                if r.kind == RelKind::Register && r.monotone {
                    cur[i] = run.cur[i].clone();
                    start[i] = cur[i].rows.len();
                }
            }
            run.prev = core::mem::replace(&mut run.cur, cur);
            run.delta_start = core::mem::replace(&mut last_start, start);
            run.prev_idx.clear();
            run.cur_idx.clear();
            self.run_block(1, &mut run);
            observe(layer, &run.cur);
            if let Some(a) = self.fired(&run) {
                return Some(StepResult { action: a, layer });
            }
            let fix = c.relations.iter().enumerate().all(|(i, r)| r.kind != RelKind::Register || run.cur[i].set == run.prev[i].set);
            if fix {
                return None;
            }
        }
        None
    }

    /// Smallest action at the first layer where any fires; absent when the
    /// goal already holds in `s` or nothing fires.
    pub fn step(&self, s: &State, goal: &[AtomId], root: &State) -> Option<StepResult> {
        if s.contains_all(goal) {
            return None;
        }
        self.evaluate(s, goal, root, &mut |_, _| {})
    }

    /// Register contents after each evaluated layer: (layer, register name, rows).
    pub fn trace(&self, s: &State, goal: &[AtomId], root: &State) -> Vec<Vec<(alloc::string::String, Vec<Vec<u32>>)>> {
        let c = self.circuit;
        let mut out = Vec::new();
        self.evaluate(s, goal, root, &mut |_, cur| {
            let mut layer = Vec::new();
            for (i, r) in c.relations.iter().enumerate() {
                if r.kind == RelKind::Register {
                    let mut rows: Vec<Vec<u32>> = cur[i].rows.iter().map(|r| r.to_vec()).collect();
                    rows.sort();
                    layer.push((r.name.clone(), rows));
                }
            }
            out.push(layer);
        });
        out
    }

    pub fn rollout(&self, max_steps: usize) -> Rollout {
        let p = self.problem;
        let mut s = p.init.clone();
        let mut out = Rollout { plan: Vec::new(), layers: Vec::new(), outcome: Outcome::Budget, rejected: None };
        loop {
            if s.contains_all(&p.goal_conj) {
                out.outcome = Outcome::Success;
                return out;
            }
            if out.plan.len() >= max_steps {
                return out;
            }
            let Some(r) = self.step(&s, &p.goal_conj, &p.init) else {
                out.outcome = Outcome::Stuck;
                return out;
            };
            match p.apply(&s, r.action) {
                Ok(next) => s = next,
                Err(_) => {
                    out.outcome = Outcome::Stuck;
                    out.rejected = Some(r.action);
                    return out;
                }
            }
            out.plan.push(r.action);
            out.layers.push(r.layer);
        }
    }
}

/// One policy step for `goal` in `s`, with `problem.init` as the root state.
pub fn execute_step(c: &RelationalCircuit, problem: &Problem, s: &State, goal: &[AtomId]) -> Result<Option<StepResult>, CircuitError> {
    execute_step_with(c, problem, s, goal, ExecOptions::default())
}

pub fn execute_step_with(
    c: &RelationalCircuit,
    problem: &Problem,
    s: &State,
    goal: &[AtomId],
    options: ExecOptions,
) -> Result<Option<StepResult>, CircuitError> {
    Ok(Executor::with_options(c, problem, options)?.step(s, goal, &problem.init))
}

/// Closed-loop execution from `problem.init` towards `problem.goal_conj`.
pub fn rollout(c: &RelationalCircuit, problem: &Problem, max_steps: usize) -> Result<Rollout, CircuitError> {
    rollout_with(c, problem, max_steps, ExecOptions::default())
}

pub fn rollout_with(c: &RelationalCircuit, problem: &Problem, max_steps: usize, options: ExecOptions) -> Result<Rollout, CircuitError> {
    Ok(Executor::with_options(c, problem, options)?.rollout(max_steps))
}
