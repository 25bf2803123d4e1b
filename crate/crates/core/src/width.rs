//! Regression width: oracle-checked serializability of generalized rules,
//! SOS-width certification, super predicates and lifted rule analysis.

use alloc::boxed::Box;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::model::{
    apply_unchecked, ActionSchema, AtomId, AtomSet, Domain, LiftedAtom, ModelError, PredicateSig,
    Problem, ProblemSpec, State,
};
use crate::regression::{RegressionRule, RuleSource, Sgrs, SgrsConfig, DEFAULT_PERMUTATION_CAP};
use crate::search::{replay, Plan, SearchError};
use crate::Map;

pub fn rule_width(rule: &RegressionRule) -> usize {
    rule.width()
}

pub const DEFAULT_ORACLE_CAP: usize = 200_000;

/// One constrained optimal-plan query: shortest length and the end states
/// of all shortest plans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub length: Option<usize>,
    pub ends: Vec<u32>,
}

type QueryKey = (u32, Vec<AtomId>, Vec<AtomId>);

/// Lazily expanded explicit state graph with cached constrained
/// breadth-first queries.
pub struct Oracle<'p> {
    problem: &'p Problem,
    pub cap: usize,
    states: Vec<State>,
    index: Map<State, u32>,
    succ: Vec<Option<Vec<u32>>>,
    cache: Map<QueryKey, Rc<Query>>,
}

impl<'p> Oracle<'p> {
    pub fn new(problem: &'p Problem, cap: usize) -> Self {
        Oracle { problem, cap, states: Vec::new(), index: Map::new(), succ: Vec::new(), cache: Map::new() }
    }

    pub fn intern(&mut self, s: &State) -> Result<u32, SearchError> {
        if let Some(&i) = self.index.get(s) {
            return Ok(i);
        }
        if self.states.len() >= self.cap {
            return Err(SearchError::StateSpaceCapExceeded { cap: self.cap });
        }
        let i = self.states.len() as u32;
        self.states.push(s.clone());
        self.index.insert(s.clone(), i);
        self.succ.push(None);
        Ok(i)
    }

    pub fn state(&self, i: u32) -> &State {
        &self.states[i as usize]
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    fn successors(&mut self, u: u32) -> Result<Vec<u32>, SearchError> {
        if let Some(s) = &self.succ[u as usize] {
            return Ok(s.clone());
        }
        let s = self.states[u as usize].clone();
        let mut out = Vec::new();
        let p = self.problem;
        for a in p.applicable(&s) {
            let t = apply_unchecked(&s, p.action(a));
            let v = self.intern(&t)?;
            if !out.contains(&v) {
                out.push(v);
            }
        }
        self.succ[u as usize] = Some(out.clone());
        Ok(out)
    }

    /// Shortest plans from `start` reaching `goal` while every visited state
    /// contains `cons`.
    pub fn query(&mut self, start: u32, goal: &[AtomId], cons: &[AtomId]) -> Result<Rc<Query>, SearchError> {
        let mut g = goal.to_vec();
        g.sort_unstable();
        g.dedup();
        let mut c = cons.to_vec();
        c.sort_unstable();
        c.dedup();
        let key = (start, g, c);
        if let Some(q) = self.cache.get(&key) {
            return Ok(q.clone());
        }
        let (_, g, c) = &key;
        let q = Rc::new(self.bfs(start, g, c)?);
        self.cache.insert(key, q.clone());
        Ok(q)
    }

    fn bfs(&mut self, start: u32, goal: &[AtomId], cons: &[AtomId]) -> Result<Query, SearchError> {
        let none = Query { length: None, ends: Vec::new() };
        if !self.state(start).contains_all(cons) {
            return Ok(none);
        }
        if self.state(start).contains_all(goal) {
            return Ok(Query { length: Some(0), ends: vec![start] });
        }
        let mut seen = crate::Set::new();
        seen.insert(start);
        let mut layer = vec![start];
        let mut depth = 0;
        while !layer.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for &u in &layer {
                for v in self.successors(u)? {
                    if self.state(v).contains_all(cons) && seen.insert(v) {
                        next.push(v);
                    }
                }
            }
            let mut ends: Vec<u32> = next.iter().copied().filter(|&v| self.state(v).contains_all(goal)).collect();
            if !ends.is_empty() {
                ends.sort_unstable();
                return Ok(Query { length: Some(depth), ends });
            }
            layer = next;
        }
        Ok(none)
    }
}

fn union(a: &[AtomId], b: &[AtomId]) -> Vec<AtomId> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v.sort_unstable();
    v.dedup();
    v
}

/// Optimal serializability of `rule` from state `s`, checked by oracle
/// queries. A subgoal that cannot be achieved from some optimal prefix end
/// state counts as a violation.
pub fn is_optimally_serializable(oracle: &mut Oracle, rule: &RegressionRule, s: &State) -> Result<bool, SearchError> {
    let s = oracle.intern(s)?;
    let c = &rule.cons;
    if !oracle.state(s).contains_all(c) {
        return Ok(true);
    }
    let order = rule.order();
    for i in 0..order.len() {
        let prefix = oracle.query(s, &order[..i], c)?;
        let full = oracle.query(s, &order[..=i], c)?;
        let Some(lp) = prefix.length else { return Ok(true) };
        for &e in &prefix.ends {
            let sub = oracle.query(e, &[order[i]], &rule.sub_cons(i))?;
            let Some(ls) = sub.length else { return Ok(false) };
            if Some(lp + ls) != full.length {
                return Ok(false);
            }
            for &e2 in &sub.ends {
                if !oracle.state(e2).contains_all(&order[..=i]) {
                    return Ok(false);
                }
            }
        }
    }
    let all = oracle.query(s, &order, c)?;
    let Some(l) = all.length else { return Ok(true) };
    let goal = oracle.query(s, &[rule.goal], c)?;
    Ok(goal.length == Some(l + 1))
}

/// The containment condition of strong optimal serializability, checked at
/// every end state `e` of an optimal plan for the preceding subgoals:
/// optimal plans for `{p_i} ∪ c_i ∪ cons` from `e` must also achieve
/// `{p_1..p_i} ∪ cons`.
pub fn sos_containment(oracle: &mut Oracle, rule: &RegressionRule, s: &State) -> Result<bool, SearchError> {
    let s = oracle.intern(s)?;
    let order = rule.order();
    for i in 0..order.len() {
        let prefix = oracle.query(s, &order[..i], &rule.cons)?;
        let mut target = rule.sub_cons(i);
        target.push(order[i]);
        let want = union(&order[..=i], &rule.cons);
        for &e in &prefix.ends {
            let q = oracle.query(e, &target, &[])?;
            for &e2 in &q.ends {
                if !oracle.state(e2).contains_all(&want) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn is_sos_rule(oracle: &mut Oracle, rule: &RegressionRule, s: &State) -> Result<bool, SearchError> {
    Ok(is_optimally_serializable(oracle, rule, s)? && sos_containment(oracle, rule, s)?)
}

/// A rule used by a certified plan.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WitnessRule {
    pub rule: String,
    pub width: usize,
    pub optimally_serializable: bool,
    pub sos: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WidthCertificate {
    pub problem: String,
    pub goal: String,
    pub k: usize,
    pub k_max: usize,
    /// Atom count, synthetic goal atom excluded.
    pub n_atoms: usize,
    pub oracle_cap: usize,
    pub oracle_states: usize,
    pub plan: Vec<String>,
    pub witnesses: Vec<WitnessRule>,
    pub verified: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct WidthOptions {
    pub k_max: usize,
    pub oracle_cap: usize,
    pub perm_cap: usize,
    pub budget: usize,
}

impl Default for WidthOptions {
    fn default() -> Self {
        WidthOptions {
            k_max: 3,
            oracle_cap: DEFAULT_ORACLE_CAP,
            perm_cap: DEFAULT_PERMUTATION_CAP,
            budget: crate::regression::DEFAULT_SGRS_BUDGET,
        }
    }
}

pub const CONTAINMENT_NOTE: &str =
    "containment checked for the rule's own constraint set, at every optimal end state of the preceding subgoals";

/// Outcome of one width level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelResult {
    pub k: usize,
    pub plan: Option<Plan>,
    pub rules: Vec<(State, RegressionRule)>,
}

/// S-GRS restricted to generalized rules of width ≤ k that pass the SOS
/// check at the state they are applied from.
pub fn solve_at_width(
    problem: &Problem,
    oracle: &mut Oracle,
    k: usize,
    opts: &WidthOptions,
) -> Result<LevelResult, SearchError> {
    let failure: RefCell<Option<SearchError>> = RefCell::new(None);
    let verdicts: RefCell<Map<(State, RegressionRule), bool>> = RefCell::new(Map::new());
    let oracle = RefCell::new(oracle);
    let found = {
        let accept = |s: &State, r: &RegressionRule| -> bool {
            if failure.borrow().is_some() {
                return false;
            }
            let key = (s.clone(), r.clone());
            if let Some(&v) = verdicts.borrow().get(&key) {
                return v;
            }
            let mut o = oracle.borrow_mut();
            let v = match is_sos_rule(&mut o, r, s) {
                Ok(v) => v,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    false
                }
            };
            verdicts.borrow_mut().insert(key, v);
            v
        };
        let cfg = SgrsConfig { perm_cap: opts.perm_cap, budget: opts.budget, ..SgrsConfig::default() };
        let mut search = Sgrs::new(problem)
            .with_config(cfg)
            .with_rules(RuleSource::Generalized(k))
            .with_accept(Box::new(accept))
            .with_trace();
        search.solve(&problem.init, problem.goal, &[])?
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(match found {
        Some(f) => LevelResult { k, plan: Some(f.plan), rules: f.trace.into_iter().map(|a| (a.state, a.rule)).collect() },
        None => LevelResult { k, plan: None, rules: Vec::new() },
    })
}

/// Smallest k ≤ k_max at which S-GRS over certified generalized rules of
/// width ≤ k solves the problem from its initial state.
pub fn estimate_sos_width(problem: &Problem, opts: &WidthOptions) -> Result<Option<WidthCertificate>, SearchError> {
    let mut oracle = Oracle::new(problem, opts.oracle_cap);
    for k in 0..=opts.k_max {
        let level = solve_at_width(problem, &mut oracle, k, opts)?;
        let Some(plan) = level.plan else { continue };
        let mut witnesses: Vec<WitnessRule> = Vec::new();
        for (s, r) in &level.rules {
            let os = is_optimally_serializable(&mut oracle, r, s)?;
            let sos = os && sos_containment(&mut oracle, r, s)?;
            let w = WitnessRule { rule: r.display(problem), width: r.width(), optimally_serializable: os, sos };
            if !witnesses.contains(&w) {
                witnesses.push(w);
            }
        }
        let replays = replay(problem, &problem.init, &plan).is_ok_and(|st| st.last().unwrap().contains(problem.goal));
        let verified = replays && witnesses.iter().all(|w| w.sos && w.width <= k);
        return Ok(Some(WidthCertificate {
            problem: problem.name.clone(),
            goal: problem.atom_name(problem.goal),
            k,
            k_max: opts.k_max,
            n_atoms: problem.n_atoms_reported(),
            oracle_cap: opts.oracle_cap,
            oracle_states: oracle.n_states(),
            plan: plan.iter().map(|&a| problem.action_name(a)).collect(),
            witnesses,
            verified,
            notes: vec![CONTAINMENT_NOTE.to_string()],
        }));
    }
    Ok(None)
}

/// Name of the conjunction predicate for `p` and `q`.
pub fn super_name(p: &str, q: &str) -> String {
    format!("{p}_and_{q}")
}

pub fn not_name(p: &str) -> String {
    format!("not_{p}")
}

struct SuperPreds {
    p: u32,
    q: u32,
    pq: u32,
    not_p: Option<u32>,
    not_q: Option<u32>,
}

fn has(list: &[LiftedAtom], pred: u32, args: &[u32]) -> bool {
    list.iter().any(|x| x.pred == pred && x.args == args)
}

fn push_unique(list: &mut Vec<LiftedAtom>, atom: LiftedAtom) {
    if !list.contains(&atom) {
        list.push(atom);
    }
}

enum Conj {
    /// The operator leaves `p_and_q(args)` alone or sets it unconditionally.
    Fixed,
    /// The operator must branch on `partner(args)`.
    Test(u32, Vec<u32>),
}

/// What an add effect `e` (over `p` or `q`) does to the conjunction.
fn conj_effect(a: &ActionSchema, e: &LiftedAtom, p: u32, q: u32) -> (bool, Conj) {
    let partner = if e.pred == p { q } else { p };
    let net_deleted = |x: u32| has(&a.del, x, &e.args) && !has(&a.add, x, &e.args);
    if has(&a.pre, e.pred, &e.args) {
        return (false, Conj::Fixed);
    }
    if net_deleted(partner) {
        return (false, Conj::Fixed);
    }
    if has(&a.add, partner, &e.args) || has(&a.pre, partner, &e.args) {
        return (true, Conj::Fixed);
    }
    (false, Conj::Test(partner, e.args.clone()))
}

/// Adds `p_and_q` and rewrites operators so it always equals `p ∧ q`.
///
/// Negative preconditions are unavailable, so a complement predicate
/// (`not_q`, and `not_p` when needed) is added and maintained by every
/// operator touching the underlying predicate. An operator adding `p(v)`
/// without settling `q(v)` is split in two: one copy requires `not_q(v)`,
/// the other requires `q(v)` and also adds `p_and_q(v)` (symmetrically for
/// additions of `q`). Deleting `p(v)` or `q(v)` deletes `p_and_q(v)`. A
/// precondition pair `p(v), q(v)` is replaced by `p_and_q(v)`.
pub fn super_predicate_transform(domain: &Domain, p: &str, q: &str) -> Result<Domain, ModelError> {
    let pid = domain.pred_id(p).ok_or_else(|| ModelError::UnknownPredicate(p.to_string()))?;
    let qid = domain.pred_id(q).ok_or_else(|| ModelError::UnknownPredicate(q.to_string()))?;
    let (ps, qs) = (domain.pred(pid).clone(), domain.pred(qid).clone());
    if ps.arity() != qs.arity() {
        return Err(ModelError::ArityMismatch { pred: q.to_string(), expected: ps.arity(), found: qs.arity() });
    }
    let (mut need_p, mut need_q) = (false, false);
    for a in &domain.actions {
        for e in a.add.iter().filter(|e| e.pred == pid || e.pred == qid) {
            if let (_, Conj::Test(partner, _)) = conj_effect(a, e, pid, qid) {
                need_p |= partner == pid;
                need_q |= partner == qid;
            }
        }
    }
    let mut out = domain.clone();
    let fresh = |name: String, out: &mut Domain| -> Result<u32, ModelError> {
        if out.pred_id(&name).is_some() {
            return Err(ModelError::DuplicateName(name));
        }
        out.predicates.push(PredicateSig { name, arg_types: ps.arg_types.clone() });
        Ok(out.predicates.len() as u32 - 1)
    };
    let pq = fresh(super_name(p, q), &mut out)?;
    let not_p = if need_p { Some(fresh(not_name(p), &mut out)?) } else { None };
    let not_q = if need_q { Some(fresh(not_name(q), &mut out)?) } else { None };
    let sp = SuperPreds { p: pid, q: qid, pq, not_p, not_q };
    out.actions = domain.actions.iter().flat_map(|a| split_operator(a, &sp)).collect();
    out.validate()?;
    Ok(out)
}

fn split_operator(a: &ActionSchema, sp: &SuperPreds) -> Vec<ActionSchema> {
    let atom = |pred: u32, args: &[u32]| LiftedAtom { pred, args: args.to_vec() };
    let mut base = a.clone();
    for (x, not_x) in [(sp.p, sp.not_p), (sp.q, sp.not_q)] {
        let Some(not_x) = not_x else { continue };
        for e in a.add.iter().filter(|e| e.pred == x) {
            push_unique(&mut base.del, atom(not_x, &e.args));
        }
        for e in a.del.iter().filter(|e| e.pred == x && !has(&a.add, x, &e.args)) {
            push_unique(&mut base.add, atom(not_x, &e.args));
        }
    }
    for e in &a.del {
        if (e.pred == sp.p || e.pred == sp.q) && !has(&a.add, e.pred, &e.args) {
            push_unique(&mut base.del, atom(sp.pq, &e.args));
        }
    }
    let pairs: Vec<Vec<u32>> =
        a.pre.iter().filter(|x| x.pred == sp.p && has(&a.pre, sp.q, &x.args)).map(|x| x.args.clone()).collect();
    for args in &pairs {
        base.pre.retain(|x| !((x.pred == sp.p || x.pred == sp.q) && &x.args == args));
        push_unique(&mut base.pre, atom(sp.pq, args));
    }
    let mut tests: Vec<(u32, Vec<u32>)> = Vec::new();
    for e in a.add.iter().filter(|e| e.pred == sp.p || e.pred == sp.q) {
        match conj_effect(a, e, sp.p, sp.q) {
            (true, _) => {
                push_unique(&mut base.add, atom(sp.pq, &e.args));
                base.del.retain(|x| !(x.pred == sp.pq && x.args == e.args));
            }
            (false, Conj::Test(partner, args)) => {
                if !tests.iter().any(|t| t.1 == args) {
                    tests.push((partner, args));
                }
            }
            (false, Conj::Fixed) => {}
        }
    }
    if tests.is_empty() {
        return vec![base];
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << tests.len()) {
        let mut o = base.clone();
        let mut suffix = String::new();
        for (i, (partner, args)) in tests.iter().enumerate() {
            if mask >> i & 1 == 1 {
                push_unique(&mut o.pre, atom(*partner, args));
                push_unique(&mut o.add, atom(sp.pq, args));
                suffix.push('y');
            } else {
                let not_partner = if *partner == sp.q { sp.not_q } else { sp.not_p };
                push_unique(&mut o.pre, atom(not_partner.expect("complement allocated"), args));
                suffix.push('n');
            }
        }
        o.name = format!("{}--{suffix}", a.name);
        out.push(o);
    }
    out
}

/// Initial atoms for the predicates a [`super_predicate_transform`] added to
/// `transformed`, over every type-compatible argument tuple.
pub fn super_predicate_spec(transformed: &Domain, spec: &ProblemSpec, p: &str, q: &str) -> Result<ProblemSpec, ModelError> {
    let pid = transformed.pred_id(p).ok_or_else(|| ModelError::UnknownPredicate(p.to_string()))?;
    let types = transformed.pred(pid).arg_types.clone();
    let per_arg: Vec<Vec<String>> = types
        .iter()
        .map(|&t| {
            spec.objects
                .iter()
                .filter(|(_, ty)| transformed.type_id(ty).is_some_and(|ty| transformed.is_subtype(ty, t)))
                .map(|(n, _)| n.clone())
                .collect()
        })
        .collect();
    let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
    for choices in &per_arg {
        tuples = tuples
            .iter()
            .flat_map(|t| {
                choices.iter().map(move |c| {
                    let mut t = t.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect();
    }
    let holds = |pred: &str, args: &Vec<String>| spec.init.iter().any(|(n, a)| n == pred && a == args);
    let (has_not_p, has_not_q) =
        (transformed.pred_id(&not_name(p)).is_some(), transformed.pred_id(&not_name(q)).is_some());
    let mut out = spec.clone();
    for t in tuples {
        let (hp, hq) = (holds(p, &t), holds(q, &t));
        if hp && hq {
            out.init.push((super_name(p, q), t.clone()));
        }
        if has_not_p && !hp {
            out.init.push((not_name(p), t.clone()));
        }
        if has_not_q && !hq {
            out.init.push((not_name(q), t.clone()));
        }
    }
    Ok(out)
}

/// A precondition ordering ruled out by the goal-stack test: every
/// achiever of `precondition` needs `goal` itself, so the rule can only
/// succeed when `precondition` already holds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Flag {
    pub action: String,
    pub goal: String,
    pub precondition: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CandidateReport {
    pub flags: Vec<Flag>,
    /// `(action, goal)` pairs analysed.
    pub pairs: usize,
}

impl CandidateReport {
    pub fn is_flagged(&self, action: &str, goal: &str, pre: &str) -> bool {
        self.flags.iter().any(|f| f.action == action && f.goal == goal && f.precondition == pre)
    }
}

fn lifted_name(d: &Domain, a: &ActionSchema, x: &LiftedAtom) -> String {
    let args: Vec<&str> = x.args.iter().map(|&v| a.params[v as usize].name.as_str()).collect();
    format!("{}({})", d.pred(x.pred).name, args.join(", "))
}

fn types_meet(d: &Domain, s: u32, t: u32) -> bool {
    d.is_subtype(s, t) || d.is_subtype(t, s)
}

/// Lifted one-step regression: for every schema `a`, add effect `g` and
/// precondition `p`, `p` is flagged when it has at least one achiever and
/// every achiever, after unifying its add effect with `p`, lists `g`
/// among its preconditions.
pub fn derive_candidate_rules(domain: &Domain) -> CandidateReport {
    let mut report = CandidateReport::default();
    for a in &domain.actions {
        for g in &a.add {
            report.pairs += 1;
            for p in &a.pre {
                if p == g {
                    continue;
                }
                let mut achievers = 0;
                let mut all_need_g = true;
                for b in &domain.actions {
                    for e in b.add.iter().filter(|e| e.pred == p.pred) {
                        // b-variable -> a-variable
                        let mut map: Vec<Option<u32>> = vec![None; b.params.len()];
                        let mut ok = true;
                        for (&bv, &av) in e.args.iter().zip(&p.args) {
                            match map[bv as usize] {
                                None => map[bv as usize] = Some(av),
                                Some(x) if x == av => {}
                                Some(_) => ok = false,
                            }
                            if !types_meet(domain, b.params[bv as usize].ty, a.params[av as usize].ty) {
                                ok = false;
                            }
                        }
                        if !ok {
                            continue;
                        }
                        achievers += 1;
                        let needs = b.pre.iter().any(|x| {
                            x.pred == g.pred
                                && x.args.len() == g.args.len()
                                && x.args.iter().zip(&g.args).all(|(&bv, &av)| map[bv as usize] == Some(av))
                        });
                        all_need_g &= needs;
                    }
                }
                if achievers > 0 && all_need_g {
                    report.flags.push(Flag {
                        action: a.name.clone(),
                        goal: lifted_name(domain, a, g),
                        precondition: lifted_name(domain, a, p),
                    });
                }
            }
        }
    }
    report.flags.sort();
    report.flags.dedup();
    report
}

/// Flagged (action schema, goal position, precondition position) triples,
/// resolved against a ground problem.
pub struct GroundFlags {
    flags: Vec<(u32, usize, usize)>,
}

impl GroundFlags {
    pub fn new(problem: &Problem, report: &CandidateReport) -> Self {
        let d = &problem.domain;
        let mut flags = Vec::new();
        for (si, a) in d.actions.iter().enumerate() {
            for (gi, g) in a.add.iter().enumerate() {
                for (pi, p) in a.pre.iter().enumerate() {
                    if report.is_flagged(&a.name, &lifted_name(d, a, g), &lifted_name(d, a, p)) {
                        flags.push((si as u32, gi, pi));
                    }
                }
            }
        }
        GroundFlags { flags }
    }

    /// True if some flagged precondition of the rule's action, for the
    /// rule's goal, is false in `s`.
    pub fn rules_out(&self, problem: &Problem, rule: &RegressionRule, s: &State) -> bool {
        let act = problem.action(rule.action);
        let Some(schema) = problem.domain.actions.get(act.schema as usize) else { return false };
        let inst = |x: &LiftedAtom| {
            let args: Vec<u32> = x.args.iter().map(|&v| act.args[v as usize]).collect();
            problem.atom_of(x.pred, &args)
        };
        self.flags.iter().any(|&(si, gi, pi)| {
            si == act.schema && inst(&schema.add[gi]) == rule.goal && !s.contains(inst(&schema.pre[pi]))
        })
    }

    /// Drops rules ruled out at `s`.
    pub fn prune(&self, problem: &Problem, rules: Vec<RegressionRule>, s: &State) -> Vec<RegressionRule> {
        rules.into_iter().filter(|r| !self.rules_out(problem, r, s)).collect()
    }
}

/// Atom set helper for tests and callers working with names.
pub fn atoms_named(problem: &Problem, names: &[(&str, &[&str])]) -> Option<AtomSet> {
    let ids: Option<Vec<AtomId>> = names.iter().map(|(p, a)| problem.atom(p, a)).collect();
    Some(problem.set_of(&ids?))
}
