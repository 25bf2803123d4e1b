//! Serialized goal regression: rule sets, S-GRS and its multi-trajectory
//! complete variant.

use alloc::boxed::Box;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{apply_unchecked, ActionId, AtomId, Problem, State};
use crate::mutex::Mutexes;
use crate::search::{Plan, SearchError};
use crate::{Map, Set};

pub const DEFAULT_PERMUTATION_CAP: usize = 6;
pub const DEFAULT_SGRS_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgoal {
    pub atom: AtomId,
    /// Earlier subgoals kept while this one is pursued (`c_i`).
    pub keep: Vec<AtomId>,
}

/// `goal^cons ← p_1^{c_1}, ..., p_k^{c_k} ∥ action`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegressionRule {
    pub goal: AtomId,
    pub cons: Vec<AtomId>,
    pub subgoals: Vec<Subgoal>,
    pub action: ActionId,
}

impl RegressionRule {
    /// Rule keeping every earlier subgoal, as in R0.
    pub fn full_prefix(goal: AtomId, cons: &[AtomId], action: ActionId, order: &[AtomId]) -> Self {
        let subgoals = order
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let mut keep = order[..i].to_vec();
                keep.sort_unstable();
                Subgoal { atom: p, keep }
            })
            .collect();
        RegressionRule { goal, cons: sorted(cons.to_vec()), subgoals, action }
    }

    /// `|c| + max_i |c_i|`.
    pub fn width(&self) -> usize {
        self.cons.len() + self.subgoals.iter().map(|s| s.keep.len()).max().unwrap_or(0)
    }

    /// Constraint set for the `i`-th subgoal: `cons ∪ c_i`.
    pub fn sub_cons(&self, i: usize) -> Vec<AtomId> {
        let mut c = self.cons.clone();
        c.extend_from_slice(&self.subgoals[i].keep);
        sorted(c)
    }

    pub fn order(&self) -> Vec<AtomId> {
        self.subgoals.iter().map(|s| s.atom).collect()
    }

    pub fn display(&self, p: &Problem) -> String {
        let mut out = p.atom_name(self.goal);
        if !self.cons.is_empty() {
            out.push_str(&set_name(p, &self.cons));
        }
        out.push_str(" ← ");
        for (i, s) in self.subgoals.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&p.atom_name(s.atom));
            if !s.keep.is_empty() {
                out.push_str(&set_name(p, &s.keep));
            }
        }
        out.push_str(" ∥ ");
        out.push_str(&p.action_name(self.action));
        out
    }
}

fn set_name(p: &Problem, atoms: &[AtomId]) -> String {
    let names: Vec<String> = atoms.iter().map(|&a| p.atom_name(a)).collect();
    alloc::format!("{{{}}}", names.join(", "))
}

fn sorted(mut v: Vec<AtomId>) -> Vec<AtomId> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Advances `v` to the next permutation in lexicographic order.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Actions adding `goal` without deleting any atom of `cons`, in id order.
pub fn candidate_actions(problem: &Problem, goal: AtomId, cons: &[AtomId]) -> Vec<ActionId> {
    problem
        .achievers(goal)
        .iter()
        .copied()
        .filter(|&a| !cons.iter().any(|&c| problem.action(a).deletes(c)))
        .collect()
}

fn permutations_of(pre: &[AtomId], cap: usize) -> Result<Vec<Vec<AtomId>>, SearchError> {
    if pre.len() > cap {
        return Err(SearchError::PermutationCapExceeded { arity: pre.len(), cap });
    }
    let mut idx: Vec<usize> = (0..pre.len()).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| pre[i]).collect());
        if !next_permutation(&mut idx) {
            return Ok(out);
        }
    }
}

/// R0 rules for `goal` under `cons`: one rule per precondition ordering of
/// every candidate action, actions in id order, orderings lexicographic.
pub fn enumerate_r0(
    problem: &Problem,
    goal: AtomId,
    cons: &[AtomId],
    perm_cap: usize,
) -> Result<Vec<RegressionRule>, SearchError> {
    let mut out = Vec::new();
    for a in candidate_actions(problem, goal, cons) {
        for order in permutations_of(&problem.action(a).pre, perm_cap)? {
            out.push(RegressionRule::full_prefix(goal, cons, a, &order));
        }
    }
    Ok(out)
}

/// All `c_i` assignments for `k` subgoals with every `|c_i| ≤ budget`,
/// ordered by total size, then lexicographically by subset bitmasks.
fn keep_assignments(k: usize, budget: usize) -> Vec<Vec<u32>> {
    let mut all: Vec<Vec<u32>> = vec![Vec::new()];
    for i in 0..k {
        let mut next = Vec::new();
        for prefix in &all {
            for mask in 0u32..(1 << i) {
                if mask.count_ones() as usize <= budget {
                    let mut m = prefix.clone();
                    m.push(mask);
                    next.push(m);
                }
            }
        }
        all = next;
    }
    all.sort_by_key(|m| (m.iter().map(|x| x.count_ones()).sum::<u32>(), m.clone()));
    all
}

/// Generalized rules of width at most `k` for `goal` under `cons`.
/// Empty when `|cons| > k`.
pub fn generalized_rules(
    problem: &Problem,
    goal: AtomId,
    cons: &[AtomId],
    k: usize,
    perm_cap: usize,
) -> Result<Vec<RegressionRule>, SearchError> {
    let mut out = Vec::new();
    let cons = sorted(cons.to_vec());
    if cons.len() > k {
        return Ok(out);
    }
    let budget = k - cons.len();
    for a in candidate_actions(problem, goal, &cons) {
        let orders = permutations_of(&problem.action(a).pre, perm_cap)?;
        let assigns = keep_assignments(problem.action(a).pre.len(), budget);
        for order in &orders {
            for masks in &assigns {
                let subgoals = order
                    .iter()
                    .zip(masks)
                    .map(|(&p, &m)| Subgoal {
                        atom: p,
                        keep: sorted((0..32).filter(|b| m >> b & 1 == 1).map(|b| order[b as usize]).collect()),
                    })
                    .collect();
                out.push(RegressionRule { goal, cons: cons.clone(), subgoals, action: a });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WidthMode {
    /// Exact search; results are cached only per (state, goal, cons, stack).
    Strict,
    /// Cache one trajectory per (goal, cons) and reuse it from any entry
    /// state where it still replays.
    Memo,
}

pub type RuleFn<'a> = Box<dyn Fn(&Problem, &State, AtomId, &[AtomId]) -> Vec<RegressionRule> + 'a>;

pub enum RuleSource<'a> {
    R0,
    /// Generalized rules of width ≤ k.
    Generalized(usize),
    Custom(RuleFn<'a>),
}

#[derive(Clone, Debug)]
pub struct SgrsConfig {
    pub mode: WidthMode,
    /// Maximum number of recursive calls.
    pub budget: usize,
    pub perm_cap: usize,
    /// Groundings per action schema considered for one goal.
    pub free_var_cap: Option<usize>,
    /// Skip subgoal/constraint combinations no reachable state satisfies.
    pub mutex_prune: bool,
}

impl Default for SgrsConfig {
    fn default() -> Self {
        SgrsConfig {
            mode: WidthMode::Strict,
            budget: DEFAULT_SGRS_BUDGET,
            perm_cap: DEFAULT_PERMUTATION_CAP,
            free_var_cap: None,
            mutex_prune: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SgrsStats {
    pub calls: usize,
    pub rules_tried: usize,
    pub memo_hits: usize,
    /// Goals whose candidate list was cut by `free_var_cap`.
    pub free_var_truncated: usize,
    pub max_depth: usize,
    pub max_cons: usize,
}

/// A rule used in a returned plan and the state it was applied from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Applied {
    pub state: State,
    pub rule: RegressionRule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Found {
    pub plan: Plan,
    pub end: State,
    /// Post-order list of applied rules; only filled when tracing.
    pub trace: Vec<Applied>,
}

type StrictKey = (State, AtomId, Vec<AtomId>, Vec<AtomId>);
pub type AcceptFn<'a> = Box<dyn FnMut(&State, &RegressionRule) -> bool + 'a>;

pub struct Sgrs<'p, 'a> {
    problem: &'p Problem,
    pub config: SgrsConfig,
    source: RuleSource<'a>,
    accept: Option<AcceptFn<'a>>,
    trace: bool,
    mutex: Option<(State, Mutexes)>,
    pub stats: SgrsStats,
    strict: Map<StrictKey, Option<Rc<Found>>>,
    memo: Map<(AtomId, Vec<AtomId>), Rc<Found>>,
    stack: Vec<AtomId>,
}

impl<'p, 'a> Sgrs<'p, 'a> {
    pub fn new(problem: &'p Problem) -> Self {
        Sgrs {
            problem,
            config: SgrsConfig::default(),
            source: RuleSource::R0,
            accept: None,
            trace: false,
            mutex: None,
            stats: SgrsStats::default(),
            strict: Map::new(),
            memo: Map::new(),
            stack: Vec::new(),
        }
    }

    pub fn with_config(mut self, config: SgrsConfig) -> Self {
        self.config = config;
        self
    }

    pub fn with_rules(mut self, source: RuleSource<'a>) -> Self {
        self.source = source;
        self
    }

    /// Only plans whose every applied rule passes `accept` are kept. The
    /// check runs before the rule's subgoals are explored and may only
    /// depend on the state and the rule.
    pub fn with_accept(mut self, accept: AcceptFn<'a>) -> Self {
        self.accept = Some(accept);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    pub fn solve(&mut self, s0: &State, goal: AtomId, cons: &[AtomId]) -> Result<Option<Found>, SearchError> {
        self.stats = SgrsStats::default();
        self.strict.clear();
        self.memo.clear();
        self.stack.clear();
        if !self.config.mutex_prune {
            self.mutex = None;
        } else if self.mutex.as_ref().is_none_or(|(from, _)| from != s0) {
            self.mutex = Some((s0.clone(), Mutexes::compute(self.problem, s0)));
        }
        let cons = sorted(cons.to_vec());
        if !s0.contains_all(&cons) {
            return Ok(None);
        }
        Ok(self.call(s0, goal, &cons)?.map(|f| (*f).clone()))
    }

    fn rules(&mut self, s: &State, goal: AtomId, cons: &[AtomId]) -> Result<Vec<RegressionRule>, SearchError> {
        let p = self.problem;
        let mut rules = match &self.source {
            RuleSource::R0 => enumerate_r0(p, goal, cons, self.config.perm_cap)?,
            RuleSource::Generalized(k) => generalized_rules(p, goal, cons, *k, self.config.perm_cap)?,
            RuleSource::Custom(f) => f(p, s, goal, cons),
        };
        if let Some(cap) = self.config.free_var_cap {
            let mut per_schema: Map<u32, Vec<ActionId>> = Map::new();
            let mut cut = false;
            rules.retain(|r| {
                let v = per_schema.entry(p.action(r.action).schema).or_default();
                if v.contains(&r.action) {
                    return true;
                }
                if v.len() < cap {
                    v.push(r.action);
                    true
                } else {
                    cut = true;
                    false
                }
            });
            self.stats.free_var_truncated += usize::from(cut);
        }
        Ok(rules)
    }

    fn feasible(&self, r: &RegressionRule) -> bool {
        let Some((_, m)) = &self.mutex else { return true };
        let n = self.problem.n_atoms();
        let mut fin = self.problem.set_of(&self.problem.action(r.action).pre);
        for &c in &r.cons {
            fin.insert(c);
        }
        if !m.consistent(&fin) {
            return false;
        }
        (0..r.subgoals.len()).all(|i| {
            let mut s = crate::model::AtomSet::from_atoms(n, r.sub_cons(i));
            s.insert(r.subgoals[i].atom);
            m.consistent(&s)
        })
    }

    fn replays(&self, s: &State, plan: &[ActionId], goal: AtomId) -> Option<State> {
        let mut cur = s.clone();
        for &a in plan {
            let act = self.problem.action(a);
            if !cur.contains_all(&act.pre) {
                return None;
            }
            cur = apply_unchecked(&cur, act);
        }
        cur.contains(goal).then_some(cur)
    }

    fn call(&mut self, s: &State, goal: AtomId, cons: &[AtomId]) -> Result<Option<Rc<Found>>, SearchError> {
        if s.contains(goal) {
            return Ok(Some(Rc::new(Found { plan: Vec::new(), end: s.clone(), trace: Vec::new() })));
        }
        self.stats.calls += 1;
        if self.stats.calls > self.config.budget {
            return Err(SearchError::DepthBudgetExceeded { budget: self.config.budget });
        }
        self.stats.max_depth = self.stats.max_depth.max(self.stack.len() + 1);
        self.stats.max_cons = self.stats.max_cons.max(cons.len());
        let strict_key = match self.config.mode {
            WidthMode::Strict => {
                let mut st = self.stack.clone();
                st.sort_unstable();
                let key = (s.clone(), goal, cons.to_vec(), st);
                if let Some(hit) = self.strict.get(&key) {
                    self.stats.memo_hits += 1;
                    return Ok(hit.clone());
                }
                Some(key)
            }
            WidthMode::Memo => {
                if let Some(hit) = self.memo.get(&(goal, cons.to_vec())).cloned() {
                    if let Some(end) = self.replays(s, &hit.plan, goal) {
                        self.stats.memo_hits += 1;
                        return Ok(Some(Rc::new(Found { plan: hit.plan.clone(), end, trace: Vec::new() })));
                    }
                }
                None
            }
        };
        self.stack.push(goal);
        let result = self.expand(s, goal, cons);
        self.stack.pop();
        let best = result?.map(Rc::new);
        match strict_key {
            Some(key) => {
                self.strict.insert(key, best.clone());
            }
            None => {
                if let Some(b) = &best {
                    self.memo.insert((goal, cons.to_vec()), b.clone());
                }
            }
        }
        Ok(best)
    }

    fn expand(&mut self, s: &State, goal: AtomId, cons: &[AtomId]) -> Result<Option<Found>, SearchError> {
        let rules = self.rules(s, goal, cons)?;
        let mut best: Option<Found> = None;
        'rules: for r in rules {
            self.stats.rules_tried += 1;
            if r.subgoals.iter().any(|sg| self.stack.contains(&sg.atom)) || !self.feasible(&r) {
                continue;
            }
            if let Some(acc) = self.accept.as_mut() {
                if !acc(s, &r) {
                    continue;
                }
            }
            let mut cur = s.clone();
            let mut plan = Vec::new();
            let mut trace = Vec::new();
            for i in 0..r.subgoals.len() {
                let sc = r.sub_cons(i);
                if !cur.contains_all(&sc) {
                    continue 'rules;
                }
                let Some(sub) = self.call(&cur, r.subgoals[i].atom, &sc)? else { continue 'rules };
                plan.extend_from_slice(&sub.plan);
                if self.trace {
                    trace.extend(sub.trace.iter().cloned());
                }
                cur = sub.end.clone();
                if let Some(b) = &best {
                    if plan.len() + 1 > b.plan.len() {
                        continue 'rules;
                    }
                }
            }
            let act = self.problem.action(r.action);
            if !cur.contains_all(&act.pre) {
                continue;
            }
            let end = apply_unchecked(&cur, act);
            plan.push(r.action);
            if let Some(b) = &best {
                if (plan.len(), &plan) >= (b.plan.len(), &b.plan) {
                    continue;
                }
            }
            if self.trace {
                trace.push(Applied { state: s.clone(), rule: r });
            }
            best = Some(Found { plan, end, trace });
        }
        Ok(best)
    }
}

/// S-GRS over R0 in strict mode.
pub fn sgrs(problem: &Problem, s0: &State, goal: AtomId, cons: &[AtomId]) -> Result<Option<Plan>, SearchError> {
    Ok(Sgrs::new(problem).solve(s0, goal, cons)?.map(|f| f.plan))
}

/// A trajectory with every state it visits, start included.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trajectory {
    pub plan: Plan,
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states.last().unwrap()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompleteStats {
    pub calls: usize,
    pub memo_hits: usize,
    pub max_set: usize,
}

type CompleteKey = (State, AtomId, Vec<AtomId>, Vec<AtomId>);

/// Multi-trajectory S-GRS over R0. Every call keeps all loop-free
/// concatenations and returns those of minimal length.
pub struct SgrsComplete<'p> {
    problem: &'p Problem,
    pub cap: usize,
    pub budget: usize,
    pub perm_cap: usize,
    pub stats: CompleteStats,
    mutex: Option<(State, Mutexes)>,
    memo: Map<CompleteKey, Rc<Vec<Trajectory>>>,
    stack: Vec<AtomId>,
}

impl<'p> SgrsComplete<'p> {
    pub fn new(problem: &'p Problem, cap: usize) -> Self {
        SgrsComplete {
            problem,
            cap,
            budget: DEFAULT_SGRS_BUDGET,
            perm_cap: DEFAULT_PERMUTATION_CAP,
            stats: CompleteStats::default(),
            mutex: None,
            memo: Map::new(),
            stack: Vec::new(),
        }
    }

    /// Minimal-length plans, sorted.
    pub fn solve(&mut self, s0: &State, goal: AtomId, cons: &[AtomId]) -> Result<Vec<Plan>, SearchError> {
        self.stats = CompleteStats::default();
        self.memo.clear();
        self.stack.clear();
        if self.mutex.as_ref().is_none_or(|(from, _)| from != s0) {
            self.mutex = Some((s0.clone(), Mutexes::compute(self.problem, s0)));
        }
        let cons = sorted(cons.to_vec());
        if !s0.contains_all(&cons) {
            return Ok(Vec::new());
        }
        let res = self.call(s0, goal, &cons)?;
        let mut plans: Vec<Plan> = res.iter().map(|t| t.plan.clone()).collect();
        plans.sort();
        plans.dedup();
        Ok(plans)
    }

    fn call(&mut self, s: &State, goal: AtomId, cons: &[AtomId]) -> Result<Rc<Vec<Trajectory>>, SearchError> {
        if s.contains(goal) {
            return Ok(Rc::new(vec![Trajectory { plan: Vec::new(), states: vec![s.clone()] }]));
        }
        self.stats.calls += 1;
        if self.stats.calls > self.budget {
            return Err(SearchError::DepthBudgetExceeded { budget: self.budget });
        }
        let mut st = self.stack.clone();
        st.sort_unstable();
        let key = (s.clone(), goal, cons.to_vec(), st);
        if let Some(hit) = self.memo.get(&key) {
            self.stats.memo_hits += 1;
            return Ok(hit.clone());
        }
        self.stack.push(goal);
        let out = self.expand(s, goal, cons);
        self.stack.pop();
        let out = Rc::new(out?);
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn expand(&mut self, s: &State, goal: AtomId, cons: &[AtomId]) -> Result<Vec<Trajectory>, SearchError> {
        let p = self.problem;
        let n = p.n_atoms();
        let mut all: Vec<Trajectory> = Vec::new();
        for r in enumerate_r0(p, goal, cons, self.perm_cap)? {
            if r.subgoals.iter().any(|sg| self.stack.contains(&sg.atom)) {
                continue;
            }
            if let Some((_, m)) = &self.mutex {
                let ok = (0..r.subgoals.len()).all(|i| {
                    let mut x = crate::model::AtomSet::from_atoms(n, r.sub_cons(i));
                    x.insert(r.subgoals[i].atom);
                    m.consistent(&x)
                });
                if !ok {
                    continue;
                }
            }
            let mut possible = vec![Trajectory { plan: Vec::new(), states: vec![s.clone()] }];
            for i in 0..r.subgoals.len() {
                let sc = r.sub_cons(i);
                let mut next: Vec<Trajectory> = Vec::new();
                let mut seen: Set<Plan> = Set::new();
                for prefix in &possible {
                    let subs = self.call(prefix.last(), r.subgoals[i].atom, &sc)?;
                    for nt in subs.iter() {
                        if let Some(t) = concat(prefix, nt) {
                            if seen.insert(t.plan.clone()) {
                                next.push(t);
                            }
                        }
                    }
                    if next.len() > self.cap {
                        return Err(SearchError::StateSpaceCapExceeded { cap: self.cap });
                    }
                }
                self.stats.max_set = self.stats.max_set.max(next.len());
                possible = next;
                if possible.is_empty() {
                    break;
                }
            }
            let act = p.action(r.action);
            for mut t in possible {
                if !t.last().contains_all(&act.pre) {
                    continue;
                }
                let end = apply_unchecked(t.last(), act);
                if t.states.contains(&end) {
                    continue;
                }
                t.plan.push(r.action);
                t.states.push(end);
                all.push(t);
            }
        }
        let Some(min) = all.iter().map(|t| t.plan.len()).min() else { return Ok(all) };
        all.retain(|t| t.plan.len() == min);
        all.sort_by(|a, b| a.plan.cmp(&b.plan));
        all.dedup_by(|a, b| a.plan == b.plan);
        Ok(all)
    }
}

fn concat(prefix: &Trajectory, next: &Trajectory) -> Option<Trajectory> {
    for st in &next.states[1..] {
        if prefix.states.contains(st) {
            return None;
        }
    }
    let mut t = prefix.clone();
    t.plan.extend_from_slice(&next.plan);
    t.states.extend(next.states[1..].iter().cloned());
    Some(t)
}

/// All minimal-length plans found by the multi-trajectory S-GRS.
pub fn sgrs_complete(
    problem: &Problem,
    s0: &State,
    goal: AtomId,
    cons: &[AtomId],
    cap: usize,
) -> Result<Vec<Plan>, SearchError> {
    SgrsComplete::new(problem, cap).solve(s0, goal, cons)
}
