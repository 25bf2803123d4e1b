//! Backward search as a circuit: one monotone register per lifted goal-set
//! pattern. `q_P` at layer d holds the bindings of P that regress to the
//! goal in at most d steps; an action fires at layer d when it regresses a
//! layer d-1 set into one that holds in the input state.
//!
//! Pattern variables always denote pairwise distinct objects, so syntactic
//! atom equality inside a pattern is ground equality.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{
    beta, head, pos, pos_prev, CircuitError, CircuitStats, CompileOptions, DepthExpr, LiftedRule, Lit, RelKind,
    RelationalCircuit, Rels, Stratum,
};
use crate::model::{Domain, LiftedAtom, ObjId, Problem, TypeId, GOAL_PRED};
use crate::mutex::Mutexes;
use crate::Map;

type PAtom = (u32, Vec<u32>);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Pattern {
    pub atoms: Vec<PAtom>,
    pub types: Vec<TypeId>,
}

const EXACT_PERMUTATIONS: usize = 720;

impl Pattern {
    /// Canonical form up to variable renaming: the smallest first-occurrence
    /// renaming over atom orders within each predicate group (a heuristic
    /// order for very large groups, which can only leave duplicates).
    pub fn canonical(mut atoms: Vec<PAtom>, types: &[TypeId]) -> Pattern {
        atoms.sort();
        atoms.dedup();
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < atoms.len() {
            let j = (i..atoms.len()).find(|&j| atoms[j].0 != atoms[i].0).unwrap_or(atoms.len());
            groups.push((i, j));
            i = j;
        }
        let mut count = 1usize;
        for &(a, b) in &groups {
            for f in 1..=(b - a) {
                count = count.saturating_mul(f);
            }
        }
        let rename = |order: &[usize]| -> Pattern {
            let mut map: Map<u32, u32> = Map::new();
            let mut out_types = Vec::new();
            let mut out = Vec::with_capacity(order.len());
            for &k in order {
                let (p, args) = &atoms[k];
                let args = args
                    .iter()
                    .map(|&v| {
                        *map.entry(v).or_insert_with(|| {
                            out_types.push(types[v as usize]);
                            out_types.len() as u32 - 1
                        })
                    })
                    .collect();
                out.push((*p, args));
            }
            Pattern { atoms: out, types: out_types }
        };
        if count > EXACT_PERMUTATIONS {
            let order: Vec<usize> = (0..atoms.len()).collect();
            let first = rename(&order);
            let mut again = first.atoms.clone();
            again.sort();
            let t = first.types.clone();
            return rename_sorted(again, &t);
        }
        let mut best: Option<Pattern> = None;
        let mut order: Vec<usize> = (0..atoms.len()).collect();
        permute_groups(&groups, 0, &mut order, &mut |o| {
            let cand = rename(o);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        });
        best.unwrap_or(Pattern { atoms: Vec::new(), types: Vec::new() })
    }

    pub fn vars(&self) -> usize {
        self.types.len()
    }

    pub fn text(&self, d: &Domain) -> String {
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|(p, args)| {
                let a: Vec<String> = args.iter().map(|v| format!("x{v}")).collect();
                format!("{}({})", d.pred(*p).name, a.join(","))
            })
            .collect();
        format!("{{{}}}", parts.join(" "))
    }
}

fn rename_sorted(atoms: Vec<PAtom>, types: &[TypeId]) -> Pattern {
    let mut map: Map<u32, u32> = Map::new();
    let mut out_types = Vec::new();
    let atoms = atoms
        .into_iter()
        .map(|(p, args)| {
            let args = args
                .into_iter()
                .map(|v| {
                    *map.entry(v).or_insert_with(|| {
                        out_types.push(types[v as usize]);
                        out_types.len() as u32 - 1
                    })
                })
                .collect();
            (p, args)
        })
        .collect();
    Pattern { atoms, types: out_types }
}

fn permute_groups(groups: &[(usize, usize)], g: usize, order: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    let Some(&(a, b)) = groups.get(g) else {
        f(order);
        return;
    };
    permute_range(order, a, b, &mut |o| permute_groups(groups, g + 1, o, f));
}

fn permute_range(order: &mut Vec<usize>, k: usize, hi: usize, f: &mut dyn FnMut(&mut Vec<usize>)) {
    if k + 1 >= hi {
        f(order);
        return;
    }
    for i in k..hi {
        order.swap(k, i);
        permute_range(order, k + 1, hi, f);
        order.swap(k, i);
    }
}

/// Type-aware helpers shared by the compilers.
pub(crate) struct Universe<'p> {
    pub p: &'p Problem,
    /// Objects per type (subtypes included).
    pub objs: Vec<Vec<ObjId>>,
}

impl<'p> Universe<'p> {
    pub fn new(p: &'p Problem) -> Self {
        let d = &p.domain;
        let objs = (0..d.types.len() as u32)
            .map(|t| (0..p.objects.len() as u32).filter(|&o| d.is_subtype(p.objects[o as usize].ty, t)).collect())
            .collect();
        Universe { p, objs }
    }

    /// More specific of two comparable types.
    pub fn meet(&self, a: TypeId, b: TypeId) -> Option<TypeId> {
        let d = &self.p.domain;
        if d.is_subtype(a, b) {
            Some(a)
        } else if d.is_subtype(b, a) {
            Some(b)
        } else {
            None
        }
    }

    /// Enough distinct objects for the variables of each type.
    pub fn fits(&self, types: &[TypeId]) -> bool {
        let d = &self.p.domain;
        let mut seen: Vec<TypeId> = types.to_vec();
        seen.sort_unstable();
        seen.dedup();
        seen.iter().all(|&t| types.iter().filter(|&&u| d.is_subtype(u, t)).count() <= self.objs[t as usize].len())
    }
}

/// Lifted h² test: some distinct-object grounding of every atom and pair
/// is reachable.
struct LiftedMutex<'u> {
    u: &'u Universe<'u>,
    m: Mutexes,
    cache: Map<Pattern, bool>,
}

impl LiftedMutex<'_> {
    fn possible(&mut self, pat: &Pattern) -> bool {
        for i in 0..pat.atoms.len() {
            for j in i..pat.atoms.len() {
                let sub = if i == j {
                    vec![pat.atoms[i].clone()]
                } else {
                    vec![pat.atoms[i].clone(), pat.atoms[j].clone()]
                };
                let key = Pattern::canonical(sub, &pat.types);
                if let Some(&ok) = self.cache.get(&key) {
                    if !ok {
                        return false;
                    }
                    continue;
                }
                let ok = self.ground_any(&key);
                self.cache.insert(key, ok);
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn ground_any(&self, key: &Pattern) -> bool {
        let mut b: Vec<ObjId> = Vec::new();
        self.search(key, &mut b)
    }

    fn search(&self, key: &Pattern, b: &mut Vec<ObjId>) -> bool {
        if b.len() == key.vars() {
            let p = self.u.p;
            let ids: Vec<u32> = key.atoms.iter().map(|(pr, args)| {
                let objs: Vec<ObjId> = args.iter().map(|&v| b[v as usize]).collect();
                p.atom_of(*pr, &objs)
            }).collect();
            return match ids.as_slice() {
                [a] => self.m.atom_reachable(*a),
                [a, c] => self.m.pair_reachable(*a, *c),
                _ => true,
            };
        }
        let t = key.types[b.len()];
        for &o in &self.u.objs[t as usize] {
            if b.contains(&o) {
                continue;
            }
            b.push(o);
            let found = self.search(key, b);
            b.pop();
            if found {
                return true;
            }
        }
        false
    }
}

/// A schema instantiated against a pattern: parameter i maps to pattern
/// variable `sigma[i]` (variables from `p.vars()` on are fresh).
pub(crate) struct Regression {
    pub sigma: Vec<u32>,
    pub types: Vec<TypeId>,
    pub next: Vec<PAtom>,
    pub statics: Vec<PAtom>,
}

fn sub(a: &LiftedAtom, sigma: &[u32]) -> PAtom {
    (a.pred, a.args.iter().map(|&i| sigma[i as usize]).collect())
}

/// Every relevant, non-destructive instantiation of `schema` on `pat`.
pub(crate) fn regressions(u: &Universe, statics: &[bool], pat: &Pattern, schema: usize) -> Vec<Regression> {
    let s = &u.p.domain.actions[schema];
    let m = pat.vars() as u32;
    let mut out = Vec::new();
    let mut sigma = Vec::with_capacity(s.params.len());
    let mut types = pat.types.clone();
    fn rec(u: &Universe, statics: &[bool], pat: &Pattern, schema: usize, m: u32, sigma: &mut Vec<u32>, types: &mut Vec<TypeId>, out: &mut Vec<Regression>) {
        let s = &u.p.domain.actions[schema];
        let i = sigma.len();
        if i == s.params.len() {
            let add: Vec<PAtom> = s.add.iter().map(|a| sub(a, sigma)).collect();
            if !add.iter().any(|a| pat.atoms.contains(a)) {
                return;
            }
            for d in &s.del {
                let d = sub(d, sigma);
                if pat.atoms.contains(&d) && !add.contains(&d) {
                    return;
                }
            }
            let mut next: Vec<PAtom> = pat.atoms.iter().filter(|a| !add.contains(a)).cloned().collect();
            let mut st = Vec::new();
            for p in &s.pre {
                let a = sub(p, sigma);
                if statics[p.pred as usize] {
                    if !st.contains(&a) {
                        st.push(a);
                    }
                } else if !next.contains(&a) {
                    next.push(a);
                }
            }
            out.push(Regression { sigma: sigma.clone(), types: types.clone(), next, statics: st });
            return;
        }
        let tp = s.params[i].ty;
        let fresh_next = types.len() as u32;
        for v in 0..=fresh_next {
            let (saved, pushed) = if v < fresh_next {
                let Some(t) = u.meet(types[v as usize], tp) else { continue };
                (Some(types[v as usize]), {
                    types[v as usize] = t;
                    false
                })
            } else {
                types.push(tp);
                (None, true)
            };
            if u.fits(types) {
                sigma.push(v);
                rec(u, statics, pat, schema, m, sigma, types, out);
                sigma.pop();
            }
            if pushed {
                types.pop();
            } else if let Some(t) = saved {
                types[v as usize] = t;
            }
        }
        let _ = m;
    }
    rec(u, statics, pat, schema, m, &mut sigma, &mut types, &mut out);
    out
}

/// Distinctness of the fresh variables from each other and from the
/// pattern's variables.
pub(crate) fn fresh_distinct(m: u32, total: u32) -> Vec<Lit> {
    let mut out = Vec::new();
    for f in m..total {
        for v in 0..f {
            out.push(Lit::Distinct(vec![(v, f)]));
        }
    }
    out
}

/// Single-atom root patterns: every predicate with every equality pattern
/// of its arguments.
pub(crate) fn atom_roots(u: &Universe, pred: u32) -> Vec<(Vec<u32>, Pattern)> {
    let d = &u.p.domain;
    let sig = d.pred(pred);
    let mut out = Vec::new();
    let mut rg: Vec<u32> = Vec::new();
    fn go(u: &Universe, sig: &crate::model::PredicateSig, pred: u32, rg: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, Pattern)>) {
        if rg.len() == sig.arg_types.len() {
            let n = rg.iter().copied().max().map_or(0, |x| x + 1);
            let mut types: Vec<Option<TypeId>> = vec![None; n as usize];
            for (pos, &v) in rg.iter().enumerate() {
                let t = sig.arg_types[pos];
                types[v as usize] = match types[v as usize] {
                    None => Some(t),
                    Some(o) => match u.meet(o, t) {
                        Some(m) => Some(m),
                        None => return,
                    },
                };
            }
            let types: Vec<TypeId> = types.into_iter().map(|t| t.unwrap()).collect();
            if u.fits(&types) {
                out.push((rg.clone(), Pattern { atoms: vec![(pred, rg.clone())], types }));
            }
            return;
        }
        let n = rg.iter().copied().max().map_or(0, |x| x + 1);
        for v in 0..=n {
            rg.push(v);
            go(u, sig, pred, rg, out);
            rg.pop();
        }
    }
    go(u, sig, pred, &mut rg, &mut out);
    out
}

pub fn compile_bwd(problem: &Problem, depth: DepthExpr, k_bwd: usize, opts: &CompileOptions) -> Result<RelationalCircuit, CircuitError> {
    let d = &problem.domain;
    let b = beta(d);
    if k_bwd == 0 {
        return Err(CircuitError::Unsupported("k_bwd must be at least 1".into()));
    }
    let breadth = b * k_bwd;
    if breadth > opts.breadth_cap {
        return Err(CircuitError::BreadthCapExceeded { breadth, cap: opts.breadth_cap });
    }
    let u = Universe::new(problem);
    let statics = d.static_preds();
    let mut lm = opts.mutex_prune.then(|| LiftedMutex { u: &u, m: Mutexes::compute(problem, &problem.init), cache: Map::new() });
    let mut rels = Rels::default();
    let mut ids: Map<Pattern, u32> = Map::new();
    let mut queue: VecDeque<Pattern> = VecDeque::new();
    let mut init = Stratum::default();
    let reg_of = |rels: &mut Rels, ids: &mut Map<Pattern, u32>, queue: &mut VecDeque<Pattern>, pat: &Pattern| -> u32 {
        if let Some(&r) = ids.get(pat) {
            return r;
        }
        let r = rels.get(RelKind::Register, &format!("q{}", pat.text(d)), pat.vars(), None, true);
        ids.insert(pat.clone(), r);
        queue.push_back(pat.clone());
        r
    };

    // Goal patterns: single atoms, or the problem's own conjunction (single
    // atoms would otherwise fire for each conjunct on its own).
    let conjunctive = problem.goal_conj.len() > 1;
    for (pi, sig) in d.predicates.iter().enumerate() {
        let pi = pi as u32;
        if conjunctive || statics[pi as usize] || sig.name == GOAL_PRED {
            continue;
        }
        let g = rels.input(RelKind::Goal, &sig.name, sig.arity());
        for (args, pat) in atom_roots(&u, pi) {
            if let Some(m) = lm.as_mut() {
                if !m.possible(&pat) {
                    continue;
                }
            }
            let r = reg_of(&mut rels, &mut ids, &mut queue, &pat);
            let mut body = vec![pos(g, args.clone())];
            body.extend(fresh_distinct(0, pat.vars() as u32));
            init.rules.push(LiftedRule::new(head(r, (0..pat.vars() as u32).collect()), body));
        }
    }
    if conjunctive {
        let mut objs: Vec<ObjId> = Vec::new();
        let mut atoms = Vec::new();
        let mut st = Vec::new();
        for &g in &problem.goal_conj {
            let (p, args) = problem.atoms.decode(g);
            let vars: Vec<u32> = args
                .iter()
                .map(|o| match objs.iter().position(|x| x == o) {
                    Some(i) => i as u32,
                    None => {
                        objs.push(*o);
                        objs.len() as u32 - 1
                    }
                })
                .collect();
            if statics[p as usize] {
                st.push((p, vars));
            } else {
                atoms.push((p, vars));
            }
        }
        let types: Vec<TypeId> = objs.iter().map(|&o| problem.objects[o as usize].ty).collect();
        let mut body = Vec::new();
        for (p, vars) in &atoms {
            let sig = d.pred(*p);
            body.push(pos(rels.input(RelKind::Goal, &sig.name, sig.arity()), vars.clone()));
        }
        for (p, vars) in &st {
            let sig = d.pred(*p);
            body.push(pos(rels.input(RelKind::Goal, &sig.name, sig.arity()), vars.clone()));
            body.push(pos(rels.state(d, *p), vars.clone()));
        }
        body.extend(fresh_distinct(0, objs.len() as u32));
        // Rename to the canonical numbering of the pattern.
        let pat = Pattern::canonical(atoms.clone(), &types);
        if !atoms.is_empty() {
            let map = var_map(&atoms, &types, &pat);
            let r = reg_of(&mut rels, &mut ids, &mut queue, &pat);
            let head_args: Vec<u32> = (0..pat.vars()).map(|cv| map.iter().position(|&x| x == cv as u32).unwrap() as u32).collect();
            init.rules.push(LiftedRule::new(head(r, head_args), body));
        }
    }

    let mut regress = Stratum::default();
    let mut emit = Stratum::default();
    while let Some(pat) = queue.pop_front() {
        let src = ids[&pat];
        let m = pat.vars() as u32;
        for schema in 0..d.actions.len() {
            for rg in regressions(&u, &statics, &pat, schema) {
                let total = rg.types.len() as u32;
                let act = rels.action(d, schema);
                let ex = rels.input(RelKind::Exists, &d.actions[schema].name, d.actions[schema].params.len());
                let mut base = vec![pos_prev(src, (0..m).collect()), pos(ex, rg.sigma.clone())];
                for (p, args) in &rg.statics {
                    base.push(pos(rels.state(d, *p), args.clone()));
                }
                base.extend(fresh_distinct(m, total));
                let mut fire = base.clone();
                for (p, args) in &rg.next {
                    fire.push(pos(rels.state(d, *p), args.clone()));
                }
                emit.rules.push(LiftedRule::new(head(act, rg.sigma.clone()), fire));

                if rg.next.len() > k_bwd || rg.next.is_empty() {
                    continue;
                }
                // restrict types to the variables that survive
                let next = Pattern::canonical(rg.next.clone(), &rg.types);
                if !u.fits(&next.types) {
                    continue;
                }
                if let Some(lmx) = lm.as_mut() {
                    if !ids.contains_key(&next) && !lmx.possible(&next) {
                        continue;
                    }
                }
                let map = var_map(&rg.next, &rg.types, &next);
                let dst = reg_of(&mut rels, &mut ids, &mut queue, &next);
                let head_args: Vec<u32> = (0..next.vars()).map(|cv| map.iter().position(|&x| x == cv as u32).unwrap() as u32).collect();
                let mut r = LiftedRule::new(head(dst, head_args), base);
                r.driver = Some(0);
                regress.rules.push(r);
                if regress.rules.len() + emit.rules.len() > opts.rule_cap {
                    return Err(CircuitError::RuleCapExceeded { cap: opts.rule_cap });
                }
            }
        }
    }

    let tuple_arity = ids.keys().map(|p| p.vars()).max().unwrap_or(0);
    let mut c = RelationalCircuit {
        name: format!("bwd-{}", problem.name),
        domain: d.name.clone(),
        relations: rels.list,
        init: vec![init],
        layer: vec![regress, emit],
        depth,
        stats: CircuitStats {
            method: "bwd".into(),
            depth: depth.eval(problem.objects.len()),
            breadth,
            tuple_arity,
            beta: b,
            width: k_bwd,
            ..Default::default()
        },
    };
    c.measure();
    Ok(c)
}

/// For each source variable, its index in the canonical pattern `pat`
/// (u32::MAX if it does not occur).
fn var_map(atoms: &[PAtom], types: &[TypeId], pat: &Pattern) -> Vec<u32> {
    let n = types.len();
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; pat.vars()];
    fn go(atoms: &[PAtom], types: &[TypeId], pat: &Pattern, i: usize, map: &mut Vec<u32>, used: &mut Vec<bool>) -> bool {
        let Some((p, args)) = atoms.get(i) else { return true };
        for cand in &pat.atoms {
            if cand.0 != *p {
                continue;
            }
            let mut set = Vec::new();
            let ok = args.iter().zip(&cand.1).all(|(&v, &cv)| {
                if map[v as usize] == u32::MAX {
                    if used[cv as usize] || pat.types[cv as usize] != types[v as usize] {
                        return false;
                    }
                    map[v as usize] = cv;
                    used[cv as usize] = true;
                    set.push(v);
                    true
                } else {
                    map[v as usize] == cv
                }
            });
            if ok && go(atoms, types, pat, i + 1, map, used) {
                return true;
            }
            for v in set {
                used[map[v as usize] as usize] = false;
                map[v as usize] = u32::MAX;
            }
        }
        false
    }
    let ok = go(atoms, types, pat, 0, &mut map, &mut used);
    debug_assert!(ok);
    map
}
