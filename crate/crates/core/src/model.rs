//! Ground STRIPS model: domains, atoms, states, grounding and transitions.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::Map;

pub type TypeId = u32;
pub type ObjId = u32;
pub type PredId = u32;
pub type AtomId = u32;
pub type ActionId = u32;

/// Name of the nullary atom added when a conjunctive goal is wrapped.
pub const GOAL_PRED: &str = "__goal__";
/// Name of the synthetic action whose precondition is the goal conjunction.
pub const GOAL_ACTION: &str = "goal-achieve";
/// Schema index used by the synthetic goal action.
pub const GOAL_SCHEMA: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    UnknownType(String),
    UnknownPredicate(String),
    UnknownObject(String),
    UnknownVariable { action: String, var: String },
    DuplicateName(String),
    ArityMismatch { pred: String, expected: usize, found: usize },
    EmptyGoal,
    MultiGoalWithoutWrapper,
    AtomSpaceTooLarge,
    Syntax(String),
    PreconditionUnsatisfied { action: String, missing: Vec<AtomId> },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::UnknownType(t) => write!(f, "unknown type `{t}`"),
            ModelError::UnknownPredicate(p) => write!(f, "undeclared predicate `{p}`"),
            ModelError::UnknownObject(o) => write!(f, "unknown object `{o}`"),
            ModelError::UnknownVariable { action, var } => {
                write!(f, "variable `{var}` is not a parameter of `{action}`")
            }
            ModelError::DuplicateName(n) => write!(f, "duplicate name `{n}`"),
            ModelError::ArityMismatch { pred, expected, found } => {
                write!(f, "`{pred}` takes {expected} argument(s), found {found}")
            }
            ModelError::EmptyGoal => write!(f, "empty goal"),
            ModelError::MultiGoalWithoutWrapper => {
                write!(f, "conjunctive goal given but goal wrapping is disabled")
            }
            ModelError::AtomSpaceTooLarge => write!(f, "atom space exceeds 2^32 atoms"),
            ModelError::Syntax(m) => write!(f, "syntax error: {m}"),
            ModelError::PreconditionUnsatisfied { action, missing } => {
                write!(f, "precondition of `{action}` unsatisfied ({} atom(s) missing)", missing.len())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeDecl {
    pub name: String,
    pub parent: Option<TypeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PredicateSig {
    pub name: String,
    pub arg_types: Vec<TypeId>,
}

impl PredicateSig {
    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }
}

/// Atom over schema parameters; `args` index into the schema's `params`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LiftedAtom {
    pub pred: PredId,
    pub args: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub ty: TypeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Param>,
    pub pre: Vec<LiftedAtom>,
    pub add: Vec<LiftedAtom>,
    pub del: Vec<LiftedAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    pub name: String,
    pub types: Vec<TypeDecl>,
    pub predicates: Vec<PredicateSig>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    /// Empty domain with the root type `object`.
    pub fn new(name: &str) -> Self {
        Domain {
            name: name.to_string(),
            types: vec![TypeDecl { name: "object".to_string(), parent: None }],
            predicates: Vec::new(),
            actions: Vec::new(),
        }
    }

    pub fn type_id(&self, name: &str) -> Option<TypeId> {
        self.types.iter().position(|t| t.name == name).map(|i| i as TypeId)
    }

    pub fn pred_id(&self, name: &str) -> Option<PredId> {
        self.predicates.iter().position(|p| p.name == name).map(|i| i as PredId)
    }

    pub fn action_id(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn pred(&self, p: PredId) -> &PredicateSig {
        &self.predicates[p as usize]
    }

    /// `t` equals `of` or descends from it.
    pub fn is_subtype(&self, mut t: TypeId, of: TypeId) -> bool {
        loop {
            if t == of {
                return true;
            }
            match self.types[t as usize].parent {
                Some(p) => t = p,
                None => return of == 0,
            }
        }
    }

    /// Predicates that no schema adds or deletes.
    pub fn static_preds(&self) -> Vec<bool> {
        let mut st = vec![true; self.predicates.len()];
        for a in &self.actions {
            for e in a.add.iter().chain(a.del.iter()) {
                st[e.pred as usize] = false;
            }
        }
        if let Some(g) = self.pred_id(GOAL_PRED) {
            st[g as usize] = false;
        }
        st
    }

    /// Maximum predicate arity (the synthetic goal predicate is nullary).
    pub fn max_arity(&self) -> usize {
        self.predicates.iter().map(|p| p.arity()).max().unwrap_or(0)
    }

    /// Checks names, arities and variable scoping.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (i, p) in self.predicates.iter().enumerate() {
            if self.predicates[..i].iter().any(|q| q.name == p.name) {
                return Err(ModelError::DuplicateName(p.name.clone()));
            }
        }
        for (i, a) in self.actions.iter().enumerate() {
            if self.actions[..i].iter().any(|b| b.name == a.name) {
                return Err(ModelError::DuplicateName(a.name.clone()));
            }
            for at in a.pre.iter().chain(a.add.iter()).chain(a.del.iter()) {
                let sig = self
                    .predicates
                    .get(at.pred as usize)
                    .ok_or_else(|| ModelError::UnknownPredicate(alloc::format!("#{}", at.pred)))?;
                if sig.arity() != at.args.len() {
                    return Err(ModelError::ArityMismatch {
                        pred: sig.name.clone(),
                        expected: sig.arity(),
                        found: at.args.len(),
                    });
                }
                if let Some(&v) = at.args.iter().find(|&&v| v as usize >= a.params.len()) {
                    return Err(ModelError::UnknownVariable {
                        action: a.name.clone(),
                        var: alloc::format!("#{v}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Dense indexing of all `|U|^arity` ground atoms of every predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomTable {
    n_objs: u32,
    arity: Vec<u32>,
    offset: Vec<u32>,
    total: u32,
}

impl AtomTable {
    pub fn new(domain: &Domain, n_objs: usize) -> Result<Self, ModelError> {
        let mut offset = Vec::with_capacity(domain.predicates.len());
        let mut arity = Vec::with_capacity(domain.predicates.len());
        let mut total: u64 = 0;
        for p in &domain.predicates {
            offset.push(total as u32);
            arity.push(p.arity() as u32);
            let count = (n_objs as u64)
                .checked_pow(p.arity() as u32)
                .ok_or(ModelError::AtomSpaceTooLarge)?;
            total += count;
            if total > u32::MAX as u64 {
                return Err(ModelError::AtomSpaceTooLarge);
            }
        }
        Ok(AtomTable { n_objs: n_objs as u32, arity, offset, total: total as u32 })
    }

    /// Number of ground atoms N.
    pub fn len(&self) -> usize {
        self.total as usize
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn n_objs(&self) -> usize {
        self.n_objs as usize
    }

    pub fn id(&self, pred: PredId, args: &[ObjId]) -> AtomId {
        debug_assert_eq!(args.len(), self.arity[pred as usize] as usize);
        let mut idx = 0u32;
        for &a in args {
            idx = idx * self.n_objs + a;
        }
        self.offset[pred as usize] + idx
    }

    pub fn pred_of(&self, atom: AtomId) -> PredId {
        (self.offset.partition_point(|&o| o <= atom) - 1) as PredId
    }

    pub fn decode(&self, atom: AtomId) -> (PredId, Vec<ObjId>) {
        let p = self.pred_of(atom);
        let ar = self.arity[p as usize] as usize;
        let mut rest = atom - self.offset[p as usize];
        let mut args = vec![0; ar];
        for i in (0..ar).rev() {
            args[i] = rest % self.n_objs;
            rest /= self.n_objs;
        }
        (p, args)
    }

    /// First atom id and atom count of a predicate.
    pub fn pred_range(&self, pred: PredId) -> (AtomId, u32) {
        let start = self.offset[pred as usize];
        let end = self.offset.get(pred as usize + 1).copied().unwrap_or(self.total);
        (start, end - start)
    }
}

/// Set of ground atoms stored as a bitset over the atom table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSet {
    words: Vec<u64>,
}

pub type State = AtomSet;

impl AtomSet {
    pub fn new(n: usize) -> Self {
        AtomSet { words: vec![0; n.div_ceil(64)] }
    }

    pub fn from_atoms(n: usize, atoms: impl IntoIterator<Item = AtomId>) -> Self {
        let mut s = AtomSet::new(n);
        for a in atoms {
            s.insert(a);
        }
        s
    }

    #[inline]
    pub fn contains(&self, a: AtomId) -> bool {
        let (w, b) = (a as usize / 64, a % 64);
        self.words.get(w).is_some_and(|x| x >> b & 1 == 1)
    }

    #[inline]
    pub fn insert(&mut self, a: AtomId) -> bool {
        let (w, b) = (a as usize / 64, a % 64);
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !had
    }

    #[inline]
    pub fn remove(&mut self, a: AtomId) -> bool {
        let (w, b) = (a as usize / 64, a % 64);
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        had
    }

    pub fn contains_all(&self, atoms: &[AtomId]) -> bool {
        atoms.iter().all(|&a| self.contains(a))
    }

    pub fn contains_any(&self, atoms: &[AtomId]) -> bool {
        atoms.iter().any(|&a| self.contains(a))
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &AtomSet) -> bool {
        self.words.iter().zip(other.words.iter()).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &AtomSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &AtomSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(i as u32 * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<AtomId> {
        self.iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundAction {
    pub schema: u32,
    pub args: Vec<ObjId>,
    pub pre: Vec<AtomId>,
    pub add: Vec<AtomId>,
    /// Delete list exactly as the schema states it under the binding.
    pub del: Vec<AtomId>,
    /// Atoms that the action actually removes: `del \ add`.
    pub del_net: Vec<AtomId>,
}

impl GroundAction {
    pub fn adds(&self, a: AtomId) -> bool {
        self.add.binary_search(&a).is_ok()
    }

    pub fn deletes(&self, a: AtomId) -> bool {
        self.del_net.binary_search(&a).is_ok()
    }
}

fn sorted(mut v: Vec<AtomId>) -> Vec<AtomId> {
    v.sort_unstable();
    v.dedup();
    v
}

fn build_ground(schema_idx: u32, schema: &ActionSchema, table: &AtomTable, args: &[ObjId]) -> GroundAction {
    let inst = |atoms: &[LiftedAtom]| -> Vec<AtomId> {
        sorted(
            atoms
                .iter()
                .map(|la| {
                    let ga: Vec<ObjId> = la.args.iter().map(|&v| args[v as usize]).collect();
                    table.id(la.pred, &ga)
                })
                .collect(),
        )
    };
    let pre = inst(&schema.pre);
    let add = inst(&schema.add);
    let del = inst(&schema.del);
    let del_net = del.iter().copied().filter(|d| add.binary_search(d).is_err()).collect();
    GroundAction { schema: schema_idx, args: args.to_vec(), pre, add, del, del_net }
}

/// All bindings of the schema's parameters to type-compatible objects,
/// in lexicographic binding order.
pub fn ground_schema(domain: &Domain, schema_idx: usize, objects: &[Object], table: &AtomTable) -> Vec<GroundAction> {
    let schema = &domain.actions[schema_idx];
    let choices: Vec<Vec<ObjId>> = schema
        .params
        .iter()
        .map(|p| {
            objects
                .iter()
                .enumerate()
                .filter(|(_, o)| domain.is_subtype(o.ty, p.ty))
                .map(|(i, _)| i as ObjId)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    if choices.iter().any(|c| c.is_empty()) {
        return out;
    }
    let mut idx = vec![0usize; choices.len()];
    loop {
        let args: Vec<ObjId> = idx.iter().zip(choices.iter()).map(|(&i, c)| c[i]).collect();
        out.push(build_ground(schema_idx as u32, schema, table, &args));
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `T(s, a) = (s \ del(a)) ∪ add(a)`; undefined if a precondition is missing.
pub fn apply(s: &State, a: &GroundAction) -> Result<State, ModelError> {
    if !s.contains_all(&a.pre) {
        let missing = a.pre.iter().copied().filter(|&p| !s.contains(p)).collect();
        return Err(ModelError::PreconditionUnsatisfied {
            action: alloc::format!("#{}", a.schema),
            missing,
        });
    }
    Ok(apply_unchecked(s, a))
}

#[inline]
pub fn apply_unchecked(s: &State, a: &GroundAction) -> State {
    let mut t = s.clone();
    for &d in &a.del {
        t.remove(d);
    }
    for &x in &a.add {
        t.insert(x);
    }
    t
}

/// Indices of the actions applicable in `s`, in input order.
pub fn applicable_actions(s: &State, actions: &[GroundAction]) -> Vec<usize> {
    actions.iter().enumerate().filter(|(_, a)| s.contains_all(&a.pre)).map(|(i, _)| i).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Object {
    pub name: String,
    pub ty: TypeId,
}

/// Name-level problem description, the common target of parsers and generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: String,
    /// `(object name, type name)`
    pub objects: Vec<(String, String)>,
    pub init: Vec<(String, Vec<String>)>,
    pub goal: Vec<(String, Vec<String>)>,
}

#[derive(Clone, Copy, Debug)]
pub struct ProblemOptions {
    /// Wrap conjunctive goals with a synthetic goal action.
    pub wrap_goal: bool,
    /// Drop ground actions whose static preconditions are false initially.
    pub prune_static: bool,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        ProblemOptions { wrap_goal: true, prune_static: true }
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub domain: Domain,
    /// Objects sorted by name; `ObjId` order is name order.
    pub objects: Vec<Object>,
    pub atoms: AtomTable,
    pub init: State,
    pub goal: AtomId,
    /// Goal conjunction as given (a single atom unless wrapped).
    pub goal_conj: Vec<AtomId>,
    /// Ground actions sorted by (schema name, argument names).
    pub actions: Vec<GroundAction>,
    pub wrapped: bool,
    action_index: Map<(u32, Vec<ObjId>), ActionId>,
    achievers: Vec<Vec<ActionId>>,
}

impl Problem {
    pub fn from_spec(domain: &Domain, spec: &ProblemSpec, opts: ProblemOptions) -> Result<Problem, ModelError> {
        domain.validate()?;
        let mut domain = domain.clone();
        let mut objs: Vec<(String, String)> = spec.objects.clone();
        objs.sort();
        for w in objs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ModelError::DuplicateName(w[0].0.clone()));
            }
        }
        let objects: Vec<Object> = objs
            .iter()
            .map(|(n, t)| {
                let ty = domain.type_id(t).ok_or_else(|| ModelError::UnknownType(t.clone()))?;
                Ok(Object { name: n.clone(), ty })
            })
            .collect::<Result<_, ModelError>>()?;
        if spec.goal.is_empty() {
            return Err(ModelError::EmptyGoal);
        }
        let wrapped = spec.goal.len() > 1;
        if wrapped {
            if !opts.wrap_goal {
                return Err(ModelError::MultiGoalWithoutWrapper);
            }
            domain.predicates.push(PredicateSig { name: GOAL_PRED.to_string(), arg_types: Vec::new() });
        }
        let atoms = AtomTable::new(&domain, objects.len())?;
        let resolve = |(p, args): &(String, Vec<String>)| -> Result<AtomId, ModelError> {
            let pid = domain.pred_id(p).ok_or_else(|| ModelError::UnknownPredicate(p.clone()))?;
            let ar = domain.pred(pid).arity();
            if ar != args.len() {
                return Err(ModelError::ArityMismatch { pred: p.clone(), expected: ar, found: args.len() });
            }
            let ids = args
                .iter()
                .map(|a| {
                    objects
                        .binary_search_by(|o| o.name.as_str().cmp(a))
                        .map(|i| i as ObjId)
                        .map_err(|_| ModelError::UnknownObject(a.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(atoms.id(pid, &ids))
        };
        let init_atoms = spec.init.iter().map(resolve).collect::<Result<Vec<_>, _>>()?;
        let goal_conj = sorted(spec.goal.iter().map(resolve).collect::<Result<Vec<_>, _>>()?);
        let init = AtomSet::from_atoms(atoms.len(), init_atoms);

        let statics = domain.static_preds();
        let mut actions = Vec::new();
        for si in 0..domain.actions.len() {
            for ga in ground_schema(&domain, si, &objects, &atoms) {
                let ok = !opts.prune_static
                    || ga.pre.iter().all(|&p| !statics[atoms.pred_of(p) as usize] || init.contains(p));
                if ok {
                    actions.push(ga);
                }
            }
        }
        let goal = if wrapped {
            let g = atoms.id(domain.pred_id(GOAL_PRED).unwrap(), &[]);
            actions.push(GroundAction {
                schema: GOAL_SCHEMA,
                args: Vec::new(),
                pre: goal_conj.clone(),
                add: vec![g],
                del: Vec::new(),
                del_net: Vec::new(),
            });
            g
        } else {
            goal_conj[0]
        };
        let name_of = |a: &GroundAction| -> &str {
            if a.schema == GOAL_SCHEMA {
                GOAL_ACTION
            } else {
                &domain.actions[a.schema as usize].name
            }
        };
        actions.sort_by(|a, b| name_of(a).cmp(name_of(b)).then_with(|| a.args.cmp(&b.args)));
        let mut p = Problem {
            name: spec.name.clone(),
            domain,
            objects,
            atoms,
            init,
            goal,
            goal_conj,
            actions,
            wrapped,
            action_index: Map::new(),
            achievers: Vec::new(),
        };
        p.reindex();
        Ok(p)
    }

    fn reindex(&mut self) {
        self.action_index =
            self.actions.iter().enumerate().map(|(i, a)| ((a.schema, a.args.clone()), i as ActionId)).collect();
        let mut ach = vec![Vec::new(); self.atoms.len()];
        for (i, a) in self.actions.iter().enumerate() {
            for &x in &a.add {
                ach[x as usize].push(i as ActionId);
            }
        }
        self.achievers = ach;
    }

    /// Same problem with another initial state and goal atom.
    pub fn with_init_goal(&self, init: State, goal: AtomId) -> Problem {
        let mut p = self.clone();
        p.init = init;
        p.goal = goal;
        p.goal_conj = vec![goal];
        p
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Atom count N excluding the synthetic goal atom.
    pub fn n_atoms_reported(&self) -> usize {
        self.atoms.len() - usize::from(self.wrapped)
    }

    pub fn action(&self, a: ActionId) -> &GroundAction {
        &self.actions[a as usize]
    }

    /// Actions with `atom` in their add list, in id order.
    pub fn achievers(&self, atom: AtomId) -> &[ActionId] {
        &self.achievers[atom as usize]
    }

    pub fn obj(&self, name: &str) -> Option<ObjId> {
        self.objects.binary_search_by(|o| o.name.as_str().cmp(name)).ok().map(|i| i as ObjId)
    }

    /// Atom id from predicate and object names.
    pub fn atom(&self, pred: &str, args: &[&str]) -> Option<AtomId> {
        let p = self.domain.pred_id(pred)?;
        if self.domain.pred(p).arity() != args.len() {
            return None;
        }
        let ids: Option<Vec<ObjId>> = args.iter().map(|a| self.obj(a)).collect();
        Some(self.atoms.id(p, &ids?))
    }

    pub fn atom_of(&self, pred: PredId, args: &[ObjId]) -> AtomId {
        self.atoms.id(pred, args)
    }

    pub fn find_action(&self, name: &str, args: &[&str]) -> Option<ActionId> {
        let schema = if name == GOAL_ACTION { GOAL_SCHEMA } else { self.domain.action_id(name)? as u32 };
        let ids: Option<Vec<ObjId>> = args.iter().map(|a| self.obj(a)).collect();
        self.action_index.get(&(schema, ids?)).copied()
    }

    pub fn find_action_ids(&self, schema: u32, args: &[ObjId]) -> Option<ActionId> {
        self.action_index.get(&(schema, args.to_vec())).copied()
    }

    pub fn action_schema_name(&self, a: ActionId) -> &str {
        let s = self.actions[a as usize].schema;
        if s == GOAL_SCHEMA {
            GOAL_ACTION
        } else {
            &self.domain.actions[s as usize].name
        }
    }

    pub fn atom_name(&self, atom: AtomId) -> String {
        let (p, args) = self.atoms.decode(atom);
        let mut s = self.domain.pred(p).name.clone();
        s.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&self.objects[*a as usize].name);
        }
        s.push(')');
        s
    }

    pub fn action_name(&self, a: ActionId) -> String {
        let ga = &self.actions[a as usize];
        let mut s = self.action_schema_name(a).to_string();
        s.push('(');
        for (i, o) in ga.args.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&self.objects[*o as usize].name);
        }
        s.push(')');
        s
    }

    pub fn goal_set(&self) -> AtomSet {
        AtomSet::from_atoms(self.n_atoms(), [self.goal])
    }

    pub fn set_of(&self, atoms: &[AtomId]) -> AtomSet {
        AtomSet::from_atoms(self.n_atoms(), atoms.iter().copied())
    }

    /// Applicable action ids in `s`.
    pub fn applicable(&self, s: &State) -> impl Iterator<Item = ActionId> + '_ {
        let s = s.clone();
        (0..self.actions.len() as u32).filter(move |&i| s.contains_all(&self.actions[i as usize].pre))
    }

    pub fn apply(&self, s: &State, a: ActionId) -> Result<State, ModelError> {
        apply(s, &self.actions[a as usize]).map_err(|e| match e {
            ModelError::PreconditionUnsatisfied { missing, .. } => {
                ModelError::PreconditionUnsatisfied { action: self.action_name(a), missing }
            }
            other => other,
        })
    }

    /// Converts back to a name-level description (object types by name).
    pub fn to_spec(&self) -> ProblemSpec {
        let names = |atoms: &[AtomId]| -> Vec<(String, Vec<String>)> {
            atoms
                .iter()
                .map(|&a| {
                    let (p, args) = self.atoms.decode(a);
                    (
                        self.domain.pred(p).name.clone(),
                        args.iter().map(|&o| self.objects[o as usize].name.clone()).collect(),
                    )
                })
                .collect()
        };
        ProblemSpec {
            name: self.name.clone(),
            domain: self.domain.name.clone(),
            objects: self
                .objects
                .iter()
                .map(|o| (o.name.clone(), self.domain.types[o.ty as usize].name.clone()))
                .collect(),
            init: names(&self.init.to_vec()),
            goal: names(&self.goal_conj),
        }
    }
}
