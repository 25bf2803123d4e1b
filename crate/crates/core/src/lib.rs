//! Atomic STRIPS planning with goal regression.
//!
//! The crate covers the ground model, classical searches (backward search,
//! a breadth-first optimal-plan oracle, IW(k)), serialized goal regression,
//! regression-width analysis, regression rule selectors and layered
//! relational policy circuits. It needs `alloc` only.

#![no_std]

extern crate alloc;

pub mod builder;
pub mod circuit;
pub mod domains;
pub mod model;
pub mod mutex;
pub mod regression;
pub mod search;
pub mod selector;
pub mod width;

pub use model::{
    apply, applicable_actions, ground_schema, ActionId, ActionSchema, AtomId, AtomSet, AtomTable,
    Domain, GroundAction, LiftedAtom, ModelError, ObjId, Object, Param, PredId, PredicateSig,
    Problem, ProblemOptions, ProblemSpec, State, TypeDecl, TypeId,
};

pub(crate) type Map<K, V> = hashbrown::HashMap<K, V>;
pub(crate) type Set<K> = hashbrown::HashSet<K>;
