use alloc::vec;
use alloc::vec::Vec;

use super::{Plan, SearchError};
use crate::model::{ActionId, AtomId, Problem, State};
use crate::Map;

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Layered breadth-first search restricted to states satisfying `cons`.
/// Keeps every shortest-path parent edge, so all optimal plans can be read
/// back without re-searching.
#[derive(Clone, Debug)]
pub struct OptSearch {
    pub length: Option<usize>,
    states: Vec<State>,
    parents: Vec<Vec<(ActionId, u32)>>,
    ends: Vec<u32>,
    pub expanded: usize,
}

pub fn opt_search(
    problem: &Problem,
    s0: &State,
    goal: &[AtomId],
    cons: &[AtomId],
    cap: usize,
) -> Result<OptSearch, SearchError> {
    let mut out = OptSearch { length: None, states: vec![s0.clone()], parents: vec![Vec::new()], ends: Vec::new(), expanded: 0 };
    if !s0.contains_all(cons) {
        return Ok(out);
    }
    if s0.contains_all(goal) {
        out.length = Some(0);
        out.ends.push(0);
        return Ok(out);
    }
    let mut index: Map<State, u32> = Map::new();
    index.insert(s0.clone(), 0);
    let mut layer: Vec<u32> = vec![0];
    let mut depth = 0;
    while !layer.is_empty() {
        depth += 1;
        let mut next: Vec<u32> = Vec::new();
        let first_new = out.states.len() as u32;
        for &u in &layer {
            out.expanded += 1;
            let su = out.states[u as usize].clone();
            for a in problem.applicable(&su) {
                let t = crate::model::apply_unchecked(&su, problem.action(a));
                if !t.contains_all(cons) {
                    continue;
                }
                match index.get(&t) {
                    Some(&v) => {
                        if v >= first_new {
                            out.parents[v as usize].push((a, u));
                        }
                    }
                    None => {
                        let v = out.states.len() as u32;
                        if v as usize >= cap {
                            return Err(SearchError::StateSpaceCapExceeded { cap });
                        }
                        index.insert(t.clone(), v);
                        out.states.push(t);
                        out.parents.push(vec![(a, u)]);
                        next.push(v);
                    }
                }
            }
        }
        let ends: Vec<u32> = next.iter().copied().filter(|&v| out.states[v as usize].contains_all(goal)).collect();
        if !ends.is_empty() {
            out.length = Some(depth);
            out.ends = ends;
            return Ok(out);
        }
        layer = next;
    }
    Ok(out)
}

impl OptSearch {
    pub fn solvable(&self) -> bool {
        self.length.is_some()
    }

    /// Final states of the optimal plans.
    pub fn end_states(&self) -> impl Iterator<Item = &State> {
        self.ends.iter().map(|&e| &self.states[e as usize])
    }

    /// Number of states generated.
    pub fn generated(&self) -> usize {
        self.states.len()
    }

    /// Number of optimal plans (saturating).
    pub fn count_plans(&self) -> u128 {
        let mut memo: Map<u32, u128> = Map::new();
        fn count(o: &OptSearch, v: u32, memo: &mut Map<u32, u128>) -> u128 {
            if v == 0 {
                return 1;
            }
            if let Some(&c) = memo.get(&v) {
                return c;
            }
            let c = o.parents[v as usize].iter().fold(0u128, |acc, &(_, u)| acc.saturating_add(count(o, u, memo)));
            memo.insert(v, c);
            c
        }
        if self.length.is_none() {
            return 0;
        }
        self.ends.iter().fold(0u128, |acc, &e| acc.saturating_add(count(self, e, &mut memo)))
    }

    /// Every optimal plan, sorted lexicographically by action id.
    pub fn plans(&self, limit: usize) -> Result<Vec<Plan>, SearchError> {
        if self.length.is_none() {
            return Ok(Vec::new());
        }
        if self.count_plans() > limit as u128 {
            return Err(SearchError::StateSpaceCapExceeded { cap: limit });
        }
        let mut out = Vec::new();
        let mut suffix = Vec::new();
        fn walk(o: &OptSearch, v: u32, suffix: &mut Vec<ActionId>, out: &mut Vec<Plan>) {
            if v == 0 {
                out.push(suffix.iter().rev().copied().collect());
                return;
            }
            for &(a, u) in &o.parents[v as usize] {
                suffix.push(a);
                walk(o, u, suffix, out);
                suffix.pop();
            }
        }
        for &e in &self.ends {
            walk(self, e, &mut suffix, &mut out);
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Lexicographically smallest optimal plan.
    pub fn first_plan(&self) -> Option<Plan> {
        self.length?;
        // greedy forward walk over the shortest-path DAG
        let len = self.length.unwrap();
        // depth of each state along the DAG: recompute by walking parents
        let mut children: Map<u32, Vec<(ActionId, u32)>> = Map::new();
        let mut stack: Vec<u32> = self.ends.clone();
        let mut seen = crate::Set::new();
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            for &(a, u) in &self.parents[v as usize] {
                children.entry(u).or_default().push((a, v));
                stack.push(u);
            }
        }
        let mut frontier = vec![0u32];
        let mut plan = Vec::with_capacity(len);
        for _ in 0..len {
            let best = frontier
                .iter()
                .flat_map(|u| children.get(u).into_iter().flatten())
                .map(|&(a, _)| a)
                .min()?;
            let mut next: Vec<u32> = frontier
                .iter()
                .flat_map(|u| children.get(u).into_iter().flatten())
                .filter(|&&(a, _)| a == best)
                .map(|&(_, v)| v)
                .collect();
            next.sort_unstable();
            next.dedup();
            plan.push(best);
            frontier = next;
        }
        Some(plan)
    }
}
