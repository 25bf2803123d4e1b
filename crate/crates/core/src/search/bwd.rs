use alloc::vec;
use alloc::vec::Vec;

use super::{Plan, SearchError};
use crate::model::{ActionId, AtomSet, Problem, State};
use crate::mutex::Mutexes;
use crate::Map;

pub const DEFAULT_BWD_BUDGET: usize = 10_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BwdStats {
    pub expanded: usize,
    pub generated: usize,
    /// Largest goal set (atom count) generated.
    pub max_goal_atoms: usize,
    /// Largest goal set on some returned-length regression path.
    pub max_path_goal_atoms: usize,
}

/// Breadth-first regression over goal sets with a closed set.
///
/// An action regresses goal set `G` when it adds some atom of `G` and
/// deletes none; the regressed set is `(G \ add) ∪ pre`. Goal sets that
/// contain an h²-mutex pair are dropped: no reachable state contains them.
pub struct Bwd<'p> {
    problem: &'p Problem,
    s0: State,
    mutex: Option<Mutexes>,
    pub budget: usize,
}

impl<'p> Bwd<'p> {
    pub fn new(problem: &'p Problem, s0: &State) -> Self {
        Bwd { problem, s0: s0.clone(), mutex: Some(Mutexes::compute(problem, s0)), budget: DEFAULT_BWD_BUDGET }
    }

    /// Plain regression without mutex pruning.
    pub fn unpruned(problem: &'p Problem, s0: &State) -> Self {
        Bwd { problem, s0: s0.clone(), mutex: None, budget: DEFAULT_BWD_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn solve(&self, goal: &AtomSet) -> Result<Option<Plan>, SearchError> {
        self.solve_stats(goal).map(|(p, _)| p)
    }

    pub fn solve_stats(&self, goal: &AtomSet) -> Result<(Option<Plan>, BwdStats), SearchError> {
        let p = self.problem;
        let mut stats = BwdStats { max_goal_atoms: goal.len(), ..Default::default() };
        if goal.is_subset(&self.s0) {
            stats.max_path_goal_atoms = goal.len();
            return Ok((Some(Vec::new()), stats));
        }
        if let Some(m) = &self.mutex {
            if !m.consistent(goal) {
                return Ok((None, stats));
            }
        }
        let mut nodes: Vec<AtomSet> = vec![goal.clone()];
        let mut index: Map<AtomSet, u32> = Map::new();
        index.insert(goal.clone(), 0);
        // edges[v] = (action, node closer to the goal)
        let mut edges: Vec<Vec<(ActionId, u32)>> = vec![Vec::new()];
        let mut layer: Vec<u32> = vec![0];
        while !layer.is_empty() {
            let first_new = nodes.len() as u32;
            let mut next = Vec::new();
            for &u in &layer {
                stats.expanded += 1;
                if stats.expanded > self.budget {
                    return Err(SearchError::DepthBudgetExceeded { budget: self.budget });
                }
                let g = nodes[u as usize].clone();
                let mut cands: Vec<ActionId> = g.iter().flat_map(|x| p.achievers(x).iter().copied()).collect();
                cands.sort_unstable();
                cands.dedup();
                for a in cands {
                    let act = p.action(a);
                    if act.del_net.iter().any(|&d| g.contains(d)) {
                        continue;
                    }
                    let mut ng = g.clone();
                    for &x in &act.add {
                        ng.remove(x);
                    }
                    for &x in &act.pre {
                        ng.insert(x);
                    }
                    if let Some(m) = &self.mutex {
                        if !m.consistent(&ng) {
                            continue;
                        }
                    }
                    match index.get(&ng) {
                        Some(&v) => {
                            if v >= first_new {
                                edges[v as usize].push((a, u));
                            }
                        }
                        None => {
                            let v = nodes.len() as u32;
                            stats.generated += 1;
                            stats.max_goal_atoms = stats.max_goal_atoms.max(ng.len());
                            index.insert(ng.clone(), v);
                            nodes.push(ng);
                            edges.push(vec![(a, u)]);
                            next.push(v);
                        }
                    }
                }
            }
            let sat: Vec<u32> = next.iter().copied().filter(|&v| nodes[v as usize].is_subset(&self.s0)).collect();
            if !sat.is_empty() {
                let (plan, widest) = extract(&nodes, &edges, sat);
                stats.max_path_goal_atoms = widest;
                return Ok((Some(plan), stats));
            }
            layer = next;
        }
        Ok((None, stats))
    }
}

/// Lexicographically smallest forward plan over the regression DAG.
fn extract(nodes: &[AtomSet], edges: &[Vec<(ActionId, u32)>], sat: Vec<u32>) -> (Plan, usize) {
    let mut frontier = sat;
    let mut plan = Vec::new();
    let mut widest = frontier.iter().map(|&v| nodes[v as usize].len()).max().unwrap_or(0);
    while frontier.iter().all(|&v| v != 0) {
        let best = frontier.iter().flat_map(|&v| edges[v as usize].iter()).map(|&(a, _)| a).min().unwrap();
        let mut next: Vec<u32> = frontier
            .iter()
            .flat_map(|&v| edges[v as usize].iter())
            .filter(|&&(a, _)| a == best)
            .map(|&(_, u)| u)
            .collect();
        next.sort_unstable();
        next.dedup();
        widest = widest.max(next.iter().map(|&v| nodes[v as usize].len()).max().unwrap_or(0));
        plan.push(best);
        frontier = next;
    }
    (plan, widest)
}

/// Backward search from `s0` for `goal` with the default budget.
pub fn bwd(problem: &Problem, s0: &State, goal: &AtomSet, budget: usize) -> Result<Option<Plan>, SearchError> {
    Bwd::new(problem, s0).with_budget(budget).solve(goal)
}
