use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{Plan, SearchError};
use crate::model::{ActionId, AtomId, Problem, State};
use crate::Set;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IwStats {
    pub expanded: usize,
    pub generated: usize,
    pub pruned: usize,
}

/// Seen atom tuples of size ≤ k, keyed by sorted atom ids.
struct Novelty {
    k: usize,
    n: usize,
    single: Vec<u64>,
    pair: Vec<u64>,
    wide: Set<Vec<AtomId>>,
}

impl Novelty {
    fn new(k: usize, n: usize) -> Self {
        Novelty {
            k,
            n,
            single: vec![0; n.div_ceil(64)],
            pair: if k >= 2 { vec![0; (n * n).div_ceil(64)] } else { Vec::new() },
            wide: Set::new(),
        }
    }

    fn mark(bits: &mut [u64], i: usize) -> bool {
        let fresh = bits[i / 64] >> (i % 64) & 1 == 0;
        bits[i / 64] |= 1 << (i % 64);
        fresh
    }

    /// Records every tuple of `s`; true if any was unseen.
    fn visit(&mut self, s: &State) -> bool {
        let atoms: Vec<AtomId> = s.iter().collect();
        let mut novel = false;
        for &a in &atoms {
            novel |= Self::mark(&mut self.single, a as usize);
        }
        if self.k >= 2 {
            for i in 0..atoms.len() {
                for j in i + 1..atoms.len() {
                    novel |= Self::mark(&mut self.pair, atoms[i] as usize * self.n + atoms[j] as usize);
                }
            }
        }
        if self.k >= 3 {
            let mut tuple = Vec::new();
            let mut combos = |size: usize, novel: &mut bool| {
                let mut idx: Vec<usize> = (0..size).collect();
                if atoms.len() < size {
                    return;
                }
                loop {
                    tuple.clear();
                    tuple.extend(idx.iter().map(|&i| atoms[i]));
                    if !self.wide.contains(&tuple) {
                        self.wide.insert(tuple.clone());
                        *novel = true;
                    }
                    let mut p = size;
                    loop {
                        if p == 0 {
                            return;
                        }
                        p -= 1;
                        if idx[p] < atoms.len() - size + p {
                            idx[p] += 1;
                            for q in p + 1..size {
                                idx[q] = idx[q - 1] + 1;
                            }
                            break;
                        }
                    }
                }
            };
            for size in 3..=self.k {
                combos(size, &mut novel);
            }
        }
        novel
    }
}

/// Breadth-first search that prunes generated states containing no unseen
/// atom tuple of size ≤ k. Goal states are returned when generated.
pub fn iw(problem: &Problem, k: usize) -> Result<(Plan, IwStats), SearchError> {
    assert!(k >= 1, "IW needs k >= 1");
    let mut stats = IwStats::default();
    let goal = problem.goal;
    if problem.init.contains(goal) {
        return Ok((Vec::new(), stats));
    }
    let mut table = Novelty::new(k, problem.n_atoms());
    table.visit(&problem.init);
    let mut states: Vec<(State, Option<(ActionId, u32)>)> = vec![(problem.init.clone(), None)];
    let mut queue = VecDeque::from([0u32]);
    while let Some(u) = queue.pop_front() {
        stats.expanded += 1;
        let s = states[u as usize].0.clone();
        for a in problem.applicable(&s) {
            let t = crate::model::apply_unchecked(&s, problem.action(a));
            stats.generated += 1;
            if t.contains(goal) {
                let mut plan = vec![a];
                let mut v = u;
                while let Some((b, w)) = states[v as usize].1 {
                    plan.push(b);
                    v = w;
                }
                plan.reverse();
                return Ok((plan, stats));
            }
            if table.visit(&t) {
                states.push((t, Some((a, u))));
                queue.push_back(states.len() as u32 - 1);
            } else {
                stats.pruned += 1;
            }
        }
    }
    Err(SearchError::Exhausted)
}
