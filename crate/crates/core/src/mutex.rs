//! h² reachability: atoms and atom pairs that can hold together in some
//! state reachable from a given start state. Pairs outside the closure are
//! mutex and let backward search discard goal sets that no reachable state
//! satisfies.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{AtomId, AtomSet, Problem, State};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct Mutexes {
    idx: Vec<u32>,
    k: usize,
    pairs: Vec<u64>,
}

impl Mutexes {
    pub fn compute(problem: &Problem, s0: &State) -> Self {
        // relaxed reachability first, to size the pair table
        let mut r1 = s0.clone();
        loop {
            let mut changed = false;
            for a in &problem.actions {
                if r1.contains_all(&a.pre) {
                    for &x in &a.add {
                        changed |= r1.insert(x);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut idx = vec![NONE; problem.n_atoms()];
        let atoms: Vec<AtomId> = r1.iter().collect();
        for (i, &a) in atoms.iter().enumerate() {
            idx[a as usize] = i as u32;
        }
        let k = atoms.len();
        let mut m = Mutexes { idx, k, pairs: vec![0; (k * k).div_ceil(64)] };
        let init: Vec<u32> = s0.iter().map(|a| m.idx[a as usize]).collect();
        for &p in &init {
            for &q in &init {
                m.set(p, q);
            }
        }
        let acts: Vec<(Vec<u32>, Vec<u32>, Vec<bool>)> = problem
            .actions
            .iter()
            .filter(|a| r1.contains_all(&a.pre))
            .map(|a| {
                let mut gone = vec![false; k];
                for &d in &a.del_net {
                    if m.idx[d as usize] != NONE {
                        gone[m.idx[d as usize] as usize] = true;
                    }
                }
                for &x in &a.add {
                    gone[m.idx[x as usize] as usize] = true;
                }
                (
                    a.pre.iter().map(|&p| m.idx[p as usize]).collect(),
                    a.add.iter().map(|&x| m.idx[x as usize]).collect(),
                    gone,
                )
            })
            .collect();
        loop {
            let mut changed = false;
            for (pre, add, gone) in &acts {
                let ok = pre.iter().all(|&p| pre.iter().all(|&q| m.get(p, q)));
                if !ok {
                    continue;
                }
                for &p in add {
                    for &q in add {
                        changed |= m.set(p, q);
                    }
                }
                for q in 0..k as u32 {
                    if gone[q as usize] || !m.get(q, q) {
                        continue;
                    }
                    if pre.iter().all(|&r| m.get(q, r)) {
                        for &p in add {
                            changed |= m.set(p, q);
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        m
    }

    fn bit(&self, p: u32, q: u32) -> usize {
        p as usize * self.k + q as usize
    }

    fn get(&self, p: u32, q: u32) -> bool {
        let b = self.bit(p, q);
        self.pairs[b / 64] >> (b % 64) & 1 == 1
    }

    fn set(&mut self, p: u32, q: u32) -> bool {
        let (b1, b2) = (self.bit(p, q), self.bit(q, p));
        let had = self.pairs[b1 / 64] >> (b1 % 64) & 1 == 1;
        self.pairs[b1 / 64] |= 1 << (b1 % 64);
        self.pairs[b2 / 64] |= 1 << (b2 % 64);
        !had
    }

    pub fn atom_reachable(&self, a: AtomId) -> bool {
        let i = self.idx[a as usize];
        i != NONE && self.get(i, i)
    }

    pub fn pair_reachable(&self, a: AtomId, b: AtomId) -> bool {
        let (i, j) = (self.idx[a as usize], self.idx[b as usize]);
        i != NONE && j != NONE && self.get(i, j)
    }

    /// No unreachable atom and no mutex pair in `set`.
    pub fn consistent(&self, set: &AtomSet) -> bool {
        let ids: Vec<u32> = set.iter().map(|a| self.idx[a as usize]).collect();
        if ids.contains(&NONE) {
            return false;
        }
        for (i, &p) in ids.iter().enumerate() {
            for &q in &ids[i..] {
                if !self.get(p, q) {
                    return false;
                }
            }
        }
        true
    }
}
