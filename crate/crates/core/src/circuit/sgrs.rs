//! Width-k serialized regression as a circuit, by simulating IW(k+1) over
//! atom tuples of size k+1.
//!
//! Every tuple pattern t (a sorted predicate multiset, arguments
//! concatenated) has a monotone register `reached_t`. A tuple first made
//! true at layer d gets one representative state, stored as `snap_{t,q}`,
//! together with the first action of the path leading to it. The
//! representative is the successor with the smallest last action, then the
//! smallest parent. An action fires at the first layer where a new
//! representative satisfies every goal atom.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{
    beta, head, neg, neg_prev, pos, pos_prev, Choice, CircuitError, CircuitStats, CompileOptions, DepthExpr, LiftedRule,
    Lit, RelKind, RelationalCircuit, Rels, Stratum, Term,
};
use crate::model::{Domain, Problem, GOAL_PRED};

#[derive(Clone, Copy)]
enum Src {
    Add(usize),
    Keep,
}

fn tuple_patterns(fluent: &[u32], size: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(fluent: &[u32], size: usize, from: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in from..fluent.len() {
            cur.push(fluent[i]);
            go(fluent, size, i, cur, out);
            cur.pop();
        }
    }
    go(fluent, size, 0, &mut cur, &mut out);
    out
}

fn pattern_name(d: &Domain, t: &[u32]) -> String {
    let names: Vec<&str> = t.iter().map(|&p| d.pred(p).name.as_str()).collect();
    names.join("+")
}

pub fn compile_sgrs(problem: &Problem, depth: DepthExpr, k: usize, opts: &CompileOptions) -> Result<RelationalCircuit, CircuitError> {
    let d = &problem.domain;
    let b = beta(d);
    let breadth = (k + 1) * b;
    if breadth > opts.breadth_cap {
        return Err(CircuitError::BreadthCapExceeded { breadth, cap: opts.breadth_cap });
    }
    let statics = d.static_preds();
    let fluent: Vec<u32> = (0..d.predicates.len() as u32)
        .filter(|&p| !statics[p as usize] && d.pred(p).name != GOAL_PRED)
        .collect();
    let tuples = tuple_patterns(&fluent, k + 1);
    let arity = |t: &[u32]| -> usize { t.iter().map(|&p| d.pred(p).arity()).sum() };
    let mut rank: Vec<usize> = (0..d.actions.len()).collect();
    rank.sort_by(|&a, &b| d.actions[a].name.cmp(&d.actions[b].name));
    let mut schema_rank = vec![0u32; d.actions.len()];
    for (r, &s) in rank.iter().enumerate() {
        schema_rank[s] = r as u32;
    }

    let mut rels = Rels::default();
    let root = rels.get(RelKind::Register, "root", 0, None, false);
    let reached: Vec<u32> = tuples
        .iter()
        .map(|t| rels.get(RelKind::Register, &format!("reached[{}]", pattern_name(d, t)), arity(t), None, true))
        .collect();
    let new: Vec<u32> = tuples
        .iter()
        .map(|t| rels.get(RelKind::Register, &format!("new[{}]", pattern_name(d, t)), arity(t), None, false))
        .collect();
    let mut snap = |rels: &mut Rels, ti: usize, q: u32| -> u32 {
        let t = &tuples[ti];
        rels.get(RelKind::Register, &format!("snap[{}][{}]", pattern_name(d, t), d.pred(q).name), arity(t) + d.pred(q).arity(), None, false)
    };
    let first = |rels: &mut Rels, ti: usize, s: usize| -> u32 {
        let t = &tuples[ti];
        rels.get(RelKind::Register, &format!("first[{}][{}]", pattern_name(d, t), d.actions[s].name), arity(t) + d.actions[s].params.len(), None, false)
    };

    // layer 0
    let mut init = Stratum::default();
    init.rules.push(LiftedRule::new(head(root, Vec::new()), Vec::new()));
    for (ti, t) in tuples.iter().enumerate() {
        let mut body = Vec::new();
        let mut v = 0u32;
        for &p in t {
            let a = d.pred(p).arity() as u32;
            body.push(pos(rels.state(d, p), (v..v + a).collect()));
            v += a;
        }
        init.rules.push(LiftedRule::new(head(reached[ti], (0..v).collect()), body));
    }

    let mut cand = Stratum::default();
    let mut derive = Stratum::default();
    let mut bad_st = Stratum::default();
    let mut act_st = Stratum::default();
    let mut rule_count = 0usize;

    // sources: None = root state, Some(ti) = representative of tuple ti
    let sources: Vec<Option<usize>> = core::iter::once(None).chain((0..tuples.len()).map(Some)).collect();
    for (t2i, t2) in tuples.iter().enumerate() {
        for (src_idx, &src) in sources.iter().enumerate() {
            let x1_len = src.map_or(0, |ti| arity(&tuples[ti]));
            for (si, s) in d.actions.iter().enumerate() {
                let r = s.params.len() as u32;
                let ex = rels.input(RelKind::Exists, &s.name, s.params.len());
                let x1: Vec<u32> = (r..r + x1_len as u32).collect();
                let via_arity = arity(t2) + x1_len + s.params.len();
                let via = rels.get(
                    RelKind::Register,
                    &format!(
                        "via[{}][{}][{}]",
                        pattern_name(d, t2),
                        src.map_or(String::from("root"), |ti| pattern_name(d, &tuples[ti])),
                        s.name
                    ),
                    via_arity,
                    None,
                    false,
                );
                // how the source state reads predicate q at args
                let read = |rels: &mut Rels, snap: &mut dyn FnMut(&mut Rels, usize, u32) -> u32, q: u32, x1: &[u32], args: Vec<u32>| -> Lit {
                    match src {
                        None => pos(rels.state(d, q), args),
                        Some(t1) if !statics[q as usize] => {
                            let mut a = x1.to_vec();
                            a.extend(args);
                            pos_prev(snap(rels, t1, q), a)
                        }
                        Some(_) => pos(rels.state(d, q), args),
                    }
                };

                // candidate rules, one per source assignment of t2's atoms
                let options: Vec<Vec<Src>> = t2
                    .iter()
                    .map(|&q| {
                        let mut o: Vec<Src> = s.add.iter().enumerate().filter(|(_, a)| a.pred == q).map(|(i, _)| Src::Add(i)).collect();
                        o.push(Src::Keep);
                        o
                    })
                    .collect();
                let mut choice_idx = vec![0usize; t2.len()];
                let mut any_via = false;
                loop {
                    let assign: Vec<Src> = choice_idx.iter().zip(&options).map(|(&c, o)| o[c]).collect();
                    if assign.iter().any(|a| matches!(a, Src::Add(_))) {
                        let mut next_var = r + x1_len as u32;
                        let mut body = Vec::new();
                        if let Some(t1) = src {
                            body.push(pos_prev(new[t1], x1.clone()));
                        } else {
                            body.push(pos_prev(root, Vec::new()));
                        }
                        body.push(pos(ex, (0..r).collect()));
                        for p in &s.pre {
                            let args: Vec<u32> = p.args.clone();
                            body.push(read(&mut rels, &mut snap, p.pred, &x1, args));
                        }
                        let mut x2: Vec<u32> = Vec::new();
                        let mut feasible = true;
                        for (j, &q) in t2.iter().enumerate() {
                            match assign[j] {
                                Src::Add(ai) => x2.extend(s.add[ai].args.iter().copied()),
                                Src::Keep => {
                                    let a = d.pred(q).arity() as u32;
                                    let y: Vec<u32> = (next_var..next_var + a).collect();
                                    next_var += a;
                                    body.push(read(&mut rels, &mut snap, q, &x1, y.clone()));
                                    for del in s.del.iter().filter(|x| x.pred == q) {
                                        if a == 0 {
                                            feasible = false;
                                        } else {
                                            body.push(Lit::Distinct(y.iter().zip(&del.args).map(|(&u, &v)| (u, v)).collect()));
                                        }
                                    }
                                    x2.extend(y);
                                }
                            }
                        }
                        if feasible {
                            body.push(neg_prev(reached[t2i], x2.clone()));
                            let mut hargs = x2.clone();
                            hargs.extend(x1.iter().copied());
                            hargs.extend(0..r);
                            let mut rule = LiftedRule::new(head(via, hargs), body);
                            let mut order = vec![Term::Const(schema_rank[si])];
                            order.extend((0..r).map(Term::Var));
                            order.push(Term::Const(src_idx as u32));
                            order.extend(x1.iter().map(|&v| Term::Var(v)));
                            rule.choice = Some(Choice { group: t2i as u32, key: x2.clone(), order });
                            cand.rules.push(rule);
                            any_via = true;
                            rule_count += 1;
                        }
                    }
                    // next assignment
                    let mut j = 0;
                    loop {
                        if j == t2.len() {
                            break;
                        }
                        choice_idx[j] += 1;
                        if choice_idx[j] < options[j].len() {
                            break;
                        }
                        choice_idx[j] = 0;
                        j += 1;
                    }
                    if j == t2.len() {
                        break;
                    }
                }
                if rule_count > opts.rule_cap {
                    return Err(CircuitError::RuleCapExceeded { cap: opts.rule_cap });
                }
                if !any_via {
                    continue;
                }

                // consequences of a chosen via fact
                let n2 = arity(t2) as u32;
                let vx2: Vec<u32> = (0..n2).collect();
                let vx1: Vec<u32> = (n2..n2 + x1_len as u32).collect();
                let va: Vec<u32> = (n2 + x1_len as u32..n2 + x1_len as u32 + r).collect();
                let mut via_args = vx2.clone();
                via_args.extend(vx1.iter().copied());
                via_args.extend(va.iter().copied());
                let via_lit = pos(via, via_args.clone());
                derive.rules.push(LiftedRule::new(head(new[t2i], vx2.clone()), vec![via_lit.clone()]));
                derive.rules.push(LiftedRule::new(head(reached[t2i], vx2.clone()), vec![via_lit.clone()]));
                let base = n2 + x1_len as u32 + r;
                for &q in &fluent {
                    let sq = snap(&mut rels, t2i, q);
                    let qa = d.pred(q).arity() as u32;
                    for addq in s.add.iter().filter(|a| a.pred == q) {
                        let mut h = vx2.clone();
                        h.extend(addq.args.iter().map(|&i| va[i as usize]));
                        derive.rules.push(LiftedRule::new(head(sq, h), vec![via_lit.clone()]));
                    }
                    if qa == 0 && s.del.iter().any(|x| x.pred == q) {
                        continue;
                    }
                    let y: Vec<u32> = (base..base + qa).collect();
                    let mut body = vec![via_lit.clone()];
                    body.push(match src {
                        None => pos(rels.state(d, q), y.clone()),
                        Some(t1) => {
                            let mut a = vx1.clone();
                            a.extend(y.iter().copied());
                            pos_prev(snap(&mut rels, t1, q), a)
                        }
                    });
                    for del in s.del.iter().filter(|x| x.pred == q) {
                        body.push(Lit::Distinct(y.iter().zip(&del.args).map(|(&u, &v)| (u, va[v as usize])).collect()));
                    }
                    let mut h = vx2.clone();
                    h.extend(y.iter().copied());
                    derive.rules.push(LiftedRule::new(head(sq, h), body));
                }
                match src {
                    None => {
                        let f = first(&mut rels, t2i, si);
                        let mut h = vx2.clone();
                        h.extend(va.iter().copied());
                        derive.rules.push(LiftedRule::new(head(f, h), vec![via_lit.clone()]));
                    }
                    Some(t1) => {
                        for (bi, bs) in d.actions.iter().enumerate() {
                            let fb = first(&mut rels, t2i, bi);
                            let f1 = first(&mut rels, t1, bi);
                            let vb: Vec<u32> = (base..base + bs.params.len() as u32).collect();
                            let mut a1 = vx1.clone();
                            a1.extend(vb.iter().copied());
                            let mut h = vx2.clone();
                            h.extend(vb.iter().copied());
                            derive.rules.push(LiftedRule::new(head(fb, h), vec![via_lit.clone(), pos_prev(f1, a1)]));
                        }
                    }
                }
            }
        }

        // goal test on new representatives
        let n2 = arity(t2) as u32;
        let vx2: Vec<u32> = (0..n2).collect();
        let bad = rels.get(RelKind::Register, &format!("bad[{}]", pattern_name(d, t2)), n2 as usize, None, false);
        for (qi, sig) in d.predicates.iter().enumerate() {
            let q = qi as u32;
            if sig.name == GOAL_PRED {
                continue;
            }
            let qa = sig.arity() as u32;
            let y: Vec<u32> = (n2..n2 + qa).collect();
            let g = rels.input(RelKind::Goal, &sig.name, sig.arity());
            let miss = if statics[qi] {
                neg(rels.state(d, q), y.clone())
            } else {
                let mut a = vx2.clone();
                a.extend(y.iter().copied());
                neg(snap(&mut rels, t2i, q), a)
            };
            bad_st.rules.push(LiftedRule::new(head(bad, vx2.clone()), vec![pos(new[t2i], vx2.clone()), pos(g, y), miss]));
        }
        for (bi, bs) in d.actions.iter().enumerate() {
            let f = first(&mut rels, t2i, bi);
            let act = rels.action(d, bi);
            let vb: Vec<u32> = (n2..n2 + bs.params.len() as u32).collect();
            let mut fa = vx2.clone();
            fa.extend(vb.iter().copied());
            act_st.rules.push(LiftedRule::new(
                head(act, vb),
                vec![pos(new[t2i], vx2.clone()), neg(bad, vx2.clone()), pos(f, fa)],
            ));
        }
    }

    let mut c = RelationalCircuit {
        name: format!("sgrs-{}", problem.name),
        domain: d.name.clone(),
        relations: rels.list,
        init: vec![init],
        layer: vec![cand, derive, bad_st, act_st],
        depth,
        stats: CircuitStats {
            method: "sgrs".into(),
            depth: depth.eval(problem.objects.len()),
            breadth,
            tuple_arity: tuples.iter().map(|t| arity(t)).max().unwrap_or(0),
            beta: b,
            width: k,
            ..Default::default()
        },
    };
    drop_unused(&mut c);
    c.measure();
    Ok(c)
}

/// Removes rules whose body reads a register no rule writes (always empty).
fn drop_unused(c: &mut RelationalCircuit) {
    loop {
        let mut written = vec![false; c.relations.len()];
        for st in c.init.iter().chain(&c.layer) {
            for r in &st.rules {
                written[r.head.rel as usize] = true;
            }
        }
        let rels = &c.relations;
        let mut removed = false;
        for st in c.init.iter_mut().chain(c.layer.iter_mut()) {
            let before = st.rules.len();
            st.rules.retain(|r| {
                r.body.iter().all(|l| match l {
                    Lit::Pos(a) => rels[a.rel as usize].kind != RelKind::Register || written[a.rel as usize],
                    _ => true,
                })
            });
            removed |= st.rules.len() != before;
        }
        if !removed {
            return;
        }
    }
}
