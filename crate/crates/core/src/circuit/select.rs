//! Selector-driven regression as a circuit. Each layer holds a single
//! (goal, constraints) pair in the registers `G_p` / `C_p`; the layer
//! selects the first matching rule for it and either descends into the
//! first unsatisfied precondition or emits the rule's action.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{
    beta, head, neg, pos, pos_prev, Choice, CircuitError, CircuitStats, CompileOptions, DepthExpr, LiftedRule, Lit, RelKind,
    RelationalCircuit, Rels, Stratum, Term,
};
use crate::model::{Domain, GOAL_PRED};
use crate::selector::{LitKind, Selector};

pub fn compile_selector(sel: &Selector, domain: &Domain, depth: DepthExpr, opts: &CompileOptions) -> Result<RelationalCircuit, CircuitError> {
    if let DepthExpr::Const(c) = depth {
        if c > opts.depth_budget {
            return Err(CircuitError::DepthBudgetExceeded { depth: c, budget: opts.depth_budget });
        }
    }
    let d = domain;
    let b = beta(d);
    let br = sel.rules.iter().map(|r| r.params.len()).max().unwrap_or(0);
    let breadth = br.max(b);
    if breadth > opts.breadth_cap {
        return Err(CircuitError::BreadthCapExceeded { breadth, cap: opts.breadth_cap });
    }
    let mut rels = Rels::default();
    let preds: Vec<u32> = (0..d.predicates.len() as u32).filter(|&p| d.pred(p).name != GOAL_PRED).collect();
    let goal_reg: Vec<u32> = preds
        .iter()
        .map(|&p| rels.get(RelKind::Register, &format!("G[{}]", d.pred(p).name), d.pred(p).arity(), None, false))
        .collect();
    let cons_reg: Vec<u32> = preds
        .iter()
        .map(|&p| rels.get(RelKind::Register, &format!("C[{}]", d.pred(p).name), d.pred(p).arity(), None, false))
        .collect();
    let g_of = |p: u32| goal_reg[preds.iter().position(|&q| q == p).unwrap()];
    let c_of = |p: u32| cons_reg[preds.iter().position(|&q| q == p).unwrap()];

    let mut init = Stratum::default();
    for &p in &preds {
        let sig = d.pred(p);
        let g = rels.input(RelKind::Goal, &sig.name, sig.arity());
        let vars: Vec<u32> = (0..sig.arity() as u32).collect();
        init.rules.push(LiftedRule::new(head(g_of(p), vars.clone()), vec![pos(g, vars)]));
    }

    let mut s_match = Stratum::default();
    let mut s_flag = Stratum::default();
    let mut s_sel = Stratum::default();
    let mut s_desc = Stratum::default();
    let mut s_act = Stratum::default();
    let descend = rels.get(RelKind::Register, "descend", 0, None, false);
    // Constraints carry over to the subgoal chosen by the descent.
    for &p in &preds {
        let y: Vec<u32> = (0..d.pred(p).arity() as u32).collect();
        s_act.rules.push(LiftedRule::new(head(c_of(p), y.clone()), vec![pos(descend, Vec::new()), pos_prev(c_of(p), y)]));
    }
    let mut matched = Vec::new();
    let mut width = 0usize;
    for (ri, rule) in sel.rules.iter().enumerate() {
        let n = rule.params.len() as u32;
        let all: Vec<u32> = (0..n).collect();
        let schema = &d.actions[rule.action];
        let m = rels.get(RelKind::Register, &format!("M[{}:{}]", ri, rule.name), n as usize, None, false);
        let flag = rels.get(RelKind::Register, &format!("matched[{}:{}]", ri, rule.name), 0, None, false);
        let selr = rels.get(RelKind::Register, &format!("sel[{}:{}]", ri, rule.name), n as usize, None, false);
        let bad = rels.get(RelKind::Register, &format!("bad[{}:{}]", ri, rule.name), n as usize, None, false);

        let mut body = vec![pos_prev(g_of(rule.goal.pred), rule.goal.args.clone())];
        for (v, p) in rule.params.iter().enumerate() {
            body.push(pos(rels.ty(d, p.ty), vec![v as u32]));
        }
        for l in &rule.when {
            let sig = d.pred(l.atom.pred);
            let rel = match l.kind {
                LitKind::State => rels.input(RelKind::State, &sig.name, sig.arity()),
                LitKind::Init => rels.input(RelKind::Init, &sig.name, sig.arity()),
                LitKind::Cons => c_of(l.atom.pred),
            };
            let prev = l.kind == LitKind::Cons;
            let a = super::CAtom { rel, args: l.atom.args.clone(), prev };
            body.push(if l.negated { Lit::Neg(a) } else { Lit::Pos(a) });
        }
        let ex = rels.input(RelKind::Exists, &schema.name, schema.params.len());
        body.push(pos(ex, rule.action_args.clone()));
        let mut r = LiftedRule::new(head(m, all.clone()), body);
        r.choice = Some(Choice { group: ri as u32, key: Vec::new(), order: all.iter().map(|&v| Term::Var(v)).collect() });
        s_match.rules.push(r);
        s_flag.rules.push(LiftedRule::new(head(flag, Vec::new()), vec![pos(m, all.clone())]));
        let mut body = vec![pos(m, all.clone())];
        for &f in &matched {
            body.push(neg(f, Vec::new()));
        }
        s_sel.rules.push(LiftedRule::new(head(selr, all.clone()), body));
        matched.push(flag);

        let st = |rels: &mut Rels, a: &crate::model::LiftedAtom| pos(rels.state(d, a.pred), a.args.clone());
        for (i, item) in rule.pre.iter().enumerate() {
            let mut body = vec![pos(selr, all.clone())];
            for earlier in &rule.pre[..i] {
                body.push(st(&mut rels, &earlier.atom));
            }
            let sig = d.pred(item.atom.pred);
            body.push(neg(rels.input(RelKind::State, &sig.name, sig.arity()), item.atom.args.clone()));
            s_desc.rules.push(LiftedRule::new(head(g_of(item.atom.pred), item.atom.args.clone()), body.clone()));
            s_desc.rules.push(LiftedRule::new(head(descend, Vec::new()), body.clone()));
            let kept: Vec<usize> = match &item.keep {
                None => (0..i).collect(),
                Some(k) => k.clone(),
            };
            width = width.max(kept.len());
            for j in kept {
                let a = &rule.pre[j].atom;
                s_desc.rules.push(LiftedRule::new(head(c_of(a.pred), a.args.clone()), body.clone()));
            }
        }
        // a net-deletes a constraint atom
        for del in &schema.del {
            let dargs: Vec<u32> = del.args.iter().map(|&i| rule.action_args[i as usize]).collect();
            let mut body = vec![pos(selr, all.clone()), pos_prev(c_of(del.pred), dargs.clone())];
            let mut never = false;
            for add in schema.add.iter().filter(|a| a.pred == del.pred) {
                let aargs: Vec<u32> = add.args.iter().map(|&i| rule.action_args[i as usize]).collect();
                if aargs == dargs {
                    never = true;
                }
                body.push(Lit::Distinct(dargs.iter().copied().zip(aargs).collect()));
            }
            if !never {
                s_desc.rules.push(LiftedRule::new(head(bad, all.clone()), body));
            }
        }
        let act = rels.action(d, rule.action);
        let mut body = vec![pos(selr, all.clone())];
        for item in &rule.pre {
            body.push(st(&mut rels, &item.atom));
        }
        for p in &schema.pre {
            let args: Vec<u32> = p.args.iter().map(|&i| rule.action_args[i as usize]).collect();
            body.push(pos(rels.state(d, p.pred), args));
        }
        body.push(neg(bad, all.clone()));
        s_act.rules.push(LiftedRule::new(head(act, rule.action_args.clone()), body));
    }
    // Rules with an empty `Distinct` never fire; drop them.
    s_desc.rules.retain(|r| r.body.iter().all(|l| !matches!(l, Lit::Distinct(ps) if ps.is_empty())));

    let mut c = RelationalCircuit {
        name: format!("selector-{}", sel.name),
        domain: d.name.clone(),
        relations: rels.list,
        init: vec![init],
        layer: vec![s_match, s_flag, s_sel, s_desc, s_act],
        depth,
        stats: CircuitStats {
            method: "selector".into(),
            depth: match depth {
                DepthExpr::Const(c) => c,
                _ => 0,
            },
            breadth,
            tuple_arity: b,
            beta: b,
            width,
            ..Default::default()
        },
    };
    c.measure();
    Ok(c)
}
