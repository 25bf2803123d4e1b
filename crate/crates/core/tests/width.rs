use grw_core::builder::{DomainBuilder, SpecBuilder};
use grw_core::domains::*;
use grw_core::regression::{enumerate_r0, RegressionRule, Subgoal};
use grw_core::search::{iw, opt_search, replay, DEFAULT_STATE_CAP};
use grw_core::width::*;
use grw_core::{ModelError, Problem, ProblemOptions, ProblemSpec, State};
use proptest::prelude::*;
use std::collections::{BTreeSet, VecDeque};

fn bw(init: &[&str], goal: &str) -> Problem {
    let spec = SpecBuilder::new("bw", "blocksworld")
        .objects(&["A", "B", "C"], "block")
        .init(init)
        .goal(&[goal])
        .build()
        .unwrap();
    Problem::from_spec(&blocksworld(), &spec, ProblemOptions::default()).unwrap()
}

fn atom(p: &Problem, text: &str) -> u32 {
    let (name, args) = grw_core::builder::split_call(text).unwrap();
    let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    p.atom(&name, &args).unwrap_or_else(|| panic!("no atom {text}"))
}

/// `subgoals` are `(atom, keep atoms)`.
fn rule(p: &Problem, goal: &str, cons: &[&str], subgoals: &[(&str, &[&str])], action: &str) -> RegressionRule {
    let (name, args) = grw_core::builder::split_call(action).unwrap();
    let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    let mut cons: Vec<u32> = cons.iter().map(|c| atom(p, c)).collect();
    cons.sort_unstable();
    RegressionRule {
        goal: atom(p, goal),
        cons,
        subgoals: subgoals
            .iter()
            .map(|(a, keep)| {
                let mut keep: Vec<u32> = keep.iter().map(|k| atom(p, k)).collect();
                keep.sort_unstable();
                Subgoal { atom: atom(p, a), keep }
            })
            .collect(),
        action: p.find_action(&name, &args).unwrap(),
    }
}

fn oracle_check(p: &Problem, r: &RegressionRule) -> (bool, bool) {
    let mut o = Oracle::new(p, DEFAULT_ORACLE_CAP);
    (is_optimally_serializable(&mut o, r, &p.init).unwrap(), is_sos_rule(&mut o, r, &p.init).unwrap())
}

const THREE: &[&str] = &["on-table(A)", "on(B, A)", "on(C, B)", "clear(C)", "handsfree()"];

#[test]
fn rule_width_examples() {
    let p = bw(THREE, "clear(A)");
    let r = rule(&p, "clear(A)", &[], &[("on(B, A)", &[]), ("clear(B)", &[]), ("handsfree()", &[])], "unstack(B, A)");
    assert_eq!(rule_width(&r), 0);
    let r = rule(
        &p,
        "clear(A)",
        &[],
        &[("on(B, A)", &[]), ("clear(B)", &[]), ("handsfree()", &["clear(B)"])],
        "unstack(B, A)",
    );
    assert_eq!(rule_width(&r), 1);
    let r = rule(
        &p,
        "clear(B)",
        &[],
        &[("on(A, B)", &[]), ("clear(A)", &[]), ("handsfree()", &["clear(A)"])],
        "unstack(A, B)",
    );
    assert_eq!(rule_width(&r), 1);
    let r = rule(&p, "clear(A)", &["on-table(A)"], &[("on(B, A)", &[]), ("clear(B)", &["on(B, A)"])], "unstack(B, A)");
    assert_eq!(rule_width(&r), 2);
}

proptest! {
    #[test]
    fn rule_width_depends_only_on_keep_sizes(sizes in prop::collection::vec(0usize..4, 1..5), c in 0usize..3, seed in any::<u64>()) {
        let mk = |order: &[usize]| RegressionRule {
            goal: 0,
            cons: (100..100 + c as u32).collect(),
            subgoals: order.iter().map(|&i| Subgoal { atom: i as u32, keep: (200..200 + sizes[i] as u32).collect() }).collect(),
            action: 0,
        };
        let ident: Vec<usize> = (0..sizes.len()).collect();
        let mut shuffled = ident.clone();
        let mut rng = rng::SplitMix64::new(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.below(i + 1));
        }
        let a = mk(&ident);
        let b = mk(&shuffled);
        prop_assert_eq!(rule_width(&a), rule_width(&b));
        prop_assert_eq!(rule_width(&a), c + sizes.iter().copied().max().unwrap());
    }
}

#[test]
fn directly_applicable_rule_is_serializable() {
    let p = bw(&["on-table(A)", "on(B, A)", "clear(B)", "handsfree()", "on-table(C)", "clear(C)"], "clear(A)");
    let r = rule(&p, "clear(A)", &[], &[("on(B, A)", &[]), ("clear(B)", &[]), ("handsfree()", &[])], "unstack(B, A)");
    assert_eq!(oracle_check(&p, &r), (true, true));
}

#[test]
fn unstack_for_holding_serializable_when_on() {
    // A on B, C on A: holding(A) needs C moved first.
    let p = bw(&["on-table(B)", "on(A, B)", "on(C, A)", "clear(C)", "handsfree()"], "holding(A)");
    let order = ["on(A, B)", "clear(A)", "handsfree()"];
    let ids: Vec<u32> = order.iter().map(|a| atom(&p, a)).collect();
    let r = RegressionRule::full_prefix(atom(&p, "holding(A)"), &[], p.find_action("unstack", &["A", "B"]).unwrap(), &ids);
    let mut o = Oracle::new(&p, DEFAULT_ORACLE_CAP);
    assert!(is_optimally_serializable(&mut o, &r, &p.init).unwrap());
}

#[test]
fn handsfree_before_clear_is_not_serializable() {
    let p = bw(&["on-table(B)", "on(A, B)", "on(C, A)", "clear(C)", "handsfree()"], "clear(B)");
    let order = ["on(A, B)", "handsfree()", "clear(A)"];
    let ids: Vec<u32> = order.iter().map(|a| atom(&p, a)).collect();
    let r = RegressionRule::full_prefix(atom(&p, "clear(B)"), &[], p.find_action("unstack", &["A", "B"]).unwrap(), &ids);
    let mut o = Oracle::new(&p, DEFAULT_ORACLE_CAP);
    assert!(!is_optimally_serializable(&mut o, &r, &p.init).unwrap());
    // the clear-first ordering is fine
    let order = ["on(A, B)", "clear(A)", "handsfree()"];
    let ids: Vec<u32> = order.iter().map(|a| atom(&p, a)).collect();
    let r = RegressionRule::full_prefix(atom(&p, "clear(B)"), &[], p.find_action("unstack", &["A", "B"]).unwrap(), &ids);
    assert!(is_optimally_serializable(&mut o, &r, &p.init).unwrap());
}

#[test]
fn width_zero_rule_on_two_blocks() {
    let spec = blocksworld_spec(&[None, Some(0)], "clear(b00)", "two");
    let p = Problem::from_spec(&blocksworld(), &spec, ProblemOptions::default()).unwrap();
    let r = rule(&p, "clear(b00)", &[], &[("on(b01, b00)", &[]), ("clear(b01)", &[]), ("handsfree()", &[])], "unstack(b01, b00)");
    assert_eq!(oracle_check(&p, &r), (true, true));
}

#[test]
fn generalized_unstack_rule_sos_when_on() {
    let p = bw(&["on-table(B)", "on(A, B)", "on(C, A)", "clear(C)", "handsfree()"], "clear(B)");
    let r = rule(
        &p,
        "clear(B)",
        &[],
        &[("on(A, B)", &[]), ("clear(A)", &[]), ("handsfree()", &["clear(A)"])],
        "unstack(A, B)",
    );
    assert_eq!(oracle_check(&p, &r), (true, true));
    // width-0 version: putting C back onto A is an optimal way to free the hand
    let r0 = rule(&p, "clear(B)", &[], &[("on(A, B)", &[]), ("clear(A)", &[]), ("handsfree()", &[])], "unstack(A, B)");
    assert!(!oracle_check(&p, &r0).1);
}

#[test]
fn generalized_unstack_rule_fails_when_not_on() {
    let p = bw(&["on-table(B)", "on(C, B)", "on-table(A)", "clear(A)", "clear(C)", "handsfree()"], "clear(B)");
    let r = rule(
        &p,
        "clear(B)",
        &[],
        &[("on(A, B)", &[]), ("clear(A)", &[]), ("handsfree()", &["clear(A)"])],
        "unstack(A, B)",
    );
    assert_eq!(oracle_check(&p, &r), (false, false));
}

#[test]
fn three_stack_rule_is_width_one() {
    let p = three_stack();
    let r = rule(
        &p,
        "clear(A)",
        &[],
        &[("on(B, A)", &[]), ("clear(B)", &[]), ("handsfree()", &["clear(B)"])],
        "unstack(B, A)",
    );
    assert_eq!(oracle_check(&p, &r), (true, true));
    let r0 = rule(&p, "clear(A)", &[], &[("on(B, A)", &[]), ("clear(B)", &[]), ("handsfree()", &[])], "unstack(B, A)");
    assert_eq!(oracle_check(&p, &r0), (false, false));
}

#[test]
fn oracle_cap_is_reported() {
    let p = gen_blocksworld(6, 2);
    let r = estimate_sos_width(&p, &WidthOptions { oracle_cap: 5, ..Default::default() });
    assert_eq!(r, Err(grw_core::search::SearchError::StateSpaceCapExceeded { cap: 5 }));
}

fn certify(p: &Problem, k_max: usize) -> Option<WidthCertificate> {
    estimate_sos_width(p, &WidthOptions { k_max, ..Default::default() }).unwrap()
}

fn check_certificate(p: &Problem, c: &WidthCertificate) {
    assert!(c.verified, "{}", p.name);
    assert!(c.witnesses.iter().all(|w| w.sos && w.width <= c.k));
    assert!(c.witnesses.iter().any(|w| w.width == c.k));
    assert_eq!(c.notes, vec![CONTAINMENT_NOTE.to_string()]);
    let plan: Vec<u32> = c
        .plan
        .iter()
        .map(|a| {
            let (n, args) = grw_core::builder::split_call(a).unwrap();
            let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
            p.find_action(&n, &args).unwrap()
        })
        .collect();
    let states = replay(p, &p.init, &plan).unwrap();
    assert!(states.last().unwrap().contains(p.goal));
    let opt = opt_search(p, &p.init, &[p.goal], &[], DEFAULT_STATE_CAP).unwrap().length;
    assert_eq!(opt, Some(plan.len()));
}

#[test]
fn blocksworld_clear_goals_have_width_one() {
    let mut widest = 0;
    for n in 2..=6 {
        for seed in 0..12 {
            let p = gen_blocksworld(n, seed);
            let c = certify(&p, 3).expect("certified");
            check_certificate(&p, &c);
            // a single block on the target needs no bookkeeping
            let expect = if c.plan.len() == 1 { 0 } else { 1 };
            assert_eq!(c.k, expect, "{}", p.name);
            widest = widest.max(c.k);
        }
    }
    assert_eq!(widest, 1);
    let c = certify(&three_stack(), 3).unwrap();
    check_certificate(&three_stack(), &c);
    assert_eq!(c.k, 1);
}

#[test]
fn logistics_at_goals_have_width_zero() {
    for n in 2..=8 {
        for seed in 0..6 {
            let p = gen_logistics(n, seed as usize % 3, seed);
            let c = certify(&p, 2).expect("certified");
            check_certificate(&p, &c);
            assert_eq!(c.k, 0, "{}", p.name);
        }
    }
}

fn package_instance() -> Problem {
    let spec = SpecBuilder::new("log-pkg", "logistics")
        .objects(&["l0", "l1", "l2", "l3"], "location")
        .object("t", "truck")
        .object("pkg", "package")
        .init(&["at(t, l0)", "at(pkg, l1)", "road(l0, l1)", "road(l1, l0)", "road(l1, l2)", "road(l2, l1)", "road(l2, l3)", "road(l3, l2)"])
        .goal(&["at(pkg, l3)"])
        .build()
        .unwrap();
    Problem::from_spec(&logistics(), &spec, ProblemOptions::default()).unwrap()
}

#[test]
fn logistics_package_delivery_has_width_zero() {
    let p = package_instance();
    let c = certify(&p, 2).unwrap();
    check_certificate(&p, &c);
    assert_eq!(c.k, 0);
    assert_eq!(c.plan.len(), 5);
}

#[test]
fn gripper_has_width_zero() {
    let p = gripper_instance();
    let c = certify(&p, 2).unwrap();
    check_certificate(&p, &c);
    assert_eq!(c.k, 0);
}

#[test]
fn sokoban_blocking_instance_fails_certification() {
    let p = sokoban_blocking();
    assert_eq!(opt_search(&p, &p.init, &[p.goal], &[], DEFAULT_STATE_CAP).unwrap().length, Some(8));
    assert_eq!(certify(&p, 2), None);
}

#[test]
fn certified_width_bounds_iw() {
    let mut probs = vec![three_stack()];
    for seed in 0..10 {
        probs.push(gen_blocksworld(2 + seed as usize % 5, seed));
        probs.push(gen_logistics(2 + seed as usize % 7, 1, seed));
    }
    for p in probs {
        let c = certify(&p, 2).unwrap();
        let (plan, _) = iw(&p, c.k + 1).unwrap_or_else(|e| panic!("{}: {e:?}", p.name));
        assert!(replay(&p, &p.init, &plan).unwrap().last().unwrap().contains(p.goal));
    }
}

// Width 0, yet IW(1) prunes the loaded move: the empty-handed move reached
// the same robot/truck position one layer earlier. IW(2) is needed.
#[test]
fn carrying_instances_of_width_zero_need_iw2() {
    for (p, len) in [(gripper_instance(), 3), (package_instance(), 5)] {
        assert_eq!(certify(&p, 2).unwrap().k, 0);
        assert_eq!(iw(&p, 1).unwrap_err(), grw_core::search::SearchError::Exhausted, "{}", p.name);
        assert_eq!(iw(&p, 2).unwrap().0.len(), len);
    }
}

#[test]
fn three_stack_iw1_below_certified_width_plus_one() {
    let p = three_stack();
    assert!(iw(&p, 1).is_ok());
    assert_eq!(certify(&p, 3).unwrap().k, 1);
}

#[test]
fn wider_rule_sets_still_solve() {
    for seed in 0..8 {
        let p = gen_blocksworld(3 + seed as usize % 3, seed);
        let mut o = Oracle::new(&p, DEFAULT_ORACLE_CAP);
        let opts = WidthOptions::default();
        let mut solved = false;
        for k in 0..=3 {
            let r = solve_at_width(&p, &mut o, k, &opts).unwrap();
            if solved {
                assert!(r.plan.is_some(), "{} k={k}", p.name);
            }
            solved |= r.plan.is_some();
        }
        assert!(solved);
    }
}

// ---- super predicates ----

fn toy() -> grw_core::Domain {
    DomainBuilder::new("toy")
        .type_decl("item", "object")
        .predicate("p(item)")
        .predicate("q(item)")
        .predicate("r(item)")
        .predicate("s(item)")
        .action("make-p(x: item)", &["r(x)"], &["p(x)"], &["r(x)"])
        .action("make-q(x: item)", &["p(x)"], &["q(x)"], &[])
        .action("drop-p(x: item)", &["p(x)"], &["r(x)"], &["p(x)"])
        .action("drop-q(x: item)", &["q(x)"], &[], &["q(x)"])
        .action("use(x: item)", &["p(x)", "q(x)"], &["s(x)"], &[])
        .build()
        .unwrap()
}

fn toy_spec() -> ProblemSpec {
    SpecBuilder::new("toy-3", "toy")
        .objects(&["i0", "i1", "i2"], "item")
        .init(&["r(i0)", "r(i1)", "r(i2)", "q(i1)"])
        .goal(&["s(i0)"])
        .build()
        .unwrap()
}

#[test]
fn super_predicate_splits_adding_operator() {
    let d = toy();
    let t = super_predicate_transform(&d, "p", "q").unwrap();
    let names: Vec<&str> = t.actions.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["make-p--n", "make-p--y", "make-q", "drop-p", "drop-q", "use"]);
    assert_eq!(t.predicates.len(), d.predicates.len() + 2);
    assert!(t.pred_id("p_and_q").is_some() && t.pred_id("not_q").is_some() && t.pred_id("not_p").is_none());
    let use_op = t.actions.iter().find(|a| a.name == "use").unwrap();
    assert_eq!(use_op.pre.len(), 1);
    assert_eq!(t.pred(use_op.pre[0].pred).name, "p_and_q");
}

#[test]
fn super_predicate_without_touching_operators() {
    let d = DomainBuilder::new("still")
        .type_decl("item", "object")
        .predicate("p(item)")
        .predicate("q(item)")
        .predicate("r(item)")
        .action("use(x: item)", &["p(x)", "q(x)"], &["r(x)"], &[])
        .action("reset(x: item)", &["r(x)"], &[], &["r(x)"])
        .build()
        .unwrap();
    let t = super_predicate_transform(&d, "p", "q").unwrap();
    assert_eq!(t.predicates.len(), 4);
    assert_eq!(t.actions.len(), 2);
    assert_eq!(t.actions[1], d.actions[1]);
    assert_eq!(t.actions[0].add, d.actions[0].add);
    assert_eq!(t.actions[0].pre.len(), 1);
}

#[test]
fn super_predicate_arity_mismatch() {
    let d = DomainBuilder::new("bad")
        .type_decl("item", "object")
        .predicate("p(item)")
        .predicate("q(item, item)")
        .build()
        .unwrap();
    assert!(matches!(super_predicate_transform(&d, "p", "q"), Err(ModelError::ArityMismatch { .. })));
}

fn names(p: &Problem, s: &State, keep: &[&str]) -> BTreeSet<String> {
    s.iter()
        .map(|a| p.atom_name(a))
        .filter(|n| keep.iter().any(|k| n.starts_with(&format!("{k}("))))
        .collect()
}

fn reachable(p: &Problem) -> Vec<State> {
    let mut seen = std::collections::HashSet::new();
    let mut out = vec![];
    let mut q = VecDeque::from([p.init.clone()]);
    seen.insert(p.init.clone());
    while let Some(s) = q.pop_front() {
        out.push(s.clone());
        for a in p.applicable(&s).collect::<Vec<_>>() {
            let t = p.apply(&s, a).unwrap();
            if seen.insert(t.clone()) {
                q.push_back(t);
            }
        }
    }
    out
}

#[test]
fn super_predicate_preserves_reachable_states() {
    let d = toy();
    let spec = toy_spec();
    let t = super_predicate_transform(&d, "p", "q").unwrap();
    let tspec = super_predicate_spec(&t, &spec, "p", "q").unwrap();
    let opts = ProblemOptions { prune_static: false, ..Default::default() };
    let orig = Problem::from_spec(&d, &spec, opts).unwrap();
    let tr = Problem::from_spec(&t, &tspec, opts).unwrap();
    let keep = ["p", "q", "r", "s"];
    let a: BTreeSet<BTreeSet<String>> = reachable(&orig).iter().map(|s| names(&orig, s, &keep)).collect();
    let tstates = reachable(&tr);
    let b: BTreeSet<BTreeSet<String>> = tstates.iter().map(|s| names(&tr, s, &keep)).collect();
    assert_eq!(a, b);
    assert!(a.len() > 20);
    for s in &tstates {
        let n = names(&tr, s, &["p", "q", "p_and_q", "not_q"]);
        for i in ["i0", "i1", "i2"] {
            let (hp, hq) = (n.contains(&format!("p({i})")), n.contains(&format!("q({i})")));
            assert_eq!(n.contains(&format!("p_and_q({i})")), hp && hq);
            assert_eq!(n.contains(&format!("not_q({i})")), !hq);
        }
        // successors agree after projection
        let proj = names(&tr, s, &keep);
        let src = reachable_from(&orig, &proj);
        let mut dst = BTreeSet::new();
        for act in tr.applicable(s).collect::<Vec<_>>() {
            dst.insert(names(&tr, &tr.apply(s, act).unwrap(), &keep));
        }
        assert_eq!(src, dst);
    }
}

fn reachable_from(p: &Problem, atoms: &BTreeSet<String>) -> BTreeSet<BTreeSet<String>> {
    let ids: Vec<u32> = atoms.iter().map(|n| atom(p, n)).collect();
    let s = p.set_of(&ids);
    p.applicable(&s).map(|a| names(p, &p.apply(&s, a).unwrap(), &["p", "q", "r", "s"])).collect()
}

// ---- lifted rule derivation ----

#[test]
fn blocksworld_flags() {
    let r = derive_candidate_rules(&blocksworld());
    let got: Vec<(String, String, String)> =
        r.flags.iter().map(|f| (f.action.clone(), f.goal.clone(), f.precondition.clone())).collect();
    let want = [
        ("pick-table", "holding(x)", "on-table(x)"),
        ("place-table", "clear(x)", "holding(x)"),
        ("place-table", "handsfree()", "holding(x)"),
        ("stack", "clear(x)", "holding(x)"),
        ("stack", "handsfree()", "holding(x)"),
        ("unstack", "clear(y)", "on(x, y)"),
        ("unstack", "holding(x)", "on(x, y)"),
    ];
    let want: Vec<(String, String, String)> =
        want.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect();
    assert_eq!(got, want);
}

#[test]
fn only_unstack_from_the_top_block_survives() {
    let p = three_stack();
    let flags = GroundFlags::new(&p, &derive_candidate_rules(&p.domain));
    let g = atom(&p, "clear(A)");
    let rules = enumerate_r0(&p, g, &[], 6).unwrap();
    let before: BTreeSet<String> = rules.iter().map(|r| p.action_name(r.action)).collect();
    assert!(before.len() > 1);
    let kept = flags.prune(&p, rules, &p.init);
    let after: BTreeSet<String> = kept.iter().map(|r| p.action_name(r.action)).collect();
    assert_eq!(after, BTreeSet::from(["unstack(B, A)".to_string()]));
    assert_eq!(kept.len(), 6);
}

#[test]
fn no_precondition_domain_has_no_flags() {
    let d = DomainBuilder::new("free")
        .type_decl("item", "object")
        .predicate("p(item)")
        .action("make(x: item)", &[], &["p(x)"], &[])
        .build()
        .unwrap();
    assert!(derive_candidate_rules(&d).flags.is_empty());
}

#[test]
fn logistics_has_no_flags_and_survivors_solve() {
    let r = derive_candidate_rules(&logistics());
    assert!(r.flags.is_empty());
    assert!(r.pairs > 0);
    let p = package_instance();
    let flags = GroundFlags::new(&p, &r);
    let mut search = grw_core::regression::Sgrs::new(&p).with_rules(grw_core::regression::RuleSource::Custom(Box::new(
        |p: &Problem, s: &State, g, cons: &[u32]| flags.prune(p, enumerate_r0(p, g, cons, 6).unwrap(), s),
    )));
    let found = search.solve(&p.init, p.goal, &[]).unwrap().unwrap();
    assert_eq!(found.plan.len(), 5);
    for seed in 0..10 {
        let p = gen_logistics(3 + seed as usize % 6, 1, seed);
        let flags = GroundFlags::new(&p, &r);
        let mut search = grw_core::regression::Sgrs::new(&p).with_rules(grw_core::regression::RuleSource::Custom(
            Box::new(|p: &Problem, s: &State, g, cons: &[u32]| flags.prune(p, enumerate_r0(p, g, cons, 6).unwrap(), s)),
        ));
        let plan = search.solve(&p.init, p.goal, &[]).unwrap().unwrap().plan;
        assert_eq!(Some(plan.len()), opt_search(&p, &p.init, &[p.goal], &[], DEFAULT_STATE_CAP).unwrap().length);
    }
}
