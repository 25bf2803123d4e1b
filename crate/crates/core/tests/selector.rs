use grw_core::builder::{split_call, SpecBuilder};
use grw_core::domains::*;
use grw_core::search::{opt_search, replay, DEFAULT_STATE_CAP};
use grw_core::selector::*;
use grw_core::{Domain, ModelError, Problem, ProblemOptions, State};
use proptest::prelude::*;

fn atom(p: &Problem, text: &str) -> u32 {
    let (name, args) = split_call(text).unwrap();
    let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    p.atom(&name, &args).unwrap_or_else(|| panic!("no atom {text}"))
}

fn bw_problem(support: &[Option<usize>], target: &str) -> Problem {
    Problem::from_spec(&blocksworld(), &blocksworld_spec(support, target, "bw"), ProblemOptions::default()).unwrap()
}

fn names(p: &Problem, plan: &[u32]) -> Vec<String> {
    plan.iter().map(|&a| p.action_name(a)).collect()
}

fn optimum(p: &Problem, s: &State, g: u32, cons: &[u32]) -> Option<usize> {
    opt_search(p, s, &[g], cons, DEFAULT_STATE_CAP).unwrap().length
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

/// Is block `y` somewhere above block `x` in state `s`?
fn above(p: &Problem, s: &State, y: &str, x: &str) -> bool {
    let mut cur = x.to_string();
    loop {
        let next = p.objects.iter().map(|o| o.name.clone()).find(|b| s.contains(atom(p, &format!("on({b}, {cur})"))));
        match next {
            Some(b) if b == y => return true,
            Some(b) => cur = b,
            None => return false,
        }
    }
}

fn goal_args(goal: &str) -> Vec<String> {
    split_call(goal).unwrap().1
}

/// The built-in rules plus ordering guards for moving a block onto one of
/// the blocks above it (chains of up to three intermediate blocks, enough
/// for five blocks).
fn guarded_blocksworld(d: &Domain) -> Selector {
    let base = blocksworld_selector(d).unwrap();
    let guards = SelectorBuilder::new(d, "guards")
        .rule("on-above-1(x, y)", "on(x, y)", &["on(y, x)"], &["holding(x)", "clear(y)"], "stack(x, y)")
        .rule("on-above-2(x, y, z)", "on(x, y)", &["on(y, z)", "on(z, x)"], &["holding(x)", "clear(y)"], "stack(x, y)")
        .rule(
            "on-above-3(x, y, z, w)",
            "on(x, y)",
            &["on(y, z)", "on(z, w)", "on(w, x)"],
            &["holding(x)", "clear(y)"],
            "stack(x, y)",
        )
        .rule(
            "on-above-4(x, y, z, w, u)",
            "on(x, y)",
            &["on(y, z)", "on(z, w)", "on(w, u)", "on(u, x)"],
            &["holding(x)", "clear(y)"],
            "stack(x, y)",
        )
        .build()
        .unwrap();
    let mut rules = base.rules.clone();
    let at = rules.iter().position(|r| r.name == "on-stack").unwrap();
    for (i, r) in guards.rules.into_iter().enumerate() {
        rules.insert(at + i, r);
    }
    Selector { name: "blocksworld-guarded".into(), domain: base.domain, rules }
}

#[test]
fn select_binds_the_block_on_top() {
    let p = bw_problem(&[None, Some(0), None], "clear(b00)");
    let sel = blocksworld_selector(&p.domain).unwrap();
    let r = select(&sel, &p, &p.init, atom(&p, "clear(b00)"), &[]).unwrap();
    assert_eq!(p.action_name(r.action), "unstack(b01, b00)");
    let subs: Vec<String> = r.subgoals.iter().map(|s| p.atom_name(s.atom)).collect();
    assert_eq!(subs, ["on(b01, b00)", "clear(b01)", "handsfree()"]);
    assert_eq!(r.subgoals[2].keep, vec![atom(&p, "on(b01, b00)"), atom(&p, "clear(b01)")]);
}

#[test]
fn select_logistics_unload() {
    let p = package_instance();
    let sel = logistics_selector(&p.domain).unwrap();
    let r = select(&sel, &p, &p.init, atom(&p, "at(pkg, l3)"), &[]).unwrap();
    assert_eq!(p.action_name(r.action), "unload(pkg, t, l3)");
    let subs: Vec<String> = r.subgoals.iter().map(|s| p.atom_name(s.atom)).collect();
    assert_eq!(subs, ["in(pkg, t)", "at(t, l3)"]);
}

#[test]
fn select_is_absent_without_matching_rule() {
    let p = bw_problem(&[None, Some(0)], "clear(b00)");
    let empty = Selector { name: "empty".into(), domain: "blocksworld".into(), rules: vec![] };
    assert!(select(&empty, &p, &p.init, atom(&p, "clear(b01)"), &[]).is_none());
    let sel = blocksworld_selector(&p.domain).unwrap();
    // handsfree() is already true and no block is held
    assert!(select(&sel, &p, &p.init, atom(&p, "handsfree()"), &[]).is_none());
}

#[test]
fn tr_select_true_goal_is_empty_plan() {
    let p = bw_problem(&[None, Some(0)], "clear(b00)");
    let sel = blocksworld_selector(&p.domain).unwrap();
    let plan = tr_select(&sel, &p, &p.init, atom(&p, "clear(b01)"), &[]).unwrap().unwrap();
    assert!(plan.is_empty());
}

#[test]
fn tr_select_clears_under_a_tower_of_two() {
    let p = bw_problem(&[None, Some(0), Some(1)], "clear(b00)");
    let sel = blocksworld_selector(&p.domain).unwrap();
    let plan = tr_select(&sel, &p, &p.init, p.goal, &[]).unwrap().unwrap();
    // unstacking b01 already makes b00 clear, so no final place-table
    assert_eq!(names(&p, &plan), ["unstack(b02, b01)", "place-table(b02)", "unstack(b01, b00)"]);
    assert_eq!(Some(plan.len()), optimum(&p, &p.init, p.goal, &[]));
}

#[test]
fn tr_select_delivers_a_package() {
    let p = package_instance();
    let sel = logistics_selector(&p.domain).unwrap();
    let plan = tr_select(&sel, &p, &p.init, p.goal, &[]).unwrap().unwrap();
    assert_eq!(
        names(&p, &plan),
        ["drive(t, l0, l1)", "load(pkg, t, l1)", "drive(t, l1, l2)", "drive(t, l2, l3)", "unload(pkg, t, l3)"]
    );
    assert_eq!(Some(plan.len()), optimum(&p, &p.init, p.goal, &[]));
}

#[test]
fn tr_select_drives_on_generated_road_graphs() {
    let mut longer = 0;
    for n in [2, 3, 4, 5, 6, 7, 8, 20, 40] {
        for seed in 0..30 {
            let p = gen_logistics(n, 2, seed);
            let sel = logistics_selector(&p.domain).unwrap();
            let plan = tr_select(&sel, &p, &p.init, p.goal, &[]).unwrap().expect("reachable target");
            let end = replay(&p, &p.init, &plan).unwrap();
            assert!(end.last().unwrap().contains(p.goal));
            let opt = optimum(&p, &p.init, p.goal, &[]).unwrap();
            if n <= 8 {
                assert_eq!(plan.len(), opt, "n={n} seed={seed}");
            }
            assert!(plan.len() >= opt);
            longer += usize::from(plan.len() > opt);
        }
    }
    // the first predecessor of a node is not always on a shortest route:
    // two of the larger graphs (n=20, seeds 12 and 24) get longer drives
    assert_eq!(longer, 2);
}

#[test]
fn tr_select_unreachable_target_is_bottom() {
    let mut params = LogisticsParams::new(6, 1);
    params.disconnected = true;
    let p = gen_logistics_with(&params, 3);
    let sel = logistics_selector(&p.domain).unwrap();
    assert_eq!(tr_select(&sel, &p, &p.init, p.goal, &[]).unwrap(), None);
}

#[test]
fn tr_select_respects_constraints() {
    let p = bw_problem(&[None, Some(0), Some(1)], "clear(b00)");
    let sel = blocksworld_selector(&p.domain).unwrap();
    // on(b02, b01) must stay; clearing b01 is impossible
    let cons = [atom(&p, "on(b02, b01)")];
    assert_eq!(tr_select(&sel, &p, &p.init, atom(&p, "clear(b01)"), &cons).unwrap(), None);
    assert_eq!(optimum(&p, &p.init, atom(&p, "clear(b01)"), &cons), None);
}

#[test]
fn tr_select_budget() {
    let p = bw_problem(&[None, Some(0), Some(1), Some(2)], "clear(b00)");
    let sel = blocksworld_selector(&p.domain).unwrap();
    let mut tr = TrSelect::new(&sel, &p);
    tr.budget = 2;
    assert!(matches!(
        tr.run(&p.init, p.goal, &[]),
        Err(grw_core::search::SearchError::RecursionBudgetExceeded { budget: 2 })
    ));
    tr.budget = DEFAULT_SELECT_BUDGET;
    let plan = tr.run(&p.init, p.goal, &[]).unwrap().unwrap();
    assert_eq!(plan.len(), 5);
    assert!(tr.stats.calls > 2);
}

#[test]
fn cyclic_selector_is_bottom() {
    let p = bw_problem(&[None, Some(0)], "clear(b00)");
    // holding(x) asks for holding(x) again; the active-call check stops it
    let sel = SelectorBuilder::new(&p.domain, "loop")
        .rule("handsfree-loop(x)", "holding(x)", &[], &["holding(x)"], "pick-table(x)")
        .build()
        .unwrap();
    let mut tr = TrSelect::new(&sel, &p);
    assert_eq!(tr.run(&p.init, atom(&p, "holding(b00)"), &[]).unwrap(), None);
    assert_eq!(tr.stats.cycles, 1);
}

fn sweep(sel: &Selector, n: usize, opts: &RrsOptions) -> (RrsReport, Problem) {
    let p = gen_blocksworld(n, 0);
    (check_rrs_serializable(sel, &p, opts).unwrap(), p)
}

#[test]
fn blocksworld_selector_sweep() {
    // every reachable state of n <= 5 blocks, every fluent goal, empty constraints
    let expected_violations = [2, 30, 348, 3980];
    for n in 2..=5 {
        let p0 = gen_blocksworld(n, 0);
        let sel = blocksworld_selector(&p0.domain).unwrap();
        let (r, p) = sweep(&sel, n, &RrsOptions::default());
        assert_eq!(r.suboptimal, 0, "n={n}");
        assert_eq!(r.violations.len(), expected_violations[n - 2], "n={n}");
        for v in &r.violations {
            // only on(x, y) with y stacked above x: the fixed clear-then-hold
            // order cannot fetch x without disturbing y
            assert_eq!(v.kind, ViolationKind::Bottom);
            assert!(v.goal.starts_with("on("), "{v:?}");
            let args = goal_args(&v.goal);
            let atoms: Vec<u32> = v.state.iter().map(|a| atom(&p, a)).collect();
            let s = State::from_atoms(p.n_atoms(), atoms);
            assert!(above(&p, &s, &args[1], &args[0]), "{v:?}");
        }
    }
}

#[test]
fn guarded_blocksworld_selector_has_no_violations() {
    for n in 2..=5 {
        let p = gen_blocksworld(n, 0);
        let sel = guarded_blocksworld(&p.domain);
        let (r, _) = sweep(&sel, n, &RrsOptions::default());
        assert!(r.violations.is_empty(), "n={n}: {:?}", &r.violations[..r.violations.len().min(3)]);
        assert_eq!(r.suboptimal, 0, "n={n}");
    }
}

#[test]
fn blocksworld_selector_with_singleton_constraints() {
    let p = gen_blocksworld(4, 0);
    let sel = guarded_blocksworld(&p.domain);
    let opts = RrsOptions { singleton_cons: true, goal_preds: vec!["clear".into(), "holding".into()], ..Default::default() };
    let r = check_rrs_serializable(&sel, &p, &opts).unwrap();
    assert!(r.violations.is_empty(), "{:?}", &r.violations[..r.violations.len().min(3)]);
    assert!(r.achievable > 0);
}

#[test]
fn handsfree_before_clear_is_reported() {
    let p = gen_blocksworld(3, 0);
    let sel = SelectorBuilder::new(&p.domain, "wrong-order")
        .rule("clear-unstack(x, y)", "clear(x)", &["on(y, x)"], &["on(y, x)", "handsfree()", "clear(y)"], "unstack(y, x)")
        .rule("clear-place(x)", "clear(x)", &["holding(x)"], &["holding(x)"], "place-table(x)")
        .rule("handsfree-place(x)", "handsfree()", &["holding(x)"], &["holding(x)"], "place-table(x)")
        .build()
        .unwrap();
    let opts = RrsOptions { goal_preds: vec!["clear".into()], ..Default::default() };
    let r = check_rrs_serializable(&sel, &p, &opts).unwrap();
    let tower = ["on(b01, b00)", "on(b02, b01)", "on-table(b00)", "clear(b02)", "handsfree()"];
    assert!(r
        .violations
        .iter()
        .any(|v| v.goal == "clear(b00)" && v.cons.is_empty() && tower.iter().all(|a| v.state.iter().any(|s| s == a))));
}

#[test]
fn empty_selector_fails_every_achievable_goal() {
    let p = gen_blocksworld(3, 0);
    let empty = Selector { name: "empty".into(), domain: "blocksworld".into(), rules: vec![] };
    let r = check_rrs_serializable(&empty, &p, &RrsOptions::default()).unwrap();
    assert!(r.achievable > 0);
    assert_eq!(r.violations.len(), r.achievable);
    assert!(r.violations.iter().all(|v| v.kind == ViolationKind::Bottom));
}

#[test]
fn sweep_state_cap() {
    let p = gen_blocksworld(5, 0);
    let sel = blocksworld_selector(&p.domain).unwrap();
    let opts = RrsOptions { state_cap: 100, ..Default::default() };
    assert!(check_rrs_serializable(&sel, &p, &opts).is_err());
}

#[test]
fn assembly3_selector_picks_the_matching_triple() {
    for n in [3, 10, 30] {
        for seed in 0..10 {
            let p = gen_assembly3(n, seed);
            let sel = assembly3_selector(&p.domain).unwrap();
            let plan = tr_select(&sel, &p, &p.init, p.goal, &[]).unwrap().unwrap();
            assert_eq!(plan.len(), 3);
            let end = replay(&p, &p.init, &plan).unwrap();
            assert!(end.last().unwrap().contains(p.goal));
            let n = names(&p, &plan);
            assert!(n[0].starts_with("select-a(") && n[1].starts_with("select-b(") && n[2].starts_with("select-c("));
        }
    }
}

#[test]
fn builder_infers_types_and_rejects_bad_rules() {
    let d = logistics();
    let sel = logistics_selector(&d).unwrap();
    let r = &sel.rules[1];
    let tys: Vec<&str> = r.params.iter().map(|p| d.types[p.ty as usize].name.as_str()).collect();
    assert_eq!(tys, ["package", "truck", "location"]);
    assert_eq!(r.header_text(&d), "in-load(o: package, v: truck, l: location)");
    let b = || SelectorBuilder::new(&d, "bad");
    assert!(matches!(b().rule("r(o)", "at(o, l)", &[], &[], "unload(o, v, l)").build(), Err(ModelError::Syntax(_))));
    assert!(matches!(
        b().rule("r(o, v, l)", "at(o, l)", &[], &["nope(o)"], "unload(o, v, l)").build(),
        Err(ModelError::UnknownPredicate(_))
    ));
    assert!(b().rule("r(o, v, l)", "at(o, l)", &[], &[], "load(o, v, l)").build().is_err());
    assert!(b().rule("r(o, v, l)", "at(o, l)", &[], &["in(o, v)", "at(v, l) {at(o, l)}"], "unload(o, v, l)").build().is_err());
    let ok = b().rule("r(o, v, l)", "at(o, l)", &["not cons at(o, l)"], &["in(o, v)", "at(v, l) {}"], "unload(o, v, l)").build().unwrap();
    assert_eq!(ok.rules[0].pre[1].keep, Some(vec![]));
    assert_eq!(ok.rules[0].pre_text(&d, 1), "at(v, l) {}");
    assert_eq!(ok.rules[0].literal_text(&d, &ok.rules[0].when[0]), "not cons at(o, l)");
}

#[test]
fn explicit_keep_lists_drop_constraints() {
    let p = bw_problem(&[None, Some(0)], "clear(b00)");
    let sel = SelectorBuilder::new(&p.domain, "keep")
        .rule("clear-unstack(x, y)", "clear(x)", &["on(y, x)"], &["on(y, x)", "clear(y)", "handsfree() {clear(y)}"], "unstack(y, x)")
        .build()
        .unwrap();
    let r = select(&sel, &p, &p.init, p.goal, &[]).unwrap();
    assert_eq!(r.subgoals[2].keep, vec![atom(&p, "clear(b01)")]);
}

#[test]
fn init_literals_see_the_root_state() {
    let p = bw_problem(&[None, Some(0)], "clear(b00)");
    let sel = SelectorBuilder::new(&p.domain, "init")
        .rule("clear-unstack(x, y)", "clear(x)", &["init on(y, x)"], &["on(y, x)", "clear(y)", "handsfree()"], "unstack(y, x)")
        .build()
        .unwrap();
    assert!(select(&sel, &p, &p.init, p.goal, &[]).is_some());
    let empty_root = State::new(p.n_atoms());
    assert!(select_in(&sel, &p, &empty_root, &p.init, p.goal, &[]).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tr_select_is_deterministic_and_replays(n in 2usize..=6, seed in 0u64..1000) {
        let p = gen_blocksworld(n, seed);
        let sel = guarded_blocksworld(&p.domain);
        let a = tr_select(&sel, &p, &p.init, p.goal, &[]).unwrap();
        let b = tr_select(&sel, &p, &p.init, p.goal, &[]).unwrap();
        prop_assert_eq!(&a, &b);
        let plan = a.unwrap();
        let trace = replay(&p, &p.init, &plan).unwrap();
        prop_assert!(trace.last().unwrap().contains(p.goal));
        prop_assert_eq!(Some(plan.len()), optimum(&p, &p.init, p.goal, &[]));
    }
}
