//! Built-in domains and seeded instance generators.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::builder::{DomainBuilder, SpecBuilder};
use crate::model::{Domain, ModelError, Problem, ProblemOptions, ProblemSpec};

pub mod rng;

use rng::SplitMix64;

pub fn blocksworld() -> Domain {
    DomainBuilder::new("blocksworld")
        .type_decl("block", "object")
        .predicate("on(block, block)")
        .predicate("on-table(block)")
        .predicate("clear(block)")
        .predicate("holding(block)")
        .predicate("handsfree()")
        .action(
            "unstack(x: block, y: block)",
            &["on(x, y)", "clear(x)", "handsfree()"],
            &["holding(x)", "clear(y)"],
            &["on(x, y)", "clear(x)", "handsfree()"],
        )
        .action(
            "stack(x: block, y: block)",
            &["holding(x)", "clear(y)"],
            &["on(x, y)", "clear(x)", "handsfree()"],
            &["holding(x)", "clear(y)"],
        )
        .action(
            "pick-table(x: block)",
            &["on-table(x)", "clear(x)", "handsfree()"],
            &["holding(x)"],
            &["on-table(x)", "clear(x)", "handsfree()"],
        )
        .action(
            "place-table(x: block)",
            &["holding(x)"],
            &["on-table(x)", "clear(x)", "handsfree()"],
            &["holding(x)"],
        )
        .build()
        .expect("blocksworld domain")
}

/// Truck-only road-graph Logistics with optional packages.
pub fn logistics() -> Domain {
    DomainBuilder::new("logistics")
        .type_decl("locatable", "object")
        .type_decl("truck", "locatable")
        .type_decl("package", "locatable")
        .type_decl("location", "object")
        .predicate("at(locatable, location)")
        .predicate("in(package, truck)")
        .predicate("road(location, location)")
        .action(
            "drive(v: truck, l1: location, l2: location)",
            &["at(v, l1)", "road(l1, l2)"],
            &["at(v, l2)"],
            &["at(v, l1)"],
        )
        .action(
            "load(o: package, v: truck, l: location)",
            &["at(o, l)", "at(v, l)"],
            &["in(o, v)"],
            &["at(o, l)"],
        )
        .action(
            "unload(o: package, v: truck, l: location)",
            &["in(o, v)", "at(v, l)"],
            &["at(o, l)"],
            &["in(o, v)"],
        )
        .build()
        .expect("logistics domain")
}

pub fn gripper() -> Domain {
    DomainBuilder::new("gripper")
        .type_decl("room", "object")
        .type_decl("ball", "object")
        .type_decl("gripper", "object")
        .predicate("at-robby(room)")
        .predicate("at(ball, room)")
        .predicate("free(gripper)")
        .predicate("carry(ball, gripper)")
        .action("move(from: room, to: room)", &["at-robby(from)"], &["at-robby(to)"], &["at-robby(from)"])
        .action(
            "pick(b: ball, r: room, g: gripper)",
            &["at(b, r)", "at-robby(r)", "free(g)"],
            &["carry(b, g)"],
            &["at(b, r)", "free(g)"],
        )
        .action(
            "drop(b: ball, r: room, g: gripper)",
            &["carry(b, g)", "at-robby(r)"],
            &["at(b, r)", "free(g)"],
            &["carry(b, g)"],
        )
        .build()
        .expect("gripper domain")
}

/// Select an A-item, then a matching B-item, then a C-item matching that one.
pub fn assembly3() -> Domain {
    DomainBuilder::new("assembly3")
        .type_decl("item", "object")
        .predicate("is-a(item)")
        .predicate("is-b(item)")
        .predicate("is-c(item)")
        .predicate("match(item, item)")
        .predicate("ready()")
        .predicate("sel-a(item)")
        .predicate("sel-b(item)")
        .predicate("sel-c(item)")
        .predicate("done()")
        .action("select-a(a: item)", &["is-a(a)", "ready()"], &["sel-a(a)"], &["ready()"])
        .action(
            "select-b(a: item, b: item)",
            &["sel-a(a)", "is-b(b)", "match(a, b)"],
            &["sel-b(b)"],
            &["sel-a(a)"],
        )
        .action(
            "select-c(b: item, c: item)",
            &["sel-b(b)", "is-c(c)", "match(b, c)"],
            &["sel-c(c)", "done()"],
            &["sel-b(b)"],
        )
        .build()
        .expect("assembly3 domain")
}

pub fn sokoban() -> Domain {
    DomainBuilder::new("sokoban")
        .type_decl("cell", "object")
        .type_decl("dir", "object")
        .predicate("at-robot(cell)")
        .predicate("at-box(cell)")
        .predicate("clear(cell)")
        .predicate("adj(cell, cell, dir)")
        .action(
            "move(from: cell, to: cell, d: dir)",
            &["at-robot(from)", "clear(to)", "adj(from, to, d)"],
            &["at-robot(to)", "clear(from)"],
            &["at-robot(from)", "clear(to)"],
        )
        .action(
            "push(r: cell, b: cell, t: cell, d: dir)",
            &["at-robot(r)", "at-box(b)", "clear(t)", "adj(r, b, d)", "adj(b, t, d)"],
            &["at-robot(b)", "at-box(t)", "clear(r)"],
            &["at-robot(r)", "at-box(b)", "clear(t)"],
        )
        .build()
        .expect("sokoban domain")
}

pub fn by_name(name: &str) -> Option<Domain> {
    Some(match name {
        "blocksworld" => blocksworld(),
        "logistics" => logistics(),
        "gripper" => gripper(),
        "assembly3" => assembly3(),
        "sokoban" => sokoban(),
        _ => return None,
    })
}

fn padded(prefix: &str, i: usize, n: usize) -> String {
    let width = format!("{}", n.max(1) - 1).len().max(2);
    format!("{prefix}{i:0width$}")
}

fn finish(domain: &Domain, spec: ProblemSpec) -> Problem {
    Problem::from_spec(domain, &spec, ProblemOptions::default()).expect("generated instance is well-formed")
}

/// Block configuration as `support[i]`: `None` for the table, `Some(j)` for block j.
pub fn blocksworld_spec(support: &[Option<usize>], target: &str, name: &str) -> ProblemSpec {
    let n = support.len();
    let names: Vec<String> = (0..n).map(|i| padded("b", i, n)).collect();
    let mut clear = vec![true; n];
    let mut init = Vec::new();
    for (i, s) in support.iter().enumerate() {
        match s {
            None => init.push(("on-table".to_string(), vec![names[i].clone()])),
            Some(j) => {
                clear[*j] = false;
                init.push(("on".to_string(), vec![names[i].clone(), names[*j].clone()]));
            }
        }
    }
    for (i, c) in clear.iter().enumerate() {
        if *c {
            init.push(("clear".to_string(), vec![names[i].clone()]));
        }
    }
    init.push(("handsfree".to_string(), Vec::new()));
    let (gp, gargs) = crate::builder::split_call(target).expect("goal atom");
    ProblemSpec {
        name: name.to_string(),
        domain: "blocksworld".to_string(),
        objects: names.iter().map(|b| (b.clone(), "block".to_string())).collect(),
        init,
        goal: vec![(gp, gargs)],
    }
}

/// Blocks are added one at a time, each onto the table or onto a uniformly
/// chosen clear block (table and every clear block equally likely). The
/// target is a uniformly chosen non-clear block; configurations without one
/// are redrawn from the same stream.
pub fn gen_blocksworld(n: usize, seed: u64) -> Problem {
    assert!(n >= 2, "blocksworld needs at least two blocks");
    let mut rng = SplitMix64::new(seed);
    loop {
        let mut support: Vec<Option<usize>> = Vec::with_capacity(n);
        let mut clear: Vec<usize> = Vec::new();
        for i in 0..n {
            let r = rng.below(clear.len() + 1);
            if r == 0 {
                support.push(None);
            } else {
                let j = clear.remove(r - 1);
                support.push(Some(j));
            }
            clear.push(i);
            clear.sort_unstable();
        }
        let covered: Vec<usize> = (0..n).filter(|i| !clear.contains(i)).collect();
        if covered.is_empty() {
            continue;
        }
        let x = covered[rng.below(covered.len())];
        let target = format!("clear({})", padded("b", x, n));
        let spec = blocksworld_spec(&support, &target, &format!("bw-n{n}-s{seed}"));
        return finish(&blocksworld(), spec);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogisticsParams {
    pub n: usize,
    pub extra_edges: usize,
    /// Bound on the tree depth; `None` means `n/5 + 1`.
    pub max_depth: Option<usize>,
    /// Add an unreachable target node instead of a reachable one.
    pub disconnected: bool,
}

impl LogisticsParams {
    pub fn new(n: usize, extra_edges: usize) -> Self {
        LogisticsParams { n, extra_edges, max_depth: None, disconnected: false }
    }

    pub fn depth_cap(&self) -> usize {
        self.max_depth.unwrap_or(self.n / 5 + 1).max(1)
    }
}

/// Road graph with its start and target nodes (indices into locations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoadGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub start: usize,
    pub target: usize,
}

impl RoadGraph {
    /// Shortest directed path length from start to target.
    pub fn distance(&self) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[self.start] = 0;
        let mut queue = alloc::collections::VecDeque::from([self.start]);
        while let Some(u) = queue.pop_front() {
            for &(a, b) in &self.edges {
                if a == u && dist[b] == usize::MAX {
                    dist[b] = dist[u] + 1;
                    queue.push_back(b);
                }
            }
        }
        (dist[self.target] != usize::MAX).then_some(dist[self.target])
    }
}

/// Node 0 is the start and the root. Nodes 1..n attach to a uniformly chosen
/// earlier node whose depth is below the depth cap, with a road from parent
/// to child. The target is a uniformly chosen leaf. Extra roads join a
/// uniformly drawn shallower node to a deeper one (existing roads skipped,
/// at most `20 * extra_edges` draws).
pub fn logistics_graph(p: &LogisticsParams, seed: u64) -> RoadGraph {
    assert!(p.n >= 2, "logistics needs at least two locations");
    let mut rng = SplitMix64::new(seed);
    let cap = p.depth_cap();
    let tree_nodes = if p.disconnected { p.n - 1 } else { p.n };
    let mut depth = vec![0usize];
    let mut edges = Vec::new();
    let mut has_child = vec![false; p.n];
    for v in 1..tree_nodes {
        let open: Vec<usize> = (0..v).filter(|&u| depth[u] < cap).collect();
        let u = open[rng.below(open.len())];
        depth.push(depth[u] + 1);
        has_child[u] = true;
        edges.push((u, v));
    }
    let mut added = 0;
    let mut draws = 0;
    while added < p.extra_edges && draws < 20 * p.extra_edges && tree_nodes > 2 {
        draws += 1;
        let u = rng.below(tree_nodes);
        let v = rng.below(tree_nodes);
        if depth[u] < depth[v] && !edges.contains(&(u, v)) {
            edges.push((u, v));
            added += 1;
        }
    }
    let target = if p.disconnected {
        p.n - 1
    } else {
        let leaves: Vec<usize> = (1..tree_nodes).filter(|&v| !has_child[v]).collect();
        leaves[rng.below(leaves.len())]
    };
    edges.sort_unstable();
    RoadGraph { n: p.n, edges, start: 0, target }
}

pub fn logistics_spec(g: &RoadGraph, name: &str) -> ProblemSpec {
    let loc = |i: usize| padded("l", i, g.n);
    let mut objects: Vec<(String, String)> = (0..g.n).map(|i| (loc(i), "location".to_string())).collect();
    objects.push(("truck".to_string(), "truck".to_string()));
    let mut init = vec![("at".to_string(), vec!["truck".to_string(), loc(g.start)])];
    for &(a, b) in &g.edges {
        init.push(("road".to_string(), vec![loc(a), loc(b)]));
    }
    ProblemSpec {
        name: name.to_string(),
        domain: "logistics".to_string(),
        objects,
        init,
        goal: vec![("at".to_string(), vec!["truck".to_string(), loc(g.target)])],
    }
}

pub fn gen_logistics_with(p: &LogisticsParams, seed: u64) -> Problem {
    let g = logistics_graph(p, seed);
    let name = format!("log-n{}-e{}-s{seed}", p.n, p.extra_edges);
    finish(&logistics(), logistics_spec(&g, &name))
}

pub fn gen_logistics(n: usize, extra_edges: usize, seed: u64) -> Problem {
    gen_logistics_with(&LogisticsParams::new(n, extra_edges), seed)
}

/// Item kinds plus the match relation, as indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assembly {
    /// 0 = A, 1 = B, 2 = C
    pub kind: Vec<u8>,
    pub matches: Vec<(usize, usize)>,
}

impl Assembly {
    /// Number of (a, b, c) with match(a, b) and match(b, c) over A, B, C items.
    pub fn count_triples(&self) -> usize {
        let mut count = 0;
        for &(a, b) in &self.matches {
            if self.kind[a] != 0 || self.kind[b] != 1 {
                continue;
            }
            for &(b2, c) in &self.matches {
                if b2 == b && self.kind[c] == 2 {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Kinds are drawn uniformly (redrawn until every kind occurs), one triple is
/// planted, then `2n` random A-B or B-C edges are proposed and kept only if
/// the planted triple stays the unique one.
pub fn assembly_instance(n: usize, seed: u64) -> Assembly {
    assert!(n >= 3, "assembly3 needs at least three items");
    let mut rng = SplitMix64::new(seed);
    let kind: Vec<u8> = loop {
        let k: Vec<u8> = (0..n).map(|_| rng.below(3) as u8).collect();
        if (0..3).all(|t| k.contains(&t)) {
            break k;
        }
    };
    let of = |t: u8| -> Vec<usize> { (0..n).filter(|&i| kind[i] == t).collect() };
    let (aa, bb, cc) = (of(0), of(1), of(2));
    let a = aa[rng.below(aa.len())];
    let b = bb[rng.below(bb.len())];
    let c = cc[rng.below(cc.len())];
    let mut matches = vec![(a, b), (b, c)];
    let mut in_a = vec![0usize; n];
    let mut out_c = vec![0usize; n];
    in_a[b] = 1;
    out_c[b] = 1;
    for _ in 0..2 * n {
        if rng.below(2) == 0 {
            let x = aa[rng.below(aa.len())];
            let y = bb[rng.below(bb.len())];
            if out_c[y] == 0 && !matches.contains(&(x, y)) {
                matches.push((x, y));
                in_a[y] += 1;
            }
        } else {
            let x = bb[rng.below(bb.len())];
            let y = cc[rng.below(cc.len())];
            if in_a[x] == 0 && !matches.contains(&(x, y)) {
                matches.push((x, y));
                out_c[x] += 1;
            }
        }
    }
    matches.sort_unstable();
    Assembly { kind, matches }
}

pub fn assembly_spec(asm: &Assembly, name: &str) -> ProblemSpec {
    let n = asm.kind.len();
    let item = |i: usize| padded("o", i, n);
    let mut init = vec![("ready".to_string(), Vec::new())];
    for (i, k) in asm.kind.iter().enumerate() {
        let p = ["is-a", "is-b", "is-c"][*k as usize];
        init.push((p.to_string(), vec![item(i)]));
    }
    for &(x, y) in &asm.matches {
        init.push(("match".to_string(), vec![item(x), item(y)]));
    }
    ProblemSpec {
        name: name.to_string(),
        domain: "assembly3".to_string(),
        objects: (0..n).map(|i| (item(i), "item".to_string())).collect(),
        init,
        goal: vec![("done".to_string(), Vec::new())],
    }
}

pub fn gen_assembly3(n: usize, seed: u64) -> Problem {
    let asm = assembly_instance(n, seed);
    finish(&assembly3(), assembly_spec(&asm, &format!("asm3-n{n}-s{seed}")))
}

/// Two rooms, four balls, two grippers; move ball1 to roomb.
pub fn gripper_instance() -> Problem {
    let spec = SpecBuilder::new("gripper-4", "gripper")
        .objects(&["rooma", "roomb"], "room")
        .objects(&["ball1", "ball2", "ball3", "ball4"], "ball")
        .objects(&["left", "right"], "gripper")
        .init(&[
            "at-robby(rooma)",
            "at(ball1, rooma)",
            "at(ball2, rooma)",
            "at(ball3, rooma)",
            "at(ball4, rooma)",
            "free(left)",
            "free(right)",
        ])
        .goal(&["at(ball1, roomb)"])
        .build()
        .unwrap();
    finish(&gripper(), spec)
}

/// A on the table, B on A, C on B; goal clear(A).
pub fn three_stack() -> Problem {
    let spec = SpecBuilder::new("bw-three-stack", "blocksworld")
        .objects(&["A", "B", "C"], "block")
        .init(&["on-table(A)", "on(B, A)", "on(C, B)", "clear(C)", "handsfree()"])
        .goal(&["clear(A)"])
        .build()
        .unwrap();
    finish(&blocksworld(), spec)
}

/// Small grid without a regression-width certificate up to k = 2.
pub const SOKOBAN_BLOCKING: &[&str] = &["######", "#$@*##", "#.$..#", "#..$.#", "#.#..#", "######"];

pub fn sokoban_blocking() -> Problem {
    finish(&sokoban(), sokoban_spec(SOKOBAN_BLOCKING, "sokoban-blocking").expect("grid parses"))
}

/// Sokoban grid from rows of `#` (wall), `.` (floor), `@` (robot),
/// `$` (box) and `*` (goal cell, floor); every cell is named `c<row>_<col>`.
pub fn sokoban_spec(rows: &[&str], name: &str) -> Result<ProblemSpec, ModelError> {
    let cell = |r: usize, c: usize| format!("c{r}_{c}");
    let grid: Vec<Vec<char>> = rows.iter().map(|r| r.chars().collect()).collect();
    let is_floor = |r: usize, c: usize| grid.get(r).and_then(|row| row.get(c)).is_some_and(|&ch| ch != '#');
    let mut objects = Vec::new();
    let mut init = Vec::new();
    let mut goal = Vec::new();
    for d in ["up", "down", "left", "right"] {
        objects.push((d.to_string(), "dir".to_string()));
    }
    for (r, row) in grid.iter().enumerate() {
        for (c, &ch) in row.iter().enumerate() {
            if ch == '#' {
                continue;
            }
            objects.push((cell(r, c), "cell".to_string()));
            match ch {
                '@' => init.push(("at-robot".to_string(), vec![cell(r, c)])),
                '$' => init.push(("at-box".to_string(), vec![cell(r, c)])),
                '*' => {
                    goal.push(("at-box".to_string(), vec![cell(r, c)]));
                    init.push(("clear".to_string(), vec![cell(r, c)]));
                }
                '.' => init.push(("clear".to_string(), vec![cell(r, c)])),
                other => return Err(ModelError::Syntax(format!("unknown grid character `{other}`"))),
            }
            let steps: [(isize, isize, &str); 4] = [(-1, 0, "up"), (1, 0, "down"), (0, -1, "left"), (0, 1, "right")];
            for (dr, dc, d) in steps {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr >= 0 && nc >= 0 && is_floor(nr as usize, nc as usize) {
                    init.push(("adj".to_string(), vec![cell(r, c), cell(nr as usize, nc as usize), d.to_string()]));
                }
            }
        }
    }
    Ok(ProblemSpec { name: name.to_string(), domain: "sokoban".to_string(), objects, init, goal })
}
