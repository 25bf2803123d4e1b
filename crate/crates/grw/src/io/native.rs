//! Line-oriented native format (`.strips`).
//!
//! ```text
//! domain blocksworld
//! type block
//! pred on(block, block)
//! action unstack(x: block, y: block)
//!   pre on(x, y), clear(x), handsfree()
//!   add holding(x), clear(y)
//!   del on(x, y), clear(x), handsfree()
//!
//! problem tower for blocksworld
//! objects a b : block
//! init on-table(a), on(b, a), clear(b), handsfree()
//! goal clear(a)
//! ```

use std::fmt::Write;

use grw_core::model::GOAL_PRED;
use grw_core::{ActionSchema, Domain, LiftedAtom, Param, PredicateSig, ProblemSpec};

use super::diag::{DiagKind, Diagnostic, Pos, Result};
use super::lex::{tokenize, Cur, Spanned, Tok};
use super::resolve;

fn typed_names(c: &mut Cur) -> Result<Vec<(Spanned, Option<Spanned>)>> {
    let mut names = Vec::new();
    while c.peek().is_some_and(|t| !t.is_punct()) {
        names.push(c.ident("a name")?);
    }
    if names.is_empty() {
        return Err(Diagnostic::syntax(c.here(), "a name", "nothing"));
    }
    let ty = if c.eat(":") || c.eat("<") { Some(c.ident("a type name")?) } else { None };
    c.end()?;
    Ok(names.into_iter().map(|n| (n, ty.clone())).collect())
}

fn header_params(c: &mut Cur) -> Result<(Spanned, Vec<(Spanned, Option<Spanned>)>)> {
    let name = c.ident("a name")?;
    let mut params = Vec::new();
    c.expect("(")?;
    if !c.eat(")") {
        loop {
            let v = c.ident("a parameter")?;
            let t = if c.eat(":") { Some(c.ident("a type name")?) } else { None };
            params.push((v, t));
            if c.eat(")") {
                break;
            }
            c.expect(",")?;
        }
    }
    Ok((name, params))
}

fn split(text: &str) -> Result<(Vec<Vec<Tok>>, Option<(Pos, Vec<Vec<Tok>>)>)> {
    let lines = tokenize(text);
    let at = lines.iter().position(|l| l[0].text == "problem");
    Ok(match at {
        Some(i) => {
            let pos = lines[i][0].pos;
            let mut lines = lines;
            let rest = lines.split_off(i);
            (lines, Some((pos, rest)))
        }
        None => (lines, None),
    })
}

pub fn parse_domain(text: &str) -> Result<Domain> {
    let (dlines, _) = split(text)?;
    if dlines.is_empty() {
        return Err(Diagnostic::syntax(Pos { line: 1, col: 1 }, "`domain <name>`", "no domain section"));
    }
    parse_domain_lines(&dlines)
}

fn parse_domain_lines(lines: &[Vec<Tok>]) -> Result<Domain> {
    let first = &lines[0];
    let mut c = Cur::new(first);
    c.expect("domain")?;
    let (name, _) = c.ident("a domain name")?;
    c.end()?;
    let mut d = Domain::new(&name);
    let mut types = Vec::new();
    let mut i = 1;
    while i < lines.len() && lines[i][0].text == "type" {
        let mut c = Cur::new(&lines[i][1..]);
        types.extend(typed_names(&mut c)?);
        i += 1;
    }
    resolve::declare_types(&mut d, &types)?;
    let mut current: Option<ActionSchema> = None;
    for line in &lines[i..] {
        let kw = &line[0];
        let mut c = Cur::new(&line[1..]);
        match kw.text.as_str() {
            "pred" => {
                let (pn, pp) = c.ident("a predicate name")?;
                if d.pred_id(&pn).is_some() || pn == GOAL_PRED {
                    return Err(Diagnostic::new(pp, DiagKind::Duplicate(pn)));
                }
                let mut arg_types = Vec::new();
                c.expect("(")?;
                if !c.eat(")") {
                    loop {
                        arg_types.push(resolve::type_id(&d, &c.ident("a type name")?)?);
                        if c.eat(")") {
                            break;
                        }
                        c.expect(",")?;
                    }
                }
                c.end()?;
                d.predicates.push(PredicateSig { name: pn, arg_types });
            }
            "action" => {
                if let Some(a) = current.take() {
                    d.actions.push(a);
                }
                let ((an, ap), ps) = header_params(&mut c)?;
                c.end()?;
                if d.action_id(&an).is_some() {
                    return Err(Diagnostic::new(ap, DiagKind::Duplicate(an)));
                }
                let params = resolve::params(&d, &ps)?;
                current = Some(ActionSchema { name: an, params, pre: Vec::new(), add: Vec::new(), del: Vec::new() });
            }
            "pre" | "add" | "del" => {
                let Some(a) = current.as_mut() else {
                    return Err(Diagnostic::syntax(kw.pos, "an `action` line first", format!("`{}`", kw.text)));
                };
                let atoms = c.items(|c| c.atom())?;
                let lifted = atoms
                    .iter()
                    .map(|(n, args)| resolve::lifted(&d, &a.params, n, args))
                    .collect::<Result<Vec<LiftedAtom>>>()?;
                match kw.text.as_str() {
                    "pre" => a.pre.extend(lifted),
                    "add" => a.add.extend(lifted),
                    _ => a.del.extend(lifted),
                }
            }
            "type" => return Err(Diagnostic::syntax(kw.pos, "`type` lines before predicates and actions", "`type`")),
            other => {
                return Err(Diagnostic::syntax(kw.pos, "one of type, pred, action, pre, add, del, problem", format!("`{other}`")))
            }
        }
    }
    if let Some(a) = current.take() {
        d.actions.push(a);
    }
    resolve::finish_domain(d, first[0].pos)
}

/// The problem section of a native file, checked against `d`.
pub fn parse_problem(text: &str, d: &Domain) -> Result<ProblemSpec> {
    let (_, problem) = split(text)?;
    let Some((pos, lines)) = problem else {
        return Err(Diagnostic::syntax(Pos { line: 1, col: 1 }, "`problem <name> for <domain>`", "no problem section"));
    };
    let mut c = Cur::new(&lines[0][1..]);
    let (name, _) = c.ident("a problem name")?;
    c.expect("for")?;
    let (dn, dp) = c.ident("a domain name")?;
    c.end()?;
    if dn != d.name {
        return Err(Diagnostic::new(dp, DiagKind::DomainMismatch { expected: d.name.clone(), found: dn }));
    }
    let mut objs = Vec::new();
    let mut i = 1;
    while i < lines.len() && lines[i][0].text == "objects" {
        let mut c = Cur::new(&lines[i][1..]);
        let mut names = Vec::new();
        while c.peek().is_some_and(|t| !t.is_punct()) {
            names.push(c.ident("an object name")?);
        }
        let ty = if c.eat(":") { Some(c.ident("a type name")?) } else { None };
        c.end()?;
        objs.extend(names.into_iter().map(|n| (n, ty.clone())));
        i += 1;
    }
    let objects = resolve::objects(d, &objs)?;
    let mut spec = ProblemSpec { name, domain: dn, objects, init: Vec::new(), goal: Vec::new() };
    let mut goal_pos = pos;
    for line in &lines[i..] {
        let kw = &line[0];
        let mut c = Cur::new(&line[1..]);
        let atoms = match kw.text.as_str() {
            "init" => &mut spec.init,
            "goal" => {
                goal_pos = kw.pos;
                &mut spec.goal
            }
            "objects" => return Err(Diagnostic::syntax(kw.pos, "`objects` lines before init and goal", "`objects`")),
            other => return Err(Diagnostic::syntax(kw.pos, "one of objects, init, goal", format!("`{other}`"))),
        };
        let parsed = c.items(|c| c.atom())?;
        for (n, args) in &parsed {
            atoms.push(resolve::ground(d, &spec.objects, n, args)?);
        }
    }
    if spec.goal.is_empty() {
        return Err(Diagnostic::model(goal_pos, grw_core::ModelError::EmptyGoal));
    }
    Ok(spec)
}

fn lifted_text(d: &Domain, params: &[Param], a: &LiftedAtom) -> String {
    let args: Vec<&str> = a.args.iter().map(|&v| params[v as usize].name.as_str()).collect();
    format!("{}({})", d.pred(a.pred).name, args.join(", "))
}

pub fn print_domain(d: &Domain) -> String {
    let mut s = String::new();
    writeln!(s, "domain {}", d.name).unwrap();
    for t in &d.types[1..] {
        match t.parent {
            Some(p) if p != 0 => writeln!(s, "type {} < {}", t.name, d.types[p as usize].name).unwrap(),
            _ => writeln!(s, "type {}", t.name).unwrap(),
        }
    }
    for p in d.predicates.iter().filter(|p| p.name != GOAL_PRED) {
        let ts: Vec<&str> = p.arg_types.iter().map(|&t| d.types[t as usize].name.as_str()).collect();
        writeln!(s, "pred {}({})", p.name, ts.join(", ")).unwrap();
    }
    for a in &d.actions {
        let ps: Vec<String> = a.params.iter().map(|p| format!("{}: {}", p.name, d.types[p.ty as usize].name)).collect();
        writeln!(s, "action {}({})", a.name, ps.join(", ")).unwrap();
        for (kw, list) in [("pre", &a.pre), ("add", &a.add), ("del", &a.del)] {
            if !list.is_empty() {
                let atoms: Vec<String> = list.iter().map(|x| lifted_text(d, &a.params, x)).collect();
                writeln!(s, "  {kw} {}", atoms.join(", ")).unwrap();
            }
        }
    }
    s
}

fn ground_text((p, args): &(String, Vec<String>)) -> String {
    format!("{p}({})", args.join(", "))
}

pub fn print_problem(spec: &ProblemSpec) -> String {
    let mut s = String::new();
    writeln!(s, "problem {} for {}", spec.name, spec.domain).unwrap();
    let mut i = 0;
    while i < spec.objects.len() {
        let ty = &spec.objects[i].1;
        let j = (i..spec.objects.len()).find(|&j| &spec.objects[j].1 != ty).unwrap_or(spec.objects.len());
        let names: Vec<&str> = spec.objects[i..j].iter().map(|(n, _)| n.as_str()).collect();
        writeln!(s, "objects {} : {ty}", names.join(" ")).unwrap();
        i = j;
    }
    for chunk in spec.init.chunks(8) {
        let atoms: Vec<String> = chunk.iter().map(ground_text).collect();
        writeln!(s, "init {}", atoms.join(", ")).unwrap();
    }
    let goal: Vec<String> = spec.goal.iter().map(ground_text).collect();
    writeln!(s, "goal {}", goal.join(", ")).unwrap();
    s
}
