//! The `:strips` + `:typing` subset of PDDL.

use std::fmt::Write;

use grw_core::model::GOAL_PRED;
use grw_core::{Domain, LiftedAtom, ProblemSpec};

use super::diag::{DiagKind, Diagnostic, Pos, Result};
use super::lex::Spanned;
use super::resolve;
use super::sexp::{self, Sexp};

const REQUIREMENTS: &[&str] = &[":strips", ":typing"];

fn kw(e: &Sexp, k: &str) -> bool {
    e.sym().is_some_and(|s| s.eq_ignore_ascii_case(k))
}

fn list<'a>(e: &'a Sexp, what: &str) -> Result<&'a [Sexp]> {
    e.list().ok_or_else(|| Diagnostic::syntax(e.pos(), what, e.describe()))
}

fn name(e: &Sexp, what: &str) -> Result<Spanned> {
    match e {
        Sexp::Sym(s, p) if !s.starts_with(':') && !s.starts_with('?') && s != "-" => Ok((s.clone(), *p)),
        _ => Err(Diagnostic::syntax(e.pos(), what, e.describe())),
    }
}

fn var(e: &Sexp) -> Result<Spanned> {
    match e {
        Sexp::Sym(s, p) if s.len() > 1 && s.starts_with('?') => Ok((s[1..].to_string(), *p)),
        _ => Err(Diagnostic::syntax(e.pos(), "a variable `?x`", e.describe())),
    }
}

/// `a b - t c - u d`: names with an optional type each.
fn typed_list(items: &[Sexp], vars: bool) -> Result<Vec<(Spanned, Option<Spanned>)>> {
    let mut out = Vec::new();
    let mut pending: Vec<Spanned> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        if kw(&items[i], "-") {
            let Some(t) = items.get(i + 1) else {
                return Err(Diagnostic::syntax(items[i].pos(), "a type after `-`", "end of list"));
            };
            if pending.is_empty() {
                return Err(Diagnostic::syntax(items[i].pos(), "a name before `-`", "`-`"));
            }
            let t = name(t, "a type name")?;
            out.extend(pending.drain(..).map(|n| (n, Some(t.clone()))));
            i += 2;
            continue;
        }
        pending.push(if vars { var(&items[i])? } else { name(&items[i], "a name")? });
        i += 1;
    }
    out.extend(pending.into_iter().map(|n| (n, None)));
    Ok(out)
}

/// `(p a b)` as a name and its arguments.
fn atom_parts(e: &Sexp, vars: bool) -> Result<(Spanned, Vec<Spanned>)> {
    let items = list(e, "an atom `(p ...)`")?;
    let Some(head) = items.first() else {
        return Err(Diagnostic::syntax(e.pos(), "an atom `(p ...)`", "`()`"));
    };
    if kw(head, "not") {
        return Err(Diagnostic::syntax(e.pos(), "a positive atom", "a negation (needs :negative-preconditions)"));
    }
    if kw(head, "and") || kw(head, "or") || kw(head, "=") || kw(head, "forall") || kw(head, "exists") || kw(head, "when") {
        return Err(Diagnostic::syntax(e.pos(), "an atom", e.describe()));
    }
    let n = name(head, "a predicate name")?;
    let args = items[1..]
        .iter()
        .map(|a| if vars { var(a) } else { name(a, "an object name") })
        .collect::<Result<Vec<_>>>()?;
    Ok((n, args))
}

/// `()`, an atom, or `(and atom ...)`.
fn conjunction(e: &Sexp) -> Result<Vec<&Sexp>> {
    let items = list(e, "a formula")?;
    match items.first() {
        None => Ok(Vec::new()),
        Some(h) if kw(h, "and") => Ok(items[1..].iter().collect()),
        Some(_) => Ok(vec![e]),
    }
}

fn header(items: &[Sexp], pos: Pos, kind: &str) -> Result<Spanned> {
    if !items.first().is_some_and(|e| kw(e, "define")) {
        return Err(Diagnostic::syntax(pos, "`(define ...)`", items.first().map_or("`()`".to_string(), Sexp::describe)));
    }
    let Some(h) = items.get(1) else {
        return Err(Diagnostic::syntax(pos, format!("`({kind} <name>)`"), "end of list"));
    };
    let hs = list(h, &format!("`({kind} <name>)`"))?;
    if hs.len() != 2 || !kw(&hs[0], kind) {
        return Err(Diagnostic::syntax(h.pos(), format!("`({kind} <name>)`"), h.describe()));
    }
    name(&hs[1], &format!("a {kind} name"))
}

fn section(e: &Sexp) -> Result<(&str, &[Sexp])> {
    let items = list(e, "a section `(:... )`")?;
    match items.first().and_then(Sexp::sym) {
        Some(k) if k.starts_with(':') => Ok((k, &items[1..])),
        _ => Err(Diagnostic::syntax(e.pos(), "a section `(:... )`", e.describe())),
    }
}

pub fn parse_domain(text: &str) -> Result<Domain> {
    let top = sexp::parse(text)?;
    let items = list(&top, "`(define ...)`")?;
    let (dname, _) = header(items, top.pos(), "domain")?;
    let mut d = Domain::new(&dname);
    let mut seen: Vec<&str> = Vec::new();
    for e in &items[2..] {
        let (key, body) = section(e)?;
        let key_lc = key.to_ascii_lowercase();
        if key_lc != ":action" {
            if seen.contains(&key) {
                return Err(Diagnostic::new(e.pos(), DiagKind::Duplicate(key.to_string())));
            }
            seen.push(key);
        }
        match key_lc.as_str() {
            ":requirements" => {
                for r in body {
                    let s = r.sym().ok_or_else(|| Diagnostic::syntax(r.pos(), "a requirement flag", r.describe()))?;
                    if !REQUIREMENTS.iter().any(|k| k.eq_ignore_ascii_case(s)) {
                        return Err(Diagnostic::new(r.pos(), DiagKind::UnsupportedRequirement(s.to_string())));
                    }
                }
            }
            ":types" => resolve::declare_types(&mut d, &typed_list(body, false)?)?,
            ":predicates" => {
                for p in body {
                    let items = list(p, "a predicate declaration `(p ?x - t ...)`")?;
                    let Some(h) = items.first() else {
                        return Err(Diagnostic::syntax(p.pos(), "a predicate name", "`()`"));
                    };
                    let (pn, pp) = name(h, "a predicate name")?;
                    if d.pred_id(&pn).is_some() || pn == GOAL_PRED {
                        return Err(Diagnostic::new(pp, DiagKind::Duplicate(pn)));
                    }
                    let arg_types = typed_list(&items[1..], true)?
                        .iter()
                        .map(|(_, t)| t.as_ref().map_or(Ok(0), |t| resolve::type_id(&d, t)))
                        .collect::<Result<Vec<_>>>()?;
                    d.predicates.push(grw_core::PredicateSig { name: pn, arg_types });
                }
            }
            ":action" => {
                let a = action(&d, e.pos(), body)?;
                if d.action_id(&a.name).is_some() {
                    return Err(Diagnostic::new(e.pos(), DiagKind::Duplicate(a.name)));
                }
                d.actions.push(a);
            }
            _ => {
                return Err(Diagnostic::syntax(
                    e.pos(),
                    "one of :requirements, :types, :predicates, :action",
                    format!("`{key}`"),
                ))
            }
        }
    }
    resolve::finish_domain(d, top.pos())
}

fn action(d: &Domain, pos: Pos, body: &[Sexp]) -> Result<grw_core::ActionSchema> {
    let Some(n) = body.first() else {
        return Err(Diagnostic::syntax(pos, "an action name", "end of list"));
    };
    let (aname, _) = name(n, "an action name")?;
    let mut params = None;
    let mut pre = None;
    let mut eff = None;
    let mut i = 1;
    while i < body.len() {
        let k = &body[i];
        let Some(v) = body.get(i + 1) else {
            return Err(Diagnostic::syntax(k.pos(), "a value after the key", "end of list"));
        };
        let slot = match k.sym().map(str::to_ascii_lowercase).as_deref() {
            Some(":parameters") => &mut params,
            Some(":precondition") => &mut pre,
            Some(":effect") => &mut eff,
            _ => return Err(Diagnostic::syntax(k.pos(), "one of :parameters, :precondition, :effect", k.describe())),
        };
        if slot.is_some() {
            return Err(Diagnostic::new(k.pos(), DiagKind::Duplicate(k.sym().unwrap().to_string())));
        }
        *slot = Some(v);
        i += 2;
    }
    let params = match params {
        Some(p) => resolve::params(d, &typed_list(list(p, "a parameter list")?, true)?)?,
        None => Vec::new(),
    };
    let mut schema = grw_core::ActionSchema { name: aname, params, pre: Vec::new(), add: Vec::new(), del: Vec::new() };
    if let Some(p) = pre {
        for a in conjunction(p)? {
            let (n, args) = atom_parts(a, true)?;
            schema.pre.push(resolve::lifted(d, &schema.params, &n, &args)?);
        }
    }
    if let Some(e) = eff {
        for lit in conjunction(e)? {
            let items = list(lit, "an effect literal")?;
            let (target, negated) = match items.first() {
                Some(h) if kw(h, "not") => {
                    if items.len() != 2 {
                        return Err(Diagnostic::syntax(lit.pos(), "`(not (p ...))`", lit.describe()));
                    }
                    (&items[1], true)
                }
                _ => (lit, false),
            };
            let (n, args) = atom_parts(target, true)?;
            let a = resolve::lifted(d, &schema.params, &n, &args)?;
            if negated {
                schema.del.push(a);
            } else {
                schema.add.push(a);
            }
        }
    }
    Ok(schema)
}

pub fn parse_problem(text: &str, d: &Domain) -> Result<ProblemSpec> {
    let top = sexp::parse(text)?;
    let items = list(&top, "`(define ...)`")?;
    let (pname, _) = header(items, top.pos(), "problem")?;
    let mut dom = None;
    let mut objs = None;
    let mut init = None;
    let mut goal = None;
    for e in &items[2..] {
        let (key, body) = section(e)?;
        let slot = match key.to_ascii_lowercase().as_str() {
            ":domain" => &mut dom,
            ":objects" => &mut objs,
            ":init" => &mut init,
            ":goal" => &mut goal,
            _ => return Err(Diagnostic::syntax(e.pos(), "one of :domain, :objects, :init, :goal", format!("`{key}`"))),
        };
        if slot.is_some() {
            return Err(Diagnostic::new(e.pos(), DiagKind::Duplicate(key.to_string())));
        }
        *slot = Some((e.pos(), body));
    }
    let Some((dpos, dbody)) = dom else {
        return Err(Diagnostic::syntax(top.pos(), "a `(:domain ...)` section", "none"));
    };
    if dbody.len() != 1 {
        return Err(Diagnostic::syntax(dpos, "`(:domain <name>)`", "another form"));
    }
    let (dn, dp) = name(&dbody[0], "a domain name")?;
    if dn != d.name {
        return Err(Diagnostic::new(dp, DiagKind::DomainMismatch { expected: d.name.clone(), found: dn }));
    }
    let objects = resolve::objects(d, &typed_list(objs.map_or(&[][..], |o| o.1), false)?)?;
    let mut spec = ProblemSpec { name: pname, domain: dn, objects, init: Vec::new(), goal: Vec::new() };
    for a in init.map_or(&[][..], |i| i.1) {
        let (n, args) = atom_parts(a, false)?;
        spec.init.push(resolve::ground(d, &spec.objects, &n, &args)?);
    }
    let Some((gpos, gbody)) = goal else {
        return Err(Diagnostic::syntax(top.pos(), "a `(:goal ...)` section", "none"));
    };
    if gbody.len() != 1 {
        return Err(Diagnostic::syntax(gpos, "one goal formula", format!("{} forms", gbody.len())));
    }
    for a in conjunction(&gbody[0])? {
        let (n, args) = atom_parts(a, false)?;
        spec.goal.push(resolve::ground(d, &spec.objects, &n, &args)?);
    }
    if spec.goal.is_empty() {
        return Err(Diagnostic::model(gbody[0].pos(), grw_core::ModelError::EmptyGoal));
    }
    Ok(spec)
}

fn lifted_text(d: &Domain, params: &[grw_core::Param], a: &LiftedAtom) -> String {
    let mut s = format!("({}", d.pred(a.pred).name);
    for &v in &a.args {
        write!(s, " ?{}", params[v as usize].name).unwrap();
    }
    s.push(')');
    s
}

fn and_of(parts: Vec<String>) -> String {
    match parts.len() {
        0 => "()".to_string(),
        1 => parts.into_iter().next().unwrap(),
        _ => format!("(and {})", parts.join(" ")),
    }
}

pub fn print_domain(d: &Domain) -> String {
    let mut s = String::new();
    writeln!(s, "(define (domain {})", d.name).unwrap();
    let typed = d.types.len() > 1;
    writeln!(s, "  (:requirements :strips{})", if typed { " :typing" } else { "" }).unwrap();
    if typed {
        let decls: Vec<String> = d.types[1..]
            .iter()
            .map(|t| format!("{} - {}", t.name, d.types[t.parent.unwrap_or(0) as usize].name))
            .collect();
        writeln!(s, "  (:types {})", decls.join(" ")).unwrap();
    }
    s.push_str("  (:predicates");
    for p in d.predicates.iter().filter(|p| p.name != GOAL_PRED) {
        write!(s, "\n    ({}", p.name).unwrap();
        for (i, &t) in p.arg_types.iter().enumerate() {
            write!(s, " ?x{i} - {}", d.types[t as usize].name).unwrap();
        }
        s.push(')');
    }
    s.push(')');
    for a in &d.actions {
        write!(s, "\n  (:action {}", a.name).unwrap();
        let ps: Vec<String> = a.params.iter().map(|p| format!("?{} - {}", p.name, d.types[p.ty as usize].name)).collect();
        write!(s, "\n    :parameters ({})", ps.join(" ")).unwrap();
        let pre: Vec<String> = a.pre.iter().map(|x| lifted_text(d, &a.params, x)).collect();
        write!(s, "\n    :precondition {}", and_of(pre)).unwrap();
        let mut eff: Vec<String> = a.add.iter().map(|x| lifted_text(d, &a.params, x)).collect();
        eff.extend(a.del.iter().map(|x| format!("(not {})", lifted_text(d, &a.params, x))));
        write!(s, "\n    :effect {})", and_of(eff)).unwrap();
    }
    s.push_str(")\n");
    s
}

fn ground_text((p, args): &(String, Vec<String>)) -> String {
    if args.is_empty() {
        format!("({p})")
    } else {
        format!("({p} {})", args.join(" "))
    }
}

pub fn print_problem(spec: &ProblemSpec) -> String {
    let mut s = String::new();
    writeln!(s, "(define (problem {})", spec.name).unwrap();
    writeln!(s, "  (:domain {})", spec.domain).unwrap();
    s.push_str("  (:objects");
    let mut i = 0;
    while i < spec.objects.len() {
        let ty = &spec.objects[i].1;
        let j = (i..spec.objects.len()).find(|&j| &spec.objects[j].1 != ty).unwrap_or(spec.objects.len());
        let names: Vec<&str> = spec.objects[i..j].iter().map(|(n, _)| n.as_str()).collect();
        write!(s, "\n    {} - {ty}", names.join(" ")).unwrap();
        i = j;
    }
    s.push_str(")\n  (:init");
    for a in &spec.init {
        write!(s, "\n    {}", ground_text(a)).unwrap();
    }
    s.push_str(")\n");
    let goal: Vec<String> = spec.goal.iter().map(ground_text).collect();
    writeln!(s, "  (:goal {}))", and_of(goal)).unwrap();
    s
}
