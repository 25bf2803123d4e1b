//! Selector files (`.sel`).
//!
//! ```text
//! selector blocksworld for blocksworld
//! rule clear-unstack(x: block, y: block)
//!   goal clear(x)
//!   when on(y, x)
//!   pre on(y, x), clear(y), handsfree()
//!   action unstack(y, x)
//! ```
//!
//! `when` literals may be prefixed by `not`, `init` and `cons`; a `pre`
//! item may end in a keep list `{earlier, subgoals}`.

use std::fmt::Write;

use grw_core::selector::{Selector, SelectorBuilder};
use grw_core::Domain;

use super::diag::{DiagKind, Diagnostic, Pos, Result};
use super::lex::{atom_text, tokenize, Cur, Tok};

struct RuleText {
    pos: Pos,
    header: String,
    goal: Option<String>,
    when: Vec<String>,
    pre: Vec<String>,
    action: Option<String>,
}

fn atom(c: &mut Cur) -> Result<String> {
    let ((n, _), args) = c.atom()?;
    Ok(atom_text(&n, &args))
}

fn header(c: &mut Cur) -> Result<String> {
    let (name, _) = c.ident("a rule name")?;
    let mut parts = Vec::new();
    c.expect("(")?;
    if !c.eat(")") {
        loop {
            let (v, _) = c.ident("a parameter")?;
            if c.eat(":") {
                let (t, _) = c.ident("a type name")?;
                parts.push(format!("{v}: {t}"));
            } else {
                parts.push(v);
            }
            if c.eat(")") {
                break;
            }
            c.expect(",")?;
        }
    }
    c.end()?;
    Ok(format!("{name}({})", parts.join(", ")))
}

fn literal(c: &mut Cur) -> Result<String> {
    let mut prefix = String::new();
    while let Some(t) = c.peek() {
        if ["not", "init", "cons"].contains(&t.text.as_str()) && !is_call(c) {
            prefix.push_str(&t.text);
            prefix.push(' ');
            c.ident("a literal")?;
        } else {
            break;
        }
    }
    Ok(prefix + &atom(c)?)
}

/// The next token starts an atom `name(...)` rather than a prefix word.
fn is_call(c: &Cur) -> bool {
    let mut probe = c.clone();
    probe.ident("").is_ok() && probe.peek().is_some_and(|t| t.text == "(")
}

fn pre_item(c: &mut Cur) -> Result<String> {
    let mut s = atom(c)?;
    if c.eat("{") {
        let mut kept = Vec::new();
        if !c.eat("}") {
            loop {
                kept.push(atom(c)?);
                if c.eat("}") {
                    break;
                }
                c.expect(",")?;
            }
        }
        write!(s, " {{{}}}", kept.join(", ")).unwrap();
    }
    Ok(s)
}

pub fn parse_selector(text: &str, d: &Domain) -> Result<Selector> {
    let lines = tokenize(text);
    let Some(first) = lines.first() else {
        return Err(Diagnostic::syntax(Pos { line: 1, col: 1 }, "`selector <name> for <domain>`", "end of input"));
    };
    let mut c = Cur::new(first);
    c.expect("selector")?;
    let (name, _) = c.ident("a selector name")?;
    c.expect("for")?;
    let (dn, dp) = c.ident("a domain name")?;
    c.end()?;
    if dn != d.name {
        return Err(Diagnostic::new(dp, DiagKind::DomainMismatch { expected: d.name.clone(), found: dn }));
    }
    let mut rules: Vec<RuleText> = Vec::new();
    for line in &lines[1..] {
        let kw: &Tok = &line[0];
        let mut c = Cur::new(&line[1..]);
        if kw.text == "rule" {
            let header = header(&mut c)?;
            rules.push(RuleText { pos: kw.pos, header, goal: None, when: Vec::new(), pre: Vec::new(), action: None });
            continue;
        }
        let Some(r) = rules.last_mut() else {
            return Err(Diagnostic::syntax(kw.pos, "a `rule` line first", format!("`{}`", kw.text)));
        };
        match kw.text.as_str() {
            "goal" | "action" => {
                let a = atom(&mut c)?;
                c.end()?;
                let slot = if kw.text == "goal" { &mut r.goal } else { &mut r.action };
                if slot.is_some() {
                    return Err(Diagnostic::new(kw.pos, DiagKind::Duplicate(kw.text.clone())));
                }
                *slot = Some(a);
            }
            "when" => r.when.extend(c.items(literal)?),
            "pre" => r.pre.extend(c.items(pre_item)?),
            other => {
                return Err(Diagnostic::syntax(kw.pos, "one of rule, goal, when, pre, action", format!("`{other}`")))
            }
        }
    }
    let b = SelectorBuilder::new(d, &name);
    let mut out = Vec::new();
    for r in &rules {
        let goal = r.goal.as_deref().ok_or_else(|| Diagnostic::syntax(r.pos, "a `goal` line in the rule", "none"))?;
        let action = r.action.as_deref().ok_or_else(|| Diagnostic::syntax(r.pos, "an `action` line in the rule", "none"))?;
        let when: Vec<&str> = r.when.iter().map(String::as_str).collect();
        let pre: Vec<&str> = r.pre.iter().map(String::as_str).collect();
        out.push(b.make_rule(&r.header, goal, &when, &pre, action).map_err(|e| Diagnostic::model(r.pos, e))?);
    }
    Ok(Selector { name, domain: d.name.clone(), rules: out })
}

pub fn print_selector(sel: &Selector, d: &Domain) -> String {
    let mut s = String::new();
    writeln!(s, "selector {} for {}", sel.name, sel.domain).unwrap();
    for r in &sel.rules {
        writeln!(s, "rule {}", r.header_text(d)).unwrap();
        writeln!(s, "  goal {}", r.goal_text(d)).unwrap();
        if !r.when.is_empty() {
            let w: Vec<String> = r.when.iter().map(|l| r.literal_text(d, l)).collect();
            writeln!(s, "  when {}", w.join(", ")).unwrap();
        }
        if !r.pre.is_empty() {
            let p: Vec<String> = (0..r.pre.len()).map(|i| r.pre_text(d, i)).collect();
            writeln!(s, "  pre {}", p.join(", ")).unwrap();
        }
        writeln!(s, "  action {}", r.action_text(d)).unwrap();
    }
    s
}
