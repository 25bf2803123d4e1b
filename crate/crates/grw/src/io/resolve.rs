//! Name resolution with positions, shared by both problem dialects.

use grw_core::model::GOAL_PRED;
use grw_core::{Domain, LiftedAtom, Param, TypeDecl, TypeId};

use super::diag::{DiagKind, Diagnostic, Pos, Result};
use super::lex::Spanned;

/// Declares types in order; parents may be declared later in the list.
pub fn declare_types(d: &mut Domain, decls: &[(Spanned, Option<Spanned>)]) -> Result<()> {
    for ((name, pos), _) in decls {
        if name == "object" {
            continue;
        }
        if d.type_id(name).is_some() {
            return Err(Diagnostic::new(*pos, DiagKind::Duplicate(name.clone())));
        }
        d.types.push(TypeDecl { name: name.clone(), parent: Some(0) });
    }
    for ((name, pos), parent) in decls {
        if name == "object" {
            if let Some((p, pp)) = parent {
                if p != "object" {
                    return Err(Diagnostic::syntax(*pp, "no parent for `object`", format!("`{p}`")));
                }
            }
            continue;
        }
        let id = d.type_id(name).unwrap() as usize;
        let parent = match parent {
            None => 0,
            Some((p, pp)) => d.type_id(p).ok_or_else(|| Diagnostic::new(*pp, DiagKind::UnknownType(p.clone())))?,
        };
        d.types[id].parent = Some(parent);
        let mut t = Some(parent);
        let mut steps = 0;
        while let Some(x) = t {
            steps += 1;
            if x as usize == id || steps > d.types.len() {
                return Err(Diagnostic::syntax(*pos, "an acyclic type hierarchy", format!("a cycle through `{name}`")));
            }
            t = d.types[x as usize].parent;
        }
    }
    Ok(())
}

pub fn type_id(d: &Domain, (name, pos): &Spanned) -> Result<TypeId> {
    d.type_id(name).ok_or_else(|| Diagnostic::new(*pos, DiagKind::UnknownType(name.clone())))
}

pub fn params(d: &Domain, list: &[(Spanned, Option<Spanned>)]) -> Result<Vec<Param>> {
    let mut out: Vec<Param> = Vec::new();
    for ((name, pos), ty) in list {
        if out.iter().any(|p| &p.name == name) {
            return Err(Diagnostic::new(*pos, DiagKind::Duplicate(name.clone())));
        }
        let ty = match ty {
            Some(t) => type_id(d, t)?,
            None => 0,
        };
        out.push(Param { name: name.clone(), ty });
    }
    Ok(out)
}

pub fn pred(d: &Domain, (name, pos): &Spanned, n_args: usize) -> Result<u32> {
    let p = d
        .pred_id(name)
        .filter(|_| name != GOAL_PRED)
        .ok_or_else(|| Diagnostic::new(*pos, DiagKind::UndeclaredPredicate(name.clone())))?;
    let ar = d.pred(p).arity();
    if ar != n_args {
        return Err(Diagnostic::new(*pos, DiagKind::ArityMismatch { pred: name.clone(), expected: ar, found: n_args }));
    }
    Ok(p)
}

pub fn lifted(d: &Domain, params: &[Param], name: &Spanned, args: &[Spanned]) -> Result<LiftedAtom> {
    let p = pred(d, name, args.len())?;
    let args = args
        .iter()
        .map(|(a, pos)| {
            params
                .iter()
                .position(|q| &q.name == a)
                .map(|i| i as u32)
                .ok_or_else(|| Diagnostic::new(*pos, DiagKind::UnknownVariable(a.clone())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LiftedAtom { pred: p, args })
}

/// Object table of a problem: checks types and duplicates.
pub fn objects(d: &Domain, list: &[(Spanned, Option<Spanned>)]) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for ((name, pos), ty) in list {
        if out.iter().any(|(n, _)| n == name) {
            return Err(Diagnostic::new(*pos, DiagKind::Duplicate(name.clone())));
        }
        let ty = match ty {
            Some(t) => {
                type_id(d, t)?;
                t.0.clone()
            }
            None => "object".to_string(),
        };
        out.push((name.clone(), ty));
    }
    Ok(out)
}

/// Checks a ground atom against the domain and object table.
pub fn ground(d: &Domain, objs: &[(String, String)], name: &Spanned, args: &[Spanned]) -> Result<(String, Vec<String>)> {
    let p = pred(d, name, args.len())?;
    let sig = d.pred(p);
    for ((a, pos), &want) in args.iter().zip(&sig.arg_types) {
        let (_, ty) = objs
            .iter()
            .find(|(o, _)| o == a)
            .ok_or_else(|| Diagnostic::new(*pos, DiagKind::UnknownObject(a.clone())))?;
        let t = d.type_id(ty).unwrap();
        if !d.is_subtype(t, want) {
            return Err(Diagnostic::new(
                *pos,
                DiagKind::TypeMismatch {
                    pred: name.0.clone(),
                    arg: a.clone(),
                    expected: d.types[want as usize].name.clone(),
                    found: ty.clone(),
                },
            ));
        }
    }
    Ok((name.0.clone(), args.iter().map(|(a, _)| a.clone()).collect()))
}

pub fn finish_domain(d: Domain, pos: Pos) -> Result<Domain> {
    d.validate().map_err(|e| Diagnostic::model(pos, e))?;
    Ok(d)
}
