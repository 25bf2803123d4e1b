//! Compact programmatic construction of domains and problem specs.
//!
//! Atoms are written as `pred(a, b)`; typed parameter lists as
//! `name(x: block, y: block)`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::model::{ActionSchema, Domain, LiftedAtom, ModelError, Param, PredicateSig, ProblemSpec, TypeDecl};

/// Splits `name(a, b: t)` into the name and trimmed argument strings.
pub fn split_call(text: &str) -> Result<(String, Vec<String>), ModelError> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        if text.is_empty() {
            return Err(ModelError::Syntax("empty atom".to_string()));
        }
        return Ok((text.to_string(), Vec::new()));
    };
    if !text.ends_with(')') {
        return Err(ModelError::Syntax(alloc::format!("missing `)` in `{text}`")));
    }
    let name = text[..open].trim().to_string();
    let inner = text[open + 1..text.len() - 1].trim();
    let args = if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|a| a.trim().to_string()).collect()
    };
    if name.is_empty() || args.iter().any(|a| a.is_empty()) {
        return Err(ModelError::Syntax(alloc::format!("malformed `{text}`")));
    }
    Ok((name, args))
}

pub struct DomainBuilder {
    domain: Domain,
    err: Option<ModelError>,
}

impl DomainBuilder {
    pub fn new(name: &str) -> Self {
        DomainBuilder { domain: Domain::new(name), err: None }
    }

    fn fail(&mut self, e: ModelError) {
        if self.err.is_none() {
            self.err = Some(e);
        }
    }

    fn ty(&mut self, name: &str) -> u32 {
        match self.domain.type_id(name) {
            Some(t) => t,
            None => {
                self.fail(ModelError::UnknownType(name.to_string()));
                0
            }
        }
    }

    /// Declares `name` as a subtype of `parent` (`object` for a root type).
    pub fn type_decl(mut self, name: &str, parent: &str) -> Self {
        let p = self.ty(parent);
        if self.domain.type_id(name).is_some() {
            self.fail(ModelError::DuplicateName(name.to_string()));
        }
        self.domain.types.push(TypeDecl { name: name.to_string(), parent: Some(p) });
        self
    }

    /// `on(block, block)`; argument entries are type names.
    pub fn predicate(mut self, decl: &str) -> Self {
        match split_call(decl) {
            Ok((name, args)) => {
                let arg_types = args.iter().map(|a| self.ty(a)).collect();
                self.domain.predicates.push(PredicateSig { name, arg_types });
            }
            Err(e) => self.fail(e),
        }
        self
    }

    /// `header` is `name(x: t, y)`; untyped parameters default to `object`.
    pub fn action(mut self, header: &str, pre: &[&str], add: &[&str], del: &[&str]) -> Self {
        let (name, raw) = match split_call(header) {
            Ok(v) => v,
            Err(e) => {
                self.fail(e);
                return self;
            }
        };
        let mut params = Vec::new();
        for r in raw {
            let (v, t) = match r.split_once(':') {
                Some((v, t)) => (v.trim().to_string(), t.trim().to_string()),
                None => (r.clone(), "object".to_string()),
            };
            let ty = self.ty(&t);
            params.push(Param { name: v, ty });
        }
        let lift = |list: &[&str], this: &mut Self| -> Vec<LiftedAtom> {
            let mut out = Vec::new();
            for text in list {
                match split_call(text) {
                    Ok((p, args)) => {
                        let Some(pred) = this.domain.pred_id(&p) else {
                            this.fail(ModelError::UnknownPredicate(p));
                            continue;
                        };
                        let mut ids = Vec::new();
                        for a in args {
                            match params.iter().position(|q: &Param| q.name == a) {
                                Some(i) => ids.push(i as u32),
                                None => this.fail(ModelError::UnknownVariable { action: name.clone(), var: a }),
                            }
                        }
                        out.push(LiftedAtom { pred, args: ids });
                    }
                    Err(e) => this.fail(e),
                }
            }
            out
        };
        let pre = lift(pre, &mut self);
        let add = lift(add, &mut self);
        let del = lift(del, &mut self);
        self.domain.actions.push(ActionSchema { name, params, pre, add, del });
        self
    }

    pub fn build(self) -> Result<Domain, ModelError> {
        if let Some(e) = self.err {
            return Err(e);
        }
        self.domain.validate()?;
        Ok(self.domain)
    }
}

/// Builds a [`ProblemSpec`] from atom strings.
pub struct SpecBuilder {
    spec: ProblemSpec,
    err: Option<ModelError>,
}

impl SpecBuilder {
    pub fn new(name: &str, domain: &str) -> Self {
        SpecBuilder {
            spec: ProblemSpec { name: name.to_string(), domain: domain.to_string(), ..Default::default() },
            err: None,
        }
    }

    pub fn object(mut self, name: &str, ty: &str) -> Self {
        self.spec.objects.push((name.to_string(), ty.to_string()));
        self
    }

    pub fn objects(mut self, names: &[&str], ty: &str) -> Self {
        for n in names {
            self.spec.objects.push((n.to_string(), ty.to_string()));
        }
        self
    }

    fn atoms(&mut self, list: &[&str]) -> Vec<(String, Vec<String>)> {
        let mut out = Vec::new();
        for a in list {
            match split_call(a) {
                Ok(v) => out.push(v),
                Err(e) => {
                    if self.err.is_none() {
                        self.err = Some(e);
                    }
                }
            }
        }
        out
    }

    pub fn init(mut self, atoms: &[&str]) -> Self {
        let v = self.atoms(atoms);
        self.spec.init.extend(v);
        self
    }

    pub fn goal(mut self, atoms: &[&str]) -> Self {
        let v = self.atoms(atoms);
        self.spec.goal.extend(v);
        self
    }

    pub fn build(self) -> Result<ProblemSpec, ModelError> {
        match self.err {
            Some(e) => Err(e),
            None => Ok(self.spec),
        }
    }
}
