use std::fmt;

use grw_core::ModelError;

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DiagKind {
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("`{pred}` takes {expected} argument(s), found {found}")]
    ArityMismatch { pred: String, expected: usize, found: usize },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("`{0}` is not a parameter")]
    UnknownVariable(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("`{arg}` has type `{found}`, `{pred}` expects `{expected}`")]
    TypeMismatch { pred: String, arg: String, expected: String, found: String },
    #[error("unsupported requirement `{0}` (only :strips and :typing)")]
    UnsupportedRequirement(String),
    #[error("problem is for domain `{found}`, not `{expected}`")]
    DomainMismatch { expected: String, found: String },
    #[error("{0}")]
    Model(ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {kind}")]
pub struct Diagnostic {
    pub pos: Pos,
    pub kind: DiagKind,
}

impl Diagnostic {
    pub fn new(pos: Pos, kind: DiagKind) -> Self {
        Diagnostic { pos, kind }
    }

    pub fn syntax(pos: Pos, expected: impl Into<String>, found: impl Into<String>) -> Self {
        Diagnostic::new(pos, DiagKind::Syntax { expected: expected.into(), found: found.into() })
    }

    /// Model errors carry names, not positions; map the ones that have a
    /// dedicated kind.
    pub fn model(pos: Pos, e: ModelError) -> Self {
        let kind = match e {
            ModelError::UnknownPredicate(p) => DiagKind::UndeclaredPredicate(p),
            ModelError::UnknownObject(o) => DiagKind::UnknownObject(o),
            ModelError::UnknownType(t) => DiagKind::UnknownType(t),
            ModelError::DuplicateName(n) => DiagKind::Duplicate(n),
            ModelError::ArityMismatch { pred, expected, found } => DiagKind::ArityMismatch { pred, expected, found },
            ModelError::UnknownVariable { var, .. } => DiagKind::UnknownVariable(var),
            other => DiagKind::Model(other),
        };
        Diagnostic::new(pos, kind)
    }
}

pub type Result<T> = std::result::Result<T, Diagnostic>;
