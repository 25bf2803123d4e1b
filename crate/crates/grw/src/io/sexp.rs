//! S-expression reader with positions; `;` starts a comment.

use super::diag::{Diagnostic, Pos, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Sym(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v, _) => Some(v),
            Sexp::Sym(..) => None,
        }
    }

    /// Short description for "found ..." messages.
    pub fn describe(&self) -> String {
        match self {
            Sexp::Sym(s, _) => format!("`{s}`"),
            Sexp::List(v, _) => match v.first().and_then(Sexp::sym) {
                Some(h) => format!("list `({h} ...)`"),
                None => "a list".to_string(),
            },
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp> {
        self.skip_blank();
        let start = self.pos;
        match self.chars.peek() {
            None => Err(Diagnostic::syntax(start, "an expression", "end of input")),
            Some(')') => Err(Diagnostic::syntax(start, "an expression", "`)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return Err(Diagnostic::syntax(self.pos, format!("`)` closing the list at {start}"), "end of input")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Sym(s, start))
            }
        }
    }
}

/// Exactly one top-level expression.
pub fn parse(text: &str) -> Result<Sexp> {
    let mut r = Reader { chars: text.chars().peekable(), pos: Pos { line: 1, col: 1 } };
    let e = r.read()?;
    r.skip_blank();
    if r.chars.peek().is_some() {
        let p = r.pos;
        let found = r.read().map(|e| e.describe()).unwrap_or_else(|_| "`)`".to_string());
        return Err(Diagnostic::syntax(p, "end of input", found));
    }
    Ok(e)
}
