//! Line lexer shared by the native problem and selector formats.

use super::diag::{Diagnostic, Pos, Result};

const PUNCT: &[char] = &['(', ')', ',', ':', '<', '{', '}'];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tok {
    pub text: String,
    pub pos: Pos,
}

impl Tok {
    pub fn is_punct(&self) -> bool {
        self.text.len() == 1 && self.text.starts_with(PUNCT)
    }
}

/// A name with its position.
pub type Spanned = (String, Pos);

/// Non-empty lines as token lists; `#` starts a comment.
pub fn tokenize(text: &str) -> Vec<Vec<Tok>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let mut toks = Vec::new();
        let mut cur: Option<Tok> = None;
        for (ci, c) in line.chars().enumerate() {
            let pos = Pos { line: li + 1, col: ci + 1 };
            if c == '#' {
                break;
            }
            if c.is_whitespace() || PUNCT.contains(&c) {
                if let Some(t) = cur.take() {
                    toks.push(t);
                }
                if !c.is_whitespace() {
                    toks.push(Tok { text: c.to_string(), pos });
                }
                continue;
            }
            match cur.as_mut() {
                Some(t) => t.text.push(c),
                None => cur = Some(Tok { text: c.to_string(), pos }),
            }
        }
        if let Some(t) = cur.take() {
            toks.push(t);
        }
        if !toks.is_empty() {
            out.push(toks);
        }
    }
    out
}

#[derive(Clone)]
pub struct Cur<'a> {
    toks: &'a [Tok],
    i: usize,
}

impl<'a> Cur<'a> {
    pub fn new(toks: &'a [Tok]) -> Self {
        Cur { toks, i: 0 }
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.i)
    }

    pub fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    /// Position of the next token, or just past the last one.
    pub fn here(&self) -> Pos {
        match self.peek() {
            Some(t) => t.pos,
            None => self.toks.last().map_or(Pos { line: 1, col: 1 }, |t| Pos {
                line: t.pos.line,
                col: t.pos.col + t.text.chars().count(),
            }),
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => format!("`{}`", t.text),
            None => "end of line".to_string(),
        }
    }

    pub fn eat(&mut self, p: &str) -> bool {
        if self.peek().is_some_and(|t| t.text == p) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, p: &str) -> Result<Pos> {
        let pos = self.here();
        if self.eat(p) {
            Ok(pos)
        } else {
            Err(Diagnostic::syntax(pos, format!("`{p}`"), self.found()))
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<Spanned> {
        match self.peek() {
            Some(t) if !t.is_punct() => {
                self.i += 1;
                Ok((t.text.clone(), t.pos))
            }
            _ => Err(Diagnostic::syntax(self.here(), what, self.found())),
        }
    }

    pub fn end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(Diagnostic::syntax(self.here(), "end of line", self.found()))
        }
    }

    /// `name(a, b)`, `name()` or a bare `name`.
    pub fn atom(&mut self) -> Result<(Spanned, Vec<Spanned>)> {
        let name = self.ident("an atom")?;
        let mut args = Vec::new();
        if self.eat("(")
            && !self.eat(")") {
                loop {
                    args.push(self.ident("an argument")?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
        Ok((name, args))
    }

    /// Comma-separated items until the end of the line.
    pub fn items<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = Vec::new();
        if self.at_end() {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.at_end() {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }
}

pub fn atom_text(name: &str, args: &[Spanned]) -> String {
    let a: Vec<&str> = args.iter().map(|(s, _)| s.as_str()).collect();
    format!("{name}({})", a.join(", "))
}
