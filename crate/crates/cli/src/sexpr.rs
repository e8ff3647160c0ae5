//! S-expressions with source positions. Atoms run until whitespace, a paren
//! or `;`; inside braces everything up to the matching `}` belongs to the
//! atom, so set literals may contain spaces.

use std::fmt;

use crate::error::DslError;

/// Line and column, both from 1. Positions never take part in equality.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn atom(s: impl Into<String>) -> SExpr {
        SExpr::Atom(s.into(), Pos::default())
    }

    pub fn list(items: Vec<SExpr>) -> SExpr {
        SExpr::List(items, Pos::default())
    }

    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// The leading atom of a list, as in `(head ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|l| l.first())
            .and_then(SExpr::as_atom)
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(s, _) => f.write_str(s),
            SExpr::List(items, _) => {
                f.write_str("(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
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

    fn expr(&mut self) -> Result<SExpr, DslError> {
        self.skip_blank();
        let pos = self.pos();
        match self.chars.peek().copied() {
            None => Err(DslError::new(pos, "unexpected end of input")),
            Some(')') => Err(DslError::new(pos, "unexpected ')'")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return Err(DslError::new(pos, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List(items, pos));
                        }
                        Some(_) => items.push(self.expr()?),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                let mut depth = 0usize;
                while let Some(&c) = self.chars.peek() {
                    if depth == 0 && (c.is_whitespace() || c == '(' || c == ')' || c == ';') {
                        break;
                    }
                    match c {
                        '{' => depth += 1,
                        '}' if depth == 0 => {
                            return Err(DslError::new(self.pos(), "unbalanced '}'"))
                        }
                        '}' => depth -= 1,
                        _ => {}
                    }
                    self.bump();
                    if !(depth > 0 && c.is_whitespace()) {
                        s.push(c);
                    }
                }
                if depth > 0 {
                    return Err(DslError::new(pos, "unclosed '{'"));
                }
                Ok(SExpr::Atom(s, pos))
            }
        }
    }
}

/// Every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, DslError> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        r.skip_blank();
        if r.chars.peek().is_none() {
            return Ok(out);
        }
        out.push(r.expr()?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_atoms_and_comments() {
        let xs = parse_all("(a (b c) ; note\n d)").unwrap();
        assert_eq!(xs.len(), 1);
        assert_eq!(xs[0].to_string(), "(a (b c) d)");
        let d = &xs[0].as_list().unwrap()[2];
        assert_eq!((d.pos().line, d.pos().col), (2, 2));
    }

    #[test]
    fn braces_group() {
        let xs = parse_all("(check { {}, {{}} })").unwrap();
        assert_eq!(xs[0].to_string(), "(check {{},{{}}})");
        let xs = parse_all("[0|0e1|0={}]").unwrap();
        assert_eq!(xs[0].as_atom(), Some("[0|0e1|0={}]"));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_all("(a\n  (b").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 3));
        assert!(parse_all(")").is_err());
        assert!(parse_all("{a").is_err());
    }
}
