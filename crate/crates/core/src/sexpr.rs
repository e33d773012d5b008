//! Minimal S-expression reader shared by the PDDL front end and the
//! canonical axiom text parser.

use std::fmt;

use thiserror::Error;

/// 1-based line/column of a token in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{0}: unexpected ')'")]
    UnexpectedClose(Pos),
    #[error("{0}: unclosed '('")]
    Unclosed(Pos),
}

impl SyntaxError {
    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::UnexpectedClose(p) | SyntaxError::Unclosed(p) => *p,
        }
    }
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a, _) => Some(a),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// True when this is a list whose head atom equals `kw` (ASCII case-insensitive).
    pub fn is_form(&self, kw: &str) -> bool {
        match self.as_list() {
            Some([SExpr::Atom(head, _), ..]) => head.eq_ignore_ascii_case(kw),
            _ => false,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a, _) => f.write_str(a),
            SExpr::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Reads every top-level expression in `text`. `;` starts a comment that
/// runs to the end of the line.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, SyntaxError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    let mut atom = String::new();
    let mut atom_pos = Pos::default();

    fn push(stack: &mut [(Vec<SExpr>, Pos)], top: &mut Vec<SExpr>, e: SExpr) {
        match stack.last_mut() {
            Some((items, _)) => items.push(e),
            None => top.push(e),
        }
    }

    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        let delimiter = c.is_whitespace() || c == '(' || c == ')' || c == ';';
        if delimiter && !atom.is_empty() {
            push(&mut stack, &mut top, SExpr::Atom(std::mem::take(&mut atom), atom_pos));
        }
        match c {
            '(' => stack.push((Vec::new(), here)),
            ')' => match stack.pop() {
                Some((items, p)) => push(&mut stack, &mut top, SExpr::List(items, p)),
                None => return Err(SyntaxError::UnexpectedClose(here)),
            },
            ';' => {
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            c if c.is_whitespace() => {}
            c => {
                if atom.is_empty() {
                    atom_pos = here;
                }
                atom.push(c);
            }
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    if !atom.is_empty() {
        push(&mut stack, &mut top, SExpr::Atom(atom, atom_pos));
    }
    if let Some((_, p)) = stack.pop() {
        return Err(SyntaxError::Unclosed(p));
    }
    Ok(top)
}

/// Reads exactly one expression.
pub fn parse_one(text: &str) -> Result<SExpr, SyntaxError> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(SyntaxError::Unclosed(Pos { line: 1, col: 1 })),
        _ => Err(SyntaxError::UnexpectedClose(all[1].pos())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_positions() {
        let e = parse_one("(define\n  (domain car) ; comment\n  x)").unwrap();
        let items = e.as_list().unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[1].pos(), Pos { line: 2, col: 3 });
        assert_eq!(items[2].as_atom(), Some("x"));
        assert_eq!(e.to_string(), "(define (domain car) x)");
    }

    #[test]
    fn unbalanced_reports_position() {
        assert_eq!(parse_all("(a (b c)").unwrap_err(), SyntaxError::Unclosed(Pos { line: 1, col: 1 }));
        assert_eq!(
            parse_all("(a)\n  )").unwrap_err(),
            SyntaxError::UnexpectedClose(Pos { line: 2, col: 3 })
        );
    }
}
