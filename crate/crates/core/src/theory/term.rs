use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// A term over a signature: a projection or an operation applied to subterms.
///
/// Variables are numbered from zero and print as `v0`, `v1`, ...
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(index: usize) -> Self {
        Term::Var(index)
    }

    pub fn app(op: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(op.into(), args)
    }

    pub fn constant(op: impl Into<String>) -> Self {
        Term::App(op.into(), Vec::new())
    }

    /// Nesting depth; variables have depth 0 and constants depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Term::Var(i) => Some(*i),
            Term::App(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    /// The group-style Maltsev term `v0 - v1 + v2` written with a binary
    /// addition and a unary negation.
    pub fn group_maltsev(add: &str, neg: &str) -> Self {
        Term::app(
            add,
            alloc::vec![
                Term::app(add, alloc::vec![Term::var(0), Term::app(neg, alloc::vec![Term::var(1)])]),
                Term::var(2),
            ],
        )
    }

    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        Parser::new(text).parse_document()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "v{i}"),
            Term::App(op, args) => {
                write!(f, "({op}")?;
                for arg in args {
                    write!(f, " {arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Term {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Term::parse(s)
    }
}

/// A malformed s-expression; `position` is a byte offset into the input.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {position}: {message}")]
pub struct SyntaxError {
    pub position: usize,
    pub message: String,
}

/// Parses `v<digits>` into a variable index.
pub(crate) fn variable_index(atom: &str) -> Option<usize> {
    let digits = atom.strip_prefix('v')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub(crate) fn is_atom_char(c: char) -> bool {
    !c.is_whitespace() && c != '(' && c != ')'
}

enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text, pos: 0 }
    }

    fn error(&self, position: usize, message: impl ToString) -> SyntaxError {
        SyntaxError { position, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    /// Returns the next token and its starting offset.
    fn next(&mut self) -> Option<(usize, Token<'a>)> {
        self.skip_ws();
        let start = self.pos;
        let c = self.text[start..].chars().next()?;
        let token = match c {
            '(' => {
                self.pos += 1;
                Token::Open
            }
            ')' => {
                self.pos += 1;
                Token::Close
            }
            _ => {
                let len = self.text[start..].find(|c: char| !is_atom_char(c)).unwrap_or(self.text.len() - start);
                self.pos += len;
                Token::Atom(&self.text[start..start + len])
            }
        };
        Some((start, token))
    }

    fn parse_document(mut self) -> Result<Term, SyntaxError> {
        let term = self.parse_term()?;
        if let Some((at, _)) = self.next() {
            return Err(self.error(at, "trailing input after term"));
        }
        Ok(term)
    }

    fn parse_term(&mut self) -> Result<Term, SyntaxError> {
        match self.next() {
            None => Err(self.error(self.text.len(), "unexpected end of input")),
            Some((at, Token::Close)) => Err(self.error(at, "unexpected ')'")),
            Some((_, Token::Atom(atom))) => Ok(match variable_index(atom) {
                Some(i) => Term::Var(i),
                None => Term::constant(atom),
            }),
            Some((_, Token::Open)) => {
                let op = match self.next() {
                    Some((at, Token::Atom(atom))) => {
                        if variable_index(atom).is_some() {
                            return Err(self.error(at, "variable in operator position"));
                        }
                        atom
                    }
                    Some((at, _)) => return Err(self.error(at, "expected operation name")),
                    None => return Err(self.error(self.text.len(), "unexpected end of input")),
                };
                let mut args = Vec::new();
                loop {
                    self.skip_ws();
                    match self.text[self.pos..].chars().next() {
                        None => return Err(self.error(self.text.len(), "unclosed '('")),
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => args.push(self.parse_term()?),
                    }
                }
                Ok(Term::App(op.into(), args))
            }
        }
    }
}
