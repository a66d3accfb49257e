//! Text grammar for expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! exponent := int | '-' int | '(' '-'? int ')'
//! atom   := int | ident | ('sin' | 'cos') '(' ident ')' | '(' expr ')'
//! ```
//!
//! `p/q` with two integer literals is folded into one rational constant.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::symbol::Symbol;
use super::tree::ExprTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at column {column}")]
pub struct ParseError {
    pub message: String,
    /// 1-based character column.
    pub column: usize,
}

/// Symbols that may appear in parsed text.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    by_name: HashMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: Symbol) -> bool {
        self.by_name.insert(s.name().to_string(), s).is_none()
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.by_name.get(name)
    }

    pub fn from_symbols<'a>(syms: impl IntoIterator<Item = &'a Symbol>) -> Self {
        let mut t = Self::new();
        for s in syms {
            t.insert(s.clone());
        }
        t
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), col));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else {
            return Err(ParseError {
                message: format!("unexpected character '{c}'"),
                column: col,
            });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

pub fn parse_expr(text: &str, table: &SymbolTable) -> Result<ExprTree, ParseError> {
    let mut p = Parser {
        lx: Lexer {
            toks: lex(text)?,
            pos: 0,
        },
        table,
    };
    let t = p.expr()?;
    match p.peek() {
        Tok::End => Ok(t),
        _ => Err(p.error("unexpected trailing input")),
    }
}

struct Parser<'a> {
    lx: Lexer,
    table: &'a SymbolTable,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.lx.toks[self.lx.pos].0
    }

    fn column(&self) -> usize {
        self.lx.toks[self.lx.pos].1
    }

    fn next(&mut self) -> Tok {
        let t = self.lx.toks[self.lx.pos].0.clone();
        if t != Tok::End {
            self.lx.pos += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> ParseError {
        ParseError {
            message: msg.to_string(),
            column: self.column(),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == Tok::Op(op) {
            self.lx.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{op}'")))
        }
    }

    fn expr(&mut self) -> Result<ExprTree, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = ExprTree::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = ExprTree::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprTree, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = ExprTree::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                let rhs = self.unary()?;
                lhs = match (&lhs, &rhs) {
                    (ExprTree::Num(a), ExprTree::Num(b)) if a.is_integer() && b.is_integer() => {
                        if b.numer() == &BigInt::from(0) {
                            return Err(self.error("division by zero literal"));
                        }
                        ExprTree::Num(BigRational::new(a.numer().clone(), b.numer().clone()))
                    }
                    _ => ExprTree::Div(Box::new(lhs), Box::new(rhs)),
                };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ExprTree, ParseError> {
        if self.eat('-') {
            return Ok(ExprTree::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprTree, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let e = match self.next() {
            Tok::Int(k) => i32::try_from(k).map_err(|_| self.error("exponent too large"))?,
            _ => return Err(self.error("expected integer exponent")),
        };
        if paren {
            self.expect(')')?;
        }
        Ok(ExprTree::Pow(Box::new(base), if neg { -e } else { e }))
    }

    fn atom(&mut self) -> Result<ExprTree, ParseError> {
        let col = self.column();
        match self.next() {
            Tok::Int(k) => Ok(ExprTree::Num(BigRational::from_integer(k))),
            Tok::Ident(name) if (name == "sin" || name == "cos") && *self.peek() == Tok::Op('(') => {
                self.expect('(')?;
                let arg_col = self.column();
                let arg = match self.next() {
                    Tok::Ident(a) => a,
                    _ => {
                        return Err(ParseError {
                            message: format!("{name} takes a single identifier argument"),
                            column: arg_col,
                        })
                    }
                };
                if *self.peek() != Tok::Op(')') {
                    return Err(self.error(&format!("{name} takes a single identifier argument")));
                }
                self.expect(')')?;
                let s = self.lookup(&arg, arg_col)?;
                Ok(if name == "sin" {
                    ExprTree::Sin(s)
                } else {
                    ExprTree::Cos(s)
                })
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Op('(') {
                    return Err(ParseError {
                        message: format!("unknown function '{name}'"),
                        column: col,
                    });
                }
                Ok(ExprTree::Sym(self.lookup(&name, col)?))
            }
            Tok::Op('(') => {
                let t = self.expr()?;
                self.expect(')')?;
                Ok(t)
            }
            Tok::End => Err(ParseError {
                message: "unexpected end of input".into(),
                column: col,
            }),
            Tok::Op(c) => Err(ParseError {
                message: format!("unexpected '{c}'"),
                column: col,
            }),
        }
    }

    fn lookup(&self, name: &str, column: usize) -> Result<Symbol, ParseError> {
        self.table.get(name).cloned().ok_or_else(|| ParseError {
            message: format!("unknown symbol '{name}'"),
            column,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::tree::normalize;

    fn table() -> SymbolTable {
        let mut t = SymbolTable::new();
        for n in ["x1", "x2", "x3", "x5", "x6", "u1", "u2"] {
            t.insert(Symbol::state(n));
        }
        t.insert(Symbol::parameter("Ts"));
        t.insert(Symbol::parameter("eps"));
        t
    }

    #[test]
    fn precedence() {
        let t = table();
        let e = parse_expr("-x1^2 + 2*x2/3 - (x3 - x1)", &t).unwrap();
        assert_eq!(e.to_string(), "-x1^2+2*x2/3-(x3-x1)");
        let v = normalize(&e).unwrap();
        assert_eq!(v.to_string(), "-x1^2+x1+2/3*x2-x3");
    }

    #[test]
    fn printing_round_trips() {
        let t = table();
        for s in [
            "x3 + Ts*sin(x5)*(eps*x6^2 - u1)",
            "x1*(1/2)",
            "1/2/3",
            "-(x1*x2)",
            "(-x1)^3",
            "x1^(-2)",
            "x1^-2",
            "a",
        ] {
            let Ok(tree) = parse_expr(s, &t) else {
                assert_eq!(s, "a");
                continue;
            };
            let again = parse_expr(&tree.to_string(), &t).unwrap();
            assert_eq!(tree, again, "{s}");
        }
    }

    #[test]
    fn errors() {
        let t = table();
        assert!(parse_expr("sin(x1+x2)", &t).is_err());
        assert!(parse_expr("exp(x1)", &t).is_err());
        assert!(parse_expr("x1 +", &t).is_err());
        assert!(parse_expr("x1 $ x2", &t).is_err());
        assert_eq!(parse_expr("y", &t).unwrap_err().column, 1);
        assert!(parse_expr("1/0", &t).is_err());
    }
}
