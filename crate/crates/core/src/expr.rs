//! Tiny arithmetic expressions in the radial variable `r`.
//!
//! Coercive potentials are supplied on the command line as strings like
//! `"r^2"` or `"0.5*r^2 + 1"`. The grammar is deliberately small:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' factor)?          // right-associative power
//! unary  := '-' unary | atom
//! atom   := number | 'r' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := exp | ln | sqrt | abs | sin | cos
//! ```
//!
//! Expressions are parsed once into a small AST and evaluated per node;
//! evaluation allocates nothing.

use crate::error::{Error, Result};

/// A parsed radial expression, evaluable at any `r ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialExpr {
    source: String,
    root: Node,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Func(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sin,
    Cos,
}

impl PotentialExpr {
    /// Parse `source` into an expression. Rejects anything outside the grammar.
    pub fn parse(source: &str) -> Result<Self> {
        let mut parser = Parser {
            chars: source.chars().collect(),
            pos: 0,
            source,
        };
        parser.skip_ws();
        let root = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.chars.len() {
            return Err(Error::Expr(format!(
                "trailing input at byte {} in {source:?}",
                parser.pos
            )));
        }
        Ok(PotentialExpr {
            source: source.to_string(),
            root,
        })
    }

    /// Evaluate at radius `r`.
    pub fn eval(&self, r: f64) -> f64 {
        eval_node(&self.root, r)
    }

    /// The original source text (for reports and error messages).
    pub fn source(&self) -> &str {
        &self.source
    }
}

fn eval_node(node: &Node, r: f64) -> f64 {
    match node {
        Node::Num(c) => *c,
        Node::Var => r,
        Node::Neg(a) => -eval_node(a, r),
        Node::Add(a, b) => eval_node(a, r) + eval_node(b, r),
        Node::Sub(a, b) => eval_node(a, r) - eval_node(b, r),
        Node::Mul(a, b) => eval_node(a, r) * eval_node(b, r),
        Node::Div(a, b) => eval_node(a, r) / eval_node(b, r),
        Node::Pow(a, b) => eval_node(a, r).powf(eval_node(b, r)),
        Node::Func(f, a) => {
            let x = eval_node(a, r);
            match f {
                Func::Exp => x.exp(),
                Func::Ln => x.ln(),
                Func::Sqrt => x.sqrt(),
                Func::Abs => x.abs(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    source: &'a str,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail(&self, what: &str) -> Error {
        Error::Expr(format!(
            "{what} at position {} in {:?}",
            self.pos, self.source
        ))
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Node> {
        self.skip_ws();
        if self.eat('-') {
            // Unary minus binds looser than '^': -r^2 = -(r^2).
            Ok(Node::Neg(Box::new(self.factor()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        self.skip_ws();
        if self.eat('^') {
            // Right-associative, and the exponent may carry a sign:
            // r^2^3 = r^(2^3), r^-2 = r^(-2).
            let exp = self.factor()?;
            Ok(Node::Pow(Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if !self.eat(')') {
                    return Err(self.fail("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.fail("expected a number, 'r', or '('")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == '.' {
                self.pos += 1;
            } else if (c == 'e' || c == 'E') && self.pos > start {
                // exponent part: e, e+, e- followed by digits
                let mut lookahead = self.pos + 1;
                if matches!(self.chars.get(lookahead), Some('+') | Some('-')) {
                    lookahead += 1;
                }
                if matches!(self.chars.get(lookahead), Some(d) if d.is_ascii_digit()) {
                    self.pos = lookahead;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Node::Num)
            .map_err(|_| self.fail("malformed number"))
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        match name.as_str() {
            "r" => Ok(Node::Var),
            "pi" => Ok(Node::Num(std::f64::consts::PI)),
            "exp" | "ln" | "sqrt" | "abs" | "sin" | "cos" => {
                let f = match name.as_str() {
                    "exp" => Func::Exp,
                    "ln" => Func::Ln,
                    "sqrt" => Func::Sqrt,
                    "abs" => Func::Abs,
                    "sin" => Func::Sin,
                    _ => Func::Cos,
                };
                self.skip_ws();
                if !self.eat('(') {
                    return Err(self.fail("expected '(' after function name"));
                }
                let arg = self.expr()?;
                self.skip_ws();
                if !self.eat(')') {
                    return Err(self.fail("expected ')'"));
                }
                Ok(Node::Func(f, Box::new(arg)))
            }
            _ => Err(self.fail("unknown identifier")),
        }
    }
}
