//! Scalar-field expressions over coordinates `x1..xm`.
//!
//! Grammar: numeric literals, variables `x1..xm`, binary `+ - * /`, unary
//! negation, integer powers `base^n` (optionally `^-n`), the functions
//! `sin cos exp log sqrt`, and parentheses. Trees are immutable after parse
//! and print back to a string that reparses to the identical tree.

use crate::jet::{EvalError, Jet3};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based variable index; `x1` is `Var(0)`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    UnknownIdentifier(String),
    VarIndexOutOfRange { index: usize, dim: usize },
    BadNumber(String),
    BadExponent,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token '{t}'"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier '{s}'"),
            ParseErrorKind::VarIndexOutOfRange { index, dim } => {
                write!(
                    f,
                    "variable index out of range: x{index} with dimension {dim}"
                )
            }
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number '{s}'"),
            ParseErrorKind::BadExponent => write!(f, "power exponent must be an integer"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos] as char;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while self.pos < self.src.len()
                    && matches!(self.src[self.pos], b'0'..=b'9' | b'.' | b'e' | b'E')
                {
                    // accept a sign only right after an exponent marker
                    self.pos += 1;
                    if self.pos < self.src.len()
                        && matches!(self.src[self.pos], b'+' | b'-')
                        && matches!(self.src[self.pos - 1], b'e' | b'E')
                    {
                        self.pos += 1;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::BadNumber(text.to_string()),
                })?;
                return Ok(Some((Tok::Num(v), start)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                return Ok(Some((Tok::Ident(text.to_string()), start)));
            }
            other => {
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::UnexpectedChar(other),
                })
            }
        };
        self.pos += 1;
        Ok(Some((tok, start)))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            Some((t, offset)) => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnexpectedToken(format!("{t:?}")),
            }),
            None => Err(ParseError {
                offset: self.end,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some((Tok::Plus, _)) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some((Tok::Minus, _)) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some((Tok::Star, _)) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some((Tok::Slash, _)) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some((Tok::Minus, _)) = self.peek() {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while let Some((Tok::Caret, _)) = self.peek() {
            self.pos += 1;
            let neg = if let Some((Tok::Minus, _)) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = match self.bump() {
                Some((Tok::Num(v), offset)) => {
                    if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::BadExponent,
                        });
                    }
                    v as i32
                }
                Some((_, offset)) => {
                    return Err(ParseError {
                        offset,
                        kind: ParseErrorKind::BadExponent,
                    })
                }
                None => {
                    return Err(ParseError {
                        offset: self.end,
                        kind: ParseErrorKind::UnexpectedEnd,
                    })
                }
            };
            base = Expr::Pow(Box::new(base), if neg { -n } else { n });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some((Tok::Num(v), _)) => Ok(Expr::Num(v)),
            Some((Tok::Ident(name), offset)) => {
                if let Some(rest) = name.strip_prefix('x') {
                    if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                        let index: usize = rest.parse().map_err(|_| ParseError {
                            offset,
                            kind: ParseErrorKind::UnknownIdentifier(name.clone()),
                        })?;
                        if index == 0 || index > self.dim {
                            return Err(ParseError {
                                offset,
                                kind: ParseErrorKind::VarIndexOutOfRange {
                                    index,
                                    dim: self.dim,
                                },
                            });
                        }
                        return Ok(Expr::Var(index - 1));
                    }
                }
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::Func(func, Box::new(arg)));
                }
                Err(ParseError {
                    offset,
                    kind: ParseErrorKind::UnknownIdentifier(name),
                })
            }
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some((t, offset)) => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnexpectedToken(format!("{t:?}")),
            }),
            None => Err(ParseError {
                offset: self.end,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
        }
    }
}

/// Parse `text` as a scalar field on `x1..x{dimension}`.
pub fn parse_expr(text: &str, dimension: usize) -> Result<Expr, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next()? {
        toks.push(t);
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        dim: dimension,
        end: text.len(),
    };
    let e = parser.expr()?;
    if let Some((t, offset)) = parser.peek().cloned() {
        return Err(ParseError {
            offset,
            kind: ParseErrorKind::UnexpectedToken(format!("{t:?}")),
        });
    }
    Ok(e)
}

impl Expr {
    /// Convenience constructor that keeps literals nonnegative, so that
    /// programmatic trees print/parse to the same shape the parser builds.
    pub fn num(v: f64) -> Expr {
        if v < 0.0 {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    /// 1-based variable, matching the `x1..xm` naming.
    pub fn var(index_1based: usize) -> Expr {
        Expr::Var(index_1based - 1)
    }

    pub fn depends_on(&self, var_0based: usize) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(i) => *i == var_0based,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.depends_on(var_0based),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on(var_0based) || b.depends_on(var_0based)
            }
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, None) => x,
                    (None, y) => y,
                }
            }
        }
    }

    /// Evaluate as an order-3 jet at `p` (one coordinate per dimension).
    pub fn eval_jet(&self, p: &[f64]) -> Result<Jet3, EvalError> {
        let dim = p.len();
        self.eval_inner(p, dim)
    }

    fn eval_inner(&self, p: &[f64], dim: usize) -> Result<Jet3, EvalError> {
        match self {
            Expr::Num(v) => Ok(Jet3::constant(dim, *v)),
            Expr::Var(i) => {
                if *i >= dim {
                    return Err(EvalError::DimMismatch {
                        expected: *i + 1,
                        got: dim,
                    });
                }
                Ok(Jet3::variable(dim, *i, p[*i]))
            }
            Expr::Neg(a) => Ok(-&a.eval_inner(p, dim)?),
            Expr::Add(a, b) => Ok(&a.eval_inner(p, dim)? + &b.eval_inner(p, dim)?),
            Expr::Sub(a, b) => Ok(&a.eval_inner(p, dim)? - &b.eval_inner(p, dim)?),
            Expr::Mul(a, b) => Ok(&a.eval_inner(p, dim)? * &b.eval_inner(p, dim)?),
            Expr::Div(a, b) => a
                .eval_inner(p, dim)?
                .div(&b.eval_inner(p, dim)?)
                .map_err(|e| self.domain(e.op)),
            Expr::Pow(a, n) => a
                .eval_inner(p, dim)?
                .powi(*n)
                .map_err(|e| self.domain(e.op)),
            Expr::Func(func, a) => {
                let arg = a.eval_inner(p, dim)?;
                match func {
                    Func::Sin => Ok(arg.sin()),
                    Func::Cos => Ok(arg.cos()),
                    Func::Exp => Ok(arg.exp()),
                    Func::Log => arg.ln().map_err(|e| self.domain(e.op)),
                    Func::Sqrt => arg.sqrt().map_err(|e| self.domain(e.op)),
                }
            }
        }
    }

    fn domain(&self, op: &'static str) -> EvalError {
        EvalError::Domain {
            op,
            subexpr: self.to_string(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Func(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)
            }
            Expr::Pow(a, n) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^{n}")
            }
            Expr::Func(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_simple_sum() {
        let e = parse_expr("1 + x1*x2", 3).unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Num(1.0)),
                Box::new(Expr::Mul(Box::new(Expr::Var(0)), Box::new(Expr::Var(1)))),
            )
        );
    }

    #[test]
    fn variable_out_of_range() {
        let err = parse_expr("x4", 3).unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::VarIndexOutOfRange { index: 4, dim: 3 }
        );
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn evaluates_power_and_sin() {
        let e = parse_expr("2*(x3^2) - sin(x2)", 3).unwrap();
        let j = e.eval_jet(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(j.value(), 2.0);
    }

    #[test]
    fn unknown_identifier_with_offset() {
        let err = parse_expr("1 + tan(x1)", 3).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("tan".into()));
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn negative_exponent_parses() {
        let e = parse_expr("x1^-2", 2).unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Var(0)), -2));
        let j = e.eval_jet(&[2.0, 0.0]).unwrap();
        assert!((j.value() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn division_by_zero_cites_subexpression() {
        let e = parse_expr("1/(x1 - 1)", 2).unwrap();
        let err = e.eval_jet(&[1.0, 0.0]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("division"), "{msg}");
        assert!(msg.contains("x1 - 1"), "{msg}");
    }

    #[test]
    fn unary_minus_binds_tighter_than_mul_chain() {
        // -a*b parses as (-a)*b under this grammar
        let e = parse_expr("-x1*x2", 2).unwrap();
        assert_eq!(
            e,
            Expr::Mul(
                Box::new(Expr::Neg(Box::new(Expr::Var(0)))),
                Box::new(Expr::Var(1)),
            )
        );
    }

    #[test]
    fn jet_partials_match_finite_differences() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let dim = 3;
        // random polynomial: sum of monomials c * x^a x^b
        let random_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut e = Expr::num(rng.gen_range(-1.0..1.0));
            for _ in 0..4 {
                let mut term = Expr::num(rng.gen_range(-1.0..1.0));
                for _ in 0..rng.gen_range(1..=3usize) {
                    let v = rng.gen_range(0..dim);
                    term = Expr::Mul(Box::new(term), Box::new(Expr::Var(v)));
                }
                e = Expr::Add(Box::new(e), Box::new(term));
            }
            e
        };
        // central difference with one Richardson level
        let d1 = |f: &dyn Fn(&[f64]) -> f64, p: &[f64], i: usize| {
            let h = 1e-5;
            let shift = |delta: f64| {
                let mut q = p.to_vec();
                q[i] += delta;
                f(&q)
            };
            let dh = (shift(h) - shift(-h)) / (2.0 * h);
            let dh2 = (shift(h / 2.0) - shift(-h / 2.0)) / h;
            (4.0 * dh2 - dh) / 3.0
        };
        for _ in 0..50 {
            let e = random_poly(&mut rng);
            let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let jet = e.eval_jet(&p).unwrap();
            let eval = |q: &[f64]| e.eval_jet(q).unwrap().value();
            let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1.0);
            for i in 0..dim {
                assert!(rel(jet.d1(i), d1(&eval, &p, i)) < 1e-6);
                for j in 0..dim {
                    let di = |q: &[f64]| e.eval_jet(q).unwrap().d1(i);
                    assert!(rel(jet.d2(i, j), d1(&di, &p, j)) < 1e-6);
                }
            }
        }
    }

    fn arb_expr(dim: usize) -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..10.0).prop_map(Expr::num),
            (0..dim).prop_map(Expr::Var),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), 0..4i32).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
                inner
                    .clone()
                    .prop_map(|a| Expr::Func(Func::Sin, Box::new(a))),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn print_parse_roundtrip(e in arb_expr(3)) {
            let text = e.to_string();
            let back = parse_expr(&text, 3).unwrap();
            prop_assert_eq!(back, e);
        }
    }
}
