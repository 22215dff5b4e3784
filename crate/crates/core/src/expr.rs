//! Scalar expressions in `t` and `y`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | power
//! power  := atom ("^" factor)?
//! atom   := NUMBER | "t" | "y" | IDENT "(" expr ")" | "(" expr ")"
//! ```
//!
//! `^` binds tighter than unary minus and is right associative, so `-y^2` is
//! `-(y^2)` and `2^3^2` is `2^9`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{func} of {arg} is outside its domain")]
    Domain { func: &'static str, arg: f64 },
    #[error("non-finite result")]
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    T,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn apply(self, x: f64) -> Result<f64, EvalError> {
        match self {
            Func::Exp => Ok(x.exp()),
            Func::Ln if x <= 0.0 => Err(EvalError::Domain { func: "ln", arg: x }),
            Func::Ln => Ok(x.ln()),
            Func::Sqrt if x < 0.0 => Err(EvalError::Domain {
                func: "sqrt",
                arg: x,
            }),
            Func::Sqrt => Ok(x.sqrt()),
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

use Expr::*;

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse(text)
    }

    pub fn eval(&self, t: f64, y: f64) -> Result<f64, EvalError> {
        let v = match self {
            Num(v) => *v,
            Var(Var::T) => t,
            Var(Var::Y) => y,
            Neg(a) => -a.eval(t, y)?,
            Call(f, a) => f.apply(a.eval(t, y)?)?,
            Bin(op, a, b) => {
                let (a, b) = (a.eval(t, y)?, b.eval(t, y)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return Err(EvalError::DivisionByZero),
                    BinOp::Div => a / b,
                    BinOp::Pow if a == 0.0 && b < 0.0 => return Err(EvalError::DivisionByZero),
                    BinOp::Pow if a < 0.0 && b.fract() != 0.0 => {
                        return Err(EvalError::Domain {
                            func: "pow",
                            arg: a,
                        })
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Num(_) => false,
            Var(v) => *v == var,
            Neg(a) | Call(_, a) => a.depends_on(var),
            Bin(_, a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// Symbolic partial derivative with respect to `y`.
    pub fn d_dy(&self) -> Expr {
        self.derivative(Var::Y)
    }

    pub fn derivative(&self, var: Var) -> Expr {
        if !self.depends_on(var) {
            return Num(0.0);
        }
        match self {
            Num(_) => Num(0.0),
            Var(v) => Num(if *v == var { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.derivative(var)),
            Bin(BinOp::Add, a, b) => add(a.derivative(var), b.derivative(var)),
            Bin(BinOp::Sub, a, b) => sub(a.derivative(var), b.derivative(var)),
            Bin(BinOp::Mul, a, b) => add(
                mul(a.derivative(var), (**b).clone()),
                mul((**a).clone(), b.derivative(var)),
            ),
            Bin(BinOp::Div, a, b) => {
                // (a'b - ab') / b^2
                let num = sub(
                    mul(a.derivative(var), (**b).clone()),
                    mul((**a).clone(), b.derivative(var)),
                );
                div(num, pow((**b).clone(), Num(2.0)))
            }
            Bin(BinOp::Pow, a, b) => {
                if !b.depends_on(var) {
                    // b a^(b-1) a'
                    let reduced = pow((**a).clone(), sub((**b).clone(), Num(1.0)));
                    mul(mul((**b).clone(), reduced), a.derivative(var))
                } else {
                    // a^b (b' ln a + b a'/a)
                    let inner = add(
                        mul(b.derivative(var), call(Func::Ln, (**a).clone())),
                        div(mul((**b).clone(), a.derivative(var)), (**a).clone()),
                    );
                    mul(self.clone(), inner)
                }
            }
            Call(f, a) => {
                let da = a.derivative(var);
                let outer = match f {
                    Func::Exp => self.clone(),
                    Func::Ln => div(Num(1.0), (**a).clone()),
                    Func::Sqrt => div(Num(0.5), self.clone()),
                    Func::Sin => call(Func::Cos, (**a).clone()),
                    Func::Cos => neg(call(Func::Sin, (**a).clone())),
                };
                mul(outer, da)
            }
        }
    }
}

// Smart constructors with constant folding and 0/1 identities.

fn num_of(e: &Expr) -> Option<f64> {
    match e {
        Num(v) => Some(*v),
        _ => None,
    }
}

fn fold(e: Expr) -> Expr {
    match e.eval(0.0, 0.0) {
        Ok(v) if !e.depends_on(Var::T) && !e.depends_on(Var::Y) => Num(v),
        _ => e,
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Num(v) => Num(-v),
        Neg(inner) => *inner,
        other => Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (num_of(&a), num_of(&b)) {
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => fold(Bin(BinOp::Add, Box::new(a), Box::new(b))),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (num_of(&a), num_of(&b)) {
        (_, Some(0.0)) => a,
        (Some(0.0), _) => neg(b),
        _ => fold(Bin(BinOp::Sub, Box::new(a), Box::new(b))),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (num_of(&a), num_of(&b)) {
        (Some(0.0), _) | (_, Some(0.0)) => Num(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        _ => fold(Bin(BinOp::Mul, Box::new(a), Box::new(b))),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (num_of(&a), num_of(&b)) {
        (Some(0.0), _) => Num(0.0),
        (_, Some(1.0)) => a,
        _ => fold(Bin(BinOp::Div, Box::new(a), Box::new(b))),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match num_of(&b) {
        Some(0.0) => Num(1.0),
        Some(1.0) => a,
        _ => fold(Bin(BinOp::Pow, Box::new(a), Box::new(b))),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    fold(Call(f, Box::new(a)))
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Expr, ParseError> {
        parse(s)
    }
}

/// Fully parenthesized rendering that reparses to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{:?})", -v),
            Num(v) => write!(f, "{v:?}"),
            Var(Var::T) => f.write_str("t"),
            Var(Var::Y) => f.write_str("y"),
            Neg(a) => write!(f, "(-{a})"),
            Call(func, a) => write!(f, "{}({a})", func.name()),
            Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
        }
    }
}

/// Parses an expression per the module grammar.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.peek().is_none() {
        return Err(p.syntax("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(&format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.factor()?;
            return Ok(Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.syntax(&format!("unexpected '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.syntax("malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<f64>()
            .map(Num)
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number '{text}'"),
            })
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        if self.peek() == Some(b'(') {
            let func = Func::lookup(name).ok_or_else(|| ParseError::UnknownFunction {
                name: name.to_string(),
                offset: start,
            })?;
            self.pos += 1;
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.syntax("expected ')'"));
            }
            return Ok(Call(func, Box::new(arg)));
        }
        match name {
            "t" => Ok(Var(Var::T)),
            "y" => Ok(Var(Var::Y)),
            _ => Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn parses_power() {
        assert_eq!(p("y^5"), Bin(BinOp::Pow, b(Var(Var::Y)), b(Num(5.0))));
    }

    #[test]
    fn parses_membrane_nonlinearity() {
        let expected = Bin(
            BinOp::Sub,
            b(Bin(
                BinOp::Div,
                b(Num(1.0)),
                b(Bin(
                    BinOp::Mul,
                    b(Num(8.0)),
                    b(Bin(BinOp::Pow, b(Var(Var::Y)), b(Num(2.0)))),
                )),
            )),
            b(Bin(BinOp::Div, b(Num(1.0)), b(Num(2.0)))),
        );
        assert_eq!(p("1/(8*y^2) - 1/2"), expected);
    }

    #[test]
    fn thermal_explosion_exact_at_zero() {
        let e = p("2*ln((4-2*sqrt(2))/((3-2*sqrt(2))*t^2+1))");
        let v = e.eval(0.0, 0.0).unwrap();
        assert!((v - 0.316_694_368).abs() < 1e-9, "{v}");
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("-y^2").eval(0.0, 3.0).unwrap(), -9.0);
        assert_eq!(p("2^3^2").eval(0.0, 0.0).unwrap(), 512.0);
        assert_eq!(p("2^-1").eval(0.0, 0.0).unwrap(), 0.5);
        assert_eq!(p("1 - 2 - 3").eval(0.0, 0.0).unwrap(), -4.0);
        assert_eq!(p("8 / 4 / 2").eval(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(p("2 * (t + 1)").eval(2.0, 0.0).unwrap(), 6.0);
        assert_eq!(p(" 1.5e2 + .5 ").eval(0.0, 0.0).unwrap(), 150.5);
        assert_eq!(p("log(1)").eval(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p("y^5").eval(0.3, 1.0).unwrap(), 1.0);
        assert_eq!(p("exp(-y)").eval(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(p("1/(8*y^2)-1/2").eval(0.0, 1.0).unwrap(), -0.375);
    }

    #[test]
    fn eval_errors() {
        assert_eq!(p("1/y").eval(0.0, 0.0), Err(EvalError::DivisionByZero));
        assert!(matches!(
            p("ln(y)").eval(0.0, -1.0),
            Err(EvalError::Domain { .. })
        ));
        assert!(matches!(
            p("sqrt(t)").eval(-1.0, 0.0),
            Err(EvalError::Domain { .. })
        ));
        assert_eq!(p("exp(y)").eval(0.0, 1000.0), Err(EvalError::NonFinite));
        assert!(p("y^0.5").eval(0.0, -2.0).is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse("("),
            Err(ParseError::Syntax { offset: 1, .. })
        ));
        assert!(matches!(parse(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("y +"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("1 2"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse("x + 1"),
            Err(ParseError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(
            parse("2*tan(y)"),
            Err(ParseError::UnknownFunction { offset: 2, .. })
        ));
        assert!(matches!(parse("1e"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn derivative_examples() {
        let d = p("y^5").d_dy();
        for y in [0.3, 1.0, 1.7] {
            assert!((d.eval(0.0, y).unwrap() - 5.0 * y.powi(4)).abs() < 1e-12);
        }
        assert_eq!(p("exp(y)").d_dy(), p("exp(y)"));
        let d = p("1/(8*y^2)-1/2").d_dy();
        assert!((d.eval(0.0, 1.0).unwrap() + 0.25).abs() < 1e-15);
        assert_eq!(p("6").d_dy(), Num(0.0));
        assert_eq!(p("t^2 + 3").d_dy(), Num(0.0));
    }

    fn central(e: &Expr, t: f64, y: f64) -> f64 {
        let h = 1e-6;
        (e.eval(t, y + h).unwrap() - e.eval(t, y - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn general_power_rule() {
        let e = p("y^y + t^(2*y) + sin(y)*cos(t*y) + sqrt(y+t)");
        let d = e.d_dy();
        for (t, y) in [(0.2, 0.5), (0.7, 1.3), (0.9, 1.9)] {
            let fd = central(&e, t, y);
            let v = d.eval(t, y).unwrap();
            assert!((v - fd).abs() <= 1e-6 * fd.abs().max(1.0), "{v} vs {fd}");
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..10.0).prop_map(Num),
            Just(Var(Var::T)),
            Just(Var(Var::Y)),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Neg(Box::new(a))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Bin(
                    BinOp::Add,
                    Box::new(a),
                    Box::new(b)
                )),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Bin(
                    BinOp::Sub,
                    Box::new(a),
                    Box::new(b)
                )),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Bin(
                    BinOp::Mul,
                    Box::new(a),
                    Box::new(b)
                )),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Bin(
                    BinOp::Div,
                    Box::new(a),
                    Box::new(b)
                )),
                (inner.clone(), 0u8..4).prop_map(|(a, n)| Bin(
                    BinOp::Pow,
                    Box::new(a),
                    Box::new(Num(n as f64))
                )),
                inner.clone().prop_map(|a| Call(Func::Sin, Box::new(a))),
                inner.prop_map(|a| Call(Func::Exp, Box::new(Call(Func::Cos, Box::new(a))))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr(), t in 0.01f64..1.0, y in 0.1f64..2.0) {
            let text = e.to_string();
            let back = parse(&text).unwrap();
            match (e.eval(t, y), back.eval(t, y)) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0)),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{text}: {a:?} vs {b:?}"),
            }
        }
    }
}
