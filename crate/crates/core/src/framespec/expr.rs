//! Real expressions in the single variable `s`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 's' | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-2^2 = -4` and `2^-1 = 0.5`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Sqrt, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Nonnegative finite literal; negation is a separate node.
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn call(f: Func, e: Expr) -> Expr {
        Expr::Call(f, Box::new(e))
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var => 1,
            Expr::Neg(e) | Expr::Call(_, e) => 1 + e.depth(),
            Expr::Bin(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

/// Fully parenthesized, so printing and reparsing gives the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Var => f.write_str("s"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(&["operator", "end of input"]));
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

    fn syntax(&self, expected: &[&str]) -> Error {
        Error::Syntax { offset: self.pos, expected: expected.iter().map(|s| s.to_string()).collect() }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::negate(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat(b'^') {
            return Ok(Expr::bin(BinOp::Pow, base, self.unary()?));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        const EXPECTED: [&str; 4] = ["number", "`s`", "function call", "`(`"];
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax(&["`)`"]));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
                if self.peek() == Some(b'(') {
                    let func = Func::from_name(name).ok_or_else(|| Error::UnknownFunction(name.to_string()))?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.syntax(&["`)`"]));
                    }
                    Ok(Expr::call(func, arg))
                } else if name == "s" {
                    Ok(Expr::Var)
                } else {
                    self.pos = start;
                    Err(self.syntax(&EXPECTED))
                }
            }
            _ => Err(self.syntax(&EXPECTED)),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let from = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - from
        };
        let mut mantissa = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            mantissa += digits(self);
        }
        if mantissa == 0 {
            self.pos = start;
            return Err(self.syntax(&["digit"]));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.syntax(&["exponent digits"]));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Expr::Num(x)),
            _ => {
                self.pos = start;
                Err(self.syntax(&["finite number"]))
            }
        }
    }
}

pub fn evaluate(e: &Expr, s: f64) -> Result<f64> {
    let domain = |what: &str| Error::Domain { s, what: what.to_string() };
    let v = match e {
        Expr::Num(x) => *x,
        Expr::Var => s,
        Expr::Neg(x) => -evaluate(x, s)?,
        Expr::Bin(op, l, r) => {
            let (a, b) = (evaluate(l, s)?, evaluate(r, s)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(Error::DivisionByZero { s });
                    }
                    a / b
                }
                BinOp::Pow => {
                    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
                        if a == 0.0 && b < 0.0 {
                            return Err(Error::DivisionByZero { s });
                        }
                        a.powi(b as i32)
                    } else if a < 0.0 {
                        return Err(domain("fractional power of a negative base"));
                    } else {
                        a.powf(b)
                    }
                }
            }
        }
        Expr::Call(func, x) => {
            let a = evaluate(x, s)?;
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Abs => a.abs(),
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(domain("sqrt of a negative number"));
                    }
                    a.sqrt()
                }
            }
        }
    };
    if !v.is_finite() {
        return Err(domain("non-finite result"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(text: &str, s: f64) -> f64 {
        evaluate(&parse_expr(text).unwrap(), s).unwrap()
    }

    #[test]
    fn literal_and_structure() {
        assert_eq!(parse_expr("1").unwrap(), Expr::Num(1.0));
        let expect = Expr::bin(
            BinOp::Sub,
            Expr::bin(BinOp::Pow, Expr::Var, Expr::Num(2.0)),
            Expr::bin(BinOp::Div, Expr::Num(1.0), Expr::Num(3.0)),
        );
        assert_eq!(parse_expr("s^2 - 1/3").unwrap(), expect);
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(eval("2*s*(1-s)", 0.5), 0.5);
        assert_eq!(eval("s", 0.25), 0.25);
        assert_eq!(eval("sin(0)", 7.0), 0.0);
        assert!((eval("exp(1)", 0.0) - std::f64::consts::E).abs() <= 1e-15);
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("1+2*3^2", 0.0), 19.0);
        assert_eq!(eval("-2^2", 0.0), -4.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("2^-1", 0.0), 0.5);
        assert_eq!(eval("8/4/2", 0.0), 1.0);
        assert_eq!(eval("1-2-3", 0.0), -4.0);
        assert_eq!(eval(" 1.5e1 +\t.5 ", 0.0), 15.5);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert!(matches!(parse_expr(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expr("1 +"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse_expr("(s"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("s s"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("1 + t"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse_expr("1e"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("1e999"), Err(Error::Syntax { .. })));
        assert_eq!(parse_expr("tan(s)"), Err(Error::UnknownFunction("tan".into())));
    }

    #[test]
    fn evaluation_errors() {
        let at = |t: &str, s: f64| evaluate(&parse_expr(t).unwrap(), s);
        assert!(matches!(at("1/s", 0.0), Err(Error::DivisionByZero { .. })));
        assert!(matches!(at("s^-1", 0.0), Err(Error::DivisionByZero { .. })));
        assert!(matches!(at("sqrt(s)", -1.0), Err(Error::Domain { .. })));
        assert!(matches!(at("s^0.5", -1.0), Err(Error::Domain { .. })));
        assert!(matches!(at("exp(s)", 1000.0), Err(Error::Domain { .. })));
        assert_eq!(at("s^2", -3.0).unwrap(), 9.0);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..100.0).prop_map(Expr::Num),
            (0u32..1000, -5i32..5).prop_map(|(m, e)| Expr::Num(m as f64 * 10f64.powi(e))),
            Just(Expr::Var),
        ];
        leaf.prop_recursive(5, 64, 2, |inner| {
            let ops = prop_oneof![
                Just(BinOp::Add),
                Just(BinOp::Sub),
                Just(BinOp::Mul),
                Just(BinOp::Div),
                Just(BinOp::Pow)
            ];
            prop_oneof![
                inner.clone().prop_map(Expr::negate),
                (ops, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::bin(op, l, r)),
                (0usize..5, inner).prop_map(|(k, e)| Expr::call(Func::ALL[k], e)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(e in arb_expr()) {
            prop_assert!(e.depth() <= 6);
            let printed = e.to_string();
            let reparsed = parse_expr(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(reparsed.to_string(), printed);
        }
    }
}
