//! Expression language for integrands and gauges.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ['-'] atom ['^' ['-'] int]
//! atom   := number | 'x' | 'eps' | 'sqrt2' | name '(' args ')' | '(' expr ')'
//! ```
//!
//! Functions: `sqrt(e)`, `recip(e)`, `builtin(name)` and `piecewise(c, a, b)`,
//! which is `a` where `c < 0` and `b` elsewhere. `eps` is accepted only where
//! the caller allows it (gauge moduli).

use std::fmt;

use gaugeint::gauge::positive_lower_bound;
use gaugeint::{Builtin, Error, Gauge, GaugeFn, Rational, RealFn, RealFunction, Tag};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

const FUNCTIONS: [&str; 4] = ["sqrt", "recip", "builtin", "piecewise"];
const BUILTINS: [&str; 4] = ["sqrt_recip", "dirichlet", "kappa", "recip"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    X,
    Eps,
    Num(Rational),
    Sqrt2,
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sqrt(Box<Expr>),
    Recip(Box<Expr>),
    Builtin(Builtin),
    Piecewise(Box<Expr>, Box<Expr>, Box<Expr>),
}

/// Parse `text`; `allow_eps` admits the variable `eps`.
pub fn parse_expr(text: &str, allow_eps: bool) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text, pos: 0, allow_eps };
    p.skip_ws();
    if p.pos == text.len() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error(format!("unexpected {:?}", p.rest().chars().next().unwrap())));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    allow_eps: bool,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.skip_ws();
            let found = match self.rest().chars().next() {
                Some(f) => format!("{f:?}"),
                None => "end of input".into(),
            };
            Err(self.error(format!("expected {c:?}, found {found}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                Op::Add
            } else if self.eat('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat('*') {
                Op::Mul
            } else if self.eat('/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.factor()?));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let neg = self.eat('-');
        let mut e = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            let sign = if self.eat('-') { -1 } else { 1 };
            self.skip_ws();
            let digits = self.rest().len() - self.rest().trim_start_matches(|c: char| c.is_ascii_digit()).len();
            if digits == 0 {
                return Err(self.error("expected an integer exponent"));
            }
            let n: i32 = self.rest()[..digits]
                .parse()
                .map_err(|_| ParseError { offset: start, message: "exponent out of range".into() })?;
            self.pos += digits;
            e = Expr::Pow(Box::new(e), sign * n);
        }
        Ok(if neg { Expr::Neg(Box::new(e)) } else { e })
    }

    fn ident(&mut self) -> &str {
        let r = self.rest();
        let n = r.len() - r.trim_start_matches(|c: char| c.is_ascii_alphanumeric() || c == '_').len();
        let s = &self.src[self.pos..self.pos + n];
        self.pos += n;
        s
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.rest().chars().next() else {
            return Err(self.error("unexpected end of input"));
        };
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if !(c.is_ascii_alphabetic() || c == '_') {
            return Err(self.error(format!("unexpected {c:?}")));
        }
        let name = self.ident().to_string();
        match name.as_str() {
            "x" => return Ok(Expr::X),
            "sqrt2" => return Ok(Expr::Sqrt2),
            "eps" if self.allow_eps => return Ok(Expr::Eps),
            _ => {}
        }
        if !FUNCTIONS.contains(&name.as_str()) {
            let mut known = vec!["x", "sqrt2"];
            if self.allow_eps {
                known.push("eps");
            }
            known.extend(FUNCTIONS);
            return Err(ParseError {
                offset: start,
                message: format!("unknown identifier {name:?} (known: {})", known.join(", ")),
            });
        }
        self.expect('(')?;
        let e = match name.as_str() {
            "sqrt" => Expr::Sqrt(Box::new(self.expr()?)),
            "recip" => Expr::Recip(Box::new(self.expr()?)),
            "builtin" => {
                self.skip_ws();
                let at = self.pos;
                let b = self.ident().to_string();
                if !BUILTINS.contains(&b.as_str()) {
                    return Err(ParseError {
                        offset: at,
                        message: format!("unknown builtin {b:?} (known: {})", BUILTINS.join(", ")),
                    });
                }
                Expr::Builtin(Builtin::by_name(&b).expect("listed builtin"))
            }
            _ => {
                let c = self.expr()?;
                self.expect(',')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                Expr::Piecewise(Box::new(c), Box::new(a), Box::new(b))
            }
        };
        self.expect(')')?;
        Ok(e)
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        // Exponent part, only when followed by digits.
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        let q: Rational = text
            .parse()
            .map_err(|_| ParseError { offset: start, message: format!("malformed number {text:?}") })?;
        self.pos = end;
        Ok(Expr::Num(q))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::X => write!(f, "x"),
            Expr::Eps => write!(f, "eps"),
            Expr::Num(q) => write!(f, "{q}"),
            Expr::Sqrt2 => write!(f, "sqrt2"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    Op::Add => "+",
                    Op::Sub => "-",
                    Op::Mul => "*",
                    Op::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Pow(e, n) => write!(f, "({e})^{n}"),
            Expr::Sqrt(e) => write!(f, "sqrt({e})"),
            Expr::Recip(e) => write!(f, "recip({e})"),
            Expr::Builtin(b) => write!(f, "builtin({})", b.name()),
            Expr::Piecewise(c, a, b) => write!(f, "piecewise({c}, {a}, {b})"),
        }
    }
}

fn undefined(t: &Tag, reason: &str) -> Error {
    Error::Undefined { tag: t.clone(), reason: reason.into() }
}

/// The point of evaluation: the exact tag, its float value and `eps`.
struct Env<'a> {
    tag: &'a Tag,
    x: f64,
    eps: Option<&'a Rational>,
}

impl Expr {
    /// `true` when the value can be computed exactly in ℚ(√2).
    pub fn is_exact(&self) -> bool {
        match self {
            Expr::X | Expr::Eps | Expr::Num(_) | Expr::Sqrt2 => true,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Recip(e) => e.is_exact(),
            Expr::Bin(_, a, b) => a.is_exact() && b.is_exact(),
            Expr::Sqrt(_) | Expr::Builtin(_) => false,
            Expr::Piecewise(c, a, b) => c.is_exact() && a.is_exact() && b.is_exact(),
        }
    }

    /// `true` when neither `x` nor `eps` occurs.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::X | Expr::Eps | Expr::Builtin(_) => false,
            Expr::Num(_) | Expr::Sqrt2 => true,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Recip(e) | Expr::Sqrt(e) => e.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
            Expr::Piecewise(c, a, b) => c.is_constant() && a.is_constant() && b.is_constant(),
        }
    }

    /// `true` when the value depends only on the real number `x`, so a
    /// binary64 argument suffices.
    fn is_plain(&self) -> bool {
        match self {
            Expr::X | Expr::Eps | Expr::Num(_) | Expr::Sqrt2 => true,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Recip(e) | Expr::Sqrt(e) => e.is_plain(),
            Expr::Bin(_, a, b) => a.is_plain() && b.is_plain(),
            Expr::Builtin(b) => !matches!(b, Builtin::Dirichlet | Builtin::Kappa),
            Expr::Piecewise(..) => false,
        }
    }

    /// Exact value at `x`; only for [`Expr::is_exact`] expressions.
    pub fn eval_exact(&self, x: &Tag, eps: Option<&Rational>) -> gaugeint::Result<Tag> {
        Ok(match self {
            Expr::X => x.clone(),
            Expr::Eps => Tag::rational(eps.cloned().unwrap_or_else(Rational::zero)),
            Expr::Num(q) => Tag::rational(q.clone()),
            Expr::Sqrt2 => Tag::sqrt2(),
            Expr::Neg(e) => -e.eval_exact(x, eps)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval_exact(x, eps)?, b.eval_exact(x, eps)?);
                match op {
                    Op::Add => &a + &b,
                    Op::Sub => &a - &b,
                    Op::Mul => &a * &b,
                    Op::Div => &a * &b.recip().ok_or_else(|| undefined(x, "division by zero"))?,
                }
            }
            Expr::Pow(e, n) => {
                let base = e.eval_exact(x, eps)?;
                let base = if *n < 0 { base.recip().ok_or_else(|| undefined(x, "zero to a negative power"))? } else { base };
                let mut acc = Tag::int(1);
                for _ in 0..n.unsigned_abs() {
                    acc = &acc * &base;
                }
                acc
            }
            Expr::Recip(e) => e.eval_exact(x, eps)?.recip().ok_or_else(|| undefined(x, "recip of zero"))?,
            Expr::Piecewise(c, a, b) => {
                if c.eval_exact(x, eps)?.signum() < 0 {
                    a.eval_exact(x, eps)?
                } else {
                    b.eval_exact(x, eps)?
                }
            }
            Expr::Sqrt(_) | Expr::Builtin(_) => {
                return Err(Error::Precondition(format!("{self} has no exact value")));
            }
        })
    }

    fn eval_in(&self, env: &Env) -> gaugeint::Result<f64> {
        Ok(match self {
            Expr::X => env.x,
            Expr::Eps => env.eps.map_or(0.0, Rational::to_f64),
            Expr::Num(q) => q.to_f64(),
            Expr::Sqrt2 => std::f64::consts::SQRT_2,
            Expr::Neg(e) => -e.eval_in(env)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval_in(env)?, b.eval_in(env)?);
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div if b == 0.0 => return Err(undefined(env.tag, "division by zero")),
                    Op::Div => a / b,
                }
            }
            Expr::Pow(e, n) => {
                let v = e.eval_in(env)?;
                if v == 0.0 && *n < 0 {
                    return Err(undefined(env.tag, "zero to a negative power"));
                }
                v.powi(*n)
            }
            Expr::Sqrt(e) => {
                let v = e.eval_in(env)?;
                if v < 0.0 {
                    return Err(undefined(env.tag, "sqrt of a negative number"));
                }
                v.sqrt()
            }
            Expr::Recip(e) => {
                let v = e.eval_in(env)?;
                if v == 0.0 {
                    return Err(undefined(env.tag, "recip of zero"));
                }
                1.0 / v
            }
            Expr::Builtin(b) => b.function().eval(env.tag)?,
            Expr::Piecewise(c, a, b) => {
                let neg = if c.is_exact() {
                    c.eval_exact(env.tag, env.eps)?.signum() < 0
                } else {
                    c.eval_in(env)? < 0.0
                };
                if neg {
                    a.eval_in(env)?
                } else {
                    b.eval_in(env)?
                }
            }
        })
    }

    /// Binary64 value at the exact tag `x`.
    pub fn eval(&self, x: &Tag, eps: Option<&Rational>) -> gaugeint::Result<f64> {
        self.eval_in(&Env { tag: x, x: x.to_f64(), eps })
    }

    /// The integrand `x ↦ self(x)`.
    pub fn to_function(&self) -> RealFn {
        let fast = self.is_plain();
        RealFn::new(self.to_string(), ExprFn(self.clone(), fast), fast)
    }

    /// The gauge `x ↦ self(x)` (with `eps` bound when given).
    ///
    /// Exact expressions yield exact radii. Otherwise the float value is
    /// shrunk by a relative `1e-9` before rounding to a dyadic, which absorbs
    /// the rounding error of well-conditioned expressions.
    pub fn to_gauge(&self, eps: Option<&Rational>) -> Gauge {
        let name = match eps {
            Some(e) => format!("{self} [eps = {e}]"),
            None => self.to_string(),
        };
        Gauge::new(name, ExprGauge { expr: self.clone(), eps: eps.cloned(), exact: self.is_exact() })
    }
}

struct ExprFn(Expr, bool);

impl RealFunction for ExprFn {
    fn eval(&self, t: &Tag) -> gaugeint::Result<f64> {
        self.0.eval(t, None)
    }

    fn eval_f64(&self, x: f64) -> Option<f64> {
        if !self.1 {
            return None;
        }
        self.0.eval_in(&Env { tag: &Tag::zero(), x, eps: None }).ok()
    }
}

struct ExprGauge {
    expr: Expr,
    eps: Option<Rational>,
    exact: bool,
}

impl GaugeFn for ExprGauge {
    fn radius(&self, t: &Tag) -> gaugeint::Result<Rational> {
        let bound = if self.exact {
            positive_lower_bound(&self.expr.eval_exact(t, self.eps.as_ref())?)
        } else {
            let v = self.expr.eval(t, self.eps.as_ref())?;
            (v.is_finite() && v > 0.0).then(|| Rational::from_f64(v * (1.0 - 1e-9))).flatten()
        };
        bound.filter(Rational::is_positive).ok_or_else(|| Error::NonPositiveGauge(t.clone()))
    }

    // Non-positive values are left to `radius`, which reports them.
    fn estimate(&self, t: &Tag) -> Option<f64> {
        self.expr.eval(t, self.eps.as_ref()).ok().filter(|v| v.is_finite() && *v > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Expr {
        parse_expr(s, false).unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(parse("x"), Expr::X);
        assert_eq!(
            parse("0.1 * x^2"),
            Expr::Bin(Op::Mul, Box::new(Expr::Num(Rational::new(1, 10))), Box::new(Expr::Pow(Box::new(Expr::X), 2)))
        );
        let e = parse("1/sqrt(x)");
        assert_eq!(e.eval(&Tag::int(4), None).unwrap(), 0.5);
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse("1 + 2*x^2 - -x");
        assert_eq!(e.eval(&Tag::int(3), None).unwrap(), 1.0 + 18.0 + 3.0);
        assert_eq!(parse("-x^2").eval(&Tag::int(3), None).unwrap(), -9.0);
        assert_eq!(parse("x^-1").eval(&Tag::int(4), None).unwrap(), 0.25);
        assert_eq!(parse("2e-1").eval(&Tag::zero(), None).unwrap(), 0.2);
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_expr("x + foo(1)", false).unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.message.contains("\"foo\"") && e.message.contains("known: x, sqrt2"));
        assert_eq!(parse_expr("(x", false).unwrap_err().offset, 2);
        assert_eq!(parse_expr("x x", false).unwrap_err().offset, 2);
        assert_eq!(parse_expr("  ", false).unwrap_err().offset, 2);
        assert!(parse_expr("eps * x", false).is_err());
        assert!(parse_expr("eps * x", true).is_ok());
        assert_eq!(parse_expr("builtin(nope)", false).unwrap_err().offset, 8);
    }

    #[test]
    fn exact_evaluation_and_guards() {
        let e = parse("piecewise(x - sqrt2/2, 1, 2)");
        assert!(e.is_exact());
        let half_sqrt2 = Tag::sqrt2().scale(&Rational::new(1, 2));
        assert_eq!(e.eval_exact(&half_sqrt2, None).unwrap(), Tag::int(2));
        assert_eq!(e.eval_exact(&Tag::ratio(7, 10), None).unwrap(), Tag::int(1));
        assert!(matches!(parse("1/x").eval(&Tag::zero(), None), Err(Error::Undefined { .. })));
        assert!(matches!(parse("1/x").eval_exact(&Tag::zero(), None), Err(Error::Undefined { .. })));
    }

    #[test]
    fn builtins_see_the_exact_tag() {
        let e = parse("builtin(dirichlet)");
        assert_eq!(e.eval(&Tag::ratio(1, 3), None).unwrap(), 1.0);
        assert_eq!(e.eval(&Tag::sqrt2().scale(&Rational::new(1, 2)), None).unwrap(), 0.0);
        assert!(!e.to_function().has_fast_path());
    }

    #[test]
    fn gauges_are_lower_bounds() {
        let g = parse_expr("eps * x^2 + 1/100", true).unwrap().to_gauge(Some(&Rational::new(1, 2)));
        assert_eq!(g.radius(&Tag::ratio(1, 2)).unwrap(), &Rational::new(1, 8) + &Rational::new(1, 100));
        let s = parse("sqrt(x)").to_gauge(None);
        let r = s.radius(&Tag::int(2)).unwrap();
        assert!(r.to_f64() <= std::f64::consts::SQRT_2 && r.to_f64() > 1.414);
        assert!(matches!(parse("x").to_gauge(None).radius(&Tag::zero()), Err(Error::NonPositiveGauge(_))));
    }
}
