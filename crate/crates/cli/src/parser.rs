//! Surface syntax for elements of the algebra.
//!
//! ```text
//! expr    := ('+' | '-')? term (('+' | '-') term)*
//! term    := factor ('*'? factor)*
//! factor  := primary trailer*
//! primary := number | 'i' | 'u' | 's' | 'u*' | 's*' | '(' expr ')'
//! trailer := '^*' | '^' integer
//! number  := digits ('.' digits)? ('/' digits)?
//! ```
//!
//! A `*` written directly after `u` or `s` is the adjoint, so `s*u` is
//! `s* u`; with a space, `s * u` is a product. This makes the printed
//! canonical form (`(3/2 - i) * u^2 s s*^3 u^-1`) parse back to itself.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qadic_core::qalgebra::{ExactCoeff, QElement, MAX_LEVEL};

/// Largest power accepted on a parenthesized group.
pub const MAX_GROUP_POWER: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: expected {}, found {}", self.offset, self.expected.join(" or "), self.found)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Scalar(ExactCoeff),
    U,
    S,
    UStar,
    SStar,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Adjoint(Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    pub fn eval(&self) -> QElement {
        match self {
            Expr::Scalar(c) => QElement::one().scale_exact(c),
            Expr::U => QElement::u(),
            Expr::S => QElement::s(),
            Expr::UStar => QElement::u_pow(-1),
            Expr::SStar => QElement::s_star(),
            Expr::Neg(e) => -e.eval(),
            Expr::Add(a, b) => &a.eval() + &b.eval(),
            Expr::Sub(a, b) => &a.eval() - &b.eval(),
            Expr::Mul(a, b) => &a.eval() * &b.eval(),
            Expr::Adjoint(e) => e.eval().adjoint(),
            Expr::Pow(e, n) if **e == Expr::U => QElement::u_pow(*n),
            Expr::Pow(e, n) if **e == Expr::UStar => QElement::u_pow(-*n),
            // the parser allows negative powers only on u and u*
            Expr::Pow(e, n) if *n < 0 => e.eval().adjoint().pow(n.unsigned_abs() as u32),
            Expr::Pow(e, n) => e.eval().pow(*n as u32),
        }
    }

    fn is_unitary_atom(&self) -> bool {
        matches!(self, Expr::U | Expr::UStar)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number(BigRational),
    I,
    U,
    S,
    UStar,
    SStar,
    Caret,
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(q) => format!("number {q}"),
            Tok::I => "'i'".into(),
            Tok::U => "'u'".into(),
            Tok::S => "'s'".into(),
            Tok::UStar => "'u*'".into(),
            Tok::SStar => "'s*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Star => "'*'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self, Tok::Number(_) | Tok::I | Tok::U | Tok::S | Tok::UStar | Tok::SStar | Tok::LParen)
    }
}

const FACTOR_START: &[&str] = &["number", "'i'", "'u'", "'s'", "'('"];

fn error(offset: usize, expected: &[&str], found: impl Into<String>) -> ParseError {
    ParseError { offset, expected: expected.iter().map(|s| s.to_string()).collect(), found: found.into() }
}

fn digits(src: &str, start: usize) -> usize {
    src[start..].bytes().take_while(u8::is_ascii_digit).count()
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let tok = match c {
            b'0'..=b'9' => {
                let (value, len) = lex_number(src, pos)?;
                pos += len;
                out.push((start, Tok::Number(value)));
                continue;
            }
            b'u' | b's' => {
                let starred = bytes.get(pos + 1) == Some(&b'*');
                pos += 1 + usize::from(starred);
                out.push((start, match (c, starred) {
                    (b'u', false) => Tok::U,
                    (b'u', true) => Tok::UStar,
                    (_, false) => Tok::S,
                    (_, true) => Tok::SStar,
                }));
                continue;
            }
            b'i' => Tok::I,
            b'^' => Tok::Caret,
            b'*' => Tok::Star,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = src[pos..].chars().next().unwrap_or('?');
                return Err(error(pos, &["number", "'i'", "'u'", "'s'", "operator"], format!("'{ch}'")));
            }
        };
        pos += 1;
        out.push((start, tok));
    }
    out.push((bytes.len(), Tok::End));
    Ok(out)
}

fn lex_number(src: &str, start: usize) -> Result<(BigRational, usize), ParseError> {
    let bytes = src.as_bytes();
    let mut pos = start + digits(src, start);
    let whole: BigInt = src[start..pos].parse().expect("ascii digits");
    let mut value = BigRational::from_integer(whole);
    if bytes.get(pos) == Some(&b'.') {
        let n = digits(src, pos + 1);
        if n == 0 {
            return Err(error(pos + 1, &["digit"], describe_char(src, pos + 1)));
        }
        let frac: BigInt = src[pos + 1..pos + 1 + n].parse().expect("ascii digits");
        value += BigRational::new(frac, BigInt::from(10).pow(n as u32));
        pos += 1 + n;
    }
    if bytes.get(pos) == Some(&b'/') {
        let n = digits(src, pos + 1);
        if n == 0 {
            return Err(error(pos + 1, &["digit"], describe_char(src, pos + 1)));
        }
        let den: BigInt = src[pos + 1..pos + 1 + n].parse().expect("ascii digits");
        if den.is_zero() {
            return Err(error(pos + 1, &["nonzero denominator"], "0"));
        }
        value /= BigRational::from_integer(den);
        pos += 1 + n;
    }
    Ok((value, pos - start))
}

fn describe_char(src: &str, pos: usize) -> String {
    src[pos..].chars().next().map(|c| format!("'{c}'")).unwrap_or_else(|| "end of input".into())
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail(&self, expected: &[&str]) -> ParseError {
        error(self.offset(), expected, self.peek().describe())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let negate = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let first = self.term()?;
        let mut acc = if negate { Expr::Neg(Box::new(first)) } else { first };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if *self.peek() == Tok::Star {
                self.bump();
            } else if !self.peek().starts_factor() {
                return Ok(acc);
            }
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            if *self.peek() == Tok::Star {
                self.bump();
                e = Expr::Adjoint(Box::new(e));
                continue;
            }
            let at = self.offset();
            let negative = *self.peek() == Tok::Minus;
            if negative {
                self.bump();
            }
            let num_at = self.offset();
            let n = match self.bump() {
                Tok::Number(q) if q.is_integer() => q.to_integer(),
                other => return Err(error(num_at, &["'*'", "integer"], other.describe())),
            };
            let n = i64::try_from(if negative { -n } else { n })
                .map_err(|_| error(at, &["exponent of moderate size"], "oversized exponent"))?;
            if n < 0 && !e.is_unitary_atom() {
                let what = if matches!(e, Expr::S | Expr::SStar) { "s is not invertible" } else { "not known to be unitary" };
                return Err(error(at, &["non-negative exponent"], format!("negative exponent ({what})")));
            }
            let limit = match e {
                Expr::S | Expr::SStar => MAX_LEVEL as i64,
                Expr::U | Expr::UStar => i64::from(u32::MAX),
                _ => MAX_GROUP_POWER,
            };
            if n.abs() > limit {
                return Err(error(at, &[&format!("exponent of at most {limit}")], n.to_string()));
            }
            e = Expr::Pow(Box::new(e), n);
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        Ok(match self.bump() {
            Tok::Number(q) => Expr::Scalar(Complex::new(q, BigRational::zero())),
            Tok::I => Expr::Scalar(Complex::new(BigRational::zero(), BigRational::one())),
            Tok::U => Expr::U,
            Tok::S => Expr::S,
            Tok::UStar => Expr::UStar,
            Tok::SStar => Expr::SStar,
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.fail(&["')'", "'+'", "'-'", "'*'", "factor"]));
                }
                self.bump();
                inner
            }
            other => return Err(error(at, FACTOR_START, other.describe())),
        })
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.fail(&["'+'", "'-'", "'*'", "factor", "end of input"]));
    }
    Ok(e)
}

/// Parses and evaluates to the canonical element.
pub fn parse_element(src: &str) -> Result<QElement, ParseError> {
    Ok(parse_expr(src)?.eval())
}
