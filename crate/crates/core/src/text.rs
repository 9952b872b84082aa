//! ASCII polynomial syntax.
//!
//! Input is a sum of terms such as `T^2+T+1`, `2*T+1` or `(g+1)*T + g`,
//! where `g` names the class of `x` in an extension field. Whitespace is
//! ignored. The reader also accepts products, parentheses and powers of
//! whole subexpressions. Output is canonical: descending degree, zero terms
//! omitted, coefficient 1 omitted on nonconstant terms.

use crate::error::{usage, Result};
use crate::field::{Elem, FieldSpec};
use crate::poly::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Var,
    Gen,
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str, var: char) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' => {
                let mut n: u64 = 0;
                while let Some(&d) = chars.peek() {
                    let Some(v) = d.to_digit(10) else { break };
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(u64::from(v)))
                        .ok_or_else(|| usage!("integer literal too large in {text:?}"))?;
                    chars.next();
                }
                out.push(Tok::Int(n));
            }
            _ => {
                chars.next();
                out.push(match c {
                    c if c == var => Tok::Var,
                    'g' => Tok::Gen,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    other => return Err(usage!("unexpected character {other:?} in {text:?}")),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    field: &'a FieldSpec,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn syntax(&self, what: &str) -> crate::Error {
        usage!("syntax error in {:?}: {what} at token {}", self.text, self.pos)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let negate = self.peek() == Some(Tok::Minus);
        if negate {
            self.bump();
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(Tok::Star) {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() != Some(Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Some(Tok::Int(e)) if e <= u64::from(u16::MAX) => Ok(base.pow(e as u32)),
            Some(Tok::Int(_)) => Err(usage!("exponent too large in {:?}", self.text)),
            _ => Err(self.syntax("expected an exponent")),
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let f = self.field;
        match self.bump() {
            Some(Tok::Int(n)) => {
                if n >= u64::from(f.p()) {
                    return Err(usage!("coefficient {n} out of range [0, {}) in {:?}", f.p(), self.text));
                }
                Ok(Polynomial::constant(f, f.from_int(n)))
            }
            Some(Tok::Var) => Ok(Polynomial::t(f)),
            Some(Tok::Gen) => {
                if f.is_prime_field() {
                    return Err(usage!("generator symbol 'g' used with the prime field F_{}", f.q()));
                }
                Ok(Polynomial::constant(f, f.generator_pow(1)))
            }
            Some(Tok::Open) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::Close) => Ok(inner),
                    _ => Err(self.syntax("expected ')'")),
                }
            }
            _ => Err(self.syntax("expected a term")),
        }
    }
}

fn parse_in(text: &str, field: &FieldSpec, var: char) -> Result<Polynomial> {
    let toks = tokenize(text, var)?;
    if toks.is_empty() {
        return Err(usage!("empty polynomial text"));
    }
    let mut parser = Parser { toks, pos: 0, field, text };
    let p = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.syntax("trailing input"));
    }
    Ok(p)
}

/// Parses a polynomial in `T` over `field`.
pub fn parse_poly(text: &str, field: &FieldSpec) -> Result<Polynomial> {
    parse_in(text, field, 'T')
}

/// Parses a modulus such as `x^2+x+2` into coefficients over F_p.
pub fn parse_modulus(text: &str, p: u32) -> Result<Vec<u8>> {
    let prime = FieldSpec::new(p)?;
    if !prime.is_prime_field() {
        return Err(usage!("modulus characteristic {p} is not prime"));
    }
    let var = if text.contains('x') { 'x' } else { 'T' };
    Ok(parse_in(text, &prime, var)?.coeffs().to_vec())
}

/// Canonical text of a field element: an integer in the prime subfield,
/// otherwise a sum of powers of `g`.
pub fn format_elem(field: &FieldSpec, c: Elem) -> String {
    if u32::from(c) < field.p() {
        return c.to_string();
    }
    let mut parts = Vec::new();
    for (i, d) in field.digits(c).into_iter().enumerate().rev() {
        match (i, d) {
            (_, 0) => {}
            (0, d) => parts.push(d.to_string()),
            (1, 1) => parts.push("g".to_string()),
            (1, d) => parts.push(format!("{d}*g")),
            (i, 1) => parts.push(format!("g^{i}")),
            (i, d) => parts.push(format!("{d}*g^{i}")),
        }
    }
    parts.join("+")
}

pub fn format_poly(p: &Polynomial) -> String {
    let f = p.field();
    if p.is_zero() {
        return "0".to_string();
    }
    let single = p.coeffs().iter().filter(|&&c| c != 0).count() == 1;
    let mut terms = Vec::new();
    for (i, &c) in p.coeffs().iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = format_elem(f, c);
        let compound = coef.contains('+');
        let mono = match i {
            0 => String::new(),
            1 => "T".to_string(),
            _ => format!("T^{i}"),
        };
        terms.push(match (i, c, compound) {
            (0, _, true) if !single => format!("({coef})"),
            (0, _, _) => coef,
            (_, 1, _) => mono,
            (_, _, true) => format!("({coef})*{mono}"),
            (_, _, false) => format!("{coef}*{mono}"),
        });
    }
    terms.join("+")
}
