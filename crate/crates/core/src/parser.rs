//! Parser for human-written polynomial expressions in x and y.
//!
//! Grammar (documented verbatim in the CLI manual):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)*        (right-associative)
//! primary := integer | integer '/' integer | 'x' | 'y' | '(' expr ')'
//! exponent:= integer | '(' integer '/' integer ')'
//! ```
//!
//! Exponents are nonnegative integers, or parenthesized positive rationals on
//! x only, with denominators at most MAX_EXPONENT_DENOMINATOR. '/' is valid
//! only between integer literals. No implicit multiplication. Expansion to
//! the sparse normal form happens eagerly.

use crate::error::Error;
use crate::poly::Polynomial;
use crate::rat::{self, Rat};
use crate::Result;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Cap on fractional x-exponent denominators accepted from source text.
pub const MAX_EXPONENT_DENOMINATOR: u32 = 64;

/// Parse a source expression into a fully expanded canonical polynomial.
pub fn parse(src: &str) -> Result<Polynomial> {
    let mut p = Parser {
        bytes: src.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(Error::SyntaxError {
            pos: 0,
            expected: "nonempty expression".into(),
        });
    }
    let value = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(Error::SyntaxError {
            pos: p.pos,
            expected: "operator or end of input".into(),
        });
    }
    value.into_polynomial()
}

/// Render a polynomial in a form `parse` accepts (round-trip canonical form).
pub fn render(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, t) in p.terms().enumerate() {
        let neg = t.coeff.is_negative();
        let mag = rat::abs(&t.coeff);
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut parts: Vec<String> = Vec::new();
        if !mag.is_one() || (t.ax.is_zero() && t.by == 0) {
            parts.push(rat::rat_str(&mag));
        }
        if !t.ax.is_zero() {
            if t.ax.is_one() {
                parts.push("x".into());
            } else if rat::is_integer(&t.ax) {
                parts.push(format!("x^{}", t.ax.numer()));
            } else {
                parts.push(format!("x^({}/{})", t.ax.numer(), t.ax.denom()));
            }
        }
        if t.by > 0 {
            if t.by == 1 {
                parts.push("y".into());
            } else {
                parts.push(format!("y^{}", t.by));
            }
        }
        out.push_str(&parts.join("*"));
    }
    out
}

/// Intermediate value: either a rational scalar or an expanded polynomial.
/// Keeping scalars separate lets "3/2" parse as a rational literal while
/// "x/2" is rejected.
enum Value {
    Scalar(Rat),
    Poly(Polynomial),
}

impl Value {
    fn into_polynomial(self) -> crate::Result<Polynomial> {
        Ok(match self {
            Value::Scalar(c) => Polynomial::constant(c),
            Value::Poly(p) => p,
        })
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, b: u8, expected: &str) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::SyntaxError {
                pos: self.pos,
                expected: expected.into(),
            })
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = add_values(acc, rhs, false);
                }
                Some(b'-') => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = add_values(acc, rhs, true);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = mul_values(acc, rhs);
                }
                Some(b'/') => {
                    // '/' outside an integer literal pair involves a variable
                    // or a parenthesized expression.
                    return Err(Error::DivisionByVariable { pos: self.pos });
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Value> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.bump();
            let v = self.unary()?;
            return Ok(match v {
                Value::Scalar(c) => Value::Scalar(-c),
                Value::Poly(p) => Value::Poly(p.neg()),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Value> {
        let base_pos = {
            self.skip_ws();
            self.pos
        };
        let base = self.primary()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        // Collect the exponent chain and fold it right-associatively among
        // the literals: x^2^3 = x^(2^3).
        let mut exps: Vec<(Rat, usize)> = Vec::new();
        while self.peek() == Some(b'^') {
            self.bump();
            exps.push(self.exponent()?);
            self.skip_ws();
        }
        let mut total = exps.pop().expect("at least one exponent").0;
        while let Some((e, pos)) = exps.pop() {
            let Some(k) = rat::to_i64(&total).filter(|k| *k >= 0) else {
                return Err(Error::SyntaxError {
                    pos,
                    expected: "integer exponent in exponent tower".into(),
                });
            };
            total = rat::pow_u(&e, k as u32);
        }
        apply_exponent(base, total, base_pos)
    }

    fn exponent(&mut self) -> Result<(Rat, usize)> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.bump();
                self.skip_ws();
                let sign_pos = self.pos;
                let n = self.integer_literal()?;
                self.skip_ws();
                if self.peek() == Some(b'/') {
                    self.bump();
                    self.skip_ws();
                    let d_pos = self.pos;
                    let d = self.integer_literal()?;
                    if d.is_zero() {
                        return Err(Error::SyntaxError {
                            pos: d_pos,
                            expected: "nonzero denominator".into(),
                        });
                    }
                    self.expect(b')', "closing ')' after rational exponent")?;
                    let r = Rat::new(n, d);
                    if r.is_negative() || r.is_zero() {
                        return Err(Error::NegativeExponent { pos: sign_pos });
                    }
                    if *r.denom() > BigInt::from(MAX_EXPONENT_DENOMINATOR) {
                        return Err(Error::SyntaxError {
                            pos: d_pos,
                            expected: format!(
                                "exponent denominator at most {MAX_EXPONENT_DENOMINATOR}"
                            ),
                        });
                    }
                    Ok((r, start))
                } else {
                    self.expect(b')', "closing ')' after exponent")?;
                    if n.is_negative() {
                        return Err(Error::NegativeExponent { pos: sign_pos });
                    }
                    Ok((Rat::from(n), start))
                }
            }
            Some(b'-') => Err(Error::NegativeExponent { pos: self.pos }),
            Some(b) if b.is_ascii_digit() => {
                let n = self.integer_literal()?;
                Ok((Rat::from(n), start))
            }
            _ => Err(Error::SyntaxError {
                pos: self.pos,
                expected: "exponent: integer or '(p/q)'".into(),
            }),
        }
    }

    fn integer_literal(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        let neg = if self.peek() == Some(b'-') {
            self.bump();
            true
        } else {
            false
        };
        let digits_start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == digits_start {
            return Err(Error::SyntaxError {
                pos: start,
                expected: "integer".into(),
            });
        }
        let s = std::str::from_utf8(&self.bytes[digits_start..self.pos]).unwrap();
        let n: BigInt = s.parse().unwrap();
        Ok(if neg { -n } else { n })
    }

    fn primary(&mut self) -> Result<Value> {
        self.skip_ws();
        match self.peek() {
            Some(b'x') => {
                self.bump();
                Ok(Value::Poly(Polynomial::x()))
            }
            Some(b'y') => {
                self.bump();
                Ok(Value::Poly(Polynomial::y()))
            }
            Some(b'(') => {
                self.bump();
                let v = self.expr()?;
                self.expect(b')', "closing ')'")?;
                Ok(v)
            }
            Some(b) if b.is_ascii_digit() => {
                let n = self.integer_literal()?;
                // Rational literal p/q directly after an integer.
                let save = self.pos;
                self.skip_ws();
                if self.peek() == Some(b'/') {
                    let slash_pos = self.pos;
                    self.bump();
                    self.skip_ws();
                    match self.peek() {
                        Some(d) if d.is_ascii_digit() => {
                            let den_pos = self.pos;
                            let d = self.integer_literal()?;
                            if d.is_zero() {
                                return Err(Error::SyntaxError {
                                    pos: den_pos,
                                    expected: "nonzero denominator".into(),
                                });
                            }
                            return Ok(Value::Scalar(Rat::new(n, d)));
                        }
                        _ => {
                            return Err(Error::DivisionByVariable { pos: slash_pos });
                        }
                    }
                }
                self.pos = save;
                Ok(Value::Scalar(Rat::from(n)))
            }
            Some(_) => Err(Error::SyntaxError {
                pos: self.pos,
                expected: "'x', 'y', a number, '-' or '('".into(),
            }),
            None => Err(Error::SyntaxError {
                pos: self.pos,
                expected: "'x', 'y', a number, '-' or '('".into(),
            }),
        }
    }
}

fn add_values(a: Value, b: Value, subtract: bool) -> Value {
    let pa = match a {
        Value::Scalar(c) => Polynomial::constant(c),
        Value::Poly(p) => p,
    };
    let pb = match b {
        Value::Scalar(c) => Polynomial::constant(c),
        Value::Poly(p) => p,
    };
    Value::Poly(if subtract { pa.sub(&pb) } else { pa.add(&pb) })
}

fn mul_values(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Scalar(c), Value::Scalar(d)) => Value::Scalar(c * d),
        (Value::Scalar(c), Value::Poly(p)) | (Value::Poly(p), Value::Scalar(c)) => {
            Value::Poly(p.scale(&c))
        }
        (Value::Poly(p), Value::Poly(q)) => Value::Poly(p.mul(&q)),
    }
}

fn apply_exponent(base: Value, e: Rat, base_pos: usize) -> Result<Value> {
    if e.is_negative() {
        return Err(Error::NegativeExponent { pos: base_pos });
    }
    if let Some(k) = rat::to_i64(&e) {
        let k = u32::try_from(k).map_err(|_| Error::NegativeExponent { pos: base_pos })?;
        return Ok(match base {
            Value::Scalar(c) => Value::Scalar(rat::pow_u(&c, k)),
            Value::Poly(p) => Value::Poly(p.pow(k)),
        });
    }
    // Fractional exponent: only legal on the bare variable x.
    match base {
        Value::Poly(p) if p == Polynomial::x() => {
            Ok(Value::Poly(Polynomial::monomial(Rat::one(), e, 0)))
        }
        Value::Poly(p) if p == Polynomial::y() => {
            Err(Error::FractionalYExponent { pos: base_pos })
        }
        _ => Err(Error::SyntaxError {
            pos: base_pos,
            expected: "fractional exponents are allowed on x only".into(),
        }),
    }
}
