//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?
//! base   := number | 'n' | 'pi' | 'u' '[' integer ']'
//!         | name '(' expr ')' | '(' expr ')' | '-' base
//! ```
//!
//! `number` is an integer or decimal literal; decimals parse to exact
//! rationals (`0.5` becomes `1/2`). `name` is one of `sin`, `cos`, `log`,
//! `abs`, `sqrt`, `exp`. `^` is right-associative, `+ - * /` associate left.
//! Trees are built through the folding constructors, so `1/3` lands as an
//! exact rational and printing an expression reparses to an equal tree.

use crate::expr::{Expr, Func};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function `{name}` at byte {pos}")]
    UnknownFunction { pos: usize, name: String },
    #[error("negative shift index at byte {pos}: u[{index}] is not allowed")]
    NegativeShiftIndex { pos: usize, index: i64 },
    #[error("numeric literal at byte {pos} does not fit an exact constant")]
    LiteralOverflow { pos: usize },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

/// Parse a complete expression; trailing input is an error.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

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

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    terms.push(Expr::neg(t));
                }
                _ => break,
            }
        }
        Ok(Expr::add(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = Expr::mul(vec![acc, f]);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = Expr::div(acc, f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.factor()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let inner = self.base()?;
                Ok(Expr::neg(inner))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.err(&format!("unexpected `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Result<(i64, u32), ParseError> {
        let start = self.pos;
        let mut value: i128 = 0;
        let mut count = 0u32;
        while let Some(c) = self.src.get(self.pos).copied() {
            if !c.is_ascii_digit() {
                break;
            }
            value = value * 10 + i128::from(c - b'0');
            if value > i64::MAX as i128 {
                return Err(ParseError::LiteralOverflow { pos: start });
            }
            count += 1;
            self.pos += 1;
        }
        if count == 0 {
            return Err(self.err("expected digits"));
        }
        Ok((value as i64, count))
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let (int_part, _) = self.digits()?;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let (frac, frac_digits) = self.digits()?;
            let mut den: i64 = 1;
            for _ in 0..frac_digits {
                den = den
                    .checked_mul(10)
                    .ok_or(ParseError::LiteralOverflow { pos: start })?;
            }
            let num = int_part
                .checked_mul(den)
                .and_then(|v| v.checked_add(frac))
                .ok_or(ParseError::LiteralOverflow { pos: start })?;
            return Ok(Expr::rational(num, den));
        }
        Ok(Expr::int(int_part))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while let Some(c) = self.src.get(self.pos).copied() {
            if !c.is_ascii_alphabetic() {
                break;
            }
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "n" => Ok(Expr::n()),
            "pi" => Ok(Expr::pi()),
            "u" => {
                self.expect(b'[')?;
                let negative = self.eat(b'-');
                let idx_pos = self.pos;
                let (k, _) = self.digits()?;
                self.expect(b']')?;
                if negative {
                    return Err(ParseError::NegativeShiftIndex {
                        pos: idx_pos,
                        index: -k,
                    });
                }
                Ok(Expr::u(k as usize))
            }
            _ => {
                if let Some(f) = Func::from_name(name) {
                    self.expect(b'(')?;
                    let arg = self.expr()?;
                    self.expect(b')')?;
                    Ok(Expr::call(f, arg))
                } else {
                    Err(ParseError::UnknownFunction {
                        pos: start,
                        name: name.to_string(),
                    })
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr as E;

    #[test]
    fn parses_rational_right_hand_side() {
        let e = parse("(u[1]+u[0])/(u[0]*u[1]+1)").unwrap();
        let num = E::add(vec![E::u(1), E::u(0)]);
        let den = E::add(vec![E::mul(vec![E::u(0), E::u(1)]), E::int(1)]);
        assert_eq!(e, E::div(num, den));
    }

    #[test]
    fn parses_alternating_sign_and_trig() {
        assert_eq!(parse("(-1)^n").unwrap(), E::pow(E::int(-1), E::n()));
        let e = parse("cos(n*pi/2)").unwrap();
        assert_eq!(e, E::cos(E::div(E::mul(vec![E::n(), E::pi()]), E::int(2))));
    }

    #[test]
    fn decimals_become_exact_rationals() {
        assert_eq!(parse("0.5").unwrap(), E::rational(1, 2));
        assert_eq!(parse("2.50").unwrap(), E::rational(5, 2));
    }

    #[test]
    fn power_is_right_associative_and_minus_binds_tight() {
        assert_eq!(
            parse("2^n^2").unwrap(),
            E::pow(E::int(2), E::pow(E::n(), E::int(2)))
        );
        // A leading minus attaches to the base, not the whole power.
        assert_eq!(
            parse("-u[0]^2").unwrap(),
            E::pow(E::neg(E::u(0)), E::int(2))
        );
    }

    #[test]
    fn rejects_unknown_function_with_position() {
        match parse("2+tan(n)") {
            Err(ParseError::UnknownFunction { pos, name }) => {
                assert_eq!(pos, 2);
                assert_eq!(name, "tan");
            }
            other => panic!("expected unknown function error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_shift_index() {
        match parse("u[-1]") {
            Err(ParseError::NegativeShiftIndex { index, .. }) => assert_eq!(index, -1),
            other => panic!("expected negative index error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_trailing_garbage_and_bad_syntax() {
        assert!(matches!(parse("1+"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("u[0] u[1]"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(1+2"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn catalog_formulas_round_trip() {
        for src in [
            "u[0]+u[1]+u[2]+u[3]",
            "(-1)^n*(-u[0]+u[1]-u[2]+u[3])",
            "sin(n*pi/2)*(u[2]-u[0])+cos(n*pi/2)*(u[3]-u[1])",
            "1/3*(n*u[0]+(n+1)*u[1]+(n+2)*u[2]+(n+3)*u[3])",
            "((1+sqrt(5))/2)^n*(u[0]^2-1)",
            "1/2*(u[0]^2-1)*log(abs((1-u[0])/(1+u[0])))",
            "n/(n+4)*u[0]",
            "4*(-1)^n/n",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let again = parse(&printed).unwrap();
            assert_eq!(e, again, "round trip failed for `{src}` via `{printed}`");
        }
    }
}
