//! A small expression language over `U(S^1)`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ('-' | '+') factor | atom
//! atom   := INT ['·' | '*'] atom? | 'I' | 'X' '(' INT ')' | 'S' '[' INT ';' pairs ']' | '(' expr ')'
//! pairs  := ( '(' INT ',' INT ')' (',' '(' INT ',' INT ')')* )?
//! ```
//!
//! `S[k0; (k1,m1), ...]` evaluates the sphere characteristic of
//! `R[k0,0] + R[k1,m1] + ...`. An integer literal is that multiple of `I`,
//! and `2·X(1)` (or `2X(1)`) is accepted so printed elements parse back.

use crate::error::{Error, Result};
use crate::euler::{sphere_characteristic, EulerRingElement, S1RepDecomposition};

pub fn evaluate(input: &str) -> Result<EulerRingElement> {
    let mut p = Parser {
        chars: input.char_indices().collect(),
        pos: 0,
        len: input.len(),
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |c| c.0)
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.offset(),
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.1.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{ch}`")))
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.1.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        digits.parse().map_err(|_| Error::Parse {
            position: self.chars[start].0,
            message: "integer out of range".into(),
        })
    }

    fn small(&mut self) -> Result<u32> {
        let at = self.offset();
        let v = self.integer()?;
        u32::try_from(v).map_err(|_| Error::Parse {
            position: at,
            message: "integer out of range".into(),
        })
    }

    fn expr(&mut self) -> Result<EulerRingElement> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<EulerRingElement> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<EulerRingElement> {
        if self.eat('-') {
            return self.factor()?.neg();
        }
        if self.eat('+') {
            return self.factor();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<EulerRingElement> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let at = self.offset();
                let n = i64::try_from(self.integer()?).map_err(|_| Error::Parse {
                    position: at,
                    message: "integer out of range".into(),
                })?;
                let scalar = EulerRingElement::from_unit(n);
                if self.eat('·') {
                    return scalar.mul(&self.atom()?);
                }
                match self.peek() {
                    Some('I' | 'X' | 'S' | '(') => scalar.mul(&self.atom()?),
                    _ => Ok(scalar),
                }
            }
            Some('I') => {
                self.pos += 1;
                Ok(EulerRingElement::one())
            }
            Some('X') => {
                self.pos += 1;
                self.expect('(')?;
                let at = self.offset();
                let m = self.small()?;
                if m == 0 {
                    return Err(Error::Parse {
                        position: at,
                        message: "generator weight must be >= 1".into(),
                    });
                }
                self.expect(')')?;
                EulerRingElement::generator(m, 1)
            }
            Some('S') => {
                self.pos += 1;
                self.expect('[')?;
                let k0 = self.small()?;
                self.expect(';')?;
                let mut terms = Vec::new();
                if self.peek() == Some('(') {
                    loop {
                        self.expect('(')?;
                        let k = self.small()?;
                        self.expect(',')?;
                        let m = self.small()?;
                        self.expect(')')?;
                        terms.push((k, m));
                        if !self.eat(',') {
                            break;
                        }
                    }
                }
                let at = self.offset();
                self.expect(']')?;
                let rep = S1RepDecomposition::new(k0, terms).map_err(|e| Error::Parse {
                    position: at,
                    message: e.to_string(),
                })?;
                sphere_characteristic(&rep)
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
