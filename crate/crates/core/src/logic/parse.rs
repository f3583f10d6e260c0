//! Concrete syntax:
//!
//! ```text
//! f ::= E x,y. f | A x. f | E2 X. f | A2 X. f | f <-> f | f -> f | f | f | f & f | !f
//!     | true | false | lab(x)=a | d[k](x)=d[l](y) | x REL y | x = y | x in X | (f)
//! ```
//!
//! `REL` is a symbol name, `~k` (short for `clsk`) or `<` (short for `lt`).
//! Labels are bare (`[A-Za-z0-9_!?]+`) or double-quoted.

use thiserror::Error;

use super::ast::{Formula, ORDER_REL};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {}: {msg}", .pos + 1)]
    Syntax { pos: usize, msg: String },
    #[error("unknown relation symbol `{0}`")]
    UnknownRelation(String),
    #[error("data index {index} out of range 1..={m}")]
    DataIndex { index: usize, m: usize },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let f = p.formula()?;
    p.ws();
    if p.pos < p.src.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '!' | '?')
}

fn is_fo_var(v: &str) -> bool {
    v.starts_with(|c: char| c.is_ascii_lowercase())
}

fn is_so_var(v: &str) -> bool {
    v.starts_with(|c: char| c.is_ascii_uppercase())
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn peek_ident(&mut self) -> Option<&'a str> {
        self.ws();
        let rest = self.rest();
        if !rest.starts_with(is_ident_start) {
            return None;
        }
        let end = rest.find(|c| !is_ident_char(c)).unwrap_or(rest.len());
        Some(&rest[..end])
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek_ident() {
            Some(id) => {
                self.pos += id.len();
                Ok(id.to_string())
            }
            None => self.err("expected identifier"),
        }
    }

    fn fo_var(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        let v = self.ident()?;
        if !is_fo_var(&v) || is_keyword(&v) {
            self.pos = start;
            self.ws();
            return self.err(format!("`{v}` is not a first-order variable"));
        }
        Ok(v)
    }

    fn so_var(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        let v = self.ident()?;
        if !is_so_var(&v) || is_keyword(&v) {
            self.pos = start;
            self.ws();
            return self.err(format!("`{v}` is not a second-order variable"));
        }
        Ok(v)
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        self.ws();
        let rest = self.rest();
        let end = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        if end == 0 {
            return self.err("expected number");
        }
        let n = rest[..end]
            .parse()
            .or_else(|_| self.err("number too large"))?;
        self.pos += end;
        Ok(n)
    }

    fn quantifier(&mut self) -> Option<&'static str> {
        match self.peek_ident() {
            Some("E") => Some("E"),
            Some("A") => Some("A"),
            Some("E2") => Some("E2"),
            Some("A2") => Some("A2"),
            _ => None,
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if self.quantifier().is_some() {
            return self.quantified();
        }
        self.iff()
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let q = self.quantifier().unwrap();
        self.pos += q.len();
        let second = q.ends_with('2');
        let mut vars = vec![if second {
            self.so_var()?
        } else {
            self.fo_var()?
        }];
        while self.eat(",") {
            vars.push(if second {
                self.so_var()?
            } else {
                self.fo_var()?
            });
        }
        self.expect(".")?;
        let mut body = self.formula()?;
        for v in vars.into_iter().rev() {
            let b = Box::new(body);
            body = match q {
                "E" => Formula::ExistsFO(v, b),
                "A" => Formula::ForallFO(v, b),
                "E2" => Formula::ExistsSO(v, b),
                _ => Formula::ForallSO(v, b),
            };
        }
        Ok(body)
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let a = self.implication()?;
        if self.eat("<->") {
            let b = self.implication()?;
            return Ok(Formula::And(vec![
                Formula::implies(a.clone(), b.clone()),
                Formula::implies(b, a),
            ]));
        }
        Ok(a)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let a = self.disjunction()?;
        if self.eat("->") {
            let b = if self.quantifier().is_some() {
                self.quantified()?
            } else {
                self.implication()?
            };
            return Ok(Formula::implies(a, b));
        }
        Ok(a)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some('&') {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.quantifier().is_some() {
            return self.quantified();
        }
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some('(') => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(")")?;
                Ok(f)
            }
            None => self.err("unexpected end of formula"),
            Some(_) => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let Some(id) = self.peek_ident() else {
            return self.err("expected formula");
        };
        let after = &self.rest()[id.len()..];
        match id {
            "true" => {
                self.pos += 4;
                return Ok(Formula::True);
            }
            "false" => {
                self.pos += 5;
                return Ok(Formula::False);
            }
            "lab" if after.trim_start().starts_with('(') => {
                self.pos += 3;
                self.expect("(")?;
                let x = self.fo_var()?;
                self.expect(")")?;
                self.expect("=")?;
                let a = self.label()?;
                return Ok(Formula::LabelIs(x, a));
            }
            "d" if after.trim_start().starts_with('[') => {
                let (k, x) = self.data_term()?;
                self.expect("=")?;
                let (l, y) = self.data_term()?;
                return Ok(Formula::DataEq { x, k, y, l });
            }
            _ => {}
        }
        let x = self.fo_var()?;
        self.ws();
        if self.rest().starts_with("<->") || self.rest().starts_with("->") {
            return self.err("expected relation after variable");
        }
        if self.eat("=") {
            return Ok(Formula::PosEq(x, self.fo_var()?));
        }
        if self.eat("<") {
            return Ok(Formula::Rel(x, ORDER_REL.into(), self.fo_var()?));
        }
        if self.eat("~") {
            let k = self.number()?;
            return Ok(Formula::Rel(x, format!("cls{k}"), self.fo_var()?));
        }
        match self.peek_ident() {
            Some("in") => {
                self.pos += 2;
                Ok(Formula::In(x, self.so_var()?))
            }
            Some(rel) if !is_keyword(rel) => {
                self.pos += rel.len();
                Ok(Formula::Rel(x, rel.to_string(), self.fo_var()?))
            }
            _ => self.err("expected `=`, `in` or a relation symbol"),
        }
    }

    fn data_term(&mut self) -> Result<(usize, String), ParseError> {
        self.expect("d")?;
        self.expect("[")?;
        let k = self.number()?;
        if k == 0 {
            return self.err("data index must be at least 1");
        }
        self.expect("]")?;
        self.expect("(")?;
        let x = self.fo_var()?;
        self.expect(")")?;
        Ok((k, x))
    }

    fn label(&mut self) -> Result<String, ParseError> {
        self.ws();
        let rest = self.rest();
        if let Some(body) = rest.strip_prefix('"') {
            let Some(end) = body.find('"') else {
                return self.err("unterminated label string");
            };
            self.pos += end + 2;
            return Ok(body[..end].to_string());
        }
        let end = rest.find(|c| !is_label_char(c)).unwrap_or(rest.len());
        if end == 0 {
            return self.err("expected label");
        }
        self.pos += end;
        Ok(rest[..end].to_string())
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "E" | "A" | "E2" | "A2" | "in" | "true" | "false")
}

/// Checks relation names against `symbols`, data indices against `m` and
/// labels against `labels`.
pub fn check_against(
    f: &Formula,
    symbols: &[&str],
    labels: &[String],
    m: usize,
) -> Result<(), ParseError> {
    let mut err = None;
    f.visit(&mut |g| {
        if err.is_some() {
            return;
        }
        match g {
            Formula::Rel(_, r, _) if r != ORDER_REL && !symbols.contains(&r.as_str()) => {
                err = Some(ParseError::UnknownRelation(r.clone()))
            }
            Formula::DataEq { k, l, .. } => {
                for &idx in [k, l] {
                    if idx > m {
                        err = Some(ParseError::DataIndex { index: idx, m });
                    }
                }
            }
            Formula::LabelIs(_, a) if !labels.contains(a) => {
                err = Some(ParseError::UnknownLabel(a.clone()))
            }
            _ => {}
        }
    });
    err.map_or(Ok(()), Err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi1() {
        let f = parse("E x. E y. (lab(x)=r & lab(y)=a & x ~1 y)").unwrap();
        assert_eq!(
            f,
            Formula::exists(
                "x",
                Formula::exists(
                    "y",
                    Formula::And(vec![
                        Formula::label("x", "r"),
                        Formula::label("y", "a"),
                        Formula::rel("x", "cls1", "y"),
                    ])
                )
            )
        );
        assert!(f.is_sentence());
    }

    #[test]
    fn open_formula() {
        let f = parse("lab(x)=r").unwrap();
        assert_eq!(f.free_vars().0.into_iter().collect::<Vec<_>>(), vec!["x"]);
        assert!(!f.is_sentence());
    }

    #[test]
    fn precedence() {
        let f = parse("!lab(x)=a | lab(x)=b & x=y -> x < y").unwrap();
        let expected = Formula::implies(
            Formula::Or(vec![
                Formula::not(Formula::label("x", "a")),
                Formula::And(vec![
                    Formula::label("x", "b"),
                    Formula::PosEq("x".into(), "y".into()),
                ]),
            ]),
            Formula::rel("x", "lt", "y"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn multi_variable_quantifiers_and_sets() {
        let f = parse("E2 X, Y. A x,y. (x in X | y in Y)").unwrap();
        assert!(matches!(f, Formula::ExistsSO(ref v, _) if v == "X"));
        assert!(f.is_sentence());
    }

    #[test]
    fn labels_quoted_and_special() {
        assert_eq!(
            parse("lab(x)=! & lab(y)=\"r:{1,2}\"").unwrap(),
            Formula::And(vec![
                Formula::label("x", "!"),
                Formula::label("y", "r:{1,2}")
            ])
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse("E x. (lab(x)=r &") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 16),
            other => panic!("{other:?}"),
        }
        assert!(parse("E X. true").is_err());
        assert!(parse("x in y").is_err());
        assert!(parse("d[0](x)=d[1](x)").is_err());
    }

    #[test]
    fn check_against_signature() {
        let f = parse("E x. E y. x fork y & d[3](x)=d[1](x)").unwrap();
        let labels = vec!["r".to_string()];
        assert_eq!(
            check_against(&f, &["succ"], &labels, 1),
            Err(ParseError::UnknownRelation("fork".into()))
        );
        assert_eq!(
            check_against(&f, &["fork"], &labels, 2),
            Err(ParseError::DataIndex { index: 3, m: 2 })
        );
        assert!(check_against(&parse("E x. x lt x").unwrap(), &[], &labels, 1).is_ok());
    }
}
