//! Boolean formulas over an arbitrary atom type, shared by automaton guards
//! and global acceptance conditions.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bool<A> {
    True,
    False,
    Atom(A),
    Not(Box<Bool<A>>),
    Or(Vec<Bool<A>>),
    And(Vec<Bool<A>>),
}

impl<A> Bool<A> {
    pub fn atom(a: A) -> Self {
        Bool::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(b: Bool<A>) -> Self {
        match b {
            Bool::True => Bool::False,
            Bool::False => Bool::True,
            other => Bool::Not(Box::new(other)),
        }
    }

    /// Conjunction with trivial simplification of constants.
    pub fn and(parts: impl IntoIterator<Item = Bool<A>>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Bool::True => {}
                Bool::False => return Bool::False,
                Bool::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Bool::True,
            1 => out.pop().unwrap(),
            _ => Bool::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Bool<A>>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Bool::False => {}
                Bool::True => return Bool::True,
                Bool::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Bool::False,
            1 => out.pop().unwrap(),
            _ => Bool::Or(out),
        }
    }

    pub fn eval(&self, atom: &mut impl FnMut(&A) -> bool) -> bool {
        match self {
            Bool::True => true,
            Bool::False => false,
            Bool::Atom(a) => atom(a),
            Bool::Not(b) => !b.eval(atom),
            Bool::Or(bs) => bs.iter().any(|b| b.eval(atom)),
            Bool::And(bs) => bs.iter().all(|b| b.eval(atom)),
        }
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a A>) {
        match self {
            Bool::True | Bool::False => {}
            Bool::Atom(a) => out.push(a),
            Bool::Not(b) => b.collect_atoms(out),
            Bool::Or(bs) | Bool::And(bs) => bs.iter().for_each(|b| b.collect_atoms(out)),
        }
    }

    pub fn map<B>(&self, f: &mut impl FnMut(&A) -> Bool<B>) -> Bool<B> {
        match self {
            Bool::True => Bool::True,
            Bool::False => Bool::False,
            Bool::Atom(a) => f(a),
            Bool::Not(b) => Bool::Not(Box::new(b.map(f))),
            Bool::Or(bs) => Bool::Or(bs.iter().map(|b| b.map(f)).collect()),
            Bool::And(bs) => Bool::And(bs.iter().map(|b| b.map(f)).collect()),
        }
    }
}

/// Prints with `!`, `&`, `|`; compound operands are parenthesized.
impl<A: fmt::Display> fmt::Display for Bool<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand<A: fmt::Display>(b: &Bool<A>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match b {
                Bool::Or(_) | Bool::And(_) => write!(f, "({b})"),
                _ => write!(f, "{b}"),
            }
        }
        match self {
            Bool::True => f.write_str("true"),
            Bool::False => f.write_str("false"),
            Bool::Atom(a) => write!(f, "{a}"),
            Bool::Not(b) => {
                f.write_str("!")?;
                match **b {
                    Bool::Atom(_) | Bool::Or(_) | Bool::And(_) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Bool::Or(bs) | Bool::And(bs) => {
                let sep = if matches!(self, Bool::Or(_)) {
                    " | "
                } else {
                    " & "
                };
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    operand(b, f)?;
                }
                Ok(())
            }
        }
    }
}

/// Tokens of the small boolean concrete syntax shared by guards and global
/// conditions: `true false ! & | ( )` plus atom text delegated to a callback.
pub(crate) struct BoolParser<'a, A, F: FnMut(&str) -> Result<Bool<A>, String>> {
    src: &'a str,
    pos: usize,
    atom: F,
}

impl<'a, A, F: FnMut(&str) -> Result<Bool<A>, String>> BoolParser<'a, A, F> {
    /// Parses `src`; `atom` receives maximal runs of text that contain no
    /// boolean operator or parenthesis.
    pub(crate) fn parse(src: &'a str, atom: F) -> Result<Bool<A>, String> {
        let mut p = BoolParser { src, pos: 0, atom };
        let b = p.or()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(format!("unexpected `{}`", &p.src[p.pos..]));
        }
        Ok(b)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn or(&mut self) -> Result<Bool<A>, String> {
        let mut parts = vec![self.and()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Bool::Or(parts)
        })
    }

    fn and(&mut self) -> Result<Bool<A>, String> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some('&') {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Bool::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Bool<A>, String> {
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(Bool::Not(Box::new(self.unary()?)))
            }
            Some('(') => {
                self.pos += 1;
                let b = self.or()?;
                if self.peek() != Some(')') {
                    return Err("expected `)`".into());
                }
                self.pos += 1;
                Ok(b)
            }
            None => Err("unexpected end of condition".into()),
            Some(_) => {
                let rest = &self.src[self.pos..];
                let end = rest
                    .find(['!', '&', '|', '(', ')'])
                    .unwrap_or(rest.len());
                let text = rest[..end].trim();
                self.pos += end;
                match text {
                    "" => Err(format!("expected condition at `{rest}`")),
                    "true" => Ok(Bool::True),
                    "false" => Ok(Bool::False),
                    t => (self.atom)(t),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Bool<String>, String> {
        BoolParser::parse(s, |t: &str| Ok(Bool::Atom(t.to_string())))
    }

    #[test]
    fn precedence_and_printing() {
        let b = parse("a | b & !c").unwrap();
        assert_eq!(
            b,
            Bool::Or(vec![
                Bool::Atom("a".into()),
                Bool::And(vec![
                    Bool::Atom("b".into()),
                    Bool::Not(Box::new(Bool::Atom("c".into())))
                ])
            ])
        );
        assert_eq!(b.to_string(), "a | (b & !(c))");
        assert_eq!(parse(&b.to_string()).unwrap(), b);
    }

    #[test]
    fn constants_and_errors() {
        assert_eq!(parse("true").unwrap(), Bool::True);
        assert!(parse("!(false)").unwrap().eval(&mut |_| false));
        assert!(parse("a &").is_err());
        assert!(parse("(a").is_err());
    }

    #[test]
    fn smart_constructors_simplify() {
        assert_eq!(Bool::<u8>::and([]), Bool::True);
        assert_eq!(Bool::or([Bool::False, Bool::Atom(1u8)]), Bool::Atom(1));
        assert_eq!(Bool::and([Bool::Atom(1u8), Bool::False]), Bool::False);
    }
}
