use std::fmt;

use super::ast::Formula;

fn label_text(a: &str) -> String {
    if !a.is_empty()
        && a.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '!' | '?'))
    {
        a.to_string()
    } else {
        format!("\"{a}\"")
    }
}

fn is_quantifier(f: &Formula) -> bool {
    matches!(
        f,
        Formula::ExistsFO(..)
            | Formula::ForallFO(..)
            | Formula::ExistsSO(..)
            | Formula::ForallSO(..)
    )
}

/// Operand of `!`, `&`, `|`: quantifiers are parenthesized so that their
/// bodies do not swallow the rest of the formula.
fn operand(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if is_quantifier(f) {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => out.write_str("true"),
            Formula::False => out.write_str("false"),
            Formula::LabelIs(x, a) => write!(out, "lab({x})={}", label_text(a)),
            Formula::DataEq { x, k, y, l } => write!(out, "d[{k}]({x})=d[{l}]({y})"),
            Formula::Rel(x, r, y) => write!(out, "{x} {r} {y}"),
            Formula::PosEq(x, y) => write!(out, "{x}={y}"),
            Formula::In(x, s) => write!(out, "{x} in {s}"),
            Formula::Not(f) => {
                out.write_str("!")?;
                operand(f, out)
            }
            Formula::Or(fs) | Formula::And(fs) => {
                let sep = if matches!(self, Formula::Or(_)) {
                    " | "
                } else {
                    " & "
                };
                out.write_str("(")?;
                for (i, f) in fs.iter().enumerate() {
                    if i > 0 {
                        out.write_str(sep)?;
                    }
                    operand(f, out)?;
                }
                out.write_str(")")
            }
            Formula::ExistsFO(v, f) => write!(out, "E {v}. {f}"),
            Formula::ForallFO(v, f) => write!(out, "A {v}. {f}"),
            Formula::ExistsSO(v, f) => write!(out, "E2 {v}. {f}"),
            Formula::ForallSO(v, f) => write!(out, "A2 {v}. {f}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse;

    #[test]
    fn roundtrip() {
        for src in [
            "E x. E y. (lab(x)=r & lab(y)=a & x cls1 y)",
            "A x. !(E y. y proc x)",
            "(lab(x)=\"a:{1}\" | (E x. x=x) | x in X)",
            "!!d[1](x)=d[2](x)",
            "(x lt y & true & false)",
        ] {
            let f = parse(src).unwrap();
            assert_eq!(f.to_string(), src);
            assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }
}
